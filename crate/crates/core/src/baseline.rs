//! Linear benchmark classifiers: binary logistic regression and
//! reference-class multinomial logistic regression.
//!
//! Both minimize the average negative log-likelihood (plus an optional L2
//! penalty on non-intercept terms) by full-batch gradient descent with step
//! halving. Predictors are z-scored internally; reported coefficients are in
//! the original units.

use std::fmt::Write as _;

use crate::data::{class_counts, Dataset, Schema};
use crate::error::{Error, Result};
use crate::evaluation::Classifier;
use crate::forest::{parse_bool, read_schema, write_schema};
use crate::textfmt::{self, Record};

pub const INTERCEPT: &str = "(intercept)";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    /// Initial step size; halved whenever a step would raise the loss.
    pub learning_rate: f64,
    /// Zero returns the all-zero model.
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub l2_penalty: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            learning_rate: 1.0,
            max_iterations: 2000,
            gradient_tolerance: 1e-6,
            l2_penalty: 0.0,
        }
    }
}

impl TrainOptions {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !(self.gradient_tolerance > 0.0) {
            return Err(Error::Config(
                "learning rate and gradient tolerance must be positive".into(),
            ));
        }
        if !(self.l2_penalty >= 0.0) {
            return Err(Error::Config("l2 penalty must be non-negative".into()));
        }
        Ok(())
    }
}

/// Outcome of a gradient-descent run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitTrace {
    pub iterations: usize,
    pub converged: bool,
    /// Loss at the start and after every accepted step.
    pub losses: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn linear(beta: &[f64], x: &[f64]) -> f64 {
    beta[0] + beta[1..].iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
}

/// Average logistic negative log-likelihood and its gradient.
///
/// `x` is row-major with `m` columns, `y` holds 0/1 targets and `beta` is
/// `[intercept, b_1, .., b_m]`. The penalty `l2/2 * sum b_j^2` skips the intercept.
pub fn logistic_loss_grad(x: &[f64], m: usize, y: &[f64], beta: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let n = y.len();
    let mut loss = 0.0;
    let mut grad = vec![0.0; m + 1];
    for (i, &yi) in y.iter().enumerate() {
        let row = &x[i * m..(i + 1) * m];
        let z = linear(beta, row);
        loss += softplus(z) - yi * z;
        let r = sigmoid(z) - yi;
        grad[0] += r;
        for (g, v) in grad[1..].iter_mut().zip(row) {
            *g += r * v;
        }
    }
    let nf = n.max(1) as f64;
    loss /= nf;
    for g in &mut grad {
        *g /= nf;
    }
    for j in 1..=m {
        loss += 0.5 * l2 * beta[j] * beta[j];
        grad[j] += l2 * beta[j];
    }
    (loss, grad)
}

/// Average multinomial negative log-likelihood and its gradient.
///
/// `beta` holds `k - 1` rows of `m + 1` coefficients; class `k - 1` is the
/// reference with logit fixed at 0.
pub fn multinomial_loss_grad(
    x: &[f64],
    m: usize,
    y: &[usize],
    k: usize,
    beta: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let w = m + 1;
    let n = y.len();
    let mut loss = 0.0;
    let mut grad = vec![0.0; (k - 1) * w];
    let mut logits = vec![0.0; k];
    for (i, &yi) in y.iter().enumerate() {
        let row = &x[i * m..(i + 1) * m];
        for c in 0..k - 1 {
            logits[c] = linear(&beta[c * w..(c + 1) * w], row);
        }
        logits[k - 1] = 0.0;
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logits.iter().map(|z| (z - max).exp()).sum();
        let lse = max + sum.ln();
        loss += lse - logits[yi];
        for c in 0..k - 1 {
            let r = (logits[c] - lse).exp() - f64::from(u8::from(c == yi));
            let g = &mut grad[c * w..(c + 1) * w];
            g[0] += r;
            for (gj, v) in g[1..].iter_mut().zip(row) {
                *gj += r * v;
            }
        }
    }
    let nf = n.max(1) as f64;
    loss /= nf;
    for g in &mut grad {
        *g /= nf;
    }
    for c in 0..k - 1 {
        for j in 1..w {
            let b = beta[c * w + j];
            loss += 0.5 * l2 * b * b;
            grad[c * w + j] += l2 * b;
        }
    }
    (loss, grad)
}

/// Full-batch gradient descent with step halving; the loss never increases
/// across accepted steps.
fn descend<F>(f: F, dim: usize, options: &TrainOptions) -> Result<(Vec<f64>, FitTrace)>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut beta = vec![0.0; dim];
    let mut trace = FitTrace::default();
    if options.max_iterations == 0 {
        return Ok((beta, trace));
    }
    let (mut loss, mut grad) = f(&beta);
    if !loss.is_finite() {
        return Err(Error::Numeric {
            iteration: 0,
            message: format!("initial loss is {loss}"),
        });
    }
    trace.losses.push(loss);
    let mut lr = options.learning_rate;
    for iteration in 1..=options.max_iterations {
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::Numeric {
                iteration,
                message: format!("gradient norm is {norm}"),
            });
        }
        if norm <= options.gradient_tolerance {
            trace.converged = true;
            break;
        }
        let accepted = loop {
            let candidate: Vec<f64> = beta.iter().zip(&grad).map(|(b, g)| b - lr * g).collect();
            let (l, g) = f(&candidate);
            if l.is_finite() && l <= loss {
                break Some((candidate, l, g));
            }
            lr *= 0.5;
            if lr < 1e-30 {
                break None;
            }
        };
        let Some((candidate, l, g)) = accepted else {
            // No descent step exists at machine precision.
            trace.converged = true;
            break;
        };
        beta = candidate;
        loss = l;
        grad = g;
        trace.iterations = iteration;
        trace.losses.push(loss);
        lr *= 1.25;
    }
    Ok((beta, trace))
}

/// Column means and scales used to z-score predictors. Constant columns keep scale 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardizer {
    pub fn fit(data: &Dataset, rows: &[usize]) -> Standardizer {
        let m = data.n_features();
        let n = rows.len().max(1) as f64;
        let mut means = vec![0.0; m];
        for &r in rows {
            for (mu, v) in means.iter_mut().zip(data.row(r)) {
                *mu += v;
            }
        }
        for mu in &mut means {
            *mu /= n;
        }
        let mut scales = vec![0.0; m];
        for &r in rows {
            for ((s, v), mu) in scales.iter_mut().zip(data.row(r)).zip(&means) {
                *s += (v - mu) * (v - mu);
            }
        }
        for s in &mut scales {
            *s = (*s / n).sqrt();
            if !(*s > 1e-12) {
                *s = 1.0;
            }
        }
        Standardizer { means, scales }
    }

    pub fn transform(&self, data: &Dataset, rows: &[usize]) -> Vec<f64> {
        let mut out = Vec::with_capacity(rows.len() * self.means.len());
        for &r in rows {
            out.extend(
                data.row(r)
                    .iter()
                    .zip(self.means.iter().zip(&self.scales))
                    .map(|(v, (mu, s))| (v - mu) / s),
            );
        }
        out
    }

    /// Maps `[intercept, b_1..]` fitted on z-scores back to original units.
    pub fn unscale(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; beta.len()];
        let mut intercept = beta[0];
        for j in 0..self.means.len() {
            out[j + 1] = beta[j + 1] / self.scales[j];
            intercept -= beta[j + 1] * self.means[j] / self.scales[j];
        }
        out[0] = intercept;
        out
    }
}

fn check_width(schema: &Schema, x: &[f64]) -> Result<()> {
    if x.len() != schema.n_features() {
        return Err(Error::Input(format!(
            "feature vector has width {}, model expects {}",
            x.len(),
            schema.n_features()
        )));
    }
    Ok(())
}

fn check_training_rows(data: &Dataset, rows: &[usize]) -> Result<()> {
    let present = class_counts(data, rows).iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::DegenerateData(format!(
            "training rows contain {present} class(es); at least two are needed"
        )));
    }
    Ok(())
}

/// `P(class 1 | x) = exp(z) / (1 + exp(z))`, `z = b_0 + sum b_j x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    schema: Schema,
    /// `[intercept, b_1, .., b_m]` in original units.
    pub coefficients: Vec<f64>,
    pub trace: FitTrace,
}

impl LogisticModel {
    pub fn new(schema: Schema, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != schema.n_features() + 1 {
            return Err(Error::Input(format!(
                "{} coefficients for {} features",
                coefficients.len(),
                schema.n_features()
            )));
        }
        Ok(LogisticModel {
            schema,
            coefficients,
            trace: FitTrace::default(),
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        check_width(&self.schema, x)?;
        Ok(sigmoid(linear(&self.coefficients, x)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "logistic iterations={} converged={}",
            self.trace.iterations, self.trace.converged
        );
        write_schema(&self.schema, &mut out);
        let terms = std::iter::once(INTERCEPT).chain(self.schema.feature_names.iter().map(String::as_str));
        for (term, b) in terms.zip(&self.coefficients) {
            let _ = writeln!(out, "coef term={} value={}", textfmt::quote(term), textfmt::float(*b));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = textfmt::content_lines(text).peekable();
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::Schema("empty model file".into()))?;
        let header = Record::parse(header, line)?;
        header.expect_tag("logistic")?;
        let schema = read_schema(&mut lines)?;
        let coefficients = read_coefficients(&mut lines, &schema, None)?;
        let mut model = LogisticModel::new(schema, coefficients)?;
        model.trace.iterations = header.usize("iterations")?;
        model.trace.converged = parse_bool(header.get("converged")?, line)?;
        Ok(model)
    }
}

fn read_coefficients<'a, I>(lines: &mut I, schema: &Schema, class: Option<&str>) -> Result<Vec<f64>>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let terms = std::iter::once(INTERCEPT).chain(schema.feature_names.iter().map(String::as_str));
    let mut out = Vec::new();
    for term in terms {
        let (line, text) = lines
            .next()
            .ok_or_else(|| Error::Schema("coefficient table ends early".into()))?;
        let rec = Record::parse(text, line)?;
        rec.expect_tag("coef")?;
        if rec.get("term")? != term {
            return Err(textfmt::bad(line, format!("expected term {term:?}")));
        }
        if let Some(class) = class {
            if rec.get("class")? != class {
                return Err(textfmt::bad(line, format!("expected class {class:?}")));
            }
        }
        out.push(rec.f64("value")?);
    }
    Ok(out)
}

impl Classifier for LogisticModel {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Class 1 iff its probability is at least 0.5.
    fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(usize::from(self.predict_proba(x)? >= 0.5))
    }
}

pub fn fit_logistic(data: &Dataset, rows: &[usize], options: &TrainOptions) -> Result<LogisticModel> {
    options.validate()?;
    if data.n_classes() != 2 {
        return Err(Error::TaskMismatch(format!(
            "binary logistic regression needs exactly 2 classes, the data has {}; use the multinomial model",
            data.n_classes()
        )));
    }
    check_training_rows(data, rows)?;
    let m = data.n_features();
    let scaler = Standardizer::fit(data, rows);
    let x = scaler.transform(data, rows);
    let y: Vec<f64> = rows.iter().map(|&r| data.label(r) as f64).collect();
    let (beta, trace) = descend(
        |b| logistic_loss_grad(&x, m, &y, b, options.l2_penalty),
        m + 1,
        options,
    )?;
    let mut model = LogisticModel::new(data.schema().clone(), scaler.unscale(&beta))?;
    model.trace = trace;
    Ok(model)
}

/// Softmax over `k` classes with the last class as the zero-logit reference.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialModel {
    schema: Schema,
    /// `k` rows of `[intercept, b_1, .., b_m]`; the last row is all zeros.
    pub coefficients: Vec<Vec<f64>>,
    pub trace: FitTrace,
}

impl MultinomialModel {
    pub fn new(schema: Schema, coefficients: Vec<Vec<f64>>) -> Result<Self> {
        let w = schema.n_features() + 1;
        if coefficients.len() != schema.n_classes() || coefficients.iter().any(|r| r.len() != w) {
            return Err(Error::Input(format!(
                "coefficient table must be {} x {w}",
                schema.n_classes()
            )));
        }
        if coefficients
            .last()
            .is_some_and(|r| r.iter().any(|&b| b != 0.0))
        {
            return Err(Error::Input("reference class row must be all zeros".into()));
        }
        Ok(MultinomialModel {
            schema,
            coefficients,
            trace: FitTrace::default(),
        })
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_width(&self.schema, x)?;
        let logits: Vec<f64> = self.coefficients.iter().map(|b| linear(b, x)).collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
        let sum: f64 = exps.iter().sum();
        Ok(exps.into_iter().map(|e| e / sum).collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "multinomial iterations={} converged={} reference={}",
            self.trace.iterations,
            self.trace.converged,
            textfmt::quote(self.schema.class_names.last().map_or("", String::as_str))
        );
        write_schema(&self.schema, &mut out);
        for (class, row) in self.schema.class_names.iter().zip(&self.coefficients) {
            let terms = std::iter::once(INTERCEPT).chain(self.schema.feature_names.iter().map(String::as_str));
            for (term, b) in terms.zip(row) {
                let _ = writeln!(
                    out,
                    "coef class={} term={} value={}",
                    textfmt::quote(class),
                    textfmt::quote(term),
                    textfmt::float(*b)
                );
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = textfmt::content_lines(text).peekable();
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::Schema("empty model file".into()))?;
        let header = Record::parse(header, line)?;
        header.expect_tag("multinomial")?;
        let schema = read_schema(&mut lines)?;
        let coefficients = schema
            .class_names
            .iter()
            .map(|c| read_coefficients(&mut lines, &schema, Some(c)))
            .collect::<Result<Vec<_>>>()?;
        let mut model = MultinomialModel::new(schema, coefficients)?;
        model.trace.iterations = header.usize("iterations")?;
        model.trace.converged = parse_bool(header.get("converged")?, line)?;
        Ok(model)
    }
}

impl Classifier for MultinomialModel {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Most probable class, lowest index on ties.
    fn predict(&self, x: &[f64]) -> Result<usize> {
        let p = self.predict_proba(x)?;
        let mut best = 0;
        for (c, &v) in p.iter().enumerate() {
            if v > p[best] {
                best = c;
            }
        }
        Ok(best)
    }
}

pub fn fit_multinomial(
    data: &Dataset,
    rows: &[usize],
    options: &TrainOptions,
) -> Result<MultinomialModel> {
    options.validate()?;
    check_training_rows(data, rows)?;
    let m = data.n_features();
    let k = data.n_classes();
    let w = m + 1;
    let scaler = Standardizer::fit(data, rows);
    let x = scaler.transform(data, rows);
    let y: Vec<usize> = rows.iter().map(|&r| data.label(r)).collect();
    let (beta, trace) = descend(
        |b| multinomial_loss_grad(&x, m, &y, k, b, options.l2_penalty),
        (k - 1) * w,
        options,
    )?;
    let mut coefficients: Vec<Vec<f64>> = beta.chunks(w).map(|b| scaler.unscale(b)).collect();
    coefficients.push(vec![0.0; w]);
    let mut model = MultinomialModel::new(data.schema().clone(), coefficients)?;
    model.trace = trace;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_feature(xs: &[f64], ys: &[usize]) -> Dataset {
        let schema = Schema::new(vec!["x".into()], vec!["no".into(), "yes".into()]).unwrap();
        let rows = xs.iter().zip(ys).map(|(&x, &y)| (vec![x], y)).collect();
        Dataset::from_rows(schema, rows).unwrap()
    }

    fn schema(m: usize, k: usize) -> Schema {
        Schema::new(
            (0..m).map(|j| format!("f{j}")).collect(),
            (0..k).map(|c| format!("c{c}")).collect(),
        )
        .unwrap()
    }

    #[test]
    fn logit_probability_examples() {
        let zero = LogisticModel::new(schema(1, 2), vec![0.0, 0.0]).unwrap();
        assert_eq!(zero.predict_proba(&[12.0]).unwrap(), 0.5);
        let slope = LogisticModel::new(schema(1, 2), vec![0.0, 1.0]).unwrap();
        assert_eq!(slope.predict_proba(&[0.0]).unwrap(), 0.5);
        assert!((slope.predict_proba(&[3f64.ln()]).unwrap() - 0.75).abs() < 1e-12);
        assert!(matches!(slope.predict_proba(&[1.0, 2.0]), Err(Error::Input(_))));
        // Extreme logits stay finite.
        assert_eq!(slope.predict_proba(&[-800.0]).unwrap(), 0.0);
        assert_eq!(slope.predict_proba(&[800.0]).unwrap(), 1.0);
    }

    #[test]
    fn softmax_examples() {
        let uniform = MultinomialModel::new(schema(2, 4), vec![vec![0.0; 3]; 4]).unwrap();
        for p in uniform.predict_proba(&[1.0, -2.0]).unwrap() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        let beta = vec![0.3, -1.2, 0.7];
        let multi = MultinomialModel::new(schema(2, 2), vec![beta.clone(), vec![0.0; 3]]).unwrap();
        let logit = LogisticModel::new(schema(2, 2), beta).unwrap();
        let x = [0.4, 2.5];
        let p_multi = multi.predict_proba(&x).unwrap()[0];
        assert!((p_multi - logit.predict_proba(&x).unwrap()).abs() < 1e-15);

        let dominant = MultinomialModel::new(
            schema(1, 3),
            vec![vec![0.0, 50.0], vec![0.0, 0.0], vec![0.0, 0.0]],
        )
        .unwrap();
        assert!(dominant.predict_proba(&[1.0]).unwrap()[0] > 0.999);
    }

    #[test]
    fn separable_toy_set_is_learned() {
        let d = one_feature(&[-2.0, -1.0, 1.0, 2.0], &[0, 0, 1, 1]);
        let model = fit_logistic(&d, &d.all_rows(), &TrainOptions::default()).unwrap();
        for r in 0..4 {
            assert_eq!(model.predict(d.row(r)).unwrap(), d.label(r));
        }
    }

    #[test]
    fn intercept_only_matches_base_rate() {
        let schema = Schema::new(vec![], vec!["no".into(), "yes".into()]).unwrap();
        let rows = (0..100).map(|i| (vec![], usize::from(i < 68))).collect();
        let d = Dataset::from_rows(schema, rows).unwrap();
        let model = fit_logistic(&d, &d.all_rows(), &TrainOptions::default()).unwrap();
        assert!((model.predict_proba(&[]).unwrap() - 0.68).abs() < 0.01);
        assert!(model.trace.converged);
    }

    #[test]
    fn zero_iterations_gives_zero_model() {
        let d = one_feature(&[-2.0, -1.0, 1.0, 2.0], &[0, 0, 1, 1]);
        let options = TrainOptions {
            max_iterations: 0,
            ..Default::default()
        };
        let model = fit_logistic(&d, &d.all_rows(), &options).unwrap();
        assert_eq!(model.coefficients, vec![0.0, 0.0]);
        assert_eq!(model.predict_proba(&[5.0]).unwrap(), 0.5);
    }

    #[test]
    fn single_class_is_degenerate() {
        let d = one_feature(&[1.0, 2.0, 3.0], &[1, 1, 1]);
        assert!(matches!(
            fit_logistic(&d, &d.all_rows(), &TrainOptions::default()),
            Err(Error::DegenerateData(_))
        ));
        assert!(matches!(
            fit_multinomial(&d, &d.all_rows(), &TrainOptions::default()),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn logistic_on_three_classes_is_a_mismatch() {
        let s = schema(1, 3);
        let d = Dataset::from_rows(s, vec![(vec![0.0], 0), (vec![1.0], 1), (vec![2.0], 2)]).unwrap();
        assert!(matches!(
            fit_logistic(&d, &d.all_rows(), &TrainOptions::default()),
            Err(Error::TaskMismatch(_))
        ));
    }

    #[test]
    fn non_finite_features_fail_numerically() {
        let d = one_feature(&[1.0, f64::INFINITY, 3.0], &[0, 1, 0]);
        assert!(matches!(
            fit_logistic(&d, &d.all_rows(), &TrainOptions::default()),
            Err(Error::Numeric { .. })
        ));
    }

    #[test]
    fn loss_never_increases() {
        let xs: Vec<f64> = (0..60).map(|i| (i as f64 * 0.7).sin() * 3.0).collect();
        let ys: Vec<usize> = (0..60).map(|i| usize::from((i * 13) % 7 < 3)).collect();
        let d = one_feature(&xs, &ys);
        let options = TrainOptions {
            learning_rate: 50.0,
            max_iterations: 200,
            ..Default::default()
        };
        let model = fit_logistic(&d, &d.all_rows(), &options).unwrap();
        assert!(model.trace.losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn multinomial_learns_three_bands() {
        let s = schema(1, 3);
        let rows = (0..90)
            .map(|i| {
                let x = i as f64;
                (vec![x], (i / 30) as usize)
            })
            .collect();
        let d = Dataset::from_rows(s, rows).unwrap();
        let model = fit_multinomial(&d, &d.all_rows(), &TrainOptions::default()).unwrap();
        let correct = (0..90)
            .filter(|&r| model.predict(d.row(r)).unwrap() == d.label(r))
            .count();
        assert!(correct >= 85, "{correct} of 90");
        assert!(model.coefficients[2].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn standardization_preserves_probabilities() {
        let s = schema(2, 2);
        let rows = (0..20)
            .map(|i| (vec![i as f64 * 0.3 + 2.0, 100.0 - i as f64 * 4.0], i % 2))
            .collect();
        let d = Dataset::from_rows(s.clone(), rows).unwrap();
        let rows = d.all_rows();
        let scaler = Standardizer::fit(&d, &rows);
        let z = scaler.transform(&d, &rows);
        let beta = [0.4, -1.3, 0.8];
        let raw = LogisticModel::new(s, scaler.unscale(&beta)).unwrap();
        for (i, &r) in rows.iter().enumerate() {
            let p_std = sigmoid(linear(&beta, &z[i * 2..i * 2 + 2]));
            assert!((p_std - raw.predict_proba(d.row(r)).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn text_round_trip() {
        let d = one_feature(&[-2.0, -1.0, 0.5, 1.0, 2.0], &[0, 0, 1, 1, 1]);
        let model = fit_logistic(&d, &d.all_rows(), &TrainOptions::default()).unwrap();
        let back = LogisticModel::from_text(&model.to_text()).unwrap();
        assert_eq!(back.coefficients, model.coefficients);

        let multi = fit_multinomial(&d, &d.all_rows(), &TrainOptions::default()).unwrap();
        let back = MultinomialModel::from_text(&multi.to_text()).unwrap();
        assert_eq!(back.coefficients, multi.coefficients);
        assert_eq!(back.to_text(), multi.to_text());
    }
}
