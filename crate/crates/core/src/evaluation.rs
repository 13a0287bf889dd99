//! Accuracy reporting shared by every classifier, plus the two dummy
//! baselines (always-majority and class-frequency-weighted random guessing).

use std::fmt::Write as _;

use rand::Rng as _;

use crate::data::{class_counts, Dataset, Schema};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, derived_rng, rng_from_seed, stream};
use crate::tree::argmax_first;

pub trait Classifier: Sync {
    fn schema(&self) -> &Schema;

    fn predict(&self, x: &[f64]) -> Result<usize>;

    fn predict_rows(&self, data: &Dataset, rows: &[usize]) -> Result<Vec<usize>> {
        rows.iter().map(|&r| self.predict(data.row(r))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub class_names: Vec<String>,
    pub n_rows: usize,
    pub overall_accuracy: f64,
    /// Recall per actual class; `None` for classes absent from the rows.
    pub per_class_accuracy: Vec<Option<f64>>,
    /// `confusion[actual][predicted]`.
    pub confusion: Vec<Vec<usize>>,
}

pub fn evaluate<C: Classifier + ?Sized>(
    classifier: &C,
    data: &Dataset,
    rows: &[usize],
) -> Result<EvaluationReport> {
    if rows.is_empty() {
        return Err(Error::Input("cannot evaluate on zero rows".into()));
    }
    let predictions = classifier.predict_rows(data, rows)?;
    report_from_predictions(data, rows, &predictions)
}

/// Builds the report from already computed predictions (class indices of `data`).
pub fn report_from_predictions(
    data: &Dataset,
    rows: &[usize],
    predictions: &[usize],
) -> Result<EvaluationReport> {
    if rows.is_empty() {
        return Err(Error::Input("cannot evaluate on zero rows".into()));
    }
    let k = data.n_classes();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&r, &p) in rows.iter().zip(predictions) {
        if p >= k {
            return Err(Error::TaskMismatch(format!(
                "prediction {p} is not one of the dataset's {k} classes"
            )));
        }
        confusion[data.label(r)][p] += 1;
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class_accuracy = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let actual: usize = row.iter().sum();
            (actual > 0).then(|| row[c] as f64 / actual as f64)
        })
        .collect();
    Ok(EvaluationReport {
        class_names: data.schema().class_names.clone(),
        n_rows: rows.len(),
        overall_accuracy: correct as f64 / rows.len() as f64,
        per_class_accuracy,
        confusion,
    })
}

impl EvaluationReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "rows evaluated: {}", self.n_rows);
        let _ = writeln!(
            out,
            "overall accuracy: {:.2}%",
            100.0 * self.overall_accuracy
        );
        for (name, acc) in self.class_names.iter().zip(&self.per_class_accuracy) {
            match acc {
                Some(a) => {
                    let _ = writeln!(out, "  {name}: {:.2}%", 100.0 * a);
                }
                None => {
                    let _ = writeln!(out, "  {name}: n/a (no rows)");
                }
            }
        }
        out
    }

    /// `metric,class,value` rows followed by the confusion matrix as
    /// `confusion,<actual>,<predicted>=count` entries.
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["metric", "class", "value"])?;
        wtr.write_record(["rows", "", &self.n_rows.to_string()])?;
        wtr.write_record(["overall_accuracy", "", &self.overall_accuracy.to_string()])?;
        for (name, acc) in self.class_names.iter().zip(&self.per_class_accuracy) {
            let v = acc.map(|a| a.to_string()).unwrap_or_default();
            wtr.write_record(["class_accuracy", name, &v])?;
        }
        for (a, row) in self.confusion.iter().enumerate() {
            for (p, count) in row.iter().enumerate() {
                let label = format!("{}->{}", self.class_names[a], self.class_names[p]);
                wtr.write_record(["confusion", &label, &count.to_string()])?;
            }
        }
        let bytes = wtr
            .into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Always predicts the most frequent training class.
#[derive(Debug, Clone)]
pub struct MajorityClassifier {
    schema: Schema,
    class: usize,
}

impl MajorityClassifier {
    pub fn fit(data: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("cannot fit a baseline on zero rows".into()));
        }
        Ok(MajorityClassifier {
            schema: data.schema().clone(),
            class: argmax_first(&class_counts(data, rows)),
        })
    }

    pub fn class(&self) -> usize {
        self.class
    }
}

impl Classifier for MajorityClassifier {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn predict(&self, _x: &[f64]) -> Result<usize> {
        Ok(self.class)
    }
}

/// Guesses class `c` with probability equal to its training frequency.
/// Expected accuracy on rows with the same class mix is `sum_c p_c^2`.
#[derive(Debug, Clone)]
pub struct WeightedRandomClassifier {
    schema: Schema,
    proportions: Vec<f64>,
    seed: u64,
}

impl WeightedRandomClassifier {
    pub fn fit(data: &Dataset, rows: &[usize], seed: u64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("cannot fit a baseline on zero rows".into()));
        }
        let counts = class_counts(data, rows);
        let n = rows.len() as f64;
        Ok(WeightedRandomClassifier {
            schema: data.schema().clone(),
            proportions: counts.iter().map(|&c| c as f64 / n).collect(),
            seed,
        })
    }

    pub fn proportions(&self) -> &[f64] {
        &self.proportions
    }

    fn draw(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (c, p) in self.proportions.iter().enumerate() {
            acc += p;
            if u < acc {
                return c;
            }
        }
        // u landed in the rounding gap above the last cumulative sum.
        self.proportions
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(0)
    }
}

impl Classifier for WeightedRandomClassifier {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Deterministic in `(seed, x)`.
    fn predict(&self, x: &[f64]) -> Result<usize> {
        let key = x
            .iter()
            .fold(0u64, |h, v| derive_seed(h, stream::DUMMY, v.to_bits()));
        let mut rng = rng_from_seed(derive_seed(self.seed, stream::DUMMY, key));
        Ok(self.draw(rng.random::<f64>()))
    }

    /// One independent guess per row, drawn in row order from a single stream.
    fn predict_rows(&self, _data: &Dataset, rows: &[usize]) -> Result<Vec<usize>> {
        let mut rng = derived_rng(self.seed, stream::DUMMY, 0);
        Ok(rows.iter().map(|_| self.draw(rng.random::<f64>())).collect())
    }
}
