//! Variable importance for fitted forests.
//!
//! * Permutation decrease: for each tree, accuracy on the evaluation rows minus
//!   accuracy on the same rows with one predictor's column shuffled. A single
//!   shuffle per predictor (per repetition) is shared by all trees.
//! * Gini decrease: for each tree, the summed impurity decreases of the splits
//!   made on a predictor.
//!
//! Reports keep the full trees-by-predictors matrix so both the means and the
//! per-tree distributions (boxplots) can be exported.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::evaluation::Classifier;
use crate::forest::Forest;
use crate::seed::{derive_seed, rng_from_seed, stream};
use crate::tree::{Tree, TreeNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImportanceMethod {
    Permutation,
    Gini,
}

impl ImportanceMethod {
    pub fn name(&self) -> &'static str {
        match self {
            ImportanceMethod::Permutation => "permutation",
            ImportanceMethod::Gini => "gini",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub method: ImportanceMethod,
    /// `per_tree[t][j]`: decrease attributed to predictor `j` by tree `t`.
    pub per_tree: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub feature_names: Vec<String>,
    pub permutation_seed: Option<u64>,
    pub repetitions: usize,
    pub warnings: Vec<String>,
}

impl ImportanceReport {
    fn from_matrix(
        method: ImportanceMethod,
        per_tree: Vec<Vec<f64>>,
        feature_names: Vec<String>,
    ) -> Self {
        let m = feature_names.len();
        let t = per_tree.len().max(1) as f64;
        let mean = (0..m)
            .map(|j| per_tree.iter().map(|row| row[j]).sum::<f64>() / t)
            .collect();
        ImportanceReport {
            method,
            per_tree,
            mean,
            feature_names,
            permutation_seed: None,
            repetitions: 1,
            warnings: Vec::new(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.per_tree.iter().map(|row| row[j]).collect()
    }

    /// Standard error of each mean over trees (sample standard deviation / sqrt(T)).
    pub fn standard_errors(&self) -> Vec<f64> {
        let t = self.per_tree.len();
        (0..self.feature_names.len())
            .map(|j| {
                if t < 2 {
                    return 0.0;
                }
                let mean = self.mean[j];
                let var = self
                    .per_tree
                    .iter()
                    .map(|row| (row[j] - mean).powi(2))
                    .sum::<f64>()
                    / (t - 1) as f64;
                (var / t as f64).sqrt()
            })
            .collect()
    }

    /// Canonical export: `feature,mean,min,q1,median,q3,max` for the top `k` predictors.
    pub fn to_csv(&self, k: usize) -> Result<String> {
        let ranked = top_k(self, k)?;
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["feature", "mean", "min", "q1", "median", "q3", "max"])?;
        for r in &ranked {
            let s = &r.stats;
            wtr.write_record([
                r.name.clone(),
                r.mean.to_string(),
                s.min.to_string(),
                s.q1.to_string(),
                s.median.to_string(),
                s.q3.to_string(),
                s.max.to_string(),
            ])?;
        }
        let bytes = wtr
            .into_inner()
            .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn check_rows(forest: &Forest, data: &Dataset, rows: &[usize]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Input(
            "permutation importance needs at least one evaluation row".into(),
        ));
    }
    forest.schema().check_compatible(data.schema())
}

fn used_features(tree: &Tree) -> Vec<bool> {
    let mut used = vec![false; tree.n_features()];
    let mut stack = vec![tree.root()];
    while let Some(node) = stack.pop() {
        if let TreeNode::Internal {
            condition,
            left,
            right,
            ..
        } = node
        {
            used[condition.feature()] = true;
            stack.push(left);
            stack.push(right);
        }
    }
    used
}

fn correct_count(tree: &Tree, rows: &[Vec<f64>], labels: &[usize]) -> usize {
    rows.iter()
        .zip(labels)
        .filter(|(x, &y)| tree.predict_unchecked(x) == y)
        .count()
}

/// Per-tree accuracy decreases when column `feature` of `rows` is reordered by
/// `permutation` (row `i` receives the value of row `permutation[i]`).
pub fn decreases_for_permutation(
    forest: &Forest,
    data: &Dataset,
    rows: &[usize],
    feature: usize,
    permutation: &[usize],
) -> Result<Vec<f64>> {
    check_rows(forest, data, rows)?;
    if permutation.len() != rows.len() {
        return Err(Error::Input(format!(
            "permutation of length {} for {} rows",
            permutation.len(),
            rows.len()
        )));
    }
    let ctx = Context::new(forest, data, rows);
    Ok(ctx.decreases(feature, permutation))
}

struct Context<'a> {
    forest: &'a Forest,
    x: Vec<Vec<f64>>,
    y: Vec<usize>,
    baseline: Vec<usize>,
    used: Vec<Vec<bool>>,
}

impl<'a> Context<'a> {
    fn new(forest: &'a Forest, data: &Dataset, rows: &[usize]) -> Self {
        let x: Vec<Vec<f64>> = rows.iter().map(|&r| data.row(r).to_vec()).collect();
        let y: Vec<usize> = rows.iter().map(|&r| data.label(r)).collect();
        let baseline = forest
            .trees()
            .iter()
            .map(|t| correct_count(t, &x, &y))
            .collect();
        let used = forest.trees().iter().map(used_features).collect();
        Context {
            forest,
            x,
            y,
            baseline,
            used,
        }
    }

    fn decreases(&self, feature: usize, permutation: &[usize]) -> Vec<f64> {
        let n = self.x.len() as f64;
        let mut permuted = self.x.clone();
        for (i, &src) in permutation.iter().enumerate() {
            permuted[i][feature] = self.x[src][feature];
        }
        self.forest
            .trees()
            .iter()
            .enumerate()
            .map(|(t, tree)| {
                if !self.used[t][feature] {
                    return 0.0;
                }
                let after = correct_count(tree, &permuted, &self.y);
                (self.baseline[t] as f64 - after as f64) / n
            })
            .collect()
    }
}

/// Seed of the shuffle applied to `feature` in repetition `rep`.
pub fn permutation_seed_for(seed: u64, feature: usize, rep: usize) -> u64 {
    derive_seed(
        derive_seed(seed, stream::PERMUTATION, feature as u64),
        stream::PERMUTATION,
        rep as u64,
    )
}

pub fn permutation_importance(
    forest: &Forest,
    data: &Dataset,
    rows: &[usize],
    seed: u64,
) -> Result<ImportanceReport> {
    permutation_importance_repeated(forest, data, rows, seed, 1)
}

/// Permutation importance averaged over `repetitions` independent shuffles per predictor.
pub fn permutation_importance_repeated(
    forest: &Forest,
    data: &Dataset,
    rows: &[usize],
    seed: u64,
    repetitions: usize,
) -> Result<ImportanceReport> {
    check_rows(forest, data, rows)?;
    if repetitions < 1 {
        return Err(Error::Config("at least one permutation repetition is required".into()));
    }
    let ctx = Context::new(forest, data, rows);
    let m = data.n_features();
    let n = rows.len();
    let columns: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut acc = vec![0.0; forest.n_trees()];
            for rep in 0..repetitions {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut rng_from_seed(permutation_seed_for(seed, j, rep)));
                for (a, d) in acc.iter_mut().zip(ctx.decreases(j, &perm)) {
                    *a += d;
                }
            }
            acc.iter().map(|a| a / repetitions as f64).collect()
        })
        .collect();
    let per_tree = (0..forest.n_trees())
        .map(|t| columns.iter().map(|col| col[t]).collect())
        .collect();
    let mut report = ImportanceReport::from_matrix(
        ImportanceMethod::Permutation,
        per_tree,
        data.schema().feature_names.clone(),
    );
    report.permutation_seed = Some(seed);
    report.repetitions = repetitions;
    Ok(report)
}

pub fn gini_importance(forest: &Forest) -> ImportanceReport {
    let per_tree = forest.trees().iter().map(Tree::gini_decreases).collect();
    let schema = forest.schema();
    let mut report = ImportanceReport::from_matrix(
        ImportanceMethod::Gini,
        per_tree,
        schema.feature_names.clone(),
    );
    if schema.has_mixed_kinds() {
        report.warnings.push(
            "features mix continuous and categorical kinds; Gini decrease importance tends \
             to overstate continuous features, prefer permutation importance"
                .into(),
        );
    }
    report
}

/// Boxplot statistics of one per-tree column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data (the usual "type 7" rule).
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl BoxStats {
    pub fn from_values(values: &[f64]) -> BoxStats {
        if values.is_empty() {
            return BoxStats {
                min: 0.0,
                q1: 0.0,
                median: 0.0,
                q3: 0.0,
                max: 0.0,
            };
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.total_cmp(b));
        BoxStats {
            min: v[0],
            q1: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q3: quantile(&v, 0.75),
            max: v[v.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedFeature {
    pub index: usize,
    pub name: String,
    pub mean: f64,
    pub stats: BoxStats,
}

/// The `k` predictors with the largest mean decrease, ties by feature index.
pub fn top_k(report: &ImportanceReport, k: usize) -> Result<Vec<RankedFeature>> {
    let m = report.feature_names.len();
    if k < 1 || k > m {
        return Err(Error::Config(format!("top-k of {k} outside 1..={m}")));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| report.mean[b].total_cmp(&report.mean[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|j| RankedFeature {
            index: j,
            name: report.feature_names[j].clone(),
            mean: report.mean[j],
            stats: BoxStats::from_values(&report.column(j)),
        })
        .collect())
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Horizontal boxplots of the per-tree decreases, most important predictor on top.
pub fn boxplot_svg(ranked: &[RankedFeature], title: &str) -> String {
    const LABEL_W: f64 = 160.0;
    const PLOT_W: f64 = 520.0;
    const ROW_H: f64 = 26.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 40.0;
    let width = LABEL_W + PLOT_W + 30.0;
    let height = TOP + ROW_H * ranked.len() as f64 + BOTTOM;

    let mut lo = ranked.iter().map(|r| r.stats.min).fold(0.0f64, f64::min);
    let mut hi = ranked.iter().map(|r| r.stats.max).fold(0.0f64, f64::max);
    if hi - lo < 1e-12 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let sx = |v: f64| LABEL_W + (v - lo) / (hi - lo) * PLOT_W;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        width / 2.0,
        escape_xml(title)
    );
    let axis_y = TOP + ROW_H * ranked.len() as f64;
    let zero = sx(0.0);
    let _ = writeln!(
        s,
        r##"<line x1="{zero:.2}" y1="{TOP}" x2="{zero:.2}" y2="{axis_y}" stroke="#999" stroke-dasharray="4,3"/>"##
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LABEL_W}" y1="{axis_y}" x2="{}" y2="{axis_y}" stroke="black"/>"#,
        LABEL_W + PLOT_W
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let x = sx(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{axis_y}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle">{v:.4}</text>"#,
            axis_y + 5.0,
            axis_y + 18.0
        );
    }
    for (i, r) in ranked.iter().enumerate() {
        let cy = TOP + ROW_H * (i as f64 + 0.5);
        let b = &r.stats;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            LABEL_W - 8.0,
            cy + 4.0,
            escape_xml(&r.name)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{cy:.2}" x2="{:.2}" y2="{cy:.2}" stroke="black"/>"#,
            sx(b.min),
            sx(b.max)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#9ecae1" stroke="black"/>"##,
            sx(b.q1),
            cy - ROW_H * 0.3,
            (sx(b.q3) - sx(b.q1)).max(0.5),
            ROW_H * 0.6
        );
        let _ = writeln!(
            s,
            r#"<line x1="{m:.2}" y1="{:.2}" x2="{m:.2}" y2="{:.2}" stroke="black" stroke-width="2"/>"#,
            cy - ROW_H * 0.3,
            cy + ROW_H * 0.3,
            m = sx(b.median)
        );
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{cy:.2}" r="3" fill="red"/>"#,
            sx(r.mean)
        );
    }
    let _ = writeln!(s, "</svg>");
    s
}
