//! Dataset representation, CSV persistence, train/validation/test splitting
//! and the seeded row-sampling primitives shared by every learner.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{derived_rng, round_half_up, rng_from_seed, stream};

/// Header suffix marking a categorical column in dataset CSV files.
pub const CATEGORICAL_SUFFIX: &str = "@cat";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    /// Values are category codes; splits are subset tests.
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClassLabel {
    pub index: usize,
    pub name: String,
}

/// Feature and class naming shared by a dataset and every model fitted on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub feature_names: Vec<String>,
    pub feature_kinds: Vec<FeatureKind>,
    pub class_names: Vec<String>,
}

impl Schema {
    pub fn new(feature_names: Vec<String>, class_names: Vec<String>) -> Result<Self> {
        let kinds = vec![FeatureKind::Continuous; feature_names.len()];
        Self::with_kinds(feature_names, kinds, class_names)
    }

    pub fn with_kinds(
        feature_names: Vec<String>,
        feature_kinds: Vec<FeatureKind>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if feature_kinds.len() != feature_names.len() {
            return Err(Error::Schema(format!(
                "{} feature kinds for {} features",
                feature_kinds.len(),
                feature_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate feature name {name:?}")));
            }
        }
        let mut seen = HashSet::new();
        for name in &class_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Schema(format!("duplicate class name {name:?}")));
            }
        }
        Ok(Schema {
            feature_names,
            feature_kinds,
            class_names,
        })
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    pub fn has_mixed_kinds(&self) -> bool {
        let categorical = self
            .feature_kinds
            .iter()
            .filter(|k| **k == FeatureKind::Categorical)
            .count();
        categorical > 0 && categorical < self.feature_kinds.len()
    }

    /// Errors unless `other` has the same features and classes, in the same order.
    pub fn check_compatible(&self, other: &Schema) -> Result<()> {
        if self.feature_names != other.feature_names {
            return Err(Error::TaskMismatch(format!(
                "feature columns differ ({} vs {} features)",
                self.n_features(),
                other.n_features()
            )));
        }
        if self.class_names != other.class_names {
            return Err(Error::TaskMismatch(format!(
                "class sets differ: [{}] vs [{}]",
                self.class_names.join(", "),
                other.class_names.join(", ")
            )));
        }
        Ok(())
    }
}

/// Dense row-major table of `n` rows by `m` features plus one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    values: Vec<f64>,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(schema: Schema, values: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        let m = schema.n_features();
        if values.len() != labels.len() * m {
            return Err(Error::Input(format!(
                "{} values do not fill {} rows of width {m}",
                values.len(),
                labels.len()
            )));
        }
        let k = schema.n_classes();
        if let Some((row, &bad)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::Input(format!(
                "row {row}: label index {bad} out of range for {k} classes"
            )));
        }
        Ok(Dataset {
            schema,
            values,
            labels,
        })
    }

    /// Builds a dataset from explicit rows.
    pub fn from_rows(schema: Schema, rows: Vec<(Vec<f64>, usize)>) -> Result<Self> {
        let m = schema.n_features();
        let mut values = Vec::with_capacity(rows.len() * m);
        let mut labels = Vec::with_capacity(rows.len());
        for (i, (x, y)) in rows.into_iter().enumerate() {
            if x.len() != m {
                return Err(Error::Input(format!(
                    "row {i} has width {}, expected {m}",
                    x.len()
                )));
            }
            values.extend(x);
            labels.push(y);
        }
        Dataset::new(schema, values, labels)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.schema.n_features()
    }

    pub fn n_classes(&self) -> usize {
        self.schema.n_classes()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.n_features();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.values[row * self.n_features() + feature]
    }

    pub fn label(&self, row: usize) -> usize {
        self.labels[row]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_label(&self, index: usize) -> ClassLabel {
        ClassLabel {
            index,
            name: self.schema.class_names[index].clone(),
        }
    }

    pub fn all_rows(&self) -> Vec<usize> {
        (0..self.n_rows()).collect()
    }

    /// Copy of the dataset with different feature kinds.
    pub fn with_feature_kinds(&self, kinds: Vec<FeatureKind>) -> Result<Self> {
        let schema = Schema::with_kinds(
            self.schema.feature_names.clone(),
            kinds,
            self.schema.class_names.clone(),
        )?;
        Dataset::new(schema, self.values.clone(), self.labels.clone())
    }

    pub fn read_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file)
    }

    /// Reads a `label,<feature>...` CSV. Class names are the sorted distinct labels;
    /// a `@cat` suffix on a feature header marks a categorical column.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("label") {
            return Err(Error::Schema(
                "first column of a dataset file must be `label`".into(),
            ));
        }
        let mut feature_names = Vec::new();
        let mut feature_kinds = Vec::new();
        for h in headers.iter().skip(1) {
            match h.strip_suffix(CATEGORICAL_SUFFIX) {
                Some(name) => {
                    feature_names.push(name.to_string());
                    feature_kinds.push(FeatureKind::Categorical);
                }
                None => {
                    feature_names.push(h.to_string());
                    feature_kinds.push(FeatureKind::Continuous);
                }
            }
        }
        let m = feature_names.len();
        let mut raw_labels = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let line = i + 2;
            if rec.len() != m + 1 {
                return Err(Error::Schema(format!(
                    "line {line}: {} fields, expected {}",
                    rec.len(),
                    m + 1
                )));
            }
            raw_labels.push(rec[0].to_string());
            for (j, field) in rec.iter().skip(1).enumerate() {
                let v: f64 = field.trim().parse().map_err(|_| {
                    Error::Schema(format!(
                        "line {line}, column {:?}: cannot parse {field:?} as a number",
                        feature_names[j]
                    ))
                })?;
                values.push(v);
            }
        }
        let class_names: Vec<String> = raw_labels
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let lookup: BTreeMap<&str, usize> = class_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let labels = raw_labels.iter().map(|l| lookup[l.as_str()]).collect();
        let schema = Schema::with_kinds(feature_names, feature_kinds, class_names)?;
        Dataset::new(schema, values, labels)
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["label".to_string()];
        for (name, kind) in self
            .schema
            .feature_names
            .iter()
            .zip(&self.schema.feature_kinds)
        {
            match kind {
                FeatureKind::Continuous => header.push(name.clone()),
                FeatureKind::Categorical => header.push(format!("{name}{CATEGORICAL_SUFFIX}")),
            }
        }
        wtr.write_record(&header)?;
        for i in 0..self.n_rows() {
            let mut rec = Vec::with_capacity(self.n_features() + 1);
            rec.push(self.schema.class_names[self.labels[i]].clone());
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
        Ok(())
    }
}

/// Number of rows of each class among `rows`.
pub fn class_counts(data: &Dataset, rows: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; data.n_classes()];
    for &r in rows {
        counts[data.label(r)] += 1;
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl SplitIndices {
    pub fn part(&self, name: &str) -> Result<&[usize]> {
        match name {
            "train" => Ok(&self.train),
            "validation" | "val" => Ok(&self.validation),
            "test" => Ok(&self.test),
            other => Err(Error::Config(format!(
                "unknown split part {other:?} (expected train, validation or test)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        for (name, r) in [("train", train), ("validation", validation), ("test", test)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Config(format!(
                    "{name} ratio {r} must lie strictly between 0 and 1"
                )));
            }
        }
        let total = train + validation + test;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("split ratios sum to {total}, not 1")));
        }
        Ok(SplitRatios {
            train,
            validation,
            test,
        })
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        SplitRatios {
            train: 0.90,
            validation: 0.05,
            test: 0.05,
        }
    }
}

/// Partitions all rows into train/validation/test.
///
/// Each class (or the whole table when `stratify` is false) is shuffled with its
/// own derived stream. Validation and test totals are `round(ratio * n)` over
/// the eligible rows; the per-class shares are apportioned by largest remainder
/// so each class lands within one row of its exact quota. Classes with fewer
/// than three rows go entirely to train, with a warning.
pub fn stratified_split(
    data: &Dataset,
    ratios: SplitRatios,
    seed: u64,
    stratify: bool,
) -> Result<SplitIndices> {
    if data.is_empty() {
        return Err(Error::Input("cannot split an empty dataset".into()));
    }
    let groups: Vec<Vec<usize>> = if stratify {
        let mut g = vec![Vec::new(); data.n_classes()];
        for r in 0..data.n_rows() {
            g[data.label(r)].push(r);
        }
        g
    } else {
        vec![data.all_rows()]
    };

    let mut warnings = Vec::new();
    let mut eligible = Vec::new();
    let mut train = Vec::new();
    for (g, rows) in groups.iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        if rows.len() < 3 {
            let what = if stratify {
                format!("class {:?}", data.schema().class_names[g])
            } else {
                "dataset".to_string()
            };
            warnings.push(format!(
                "{what} has only {} row(s); assigned to train",
                rows.len()
            ));
            train.extend_from_slice(rows);
        } else {
            eligible.push(g);
        }
    }

    let n_eligible: usize = eligible.iter().map(|&g| groups[g].len()).sum();
    let sizes: Vec<usize> = eligible.iter().map(|&g| groups[g].len()).collect();
    let val_total = round_half_up(ratios.validation * n_eligible as f64);
    let test_total = round_half_up(ratios.test * n_eligible as f64);
    let val_counts = apportion(&sizes, ratios.validation, val_total, &vec![0; sizes.len()]);
    let test_counts = apportion(&sizes, ratios.test, test_total, &val_counts);

    let mut validation = Vec::new();
    let mut test = Vec::new();
    for (slot, &g) in eligible.iter().enumerate() {
        let mut rows = groups[g].clone();
        let mut rng = derived_rng(seed, stream::SPLIT, g as u64);
        rows.shuffle(&mut rng);
        let (v, rest) = rows.split_at(val_counts[slot]);
        let (t, tr) = rest.split_at(test_counts[slot]);
        validation.extend_from_slice(v);
        test.extend_from_slice(t);
        train.extend_from_slice(tr);
    }
    train.sort_unstable();
    validation.sort_unstable();
    test.sort_unstable();
    Ok(SplitIndices {
        train,
        validation,
        test,
        warnings,
    })
}

/// Largest-remainder apportionment of `total` units across groups with quotas
/// `ratio * size`, never taking a group's count (plus `taken`) to its full size.
fn apportion(sizes: &[usize], ratio: f64, total: usize, taken: &[usize]) -> Vec<usize> {
    let quotas: Vec<f64> = sizes.iter().map(|&s| ratio * s as f64).collect();
    let mut counts: Vec<usize> = quotas
        .iter()
        .zip(sizes.iter().zip(taken))
        .map(|(&q, (&s, &t))| (q.floor() as usize).min(s.saturating_sub(t + 1)))
        .collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let mut assigned: usize = counts.iter().sum();
    for &g in &order {
        if assigned >= total {
            break;
        }
        if counts[g] + taken[g] + 1 < sizes[g] {
            counts[g] += 1;
            assigned += 1;
        }
    }
    counts
}

fn check_fraction(fraction: f64) -> Result<()> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!(
            "sample fraction {fraction} must lie in (0, 1]"
        )));
    }
    Ok(())
}

/// `round(fraction * n)` distinct indices from `0..n`, sorted ascending.
pub fn subsample_without_replacement(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    check_fraction(fraction)?;
    if n == 0 {
        return Err(Error::Config("cannot subsample from zero rows".into()));
    }
    let k = round_half_up(fraction * n as f64).min(n);
    let mut rng = rng_from_seed(seed);
    let mut picked = index::sample(&mut rng, n, k).into_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// `round(fraction * n)` indices drawn uniformly with replacement, sorted ascending.
pub fn sample_with_replacement(n: usize, fraction: f64, seed: u64) -> Result<Vec<usize>> {
    check_fraction(fraction)?;
    if n == 0 {
        return Err(Error::Config("cannot subsample from zero rows".into()));
    }
    let k = round_half_up(fraction * n as f64);
    let mut rng = rng_from_seed(seed);
    let mut picked: Vec<usize> = (0..k).map(|_| rng.random_range(0..n)).collect();
    picked.sort_unstable();
    Ok(picked)
}
