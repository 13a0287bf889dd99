//! Python bindings: datasets, splits, forests and logistic baselines,
//! evaluation, importance, and the synthetic generator plus ingest.

use std::collections::{BTreeSet, HashMap};
use std::fs::File;

use gradeforest::baseline::{fit_logistic, fit_multinomial, TrainOptions};
use gradeforest::data::{stratified_split, Dataset, FeatureKind, Schema, SplitRatios};
use gradeforest::error::Error;
use gradeforest::evaluation::{evaluate, EvaluationReport, MajorityClassifier, WeightedRandomClassifier};
use gradeforest::forest::{fit_forest_with_threads, preset, FeatureMode};
use gradeforest::importance::{
    boxplot_svg, gini_importance, permutation_importance_repeated, top_k, ImportanceReport,
};
use gradeforest::ingest::{build_cohort, parse_records_path, IngestOptions};
use gradeforest::model::Model;
use gradeforest::synth::{generate, SynthConfig};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyOSError};
use pyo3::prelude::*;

create_exception!(pygradeforest, GradeForestError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        other => {
            let code = other.exit_code();
            let py_err = GradeForestError::new_err(other.to_string());
            Python::attach(|py| {
                let _ = py_err.value(py).setattr("exit_code", code);
            });
            py_err
        }
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for gradeforest::error::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(err)
    }
}

/// Labeled table of numeric features.
#[pyclass(name = "Dataset", frozen)]
pub struct PyDataset {
    inner: Dataset,
}

#[pymethods]
impl PyDataset {
    /// Builds a dataset from feature rows and string labels. Classes are the
    /// sorted distinct labels; names in `categorical` are category-coded columns.
    #[new]
    #[pyo3(signature = (features, labels, feature_names, categorical = Vec::new()))]
    fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<String>,
        feature_names: Vec<String>,
        categorical: Vec<String>,
    ) -> PyResult<Self> {
        if features.len() != labels.len() {
            return Err(err(Error::Input(format!(
                "{} feature rows for {} labels",
                features.len(),
                labels.len()
            ))));
        }
        let classes: Vec<String> = labels.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let kinds = feature_names
            .iter()
            .map(|n| {
                if categorical.contains(n) {
                    FeatureKind::Categorical
                } else {
                    FeatureKind::Continuous
                }
            })
            .collect();
        let schema = Schema::with_kinds(feature_names, kinds, classes.clone()).py()?;
        let rows = features
            .into_iter()
            .zip(&labels)
            .map(|(x, y)| (x, classes.binary_search(y).expect("label collected above")))
            .collect();
        Ok(PyDataset {
            inner: Dataset::from_rows(schema, rows).py()?,
        })
    }

    #[staticmethod]
    fn read_csv(path: &str) -> PyResult<Self> {
        Ok(PyDataset {
            inner: Dataset::read_csv_path(path).py()?,
        })
    }

    fn write_csv(&self, path: &str) -> PyResult<()> {
        self.inner.write_csv_path(path).py()
    }

    #[getter]
    fn n_rows(&self) -> usize {
        self.inner.n_rows()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.schema().feature_names.clone()
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.inner.schema().class_names.clone()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        let names = &self.inner.schema().class_names;
        self.inner.labels().iter().map(|&y| names[y].clone()).collect()
    }

    fn row(&self, i: usize) -> PyResult<Vec<f64>> {
        if i >= self.inner.n_rows() {
            return Err(err(Error::Input(format!("row {i} out of range"))));
        }
        Ok(self.inner.row(i).to_vec())
    }

    fn __len__(&self) -> usize {
        self.inner.n_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(rows={}, features={}, classes={:?})",
            self.inner.n_rows(),
            self.inner.n_features(),
            self.inner.schema().class_names
        )
    }
}

fn rows_or_all(data: &Dataset, rows: Option<Vec<usize>>) -> Vec<usize> {
    rows.unwrap_or_else(|| data.all_rows())
}

/// Stratified train/validation/test split; returns a dict of row index lists.
#[pyfunction]
#[pyo3(signature = (dataset, seed, ratios = (0.90, 0.05, 0.05), stratify = true))]
fn split(
    dataset: &PyDataset,
    seed: u64,
    ratios: (f64, f64, f64),
    stratify: bool,
) -> PyResult<HashMap<String, Vec<usize>>> {
    let ratios = SplitRatios::new(ratios.0, ratios.1, ratios.2).py()?;
    let s = stratified_split(&dataset.inner, ratios, seed, stratify).py()?;
    Ok(HashMap::from([
        ("train".to_string(), s.train),
        ("validation".to_string(), s.validation),
        ("test".to_string(), s.test),
    ]))
}

/// A fitted forest, logistic or multinomial model.
#[pyclass(name = "Model", frozen)]
pub struct PyModel {
    inner: Model,
}

#[pymethods]
impl PyModel {
    /// Fits a forest from a preset (`rf1`, `rf2`, `rf3`) with optional overrides.
    #[staticmethod]
    #[pyo3(signature = (dataset, seed, rows = None, preset_name = "rf2", n_trees = None, beta = None, p = None, threads = 0))]
    #[allow(clippy::too_many_arguments)]
    fn fit_forest(
        py: Python<'_>,
        dataset: &PyDataset,
        seed: u64,
        rows: Option<Vec<usize>>,
        preset_name: &str,
        n_trees: Option<usize>,
        beta: Option<usize>,
        p: Option<usize>,
        threads: usize,
    ) -> PyResult<Self> {
        let mut config = preset(preset_name).py()?;
        config.seed = seed;
        if let Some(t) = n_trees {
            config.n_trees = t;
        }
        if let Some(b) = beta {
            config.beta = b;
        }
        if let Some(p) = p {
            config.feature_mode = FeatureMode::PerNodeRandom(Some(p));
        }
        let data = &dataset.inner;
        let rows = rows_or_all(data, rows);
        let forest = py.detach(|| fit_forest_with_threads(data, &rows, config, threads)).py()?;
        Ok(PyModel {
            inner: Model::Forest(forest),
        })
    }

    /// Binary logistic regression by gradient descent.
    #[staticmethod]
    #[pyo3(signature = (dataset, rows = None, max_iterations = 2000, learning_rate = 1.0, tolerance = 1e-6, l2 = 0.0))]
    fn fit_logistic(
        dataset: &PyDataset,
        rows: Option<Vec<usize>>,
        max_iterations: usize,
        learning_rate: f64,
        tolerance: f64,
        l2: f64,
    ) -> PyResult<Self> {
        let options = TrainOptions {
            learning_rate,
            max_iterations,
            gradient_tolerance: tolerance,
            l2_penalty: l2,
        };
        let rows = rows_or_all(&dataset.inner, rows);
        Ok(PyModel {
            inner: Model::Logistic(fit_logistic(&dataset.inner, &rows, &options).py()?),
        })
    }

    /// Softmax regression with the last class as reference.
    #[staticmethod]
    #[pyo3(signature = (dataset, rows = None, max_iterations = 2000, learning_rate = 1.0, tolerance = 1e-6, l2 = 0.0))]
    fn fit_multinomial(
        dataset: &PyDataset,
        rows: Option<Vec<usize>>,
        max_iterations: usize,
        learning_rate: f64,
        tolerance: f64,
        l2: f64,
    ) -> PyResult<Self> {
        let options = TrainOptions {
            learning_rate,
            max_iterations,
            gradient_tolerance: tolerance,
            l2_penalty: l2,
        };
        let rows = rows_or_all(&dataset.inner, rows);
        Ok(PyModel {
            inner: Model::Multinomial(fit_multinomial(&dataset.inner, &rows, &options).py()?),
        })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: Model::load(path).py()?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: Model::from_text(text).py()?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).py()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind()
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.inner.schema().class_names.clone()
    }

    /// Predicted class name for one feature vector.
    fn predict(&self, x: Vec<f64>) -> PyResult<String> {
        let c = self.inner.classifier().predict(&x).py()?;
        Ok(self.inner.schema().class_names[c].clone())
    }

    #[pyo3(signature = (dataset, rows = None))]
    fn predict_rows(&self, dataset: &PyDataset, rows: Option<Vec<usize>>) -> PyResult<Vec<String>> {
        let rows = rows_or_all(&dataset.inner, rows);
        let names = &self.inner.schema().class_names;
        let preds = self.inner.classifier().predict_rows(&dataset.inner, &rows).py()?;
        Ok(preds.into_iter().map(|c| names[c].clone()).collect())
    }

    /// Per-class tree votes (forests only).
    fn votes(&self, x: Vec<f64>) -> PyResult<Vec<usize>> {
        match &self.inner {
            Model::Forest(f) => f.votes(&x).py(),
            _ => Err(err(Error::TaskMismatch("only forests vote".into()))),
        }
    }

    /// Per-class probabilities (logistic and multinomial models only).
    fn predict_proba(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        match &self.inner {
            Model::Logistic(m) => {
                let p = m.predict_proba(&x).py()?;
                Ok(vec![1.0 - p, p])
            }
            Model::Multinomial(m) => m.predict_proba(&x).py(),
            Model::Forest(_) => Err(err(Error::TaskMismatch(
                "forests report votes, not probabilities".into(),
            ))),
        }
    }

    fn __repr__(&self) -> String {
        format!("Model(kind={:?})", self.inner.kind())
    }
}

fn report_dict(r: EvaluationReport) -> HashMap<String, Py<PyAny>> {
    Python::attach(|py| {
        let per_class: HashMap<String, Option<f64>> = r
            .class_names
            .iter()
            .cloned()
            .zip(r.per_class_accuracy.iter().copied())
            .collect();
        let mut out = HashMap::new();
        let mut put = |k: &str, v: Py<PyAny>| {
            out.insert(k.to_string(), v);
        };
        put("rows", r.n_rows.into_pyobject(py).unwrap().into_any().unbind());
        put("accuracy", r.overall_accuracy.into_pyobject(py).unwrap().into_any().unbind());
        put("per_class", per_class.into_pyobject(py).unwrap().into_any().unbind());
        put("class_names", r.class_names.into_pyobject(py).unwrap().into_any().unbind());
        put("confusion", r.confusion.into_pyobject(py).unwrap().into_any().unbind());
        out
    })
}

/// Accuracy report: `rows`, `accuracy`, `per_class`, `class_names`, `confusion`.
#[pyfunction(name = "evaluate")]
#[pyo3(signature = (model, dataset, rows = None))]
fn evaluate_model(
    model: &PyModel,
    dataset: &PyDataset,
    rows: Option<Vec<usize>>,
) -> PyResult<HashMap<String, Py<PyAny>>> {
    model.inner.schema().check_compatible(dataset.inner.schema()).py()?;
    let rows = rows_or_all(&dataset.inner, rows);
    Ok(report_dict(evaluate(model.inner.classifier(), &dataset.inner, &rows).py()?))
}

/// Evaluates the `majority` or `weighted` dummy fitted on `fit_rows`.
#[pyfunction]
#[pyo3(signature = (dataset, kind, seed, fit_rows = None, rows = None))]
fn evaluate_dummy(
    dataset: &PyDataset,
    kind: &str,
    seed: u64,
    fit_rows: Option<Vec<usize>>,
    rows: Option<Vec<usize>>,
) -> PyResult<HashMap<String, Py<PyAny>>> {
    let data = &dataset.inner;
    let rows = rows_or_all(data, rows);
    let fit_rows = fit_rows.unwrap_or_else(|| rows.clone());
    let report = match kind {
        "majority" => evaluate(&MajorityClassifier::fit(data, &fit_rows).py()?, data, &rows),
        "weighted" => evaluate(&WeightedRandomClassifier::fit(data, &fit_rows, seed).py()?, data, &rows),
        other => Err(Error::Config(format!(
            "unknown dummy {other:?} (expected majority or weighted)"
        ))),
    }
    .py()?;
    Ok(report_dict(report))
}

/// Per-tree importance decreases with their means.
#[pyclass(name = "ImportanceReport", frozen)]
pub struct PyImportanceReport {
    inner: ImportanceReport,
}

#[pymethods]
impl PyImportanceReport {
    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.name()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names.clone()
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean.clone()
    }

    #[getter]
    fn per_tree(&self) -> Vec<Vec<f64>> {
        self.inner.per_tree.clone()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    fn standard_errors(&self) -> Vec<f64> {
        self.inner.standard_errors()
    }

    /// `(name, mean)` of the `k` largest means.
    fn top_k(&self, k: usize) -> PyResult<Vec<(String, f64)>> {
        Ok(top_k(&self.inner, k).py()?.into_iter().map(|r| (r.name, r.mean)).collect())
    }

    fn to_csv(&self, k: usize) -> PyResult<String> {
        self.inner.to_csv(k).py()
    }

    #[pyo3(signature = (k, title = "Permutation importance"))]
    fn boxplot_svg(&self, k: usize, title: &str) -> PyResult<String> {
        Ok(boxplot_svg(&top_k(&self.inner, k).py()?, title))
    }
}

fn forest_of(model: &PyModel) -> PyResult<&gradeforest::forest::Forest> {
    match &model.inner {
        Model::Forest(f) => Ok(f),
        other => Err(err(Error::TaskMismatch(format!(
            "importance needs a forest, got a {} model",
            other.kind()
        )))),
    }
}

#[pyfunction]
#[pyo3(signature = (model, dataset, seed, rows = None, repetitions = 1))]
fn permutation_importance(
    py: Python<'_>,
    model: &PyModel,
    dataset: &PyDataset,
    seed: u64,
    rows: Option<Vec<usize>>,
    repetitions: usize,
) -> PyResult<PyImportanceReport> {
    let forest = forest_of(model)?;
    let data = &dataset.inner;
    let rows = rows_or_all(data, rows);
    let inner = py
        .detach(|| permutation_importance_repeated(forest, data, &rows, seed, repetitions))
        .py()?;
    Ok(PyImportanceReport { inner })
}

#[pyfunction(name = "gini_importance")]
fn gini_importance_py(model: &PyModel) -> PyResult<PyImportanceReport> {
    Ok(PyImportanceReport {
        inner: gini_importance(forest_of(model)?),
    })
}

/// Writes synthetic grade records (and optionally the true labels) for a
/// named scenario; returns the number of records.
#[pyfunction]
#[pyo3(signature = (scenario, n_students, seed, records_path, truth_path = None))]
fn synthesize(
    scenario: &str,
    n_students: usize,
    seed: u64,
    records_path: &str,
    truth_path: Option<&str>,
) -> PyResult<usize> {
    let config = SynthConfig::scenario(scenario, n_students, seed).py()?;
    let out = generate(&config).py()?;
    let file = File::create(records_path).map_err(|e| err(Error::io(records_path, e)))?;
    out.write_records(file).py()?;
    if let Some(path) = truth_path {
        let file = File::create(path).map_err(|e| err(Error::io(path, e)))?;
        out.write_truth(file).py()?;
    }
    Ok(out.records.len())
}

/// Labeled cohort built from a raw grade record file.
#[pyclass(name = "Cohort", frozen)]
pub struct PyCohort {
    #[pyo3(get)]
    completion: Py<PyDataset>,
    #[pyo3(get)]
    major: Py<PyDataset>,
    #[pyo3(get)]
    audit: HashMap<String, usize>,
    #[pyo3(get)]
    rejects: Vec<(u64, String)>,
    #[pyo3(get)]
    audit_jsonl: String,
}

#[pyfunction]
#[pyo3(signature = (records_path, pass_mark = 50.0, completed_credits = 18.0, min_attempted_credits = 5.0, dropout_gap = 3, include_summer = true))]
fn ingest(
    py: Python<'_>,
    records_path: &str,
    pass_mark: f64,
    completed_credits: f64,
    min_attempted_credits: f64,
    dropout_gap: usize,
    include_summer: bool,
) -> PyResult<PyCohort> {
    let options = IngestOptions {
        pass_mark,
        completed_credits,
        min_attempted_credits,
        dropout_gap,
        include_summer,
    };
    let parsed = parse_records_path(records_path).py()?;
    let cohort = build_cohort(&parsed.records, &options).py()?;
    let audit = HashMap::from([
        ("completed".to_string(), cohort.audit.completed),
        ("dropout".to_string(), cohort.audit.dropout),
        ("excluded".to_string(), cohort.audit.excluded),
    ]);
    Ok(PyCohort {
        audit_jsonl: cohort.audit_jsonl().py()?,
        completion: Py::new(py, PyDataset { inner: cohort.completion })?,
        major: Py::new(py, PyDataset { inner: cohort.major })?,
        audit,
        rejects: parsed.rejects.into_iter().map(|r| (r.line, r.reason)).collect(),
    })
}

#[pymodule]
fn pygradeforest(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GradeForestError", m.py().get_type::<GradeForestError>())?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyImportanceReport>()?;
    m.add_class::<PyCohort>()?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_model, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_dummy, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_importance, m)?)?;
    m.add_function(wrap_pyfunction!(gini_importance_py, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(ingest, m)?)?;
    Ok(())
}
