//! The `gradeforest` command line: synth, ingest, split, train, evaluate and
//! importance. Every command writes a manifest next to its outputs.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::baseline::{fit_logistic, fit_multinomial, TrainOptions};
use crate::config::{parse_key_values, Entry, Manifest};
use crate::data::{class_counts, stratified_split, Dataset, SplitIndices, SplitRatios};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate, Classifier, MajorityClassifier, WeightedRandomClassifier};
use crate::forest::{fit_forest, fit_forest_with_threads, preset, FeatureMode};
use crate::importance::{boxplot_svg, gini_importance, permutation_importance_repeated, top_k, ImportanceReport};
use crate::ingest::{build_cohort, parse_records_path, IngestOptions};
use crate::model::Model;
use crate::synth::{generate, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "gradeforest", version, about = "Random forests, variable importance and logistic baselines for student-record prediction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic grade file and its ground-truth labels.
    Synth(SynthArgs),
    /// Turn a raw grade file into the completion and major datasets.
    Ingest(IngestArgs),
    /// Split a dataset into train, validation and test rows.
    Split(SplitArgs),
    /// Fit a forest preset or a logistic baseline.
    Train(TrainArgs),
    /// Accuracy report for a model or a dummy baseline.
    Evaluate(EvaluateArgs),
    /// Permutation or Gini variable importance of a forest.
    Importance(ImportanceArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Flat `key = value` generator configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// default, planted or xor; overrides the config file.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub n_students: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Raw CSV with student_id,course_title,department,semester,credit_value,grade.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub pass_mark: Option<f64>,
    #[arg(long)]
    pub completed_credits: Option<f64>,
    #[arg(long)]
    pub min_attempted_credits: Option<f64>,
    #[arg(long)]
    pub dropout_gap: Option<usize>,
    /// Leave summer terms out of the dropout gap count.
    #[arg(long)]
    pub exclude_summer: bool,
    /// Recorded in the manifest; labeling itself draws nothing at random.
    #[arg(long)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// Train, validation and test fractions, e.g. `0.9,0.05,0.05`.
    #[arg(long)]
    pub ratios: Option<String>,
    #[arg(long)]
    pub no_stratify: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Split file (JSON); the manifest goes to `<out>.manifest`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["preset", "model"])))]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// rf1, rf2 or rf3.
    #[arg(long)]
    pub preset: Option<String>,
    /// logit or multinomial.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub seed: u64,
    /// Minimum node size; nodes with at most this many rows become leaves.
    #[arg(long)]
    pub beta: Option<usize>,
    /// Features searched per node.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub trees: Option<usize>,
    #[arg(long)]
    pub sample_fraction: Option<f64>,
    #[arg(long)]
    pub with_replacement: bool,
    /// Worker threads for tree fitting; the result does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    /// Split part to train on.
    #[arg(long, default_value = "train")]
    pub rows: String,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Model file; the manifest goes to `<out>.manifest`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("what").required(true).args(["model", "dummy"])))]
pub struct EvaluateArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// majority or weighted.
    #[arg(long)]
    pub dummy: Option<String>,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub rows: String,
    /// Drives `--dummy weighted`; recorded in the manifest otherwise.
    #[arg(long)]
    pub seed: u64,
    /// Output prefix: writes `.txt`, `.csv` and `.manifest`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, default_value = "test")]
    pub rows: String,
    /// permutation or gini.
    #[arg(long, default_value = "permutation")]
    pub method: String,
    #[arg(long, default_value_t = 15)]
    pub top: usize,
    #[arg(long)]
    pub seed: u64,
    /// Independent shuffles averaged per predictor.
    #[arg(long, default_value_t = 1)]
    pub permutations: usize,
    /// Output prefix: writes `.csv`, `.per_tree.csv`, `.svg` and `.manifest`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(&a),
        Command::Ingest(a) => cmd_ingest(&a),
        Command::Split(a) => cmd_split(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Importance(a) => cmd_importance(&a),
    }
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

/// Parameters from a `--config` file. Command-line flags take precedence.
struct RunConfig {
    entries: Vec<Entry>,
}

impl RunConfig {
    fn load(path: Option<&Path>, allowed: &[&str], manifest: &mut Manifest) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig { entries: Vec::new() });
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let entries = parse_key_values(&text)?;
        for e in &entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(Error::Config(format!(
                    "{}: line {}: unknown key `{}`",
                    path.display(),
                    e.line,
                    e.key
                )));
            }
        }
        manifest.input("config", path)?;
        Ok(RunConfig { entries })
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.iter().rev().find(|e| e.key == key) {
            Some(e) => crate::config::parse_value(e).map(Some),
            None => Ok(None),
        }
    }

    fn check_seed(&self, seed: Option<u64>) -> Result<()> {
        if let Some(config_seed) = self.get::<u64>("seed")? {
            if Some(config_seed) != seed {
                return Err(Error::Config(format!(
                    "config seed {config_seed} disagrees with --seed"
                )));
            }
        }
        Ok(())
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// `path` with `suffix` appended to its file name.
fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn cmd_synth(a: &SynthArgs) -> Result<()> {
    let mut manifest = Manifest::new("synth");
    let mut text = match &a.config {
        Some(path) => {
            manifest.input("config", path)?;
            std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?
        }
        None => String::new(),
    };
    if let Some(s) = &a.scenario {
        text.push_str(&format!("\nscenario = {s}\n"));
    }
    let mut config = SynthConfig::from_text(&text, a.seed)?;
    if let Some(n) = a.n_students {
        config.n_students = n;
    }
    config.validate()?;
    let out = generate(&config)?;

    create_dir(&a.out)?;
    let records = a.out.join("records.csv");
    let truth = a.out.join("truth.csv");
    let effective = a.out.join("synth.conf");
    let mut buf = Vec::new();
    out.write_records(&mut buf)?;
    write_file(&records, buf)?;
    let mut buf = Vec::new();
    out.write_truth(&mut buf)?;
    write_file(&truth, buf)?;
    write_file(&effective, config.to_text())?;

    manifest
        .set("seed", a.seed)
        .set("scenario", a.scenario.as_deref().unwrap_or("from config"))
        .set("n_students", config.n_students)
        .set("records", out.records.len())
        .set("dropout_intercept", out.dropout_intercept);
    manifest
        .output("records", &records)?
        .output("truth", &truth)?
        .output("effective_config", &effective)?;
    manifest.write(&a.out.join("manifest.txt"))?;
    println!(
        "{} students, {} records written to {}",
        config.n_students,
        out.records.len(),
        a.out.display()
    );
    Ok(())
}

const INGEST_KEYS: &[&str] = &[
    "pass_mark",
    "completed_credits",
    "min_attempted_credits",
    "dropout_gap",
    "include_summer",
    "seed",
];

fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    let mut manifest = Manifest::new("ingest");
    let rc = RunConfig::load(a.config.as_deref(), INGEST_KEYS, &mut manifest)?;
    rc.check_seed(Some(a.seed))?;
    manifest.set("seed", a.seed);
    let defaults = IngestOptions::default();
    let options = IngestOptions {
        pass_mark: a.pass_mark.or(rc.get("pass_mark")?).unwrap_or(defaults.pass_mark),
        completed_credits: a
            .completed_credits
            .or(rc.get("completed_credits")?)
            .unwrap_or(defaults.completed_credits),
        min_attempted_credits: a
            .min_attempted_credits
            .or(rc.get("min_attempted_credits")?)
            .unwrap_or(defaults.min_attempted_credits),
        dropout_gap: a.dropout_gap.or(rc.get("dropout_gap")?).unwrap_or(defaults.dropout_gap),
        include_summer: if a.exclude_summer {
            false
        } else {
            rc.get("include_summer")?.unwrap_or(defaults.include_summer)
        },
    };
    let parsed = parse_records_path(&a.input)?;
    manifest.input("records", &a.input)?;
    if parsed.records.is_empty() {
        warn("input contains no grade records; writing empty outputs");
    }
    if !parsed.rejects.is_empty() {
        warn(&format!("{} rows rejected; see rejects.csv", parsed.rejects.len()));
    }
    let cohort = build_cohort(&parsed.records, &options)?;

    create_dir(&a.out)?;
    let completion = a.out.join("completion.csv");
    let major = a.out.join("major.csv");
    let audit = a.out.join("audit.jsonl");
    let rejects = a.out.join("rejects.csv");
    cohort.completion.write_csv_path(&completion)?;
    cohort.major.write_csv_path(&major)?;
    write_file(&audit, cohort.audit_jsonl()?)?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["line", "reason"])?;
    for r in &parsed.rejects {
        wtr.write_record([r.line.to_string(), r.reason.clone()])?;
    }
    write_file(&rejects, wtr.into_inner().map_err(|e| Error::io(&rejects, e.into_error()))?)?;

    manifest
        .set("pass_mark", options.pass_mark)
        .set("completed_credits", options.completed_credits)
        .set("min_attempted_credits", options.min_attempted_credits)
        .set("dropout_gap", options.dropout_gap)
        .set("include_summer", options.include_summer)
        .set("records", parsed.records.len())
        .set("rejected", parsed.rejects.len())
        .set("departments", cohort.departments.len())
        .set("horizon", cohort.horizon.map_or("none".into(), |h| h.to_string()))
        .set("completed", cohort.audit.completed)
        .set("dropout", cohort.audit.dropout)
        .set("excluded", cohort.audit.excluded);
    manifest
        .output("completion", &completion)?
        .output("major", &major)?
        .output("audit", &audit)?
        .output("rejects", &rejects)?;
    manifest.write(&a.out.join("manifest.txt"))?;
    println!(
        "completed {}, dropout {}, excluded {} ({} departments, {} features)",
        cohort.audit.completed,
        cohort.audit.dropout,
        cohort.audit.excluded,
        cohort.departments.len(),
        cohort.completion.n_features()
    );
    Ok(())
}

/// On-disk split: the row indices plus what produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitFile {
    pub seed: u64,
    pub ratios: [f64; 3],
    pub stratified: bool,
    pub n_rows: usize,
    #[serde(flatten)]
    pub indices: SplitIndices,
}

impl SplitFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    fn rows_for(&self, data: &Dataset, part: &str) -> Result<Vec<usize>> {
        if self.n_rows != data.n_rows() {
            return Err(Error::Input(format!(
                "split was made for {} rows, dataset has {}",
                self.n_rows,
                data.n_rows()
            )));
        }
        Ok(self.indices.part(part)?.to_vec())
    }
}

fn parse_ratios(s: &str) -> Result<SplitRatios> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse ratio {p:?}")))
        })
        .collect::<Result<_>>()?;
    match parts[..] {
        [a, b, c] => SplitRatios::new(a, b, c),
        _ => Err(Error::Config(format!("expected three ratios, got {s:?}"))),
    }
}

/// Rows of `part` from `--split`, or every row without one.
fn select_rows(
    split: Option<&Path>,
    part: &str,
    data: &Dataset,
    manifest: &mut Manifest,
) -> Result<Vec<usize>> {
    match split {
        Some(path) => {
            manifest.input("split", path)?;
            manifest.set("rows", part);
            SplitFile::load(path)?.rows_for(data, part)
        }
        None => {
            manifest.set("rows", "all");
            Ok(data.all_rows())
        }
    }
}

fn load_data(path: &Path, manifest: &mut Manifest) -> Result<Dataset> {
    let data = Dataset::read_csv_path(path)?;
    manifest.input("data", path)?;
    Ok(data)
}

fn cmd_split(a: &SplitArgs) -> Result<()> {
    let mut manifest = Manifest::new("split");
    let rc = RunConfig::load(a.config.as_deref(), &["ratios", "stratify", "seed"], &mut manifest)?;
    rc.check_seed(Some(a.seed))?;
    let ratios = match a.ratios.clone().or(rc.get("ratios")?) {
        Some(s) => parse_ratios(&s)?,
        None => SplitRatios::default(),
    };
    let stratify = !a.no_stratify && rc.get("stratify")?.unwrap_or(true);
    let data = load_data(&a.data, &mut manifest)?;
    let indices = stratified_split(&data, ratios, a.seed, stratify)?;
    for w in &indices.warnings {
        warn(w);
    }
    let file = SplitFile {
        seed: a.seed,
        ratios: [ratios.train, ratios.validation, ratios.test],
        stratified: stratify,
        n_rows: data.n_rows(),
        indices,
    };
    let mut json = serde_json::to_string(&file)?;
    json.push('\n');
    write_file(&a.out, json)?;
    manifest
        .set("seed", a.seed)
        .set("ratios", format!("{},{},{}", ratios.train, ratios.validation, ratios.test))
        .set("stratified", stratify)
        .set("train", file.indices.train.len())
        .set("validation", file.indices.validation.len())
        .set("test", file.indices.test.len());
    manifest.output("split", &a.out)?;
    manifest.write(&with_suffix(&a.out, ".manifest"))?;
    println!(
        "train {}, validation {}, test {}",
        file.indices.train.len(),
        file.indices.validation.len(),
        file.indices.test.len()
    );
    Ok(())
}

const TRAIN_KEYS: &[&str] = &[
    "preset",
    "model",
    "seed",
    "beta",
    "p",
    "trees",
    "sample_fraction",
    "with_replacement",
    "threads",
    "max_iterations",
    "learning_rate",
    "gradient_tolerance",
    "l2_penalty",
];

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let mut manifest = Manifest::new("train");
    let rc = RunConfig::load(a.config.as_deref(), TRAIN_KEYS, &mut manifest)?;
    rc.check_seed(Some(a.seed))?;
    let data = load_data(&a.data, &mut manifest)?;
    let rows = select_rows(a.split.as_deref(), &a.rows, &data, &mut manifest)?;
    if a.split.is_none() {
        warn("no --split given; training on every row");
    }
    if rows.is_empty() {
        return Err(Error::Input("no training rows selected".into()));
    }
    manifest.set("seed", a.seed);
    manifest.set("training_rows", rows.len());

    let model = match (&a.preset, &a.model) {
        (Some(name), _) => {
            let mut config = preset(name)?;
            config.seed = a.seed;
            if let Some(v) = a.trees.or(rc.get("trees")?) {
                config.n_trees = v;
            }
            if let Some(v) = a.beta.or(rc.get("beta")?) {
                config.beta = v;
            }
            if let Some(v) = a.sample_fraction.or(rc.get("sample_fraction")?) {
                config.sample_fraction = v;
            }
            if a.with_replacement || rc.get("with_replacement")?.unwrap_or(false) {
                config.with_replacement = true;
            }
            if let Some(p) = a.p.or(rc.get("p")?) {
                config.feature_mode = FeatureMode::PerNodeRandom(Some(p));
            }
            let present = class_counts(&data, &rows).iter().filter(|&&c| c > 0).count();
            if present < 2 {
                return Err(Error::DegenerateData(format!(
                    "training rows contain {present} class(es); at least two are needed"
                )));
            }
            let per_node = config.feature_mode.resolve(data.n_features())?;
            let threads = a.threads.or(rc.get("threads")?);
            let forest = match threads {
                Some(t) => fit_forest_with_threads(&data, &rows, config, t)?,
                None => fit_forest(&data, &rows, config)?,
            };
            manifest
                .set("model", "forest")
                .set("preset", name)
                .set("n_trees", config.n_trees)
                .set("sample_fraction", config.sample_fraction)
                .set("with_replacement", config.with_replacement)
                .set(
                    "feature_mode",
                    match per_node {
                        None => "all".to_string(),
                        Some(p) => format!("random p={p}"),
                    },
                )
                .set("beta", config.beta)
                .set("threads", threads.map_or("auto".into(), |t| t.to_string()));
            Model::Forest(forest)
        }
        (None, Some(kind)) => {
            let defaults = TrainOptions::default();
            let options = TrainOptions {
                learning_rate: a
                    .learning_rate
                    .or(rc.get("learning_rate")?)
                    .unwrap_or(defaults.learning_rate),
                max_iterations: a
                    .max_iterations
                    .or(rc.get("max_iterations")?)
                    .unwrap_or(defaults.max_iterations),
                gradient_tolerance: a
                    .tolerance
                    .or(rc.get("gradient_tolerance")?)
                    .unwrap_or(defaults.gradient_tolerance),
                l2_penalty: a.l2.or(rc.get("l2_penalty")?).unwrap_or(defaults.l2_penalty),
            };
            let model = match kind.as_str() {
                "logit" | "logistic" => Model::Logistic(fit_logistic(&data, &rows, &options)?),
                "multinomial" => Model::Multinomial(fit_multinomial(&data, &rows, &options)?),
                other => {
                    return Err(Error::Config(format!(
                        "unknown model {other:?} (expected logit or multinomial)"
                    )))
                }
            };
            let trace = match &model {
                Model::Logistic(m) => &m.trace,
                Model::Multinomial(m) => &m.trace,
                Model::Forest(_) => unreachable!(),
            };
            if !trace.converged {
                warn("gradient descent stopped at the iteration limit before converging");
            }
            manifest
                .set("model", model.kind())
                .set("learning_rate", options.learning_rate)
                .set("max_iterations", options.max_iterations)
                .set("gradient_tolerance", options.gradient_tolerance)
                .set("l2_penalty", options.l2_penalty)
                .set("iterations", trace.iterations)
                .set("converged", trace.converged);
            model
        }
        (None, None) => unreachable!("clap requires --preset or --model"),
    };
    model.save(&a.out)?;
    manifest.output("model", &a.out)?;
    manifest.write(&with_suffix(&a.out, ".manifest"))?;
    println!("{} model written to {}", model.kind(), a.out.display());
    Ok(())
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    let mut manifest = Manifest::new("evaluate");
    manifest.set("seed", a.seed);
    let data = load_data(&a.data, &mut manifest)?;
    let rows = select_rows(a.split.as_deref(), &a.rows, &data, &mut manifest)?;
    let report = match (&a.model, &a.dummy) {
        (Some(path), _) => {
            let model = Model::load(path)?;
            manifest.input("model", path)?;
            model.schema().check_compatible(data.schema())?;
            evaluate(model.classifier(), &data, &rows)?
        }
        (None, Some(kind)) => {
            // Dummies learn class frequencies from the training part when a split is given.
            let fit_rows = match &a.split {
                Some(path) => SplitFile::load(path)?.rows_for(&data, "train")?,
                None => rows.clone(),
            };
            manifest.set("dummy", kind);
            match kind.as_str() {
                "majority" => evaluate(&MajorityClassifier::fit(&data, &fit_rows)?, &data, &rows)?,
                "weighted" => {
                    let dummy = WeightedRandomClassifier::fit(&data, &fit_rows, a.seed)?;
                    let expected: f64 = dummy.proportions().iter().map(|p| p * p).sum();
                    manifest.set("expected_accuracy", expected);
                    evaluate(&dummy, &data, &rows)?
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown dummy {other:?} (expected majority or weighted)"
                    )))
                }
            }
        }
        (None, None) => unreachable!("clap requires --model or --dummy"),
    };
    let txt = with_suffix(&a.out, ".txt");
    let csv = with_suffix(&a.out, ".csv");
    write_file(&txt, report.to_text())?;
    write_file(&csv, report.to_csv()?)?;
    manifest.set("overall_accuracy", report.overall_accuracy);
    manifest.output("report", &txt)?.output("report_csv", &csv)?;
    manifest.write(&with_suffix(&a.out, ".manifest"))?;
    print!("{}", report.to_text());
    Ok(())
}

fn per_tree_csv(report: &ImportanceReport) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["tree".to_string()];
    header.extend(report.feature_names.iter().cloned());
    wtr.write_record(&header)?;
    for (t, row) in report.per_tree.iter().enumerate() {
        let mut rec = vec![t.to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))
}

fn cmd_importance(a: &ImportanceArgs) -> Result<()> {
    let mut manifest = Manifest::new("importance");
    let model = Model::load(&a.model)?;
    manifest.input("model", &a.model)?;
    let Model::Forest(forest) = model else {
        return Err(Error::TaskMismatch(format!(
            "variable importance needs a forest, got a {} model",
            model.kind()
        )));
    };
    let data = load_data(&a.data, &mut manifest)?;
    forest.schema().check_compatible(data.schema())?;
    let report = match a.method.as_str() {
        "permutation" => {
            let rows = select_rows(a.split.as_deref(), &a.rows, &data, &mut manifest)?;
            manifest.set("permutations", a.permutations);
            permutation_importance_repeated(&forest, &data, &rows, a.seed, a.permutations)?
        }
        "gini" => gini_importance(&forest),
        other => {
            return Err(Error::Config(format!(
                "unknown importance method {other:?} (expected permutation or gini)"
            )))
        }
    };
    for w in &report.warnings {
        warn(w);
        manifest.set("warning", w);
    }
    let m = data.n_features();
    let k = if a.top > m {
        warn(&format!("--top {} exceeds the {m} features; reporting all", a.top));
        m
    } else {
        a.top
    };
    let csv = with_suffix(&a.out, ".csv");
    let per_tree = with_suffix(&a.out, ".per_tree.csv");
    let svg = with_suffix(&a.out, ".svg");
    write_file(&csv, report.to_csv(k)?)?;
    write_file(&per_tree, per_tree_csv(&report)?)?;
    let title = format!("Top {k} predictors, {} importance", report.method.name());
    write_file(&svg, boxplot_svg(&top_k(&report, k)?, &title))?;
    manifest
        .set("method", report.method.name())
        .set("seed", a.seed)
        .set("top", k);
    manifest
        .output("ranking", &csv)?
        .output("per_tree", &per_tree)?
        .output("boxplot", &svg)?;
    manifest.write(&with_suffix(&a.out, ".manifest"))?;
    for r in top_k(&report, k)? {
        println!("{:>12.6}  {}", r.mean, r.name);
    }
    Ok(())
}
