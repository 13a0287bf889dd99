//! Bagged forests of Gini trees with majority voting.
//!
//! Tree `t` is grown on its own row draw. The draw and the per-node feature
//! sampling use seeds derived from `(config.seed, t)` only, so a forest is
//! identical whether its trees are fitted on one thread or many.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::data::{sample_with_replacement, subsample_without_replacement, Dataset, Schema};
use crate::error::{Error, Result};
use crate::evaluation::Classifier;
use crate::seed::{derive_seed, derived_rng, stream};
use crate::textfmt::{self, Record};
use crate::tree::{argmax_first, fit_tree_with_rng, Tree, TreeConfig};

const DRAW_STREAM: u64 = stream::TREE ^ 0xd4a3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Every node searches all features.
    All,
    /// Every node searches a fresh random subset of `p` features;
    /// `None` means `floor(sqrt(m))`.
    PerNodeRandom(Option<usize>),
}

impl FeatureMode {
    /// Features searched per node, or `None` for all of them.
    pub fn resolve(&self, m: usize) -> Result<Option<usize>> {
        match *self {
            FeatureMode::All => Ok(None),
            FeatureMode::PerNodeRandom(None) => Ok(Some(default_subset_size(m))),
            FeatureMode::PerNodeRandom(Some(p)) => {
                if p < 1 || p > m {
                    return Err(Error::Config(format!(
                        "per-node feature count {p} outside 1..={m}"
                    )));
                }
                Ok(Some(p))
            }
        }
    }
}

/// `floor(sqrt(m))`, at least 1.
pub fn default_subset_size(m: usize) -> usize {
    ((m as f64).sqrt().floor() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestConfig {
    pub n_trees: usize,
    pub sample_fraction: f64,
    pub with_replacement: bool,
    pub feature_mode: FeatureMode,
    pub beta: usize,
    pub seed: u64,
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees < 1 {
            return Err(Error::Config("a forest needs at least one tree".into()));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "sample fraction {} must lie in (0, 1]",
                self.sample_fraction
            )));
        }
        if self.beta < 1 {
            return Err(Error::Config("beta must be at least 1".into()));
        }
        Ok(())
    }
}

/// The three named forest configurations.
///
/// * `rf1`: 200 trees, every feature searched at every node.
/// * `rf2`: 200 trees, a random feature subset per node (`floor(sqrt(m))` unless set).
/// * `rf3`: 200 trees, the common package default of `floor(sqrt(m))` features per node.
///
/// All draw 63% of the training rows without replacement and stop at 50 rows.
pub fn preset(name: &str) -> Result<ForestConfig> {
    let feature_mode = match name {
        "rf1" => FeatureMode::All,
        "rf2" | "rf3" => FeatureMode::PerNodeRandom(None),
        other => {
            return Err(Error::Config(format!(
                "unknown forest preset {other:?} (expected rf1, rf2 or rf3)"
            )))
        }
    };
    Ok(ForestConfig {
        n_trees: 200,
        sample_fraction: 0.63,
        with_replacement: false,
        feature_mode,
        beta: 50,
        seed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    config: ForestConfig,
    schema: Schema,
    /// Training rows each tree was grown on. Empty for forests loaded from disk.
    draws: Vec<Vec<usize>>,
}

pub fn fit_forest(data: &Dataset, train_rows: &[usize], config: ForestConfig) -> Result<Forest> {
    config.validate()?;
    if train_rows.is_empty() {
        return Err(Error::Input("cannot fit a forest on zero rows".into()));
    }
    let subset = config.feature_mode.resolve(data.n_features())?;
    let fitted: Vec<(Tree, Vec<usize>)> = (0..config.n_trees)
        .into_par_iter()
        .map(|t| fit_member(data, train_rows, &config, subset, t))
        .collect::<Result<_>>()?;
    let (trees, draws) = fitted.into_iter().unzip();
    Ok(Forest {
        trees,
        config,
        schema: data.schema().clone(),
        draws,
    })
}

/// [`fit_forest`] on a dedicated pool of `threads` workers.
pub fn fit_forest_with_threads(
    data: &Dataset,
    train_rows: &[usize],
    config: ForestConfig,
    threads: usize,
) -> Result<Forest> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| fit_forest(data, train_rows, config))
}

fn fit_member(
    data: &Dataset,
    train_rows: &[usize],
    config: &ForestConfig,
    subset: Option<usize>,
    t: usize,
) -> Result<(Tree, Vec<usize>)> {
    let n = train_rows.len();
    let draw_seed = derive_seed(config.seed, DRAW_STREAM, t as u64);
    let positions = if config.with_replacement {
        sample_with_replacement(n, config.sample_fraction, draw_seed)?
    } else {
        subsample_without_replacement(n, config.sample_fraction, draw_seed)?
    };
    if positions.is_empty() {
        return Err(Error::Config(format!(
            "sample fraction {} of {n} rows leaves nothing to fit",
            config.sample_fraction
        )));
    }
    let rows: Vec<usize> = positions.into_iter().map(|p| train_rows[p]).collect();
    let tree_config = TreeConfig {
        beta: config.beta,
        feature_subset_size: subset,
        seed: derive_seed(config.seed, stream::TREE, t as u64),
    };
    let rng = derived_rng(config.seed, stream::TREE, t as u64);
    let tree = fit_tree_with_rng(data, &rows, tree_config, rng)?;
    Ok((tree, rows))
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn draws(&self) -> &[Vec<usize>] {
        &self.draws
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.schema.n_features() {
            return Err(Error::Input(format!(
                "feature vector has width {}, forest expects {}",
                x.len(),
                self.schema.n_features()
            )));
        }
        Ok(())
    }

    /// Vote count per class.
    pub fn votes(&self, x: &[f64]) -> Result<Vec<usize>> {
        self.check_width(x)?;
        let mut votes = vec![0; self.schema.n_classes()];
        for tree in &self.trees {
            votes[tree.predict_unchecked(x)] += 1;
        }
        Ok(votes)
    }

    /// Most voted class, lowest index on ties.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax_first(&self.votes(x)?))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let mode = match c.feature_mode {
            FeatureMode::All => "feature_mode=all".to_string(),
            FeatureMode::PerNodeRandom(None) => "feature_mode=random p=sqrt".to_string(),
            FeatureMode::PerNodeRandom(Some(p)) => format!("feature_mode=random p={p}"),
        };
        let _ = writeln!(
            out,
            "forest n_trees={} sample_fraction={} with_replacement={} {mode} beta={} seed={}",
            c.n_trees,
            textfmt::float(c.sample_fraction),
            c.with_replacement,
            c.beta,
            c.seed
        );
        write_schema(&self.schema, &mut out);
        for (t, tree) in self.trees.iter().enumerate() {
            let _ = writeln!(out, "# tree {t}");
            tree.write_text(&self.schema, &mut out);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Forest> {
        let mut lines = textfmt::content_lines(text).peekable();
        let (line, header) = lines
            .next()
            .ok_or_else(|| Error::Schema("empty forest file".into()))?;
        let rec = Record::parse(header, line)?;
        rec.expect_tag("forest")?;
        let feature_mode = match rec.get("feature_mode")? {
            "all" => FeatureMode::All,
            "random" => match rec.get("p")? {
                "sqrt" => FeatureMode::PerNodeRandom(None),
                _ => FeatureMode::PerNodeRandom(Some(rec.usize("p")?)),
            },
            other => return Err(textfmt::bad(line, format!("unknown feature_mode {other:?}"))),
        };
        let config = ForestConfig {
            n_trees: rec.usize("n_trees")?,
            sample_fraction: rec.f64("sample_fraction")?,
            with_replacement: parse_bool(rec.get("with_replacement")?, line)?,
            feature_mode,
            beta: rec.usize("beta")?,
            seed: rec
                .get("seed")?
                .parse()
                .map_err(|_| textfmt::bad(line, "seed is not an integer"))?,
        };
        let schema = read_schema(&mut lines)?;
        let mut trees = Vec::with_capacity(config.n_trees);
        for _ in 0..config.n_trees {
            trees.push(Tree::read_text(&mut lines, &schema)?);
        }
        if let Some((line, _)) = lines.next() {
            return Err(textfmt::bad(line, "trailing content after the last tree"));
        }
        Ok(Forest {
            trees,
            config,
            schema,
            draws: Vec::new(),
        })
    }
}

impl Classifier for Forest {
    fn schema(&self) -> &Schema {
        &self.schema
    }

    fn predict(&self, x: &[f64]) -> Result<usize> {
        Forest::predict(self, x)
    }
}

pub(crate) fn parse_bool(s: &str, line: usize) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(textfmt::bad(line, format!("{other:?} is not a boolean"))),
    }
}

/// Writes `feature` and `class` lines describing a schema.
pub(crate) fn write_schema(schema: &Schema, out: &mut String) {
    for (j, (name, kind)) in schema
        .feature_names
        .iter()
        .zip(&schema.feature_kinds)
        .enumerate()
    {
        let kind = match kind {
            crate::data::FeatureKind::Continuous => "continuous",
            crate::data::FeatureKind::Categorical => "categorical",
        };
        let _ = writeln!(out, "feature index={j} name={} kind={kind}", textfmt::quote(name));
    }
    for (c, name) in schema.class_names.iter().enumerate() {
        let _ = writeln!(out, "class index={c} name={}", textfmt::quote(name));
    }
}

/// Reads the `feature`/`class` block written by [`write_schema`].
pub(crate) fn read_schema<'a, I>(lines: &mut std::iter::Peekable<I>) -> Result<Schema>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut names = Vec::new();
    let mut kinds = Vec::new();
    let mut classes = Vec::new();
    while let Some(&(line, text)) = lines.peek() {
        let rec = Record::parse(text, line)?;
        match rec.tag.as_str() {
            "feature" => {
                if rec.usize("index")? != names.len() {
                    return Err(textfmt::bad(line, "feature indices out of order"));
                }
                names.push(rec.get("name")?.to_string());
                kinds.push(match rec.get("kind")? {
                    "continuous" => crate::data::FeatureKind::Continuous,
                    "categorical" => crate::data::FeatureKind::Categorical,
                    other => return Err(textfmt::bad(line, format!("unknown kind {other:?}"))),
                });
            }
            "class" => {
                if rec.usize("index")? != classes.len() {
                    return Err(textfmt::bad(line, "class indices out of order"));
                }
                classes.push(rec.get("name")?.to_string());
            }
            _ => break,
        }
        lines.next();
    }
    Schema::with_kinds(names, kinds, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::fit_tree;

    fn grid(n: usize) -> Dataset {
        let schema = Schema::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec!["no".into(), "yes".into()],
        )
        .unwrap();
        let rows = (0..n)
            .map(|i| {
                let a = (i % 7) as f64;
                let b = ((i * 3) % 11) as f64;
                let c = ((i * 5) % 13) as f64;
                (vec![a, b, c], usize::from(a + b > 8.0))
            })
            .collect();
        Dataset::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn presets_match_published_settings() {
        let rf1 = preset("rf1").unwrap();
        assert_eq!(rf1.n_trees, 200);
        assert_eq!(rf1.feature_mode, FeatureMode::All);
        assert!(!rf1.with_replacement);
        assert_eq!(rf1.sample_fraction, 0.63);
        assert_eq!(rf1.beta, 50);
        let rf2 = preset("rf2").unwrap();
        assert_eq!(rf2.feature_mode, FeatureMode::PerNodeRandom(None));
        assert_eq!(rf2.n_trees, 200);
        let rf3 = preset("rf3").unwrap();
        assert_eq!(rf3.sample_fraction, 0.63);
        assert_eq!(rf3.feature_mode.resolve(142).unwrap(), Some(11));
        assert!(matches!(preset("rf4"), Err(Error::Config(_))));
    }

    #[test]
    fn single_tree_forest_matches_bare_tree() {
        let d = grid(120);
        let rows = d.all_rows();
        let config = ForestConfig {
            n_trees: 1,
            sample_fraction: 1.0,
            with_replacement: false,
            feature_mode: FeatureMode::All,
            beta: 3,
            seed: 5,
        };
        let forest = fit_forest(&d, &rows, config).unwrap();
        let tree = fit_tree(
            &d,
            &rows,
            TreeConfig {
                beta: 3,
                feature_subset_size: None,
                seed: 99,
            },
        )
        .unwrap();
        assert_eq!(forest.trees()[0], tree);
    }

    #[test]
    fn draws_have_expected_size_and_no_duplicates() {
        let d = grid(200);
        let mut config = preset("rf2").unwrap();
        config.n_trees = 10;
        config.beta = 5;
        let forest = fit_forest(&d, &d.all_rows(), config).unwrap();
        for draw in forest.draws() {
            assert_eq!(draw.len(), 126);
            assert!(draw.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn with_replacement_draws_full_size() {
        let d = grid(100);
        let config = ForestConfig {
            n_trees: 5,
            sample_fraction: 1.0,
            with_replacement: true,
            feature_mode: FeatureMode::All,
            beta: 5,
            seed: 1,
        };
        let forest = fit_forest(&d, &d.all_rows(), config).unwrap();
        for draw in forest.draws() {
            assert_eq!(draw.len(), 100);
        }
        assert!(forest.draws().iter().any(|d| d.windows(2).any(|w| w[0] == w[1])));
    }

    #[test]
    fn text_round_trip() {
        let d = grid(150);
        let mut config = preset("rf2").unwrap();
        config.n_trees = 4;
        config.beta = 4;
        config.seed = 3;
        let forest = fit_forest(&d, &d.all_rows(), config).unwrap();
        let text = forest.to_text();
        let back = Forest::from_text(&text).unwrap();
        assert_eq!(back.trees(), forest.trees());
        assert_eq!(back.config(), forest.config());
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn voting_ties_go_to_lowest_class() {
        let d = grid(150);
        let mut config = preset("rf1").unwrap();
        config.n_trees = 2;
        config.beta = 1;
        let forest = fit_forest(&d, &d.all_rows(), config).unwrap();
        for r in 0..d.n_rows() {
            let votes = forest.votes(d.row(r)).unwrap();
            if votes[0] == votes[1] {
                assert_eq!(forest.predict(d.row(r)).unwrap(), 0);
            }
        }
        assert!(matches!(forest.predict(&[1.0]), Err(Error::Input(_))));
    }
}
