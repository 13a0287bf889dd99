//! Gini classification trees.
//!
//! A tree recursively partitions the training rows. At every node the split
//! minimizing the weighted child impurity `n1*Q1 + n2*Q2` is chosen, where `Q`
//! is the Gini index of a region. Growth stops when a node holds at most
//! `beta` rows, is pure, or has no split that lowers the weighted impurity.
//! Leaves keep their class proportions and predict the majority class.
//!
//! Split candidates are compared exactly. Minimizing `n1*Q1 + n2*Q2` is the
//! same as maximizing `S1/n1 + S2/n2` with `S` the sum of squared class counts,
//! and that quantity is a ratio of integers, so ties are detected without
//! rounding error and broken by the documented order: lowest feature index,
//! then smallest threshold (or lexicographically smallest category subset).

use std::cmp::Ordering;
use std::fmt::Write as _;

use rand::seq::index;

use crate::data::{class_counts, Dataset, FeatureKind, Schema};
use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, Rng};
use crate::textfmt::{self, Record};

/// Largest number of distinct categories a categorical split will enumerate.
pub const MAX_CATEGORIES: usize = 12;

/// Gini index `sum_k p_k (1 - p_k)` of a region with the given class counts.
pub fn gini(counts: &[usize]) -> Result<f64> {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return Err(Error::UndefinedRegion);
    }
    let n = n as f64;
    Ok(counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            p * (1.0 - p)
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SplitCondition {
    /// Rows with `x[feature] <= threshold` go left.
    Threshold { feature: usize, threshold: f64 },
    /// Rows whose category code is in `left_categories` (sorted) go left.
    Subset {
        feature: usize,
        left_categories: Vec<f64>,
    },
}

impl SplitCondition {
    pub fn feature(&self) -> usize {
        match self {
            SplitCondition::Threshold { feature, .. } | SplitCondition::Subset { feature, .. } => {
                *feature
            }
        }
    }

    pub fn goes_left(&self, x: &[f64]) -> bool {
        match self {
            SplitCondition::Threshold { feature, threshold } => x[*feature] <= *threshold,
            SplitCondition::Subset {
                feature,
                left_categories,
            } => left_categories.iter().any(|c| *c == x[*feature]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Internal {
        condition: SplitCondition,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
        /// `n_node * Q_parent - (n1*Q1 + n2*Q2)`.
        impurity_decrease: f64,
        n_node: usize,
    },
    Leaf {
        proportions: Vec<f64>,
        majority: usize,
        n_node: usize,
    },
}

impl TreeNode {
    pub fn n_node(&self) -> usize {
        match self {
            TreeNode::Internal { n_node, .. } | TreeNode::Leaf { n_node, .. } => *n_node,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    fn leaf(counts: &[usize]) -> TreeNode {
        let n: usize = counts.iter().sum();
        let proportions = counts.iter().map(|&c| c as f64 / n as f64).collect();
        TreeNode::Leaf {
            proportions,
            majority: argmax_first(counts),
            n_node: n,
        }
    }
}

/// Index of the largest count, lowest index on ties.
pub(crate) fn argmax_first(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeConfig {
    /// Nodes with at most `beta` rows become leaves.
    pub beta: usize,
    /// Features drawn per node; `None` searches every feature.
    pub feature_subset_size: Option<usize>,
    pub seed: u64,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig {
            beta: 50,
            feature_subset_size: None,
            seed: 0,
        }
    }
}

impl TreeConfig {
    fn validate(&self, m: usize) -> Result<()> {
        if self.beta < 1 {
            return Err(Error::Config("beta must be at least 1".into()));
        }
        if let Some(p) = self.feature_subset_size {
            if p < 1 || p > m {
                return Err(Error::Config(format!(
                    "feature subset size {p} outside 1..={m}"
                )));
            }
        }
        Ok(())
    }
}

/// `S_left/n_left + S_right/n_right` held as an exact fraction.
#[derive(Debug, Clone, Copy)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(sq_left: u128, n_left: u128, sq_right: u128, n_right: u128) -> Score {
        Score {
            num: sq_left * n_right + sq_right * n_left,
            den: n_left * n_right,
        }
    }

    fn cmp(&self, other: &Score) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSplit {
    pub condition: SplitCondition,
    /// `n1*Q1 + n2*Q2` of the two children.
    pub total_impurity: f64,
}

struct Candidate {
    condition: SplitCondition,
    score: Score,
    n: usize,
}

fn sum_sq(counts: &[usize]) -> u128 {
    counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
}

/// Finds the impurity-minimizing split of `rows` over `candidate_features`.
///
/// Returns `None` when every candidate feature is constant on `rows`.
pub fn best_split(
    data: &Dataset,
    rows: &[usize],
    candidate_features: &[usize],
) -> Result<Option<BestSplit>> {
    Ok(best_candidate(data, rows, candidate_features)?.map(|c| BestSplit {
        total_impurity: c.n as f64 - c.score.as_f64(),
        condition: c.condition,
    }))
}

fn best_candidate(
    data: &Dataset,
    rows: &[usize],
    candidate_features: &[usize],
) -> Result<Option<Candidate>> {
    let mut features = candidate_features.to_vec();
    features.sort_unstable();
    features.dedup();
    let mut best: Option<Candidate> = None;
    for &j in &features {
        let found = match data.schema().feature_kinds[j] {
            FeatureKind::Continuous => best_threshold(data, rows, j),
            FeatureKind::Categorical => best_subset(data, rows, j)?,
        };
        if let Some(c) = found {
            // Features are visited in ascending order, so only a strictly
            // better score may replace the incumbent.
            if best
                .as_ref()
                .is_none_or(|b| c.score.cmp(&b.score) == Ordering::Greater)
            {
                best = Some(c);
            }
        }
    }
    Ok(best)
}

fn best_threshold(data: &Dataset, rows: &[usize], feature: usize) -> Option<Candidate> {
    let k = data.n_classes();
    let mut pairs: Vec<(f64, usize)> = rows
        .iter()
        .map(|&r| (data.value(r, feature), data.label(r)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pairs.len();
    let mut left = vec![0u128; k];
    let mut right = vec![0u128; k];
    for &(_, y) in &pairs {
        right[y] += 1;
    }
    let mut sq_left: u128 = 0;
    let mut sq_right: u128 = right.iter().map(|c| c * c).sum();
    let mut best: Option<(Score, usize)> = None;
    for i in 0..n.saturating_sub(1) {
        let y = pairs[i].1;
        sq_left += 2 * left[y] + 1;
        left[y] += 1;
        sq_right -= 2 * right[y] - 1;
        right[y] -= 1;
        if pairs[i].0 < pairs[i + 1].0 {
            let n_left = (i + 1) as u128;
            let score = Score::new(sq_left, n_left, sq_right, n as u128 - n_left);
            if best
                .as_ref()
                .is_none_or(|(b, _)| score.cmp(b) == Ordering::Greater)
            {
                best = Some((score, i));
            }
        }
    }
    best.map(|(score, i)| {
        let lo = pairs[i].0;
        let hi = pairs[i + 1].0;
        let mid = lo + (hi - lo) / 2.0;
        // Adjacent floats can round the midpoint up onto `hi`.
        let threshold = if mid < hi { mid } else { lo };
        Candidate {
            condition: SplitCondition::Threshold { feature, threshold },
            score,
            n,
        }
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Enumerates the `2^(q-1) - 1` two-way partitions of the `q` categories present,
/// keeping the largest category on the right so each partition appears once.
fn best_subset(data: &Dataset, rows: &[usize], feature: usize) -> Result<Option<Candidate>> {
    let k = data.n_classes();
    let mut categories: Vec<f64> = rows.iter().map(|&r| data.value(r, feature)).collect();
    categories.sort_by(|a, b| a.total_cmp(b));
    categories.dedup();
    let q = categories.len();
    if q < 2 {
        return Ok(None);
    }
    if q > MAX_CATEGORIES {
        return Err(Error::Config(format!(
            "categorical feature {:?} has {q} categories in one node; at most {MAX_CATEGORIES} are supported",
            data.schema().feature_names[feature]
        )));
    }
    let mut per_category = vec![vec![0usize; k]; q];
    for &r in rows {
        let v = data.value(r, feature);
        let c = categories
            .binary_search_by(|probe| probe.total_cmp(&v))
            .expect("category collected above");
        per_category[c][data.label(r)] += 1;
    }
    let n = rows.len();
    let mut best: Option<(Score, Vec<f64>)> = None;
    for mask in 1u32..(1u32 << (q - 1)) {
        let mut left = vec![0usize; k];
        let mut right = vec![0usize; k];
        let mut subset = Vec::new();
        for (c, counts) in per_category.iter().enumerate() {
            let side = if mask & (1 << c) != 0 {
                subset.push(categories[c]);
                &mut left
            } else {
                &mut right
            };
            for (s, &x) in side.iter_mut().zip(counts) {
                *s += x;
            }
        }
        let n_left: usize = left.iter().sum();
        let score = Score::new(
            sum_sq(&left),
            n_left as u128,
            sum_sq(&right),
            (n - n_left) as u128,
        );
        let better = match &best {
            None => true,
            Some((b, s)) => match score.cmp(b) {
                Ordering::Greater => true,
                Ordering::Equal => lex_cmp(&subset, s) == Ordering::Less,
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((score, subset));
        }
    }
    Ok(best.map(|(score, left_categories)| Candidate {
        condition: SplitCondition::Subset {
            feature,
            left_categories,
        },
        score,
        n,
    }))
}

/// A fitted tree plus the dimensions it was fitted on.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    root: TreeNode,
    n_features: usize,
    n_classes: usize,
}

struct Grower<'a> {
    data: &'a Dataset,
    config: TreeConfig,
    rng: Rng,
}

/// Grows an unpruned tree on `rows` (duplicates allowed).
pub fn fit_tree(data: &Dataset, rows: &[usize], config: TreeConfig) -> Result<Tree> {
    fit_tree_with_rng(data, rows, config, rng_from_seed(config.seed))
}

pub(crate) fn fit_tree_with_rng(
    data: &Dataset,
    rows: &[usize],
    config: TreeConfig,
    rng: Rng,
) -> Result<Tree> {
    if rows.is_empty() {
        return Err(Error::Input("cannot fit a tree on zero rows".into()));
    }
    config.validate(data.n_features())?;
    let mut grower = Grower { data, config, rng };
    let root = grower.grow(rows.to_vec())?;
    Ok(Tree {
        root,
        n_features: data.n_features(),
        n_classes: data.n_classes(),
    })
}

impl Grower<'_> {
    fn candidate_features(&mut self) -> Vec<usize> {
        let m = self.data.n_features();
        match self.config.feature_subset_size {
            Some(p) if p < m => {
                let mut f = index::sample(&mut self.rng, m, p).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..m).collect(),
        }
    }

    fn grow(&mut self, rows: Vec<usize>) -> Result<TreeNode> {
        let counts = class_counts(self.data, &rows);
        let n = rows.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if n <= self.config.beta || pure || self.data.n_features() == 0 {
            return Ok(TreeNode::leaf(&counts));
        }
        let features = self.candidate_features();
        let Some(best) = best_candidate(self.data, &rows, &features)? else {
            return Ok(TreeNode::leaf(&counts));
        };
        // Parent's own score is S/n; the split must beat it strictly.
        let parent_sq = sum_sq(&counts);
        let gain_num = best.score.num * n as u128;
        let parent_num = parent_sq * best.score.den;
        if gain_num <= parent_num {
            return Ok(TreeNode::leaf(&counts));
        }
        let impurity_decrease =
            (gain_num - parent_num) as f64 / (best.score.den * n as u128) as f64;

        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&r| best.condition.goes_left(self.data.row(r)));
        let left = self.grow(left_rows)?;
        let right = self.grow(right_rows)?;
        Ok(TreeNode::Internal {
            condition: best.condition,
            left: Box::new(left),
            right: Box::new(right),
            impurity_decrease,
            n_node: n,
        })
    }
}

impl Tree {
    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn check_width(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::Input(format!(
                "feature vector has width {}, tree expects {}",
                x.len(),
                self.n_features
            )));
        }
        Ok(())
    }

    /// The leaf whose region contains `x`. Width is not checked.
    pub fn leaf_for(&self, x: &[f64]) -> &TreeNode {
        let mut node = &self.root;
        while let TreeNode::Internal {
            condition,
            left,
            right,
            ..
        } = node
        {
            node = if condition.goes_left(x) { left } else { right };
        }
        node
    }

    pub(crate) fn predict_unchecked(&self, x: &[f64]) -> usize {
        match self.leaf_for(x) {
            TreeNode::Leaf { majority, .. } => *majority,
            TreeNode::Internal { .. } => unreachable!("leaf_for stops at leaves"),
        }
    }

    /// Majority class of the leaf containing `x`.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        self.check_width(x)?;
        Ok(self.predict_unchecked(x))
    }

    /// Per-feature sum of the impurity decreases of the splits made on it.
    pub fn gini_decreases(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_features];
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if let TreeNode::Internal {
                condition,
                left,
                right,
                impurity_decrease,
                ..
            } = node
            {
                out[condition.feature()] += impurity_decrease;
                stack.push(right);
                stack.push(left);
            }
        }
        out
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            match node {
                TreeNode::Internal { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
                leaf => out.push(leaf),
            }
        }
        out
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves().len()
    }

    pub fn depth(&self) -> usize {
        fn depth(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Internal { left, right, .. } => 1 + depth(left).max(depth(right)),
            }
        }
        depth(&self.root)
    }

    /// Writes the tree in preorder, one node per line, indented by depth.
    pub fn write_text(&self, schema: &Schema, out: &mut String) {
        let _ = writeln!(
            out,
            "tree features={} classes={} leaves={} depth={}",
            self.n_features,
            self.n_classes,
            self.n_leaves(),
            self.depth()
        );
        write_node(&self.root, schema, 1, out);
    }

    pub fn to_text(&self, schema: &Schema) -> String {
        let mut s = String::new();
        self.write_text(schema, &mut s);
        s
    }

    /// Parses a tree written by [`Tree::write_text`] from a line stream.
    pub fn read_text<'a, I>(lines: &mut I, schema: &Schema) -> Result<Tree>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let (line, text) = lines
            .next()
            .ok_or_else(|| Error::Schema("unexpected end of input, expected a tree".into()))?;
        let header = Record::parse(text, line)?;
        header.expect_tag("tree")?;
        let n_features = header.usize("features")?;
        let n_classes = header.usize("classes")?;
        if n_features != schema.n_features() || n_classes != schema.n_classes() {
            return Err(textfmt::bad(
                line,
                format!(
                    "tree has {n_features} features / {n_classes} classes, schema has {} / {}",
                    schema.n_features(),
                    schema.n_classes()
                ),
            ));
        }
        let root = read_node(lines, schema)?;
        Ok(Tree {
            root,
            n_features,
            n_classes,
        })
    }

    pub fn from_text(text: &str, schema: &Schema) -> Result<Tree> {
        let mut lines = textfmt::content_lines(text);
        Tree::read_text(&mut lines, schema)
    }
}

fn write_node(node: &TreeNode, schema: &Schema, depth: usize, out: &mut String) {
    let indent = "  ".repeat(depth);
    match node {
        TreeNode::Leaf {
            proportions,
            majority,
            n_node,
        } => {
            let _ = writeln!(
                out,
                "{indent}leaf n={n_node} majority={majority} class={} p={}",
                textfmt::quote(&schema.class_names[*majority]),
                textfmt::float_list(proportions)
            );
        }
        TreeNode::Internal {
            condition,
            left,
            right,
            impurity_decrease,
            n_node,
        } => {
            let j = condition.feature();
            let test = match condition {
                SplitCondition::Threshold { threshold, .. } => {
                    format!("le={}", textfmt::float(*threshold))
                }
                SplitCondition::Subset {
                    left_categories, ..
                } => format!("in={}", textfmt::float_list(left_categories)),
            };
            let _ = writeln!(
                out,
                "{indent}split feature={j} name={} {test} n={n_node} decrease={}",
                textfmt::quote(&schema.feature_names[j]),
                textfmt::float(*impurity_decrease)
            );
            write_node(left, schema, depth + 1, out);
            write_node(right, schema, depth + 1, out);
        }
    }
}

fn read_node<'a, I>(lines: &mut I, schema: &Schema) -> Result<TreeNode>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let (line, text) = lines
        .next()
        .ok_or_else(|| Error::Schema("unexpected end of input inside a tree".into()))?;
    let rec = Record::parse(text, line)?;
    match rec.tag.as_str() {
        "leaf" => {
            let proportions = rec.f64_list("p")?;
            let majority = rec.usize("majority")?;
            if proportions.len() != schema.n_classes() || majority >= schema.n_classes() {
                return Err(textfmt::bad(line, "leaf does not match the class count"));
            }
            Ok(TreeNode::Leaf {
                proportions,
                majority,
                n_node: rec.usize("n")?,
            })
        }
        "split" => {
            let feature = rec.usize("feature")?;
            if feature >= schema.n_features() || rec.get("name")? != schema.feature_names[feature]
            {
                return Err(textfmt::bad(
                    line,
                    format!("split feature {feature} does not match the schema"),
                ));
            }
            let condition = if rec.get("le").is_ok() {
                SplitCondition::Threshold {
                    feature,
                    threshold: rec.f64("le")?,
                }
            } else {
                SplitCondition::Subset {
                    feature,
                    left_categories: rec.f64_list("in")?,
                }
            };
            let left = read_node(lines, schema)?;
            let right = read_node(lines, schema)?;
            Ok(TreeNode::Internal {
                condition,
                left: Box::new(left),
                right: Box::new(right),
                impurity_decrease: rec.f64("decrease")?,
                n_node: rec.usize("n")?,
            })
        }
        other => Err(textfmt::bad(line, format!("unknown node tag `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(xs: &[f64], ys: &[usize], k: usize) -> Dataset {
        let schema = Schema::new(
            vec!["x".into()],
            (0..k).map(|c| ["A", "B", "C"][c].to_string()).collect(),
        )
        .unwrap();
        let rows = xs.iter().zip(ys).map(|(&x, &y)| (vec![x], y)).collect();
        Dataset::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn gini_values() {
        assert_eq!(gini(&[10, 0]).unwrap(), 0.0);
        assert_eq!(gini(&[5, 5]).unwrap(), 0.5);
        assert!((gini(&[2, 1, 1]).unwrap() - 0.625).abs() < 1e-15);
        assert!(matches!(gini(&[0, 0]), Err(Error::UndefinedRegion)));
    }

    #[test]
    fn four_point_split() {
        let d = toy(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1], 2);
        let s = best_split(&d, &[0, 1, 2, 3], &[0]).unwrap().unwrap();
        assert_eq!(
            s.condition,
            SplitCondition::Threshold {
                feature: 0,
                threshold: 2.5
            }
        );
        assert_eq!(s.total_impurity, 0.0);
    }

    #[test]
    fn constant_feature_has_no_split() {
        let d = toy(&[3.0, 3.0, 3.0], &[0, 1, 0], 2);
        assert!(best_split(&d, &[0, 1, 2], &[0]).unwrap().is_none());
        let tree = fit_tree(&d, &[0, 1, 2], TreeConfig { beta: 1, ..Default::default() }).unwrap();
        assert!(tree.root().is_leaf());
    }

    #[test]
    fn fit_and_predict_four_points() {
        let d = toy(&[1.0, 2.0, 3.0, 4.0], &[0, 0, 1, 1], 2);
        let cfg = TreeConfig {
            beta: 1,
            feature_subset_size: None,
            seed: 0,
        };
        let tree = fit_tree(&d, &d.all_rows(), cfg).unwrap();
        assert_eq!(tree.n_leaves(), 2);
        assert_eq!(tree.predict(&[1.7]).unwrap(), 0);
        assert_eq!(tree.predict(&[2.5]).unwrap(), 0);
        assert_eq!(tree.predict(&[2.6]).unwrap(), 1);
        assert!(matches!(tree.predict(&[1.0, 2.0]), Err(Error::Input(_))));
        assert_eq!(tree.gini_decreases(), vec![2.0]);
    }

    #[test]
    fn beta_stops_growth() {
        let d = toy(&[1.0, 2.0, 3.0, 4.0, 5.0], &[0, 1, 1, 0, 1], 2);
        let tree = fit_tree(&d, &d.all_rows(), TreeConfig { beta: 5, ..Default::default() }).unwrap();
        match tree.root() {
            TreeNode::Leaf {
                majority,
                proportions,
                n_node,
            } => {
                assert_eq!(*majority, 1);
                assert_eq!(*n_node, 5);
                assert!((proportions[1] - 0.6).abs() < 1e-12);
            }
            _ => panic!("expected a single leaf"),
        }
        assert_eq!(tree.gini_decreases(), vec![0.0]);
    }

    #[test]
    fn pure_node_is_one_hot_leaf() {
        let d = toy(&[1.0, 2.0, 3.0], &[2, 2, 2], 3);
        let tree = fit_tree(&d, &d.all_rows(), TreeConfig { beta: 1, ..Default::default() }).unwrap();
        assert_eq!(
            tree.root(),
            &TreeNode::Leaf {
                proportions: vec![0.0, 0.0, 1.0],
                majority: 2,
                n_node: 3
            }
        );
    }

    #[test]
    fn leaf_majority_tie_goes_to_lowest_class() {
        let d = toy(&[1.0, 1.0], &[1, 0], 2);
        let tree = fit_tree(&d, &d.all_rows(), TreeConfig::default()).unwrap();
        assert_eq!(tree.predict(&[0.0]).unwrap(), 0);
    }

    #[test]
    fn categorical_split_groups_categories() {
        let schema = Schema::with_kinds(
            vec!["c".into()],
            vec![FeatureKind::Categorical],
            vec!["A".into(), "B".into()],
        )
        .unwrap();
        // Categories 0 and 2 are class A, 1 is class B.
        let rows = [0.0, 1.0, 2.0, 0.0, 1.0, 2.0]
            .iter()
            .map(|&c| (vec![c], usize::from(c == 1.0)))
            .collect();
        let d = Dataset::from_rows(schema, rows).unwrap();
        let s = best_split(&d, &d.all_rows(), &[0]).unwrap().unwrap();
        // {0,2} | {1} and {1} | {0,2} are the same partition; the largest
        // category stays right, leaving {1} on the left.
        assert_eq!(
            s.condition,
            SplitCondition::Subset {
                feature: 0,
                left_categories: vec![1.0]
            }
        );
        assert_eq!(s.total_impurity, 0.0);
    }

    #[test]
    fn too_many_categories_is_an_error() {
        let schema = Schema::with_kinds(
            vec!["c".into()],
            vec![FeatureKind::Categorical],
            vec!["A".into(), "B".into()],
        )
        .unwrap();
        let rows = (0..13).map(|c| (vec![c as f64], c % 2)).collect();
        let d = Dataset::from_rows(schema, rows).unwrap();
        assert!(matches!(best_split(&d, &d.all_rows(), &[0]), Err(Error::Config(_))));
    }

    #[test]
    fn text_round_trip() {
        let d = toy(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[0, 0, 1, 1, 0, 2], 3);
        let tree = fit_tree(&d, &d.all_rows(), TreeConfig { beta: 1, ..Default::default() }).unwrap();
        let text = tree.to_text(d.schema());
        let back = Tree::from_text(&text, d.schema()).unwrap();
        assert_eq!(back, tree);
        assert_eq!(back.to_text(d.schema()), text);
    }

    #[test]
    fn invalid_subset_size_rejected() {
        let d = toy(&[1.0, 2.0], &[0, 1], 2);
        let cfg = TreeConfig {
            beta: 1,
            feature_subset_size: Some(2),
            seed: 0,
        };
        assert!(matches!(fit_tree(&d, &[0, 1], cfg), Err(Error::Config(_))));
    }
}
