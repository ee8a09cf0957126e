//! Classifiers and training: the veto-then-linear heuristic model, exhaustive
//! grid search, a subgradient hinge-loss trainer, and a depth-limited
//! decision tree, plus a versioned text format for all three.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::eval::{self, MetricReport, Predictor};
use crate::features::FeatureVector;

/// Weighted sum against a threshold: predicts Y iff Σ wᵢ·fᵢ ≥ θ.
/// The boundary is inclusive, fixed once for determinism.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: BTreeMap<String, f64>,
    pub theta: f64,
}

impl LinearModel {
    pub fn score(&self, fv: &FeatureVector) -> Result<f64> {
        let mut total = 0.0;
        for (name, w) in &self.weights {
            let v = fv
                .get(name)
                .ok_or_else(|| Error::MissingFeature(name.clone()))?;
            total += w * v;
        }
        Ok(total)
    }
}

pub fn predict_linear(m: &LinearModel, fv: &FeatureVector) -> Result<Label> {
    Ok(if m.score(fv)? >= m.theta {
        Label::Y
    } else {
        Label::N
    })
}

/// Veto rules evaluated before the linear score: an antonym hit or a
/// negation-parity mismatch forces N when the corresponding flag is set.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicModel {
    pub base: LinearModel,
    pub veto_antonym: bool,
    pub veto_negation_parity: bool,
}

pub fn predict_heuristic(m: &HeuristicModel, fv: &FeatureVector) -> Result<Label> {
    if m.veto_antonym {
        let hits = fv
            .get("antonym_count")
            .ok_or_else(|| Error::MissingFeature("antonym_count".into()))?;
        if hits > 0.0 {
            return Ok(Label::N);
        }
    }
    if m.veto_negation_parity {
        let parity = fv
            .get("neg_parity")
            .ok_or_else(|| Error::MissingFeature("neg_parity".into()))?;
        if parity == 0.0 {
            return Ok(Label::N);
        }
    }
    predict_linear(&m.base, fv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    MacroF1,
    Accuracy,
}

impl Objective {
    pub fn evaluate(&self, report: &MetricReport) -> f64 {
        match self {
            Objective::MacroF1 => report.macro_f1,
            Objective::Accuracy => report.accuracy,
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::MacroF1 => "macrof1",
            Objective::Accuracy => "accuracy",
        })
    }
}

#[derive(Debug, Clone)]
enum GridParam {
    Weight(String, Vec<f64>),
    Theta(Vec<f64>),
    VetoAntonym(Vec<bool>),
    VetoNegationParity(Vec<bool>),
}

impl GridParam {
    fn len(&self) -> usize {
        match self {
            GridParam::Weight(_, v) => v.len(),
            GridParam::Theta(v) => v.len(),
            GridParam::VetoAntonym(v) | GridParam::VetoNegationParity(v) => v.len(),
        }
    }

    fn name(&self) -> String {
        match self {
            GridParam::Weight(n, _) => format!("weight {n}"),
            GridParam::Theta(_) => "theta".to_string(),
            GridParam::VetoAntonym(_) => "veto_antonym".to_string(),
            GridParam::VetoNegationParity(_) => "veto_negation_parity".to_string(),
        }
    }

    fn value_str(&self, i: usize) -> String {
        match self {
            GridParam::Weight(_, v) => format!("{:?}", v[i]),
            GridParam::Theta(v) => format!("{:?}", v[i]),
            GridParam::VetoAntonym(v) | GridParam::VetoNegationParity(v) => {
                if v[i] { "on" } else { "off" }.to_string()
            }
        }
    }
}

pub const DEFAULT_GRID_CAP: usize = 1_000_000;

/// Candidate value lists per parameter, enumerated lexicographically: the
/// first parameter in file order is the most significant digit, values in
/// listed order. Ties in the search resolve to the smallest index.
#[derive(Debug, Clone)]
pub struct GridSpec {
    params: Vec<GridParam>,
    pub objective: Objective,
    pub cap: usize,
}

impl GridSpec {
    pub fn new(objective: Objective) -> Self {
        GridSpec {
            params: Vec::new(),
            objective,
            cap: DEFAULT_GRID_CAP,
        }
    }

    pub fn add_weight(&mut self, feature: &str, candidates: Vec<f64>) -> &mut Self {
        self.params
            .push(GridParam::Weight(feature.to_string(), candidates));
        self
    }

    pub fn add_theta(&mut self, candidates: Vec<f64>) -> &mut Self {
        self.params.push(GridParam::Theta(candidates));
        self
    }

    pub fn add_veto_antonym(&mut self, candidates: Vec<bool>) -> &mut Self {
        self.params.push(GridParam::VetoAntonym(candidates));
        self
    }

    pub fn add_veto_negation_parity(&mut self, candidates: Vec<bool>) -> &mut Self {
        self.params.push(GridParam::VetoNegationParity(candidates));
        self
    }

    pub fn size(&self) -> usize {
        self.params.iter().map(GridParam::len).product()
    }

    fn check(&self) -> Result<()> {
        if self.params.iter().any(|p| p.len() == 0) {
            return Err(Error::Config("grid parameter with no candidates".into()));
        }
        let size = self.size();
        if size == 0 {
            return Err(Error::Config("empty grid".into()));
        }
        if size > self.cap {
            return Err(Error::GridTooLarge {
                size,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Mixed-radix decode of an enumeration index into one model.
    pub fn model_at(&self, index: usize) -> HeuristicModel {
        let choices = self.choices_at(index);
        let mut weights = BTreeMap::new();
        let mut theta = 0.0;
        let mut veto_antonym = false;
        let mut veto_negation_parity = false;
        for (param, choice) in self.params.iter().zip(choices) {
            match param {
                GridParam::Weight(name, v) => {
                    weights.insert(name.clone(), v[choice]);
                }
                GridParam::Theta(v) => theta = v[choice],
                GridParam::VetoAntonym(v) => veto_antonym = v[choice],
                GridParam::VetoNegationParity(v) => veto_negation_parity = v[choice],
            }
        }
        HeuristicModel {
            base: LinearModel { weights, theta },
            veto_antonym,
            veto_negation_parity,
        }
    }

    fn choices_at(&self, mut index: usize) -> Vec<usize> {
        let mut choices = vec![0; self.params.len()];
        for (slot, param) in self.params.iter().enumerate().rev() {
            let len = param.len();
            choices[slot] = index % len;
            index /= len;
        }
        choices
    }

    pub fn describe(&self, index: usize) -> String {
        let choices = self.choices_at(index);
        self.params
            .iter()
            .zip(choices)
            .map(|(p, c)| format!("{}={}", p.name(), p.value_str(c)))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Loads `param: v1,v2,…` lines plus `objective: macrof1|accuracy`.
    /// Weight parameters are written `weight <feature>: …`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut spec = GridSpec::new(Objective::MacroF1);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::format(path, lineno + 1, "expected `param: v1,v2,…`"))?;
            let key = key.trim();
            let rest = rest.trim();
            let floats = |s: &str| -> Result<Vec<f64>> {
                s.split(',')
                    .map(|v| {
                        v.trim().parse::<f64>().map_err(|_| {
                            Error::format(path, lineno + 1, format!("bad number `{v}`"))
                        })
                    })
                    .collect()
            };
            let bools = |s: &str| -> Result<Vec<bool>> {
                s.split(',')
                    .map(|v| match v.trim() {
                        "on" | "true" | "1" => Ok(true),
                        "off" | "false" | "0" => Ok(false),
                        other => Err(Error::format(
                            path,
                            lineno + 1,
                            format!("bad flag value `{other}`"),
                        )),
                    })
                    .collect()
            };
            match key {
                "objective" => {
                    spec.objective = match rest.to_ascii_lowercase().as_str() {
                        "macrof1" => Objective::MacroF1,
                        "accuracy" => Objective::Accuracy,
                        other => {
                            return Err(Error::format(
                                path,
                                lineno + 1,
                                format!("unknown objective `{other}`"),
                            ))
                        }
                    };
                }
                "theta" => {
                    spec.add_theta(floats(rest)?);
                }
                "veto_antonym" => {
                    spec.add_veto_antonym(bools(rest)?);
                }
                "veto_negation_parity" => {
                    spec.add_veto_negation_parity(bools(rest)?);
                }
                other => match other.strip_prefix("weight ") {
                    Some(feature) => {
                        spec.add_weight(feature.trim(), floats(rest)?);
                    }
                    None => {
                        return Err(Error::format(
                            path,
                            lineno + 1,
                            format!("unknown grid parameter `{other}`"),
                        ))
                    }
                },
            }
        }
        if spec.params.is_empty() {
            return Err(Error::format(path, 0, "grid spec declares no parameters"));
        }
        Ok(spec)
    }
}

/// Full score table from one grid run, indexed by enumeration order.
#[derive(Debug, Clone)]
pub struct TrainReport {
    pub objective: Objective,
    pub grid_size: usize,
    pub best_index: usize,
    pub best_score: f64,
    pub scores: Vec<f64>,
}

impl TrainReport {
    pub fn to_table(&self, grid: &GridSpec) -> String {
        let mut out = format!(
            "# objective={} grid_size={} best_index={} best_score={:.6}\n",
            self.objective, self.grid_size, self.best_index, self.best_score
        );
        out.push_str("index\tscore\tparams\n");
        for (i, s) in self.scores.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{s:.6}\t{}", grid.describe(i));
        }
        out
    }
}

/// Exhaustively evaluates every grid point and returns the argmax of the
/// objective; ties go to the first point in enumeration order. Points are
/// scored in parallel with a deterministic (score, index) reduction.
pub fn train_grid(
    vectors: &[FeatureVector],
    labels: &[Label],
    grid: &GridSpec,
) -> Result<(HeuristicModel, TrainReport)> {
    check_training_data(vectors, labels)?;
    grid.check()?;
    let size = grid.size();

    let scores: Vec<f64> = (0..size)
        .into_par_iter()
        .map(|index| -> Result<f64> {
            let model = grid.model_at(index);
            let preds: Vec<Label> = vectors
                .iter()
                .map(|fv| predict_heuristic(&model, fv))
                .collect::<Result<_>>()?;
            Ok(grid.objective.evaluate(&eval::score(&preds, labels)?))
        })
        .collect::<Result<_>>()?;

    let (best_index, best_score) = scores
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bs), (i, &s)| {
            if s > bs {
                (i, s)
            } else {
                (bi, bs)
            }
        });

    Ok((
        grid.model_at(best_index),
        TrainReport {
            objective: grid.objective,
            grid_size: size,
            best_index,
            best_score,
            scores,
        },
    ))
}

fn check_training_data(vectors: &[FeatureVector], labels: &[Label]) -> Result<()> {
    if vectors.is_empty() || labels.is_empty() {
        return Err(Error::EmptyData);
    }
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            preds: vectors.len(),
            golds: labels.len(),
        });
    }
    if !labels.contains(&Label::Y) || !labels.contains(&Label::N) {
        return Err(Error::SingleClassData);
    }
    for fv in vectors {
        for (name, v) in fv.iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteFeature(name.to_string()));
            }
        }
    }
    Ok(())
}

/// Regularized hinge objective: reg/2·‖w‖² + mean over samples of
/// max(0, 1 − y·(w·x + b)), with θ read as −b.
pub fn hinge_objective(
    m: &LinearModel,
    vectors: &[FeatureVector],
    labels: &[Label],
    reg: f64,
) -> Result<f64> {
    let norm_sq: f64 = m.weights.values().map(|w| w * w).sum();
    let mut total = 0.0;
    for (fv, label) in vectors.iter().zip(labels) {
        let y = if *label == Label::Y { 1.0 } else { -1.0 };
        let margin = y * (m.score(fv)? - m.theta);
        total += (1.0 - margin).max(0.0);
    }
    Ok(reg / 2.0 * norm_sq + total / vectors.len() as f64)
}

/// Subgradient descent on the regularized hinge loss with labels mapped
/// Y→+1 / N→−1 and the threshold folded in as a bias feature. Samples are
/// reshuffled each epoch with the seeded generator; subgradient steps are
/// not monotone, so the epoch iterate with the lowest objective is returned.
pub fn train_margin(
    vectors: &[FeatureVector],
    labels: &[Label],
    epochs: usize,
    step: f64,
    reg: f64,
    seed: u64,
) -> Result<LinearModel> {
    check_training_data(vectors, labels)?;
    let names: Vec<String> = vectors[0].names().map(str::to_string).collect();
    let rows: Vec<(Vec<f64>, f64)> = vectors
        .iter()
        .zip(labels)
        .map(|(fv, label)| -> Result<(Vec<f64>, f64)> {
            let xs = names
                .iter()
                .map(|n| fv.get(n).ok_or_else(|| Error::MissingFeature(n.clone())))
                .collect::<Result<Vec<f64>>>()?;
            Ok((xs, if *label == Label::Y { 1.0 } else { -1.0 }))
        })
        .collect::<Result<_>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![0.0f64; names.len()];
    let mut b = 0.0f64;
    let mut order: Vec<usize> = (0..rows.len()).collect();

    let as_model = |w: &[f64], b: f64| LinearModel {
        weights: names.iter().cloned().zip(w.iter().copied()).collect(),
        theta: -b,
    };

    let mut best = as_model(&w, b);
    let mut best_loss = hinge_objective(&best, vectors, labels, reg)?;

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (xs, y) = &rows[i];
            let margin = y * (dot(&w, xs) + b);
            for (wj, xj) in w.iter_mut().zip(xs) {
                let mut grad = reg * *wj;
                if margin < 1.0 {
                    grad -= y * xj;
                }
                *wj -= step * grad;
            }
            if margin < 1.0 {
                b += step * y;
            }
        }
        let candidate = as_model(&w, b);
        let loss = hinge_objective(&candidate, vectors, labels, reg)?;
        if loss < best_loss {
            best_loss = loss;
            best = candidate;
        }
    }
    Ok(best)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Binary decision tree over single-feature threshold tests.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSplit {
    Leaf(Label),
    Split {
        feature: String,
        threshold: f64,
        below: Box<TreeSplit>,
        above: Box<TreeSplit>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub root: TreeSplit,
    pub max_depth: usize,
}

/// Greedy entropy-gain induction. Candidate thresholds are midpoints of
/// consecutive distinct values; zero-gain splits are still taken on impure
/// nodes so parity-style concepts remain learnable. Leaves take the
/// majority label, ties going to N.
pub fn train_tree(
    vectors: &[FeatureVector],
    labels: &[Label],
    max_depth: usize,
) -> Result<TreeModel> {
    if vectors.is_empty() || labels.is_empty() {
        return Err(Error::EmptyData);
    }
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            preds: vectors.len(),
            golds: labels.len(),
        });
    }
    if max_depth == 0 {
        return Err(Error::Config("max_depth must be at least 1".into()));
    }
    let names: Vec<String> = vectors[0].names().map(str::to_string).collect();
    let rows: Vec<usize> = (0..vectors.len()).collect();
    let root = grow(vectors, labels, &names, &rows, 0, max_depth)?;
    Ok(TreeModel { root, max_depth })
}

fn majority(labels: &[Label], rows: &[usize]) -> Label {
    let ys = rows.iter().filter(|&&i| labels[i] == Label::Y).count();
    let ns = rows.len() - ys;
    if ys > ns {
        Label::Y
    } else {
        Label::N // ties are conservative
    }
}

fn entropy(labels: &[Label], rows: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let ys = rows.iter().filter(|&&i| labels[i] == Label::Y).count() as f64;
    let n = rows.len() as f64;
    let mut h = 0.0;
    for p in [ys / n, (n - ys) / n] {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

fn grow(
    vectors: &[FeatureVector],
    labels: &[Label],
    names: &[String],
    rows: &[usize],
    depth: usize,
    max_depth: usize,
) -> Result<TreeSplit> {
    let pure = rows
        .iter()
        .all(|&i| labels[i] == labels[rows[0]]);
    if pure {
        return Ok(TreeSplit::Leaf(labels[rows[0]]));
    }
    if depth >= max_depth {
        return Ok(TreeSplit::Leaf(majority(labels, rows)));
    }

    let parent_entropy = entropy(labels, rows);
    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature slot, threshold)
    for (slot, name) in names.iter().enumerate() {
        let mut values: Vec<f64> = rows
            .iter()
            .map(|&i| {
                vectors[i]
                    .get(name)
                    .ok_or_else(|| Error::MissingFeature(name.clone()))
            })
            .collect::<Result<_>>()?;
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let below: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| vectors[i].get(name).unwrap() < threshold)
                .collect();
            let above: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| vectors[i].get(name).unwrap() >= threshold)
                .collect();
            let weighted = (below.len() as f64 * entropy(labels, &below)
                + above.len() as f64 * entropy(labels, &above))
                / rows.len() as f64;
            let gain = parent_entropy - weighted;
            if best.is_none() || gain > best.unwrap().0 {
                best = Some((gain, slot, threshold));
            }
        }
    }

    match best {
        None => Ok(TreeSplit::Leaf(majority(labels, rows))),
        Some((_, slot, threshold)) => {
            let name = &names[slot];
            let below_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| vectors[i].get(name).unwrap() < threshold)
                .collect();
            let above_rows: Vec<usize> = rows
                .iter()
                .copied()
                .filter(|&i| vectors[i].get(name).unwrap() >= threshold)
                .collect();
            Ok(TreeSplit::Split {
                feature: name.clone(),
                threshold,
                below: Box::new(grow(vectors, labels, names, &below_rows, depth + 1, max_depth)?),
                above: Box::new(grow(vectors, labels, names, &above_rows, depth + 1, max_depth)?),
            })
        }
    }
}

pub fn predict_tree(m: &TreeModel, fv: &FeatureVector) -> Result<Label> {
    let mut node = &m.root;
    loop {
        match node {
            TreeSplit::Leaf(label) => return Ok(*label),
            TreeSplit::Split {
                feature,
                threshold,
                below,
                above,
            } => {
                let v = fv
                    .get(feature)
                    .ok_or_else(|| Error::MissingFeature(feature.clone()))?;
                node = if v < *threshold { below } else { above };
            }
        }
    }
}

/// Any trained model, tagged for serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Heuristic(HeuristicModel),
    Tree(TreeModel),
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Linear(_) => "linear",
            Model::Heuristic(_) => "heuristic",
            Model::Tree(_) => "tree",
        }
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<Label> {
        match self {
            Model::Linear(m) => predict_linear(m, fv),
            Model::Heuristic(m) => predict_heuristic(m, fv),
            Model::Tree(m) => predict_tree(m, fv),
        }
    }
}

impl Predictor for Model {
    fn predict(&self, fv: &FeatureVector) -> Result<Label> {
        Model::predict(self, fv)
    }
}

const MODEL_MAGIC: &str = "entailkit-model v1";

/// Serializes to the versioned text format; floats use the shortest
/// round-trip decimal form, so load(save(m)) reproduces m exactly.
pub fn save_model(path: impl AsRef<Path>, model: &Model) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_model(model)).map_err(|e| Error::io(path, e))
}

fn render_model(model: &Model) -> String {
    let mut out = format!("{MODEL_MAGIC} {}\n", model.kind());
    match model {
        Model::Linear(m) => render_linear(&mut out, m),
        Model::Heuristic(m) => {
            render_linear(&mut out, &m.base);
            let _ = writeln!(out, "veto_antonym\t{}", m.veto_antonym);
            let _ = writeln!(out, "veto_negation_parity\t{}", m.veto_negation_parity);
        }
        Model::Tree(m) => {
            let _ = writeln!(out, "max_depth\t{}", m.max_depth);
            let mut line = String::from("tree\t");
            render_split(&mut line, &m.root);
            out.push_str(&line);
            out.push('\n');
        }
    }
    out
}

fn render_linear(out: &mut String, m: &LinearModel) {
    for (name, w) in &m.weights {
        let _ = writeln!(out, "weight\t{name}\t{w:?}");
    }
    let _ = writeln!(out, "theta\t{:?}", m.theta);
}

fn render_split(out: &mut String, node: &TreeSplit) {
    match node {
        TreeSplit::Leaf(label) => {
            let _ = write!(out, "(leaf {label})");
        }
        TreeSplit::Split {
            feature,
            threshold,
            below,
            above,
        } => {
            let _ = write!(out, "(split {feature} {threshold:?} ");
            render_split(out, below);
            out.push(' ');
            render_split(out, above);
            out.push(')');
        }
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::ModelFormat {
            path: path.into(),
            msg: "empty file".into(),
        })?
        .trim();
    let kind = match header.strip_prefix(MODEL_MAGIC) {
        Some(rest) => rest.trim(),
        None => return Err(Error::ModelVersion(header.to_string())),
    };

    let mut weights = BTreeMap::new();
    let mut theta = 0.0f64;
    let mut veto_antonym = false;
    let mut veto_negation_parity = false;
    let mut max_depth = 1usize;
    let mut root: Option<TreeSplit> = None;

    let bad = |msg: String| Error::ModelFormat {
        path: path.into(),
        msg,
    };

    for line in lines {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            ["weight", name, value] => {
                let w: f64 = value
                    .parse()
                    .map_err(|_| bad(format!("bad weight `{value}`")))?;
                weights.insert(name.to_string(), w);
            }
            ["theta", value] => {
                theta = value
                    .parse()
                    .map_err(|_| bad(format!("bad theta `{value}`")))?;
            }
            ["veto_antonym", value] => {
                veto_antonym = value
                    .parse()
                    .map_err(|_| bad(format!("bad flag `{value}`")))?;
            }
            ["veto_negation_parity", value] => {
                veto_negation_parity = value
                    .parse()
                    .map_err(|_| bad(format!("bad flag `{value}`")))?;
            }
            ["max_depth", value] => {
                max_depth = value
                    .parse()
                    .map_err(|_| bad(format!("bad max_depth `{value}`")))?;
            }
            ["tree", encoded] => {
                let tokens = split_tokens(encoded);
                let mut pos = 0;
                let parsed = parse_split(&tokens, &mut pos).map_err(&bad)?;
                if pos != tokens.len() {
                    return Err(bad("trailing content after tree".into()));
                }
                root = Some(parsed);
            }
            other => {
                return Err(bad(format!("unrecognized line `{}`", other.join("\\t"))));
            }
        }
    }

    match kind {
        "linear" => Ok(Model::Linear(LinearModel { weights, theta })),
        "heuristic" => Ok(Model::Heuristic(HeuristicModel {
            base: LinearModel { weights, theta },
            veto_antonym,
            veto_negation_parity,
        })),
        "tree" => Ok(Model::Tree(TreeModel {
            root: root.ok_or_else(|| bad("tree model without a tree line".into()))?,
            max_depth,
        })),
        other => Err(bad(format!("unknown model kind `{other}`"))),
    }
}

fn split_tokens(s: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut atom = String::new();
    for ch in s.chars() {
        match ch {
            '(' | ')' => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !atom.is_empty() {
                    tokens.push(std::mem::take(&mut atom));
                }
            }
            c => atom.push(c),
        }
    }
    if !atom.is_empty() {
        tokens.push(atom);
    }
    tokens
}

fn parse_split(tokens: &[String], pos: &mut usize) -> std::result::Result<TreeSplit, String> {
    let expect = |pos: &mut usize, want: &str| -> std::result::Result<(), String> {
        match tokens.get(*pos).map(String::as_str) {
            Some(t) if t == want => {
                *pos += 1;
                Ok(())
            }
            other => Err(format!("expected `{want}`, found {other:?}")),
        }
    };
    expect(pos, "(")?;
    match tokens.get(*pos).map(String::as_str) {
        Some("leaf") => {
            *pos += 1;
            let label = match tokens.get(*pos).map(String::as_str) {
                Some("Y") => Label::Y,
                Some("N") => Label::N,
                other => return Err(format!("expected Y or N, found {other:?}")),
            };
            *pos += 1;
            expect(pos, ")")?;
            Ok(TreeSplit::Leaf(label))
        }
        Some("split") => {
            *pos += 1;
            let feature = tokens
                .get(*pos)
                .ok_or("missing split feature")?
                .to_string();
            *pos += 1;
            let threshold: f64 = tokens
                .get(*pos)
                .ok_or("missing split threshold")?
                .parse()
                .map_err(|_| "bad split threshold".to_string())?;
            *pos += 1;
            let below = parse_split(tokens, pos)?;
            let above = parse_split(tokens, pos)?;
            expect(pos, ")")?;
            Ok(TreeSplit::Split {
                feature,
                threshold,
                below: Box::new(below),
                above: Box::new(above),
            })
        }
        other => Err(format!("expected leaf or split, found {other:?}")),
    }
}
