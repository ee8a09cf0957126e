//! Metrics (accuracy, per-class precision/recall/F1, MacroF1), stratified
//! cross-validation, and report formatting.
//!
//! Zero-denominator conventions: a precision or recall with an empty
//! denominator is 0, and an F1 whose precision and recall are both 0 is 0,
//! so degenerate predictors (all-Y, all-N) still score.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Gold × predicted counts: `yy` is gold Y predicted Y, `yn` gold Y
/// predicted N, and so on.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub yy: usize,
    pub yn: usize,
    pub ny: usize,
    pub nn: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.yy + self.yn + self.ny + self.nn
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub accuracy: f64,
    pub y_precision: f64,
    pub y_recall: f64,
    pub n_precision: f64,
    pub n_recall: f64,
    pub f1_y: f64,
    pub f1_n: f64,
    pub macro_f1: f64,
}

/// Counts the four gold×predicted cells.
pub fn confusion(preds: &[Label], golds: &[Label]) -> Result<Confusion> {
    if preds.len() != golds.len() {
        return Err(Error::LengthMismatch {
            preds: preds.len(),
            golds: golds.len(),
        });
    }
    if preds.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut c = Confusion::default();
    for (p, g) in preds.iter().zip(golds) {
        match (g, p) {
            (Label::Y, Label::Y) => c.yy += 1,
            (Label::Y, Label::N) => c.yn += 1,
            (Label::N, Label::Y) => c.ny += 1,
            (Label::N, Label::N) => c.nn += 1,
        }
    }
    Ok(c)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Derives the full report; MacroF1 is the unweighted mean of the two
/// class F1 scores.
pub fn metrics(c: &Confusion) -> MetricReport {
    let accuracy = ratio(c.yy + c.nn, c.total());
    let y_precision = ratio(c.yy, c.yy + c.ny);
    let y_recall = ratio(c.yy, c.yy + c.yn);
    let n_precision = ratio(c.nn, c.nn + c.yn);
    let n_recall = ratio(c.nn, c.nn + c.ny);
    let f1_y = f1(y_precision, y_recall);
    let f1_n = f1(n_precision, n_recall);
    MetricReport {
        accuracy,
        y_precision,
        y_recall,
        n_precision,
        n_recall,
        f1_y,
        f1_n,
        macro_f1: (f1_y + f1_n) / 2.0,
    }
}

pub fn score(preds: &[Label], golds: &[Label]) -> Result<MetricReport> {
    Ok(metrics(&confusion(preds, golds)?))
}

/// Anything that can label a feature vector.
pub trait Predictor {
    fn predict(&self, fv: &FeatureVector) -> Result<Label>;
}

impl<F> Predictor for F
where
    F: Fn(&FeatureVector) -> Result<Label>,
{
    fn predict(&self, fv: &FeatureVector) -> Result<Label> {
        self(fv)
    }
}

#[derive(Debug, Clone)]
pub struct CvReport {
    pub folds: Vec<MetricReport>,
    pub mean: MetricReport,
}

/// Seeded stratified k-fold cross-validation. Each class is shuffled with
/// the seed and dealt round-robin, so fold label proportions differ by at
/// most one item. The mean report is the unweighted fold average.
pub fn cross_validate<M, F>(
    vectors: &[FeatureVector],
    labels: &[Label],
    k: usize,
    seed: u64,
    train: F,
) -> Result<CvReport>
where
    M: Predictor,
    F: Fn(&[FeatureVector], &[Label]) -> Result<M>,
{
    if vectors.len() != labels.len() {
        return Err(Error::LengthMismatch {
            preds: vectors.len(),
            golds: labels.len(),
        });
    }
    if k < 2 || k > vectors.len() {
        return Err(Error::BadFoldCount {
            size: vectors.len(),
            k,
        });
    }
    if !labels.contains(&Label::Y) || !labels.contains(&Label::N) {
        return Err(Error::SingleClassData);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y_idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::Y).collect();
    let mut n_idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == Label::N).collect();
    y_idx.shuffle(&mut rng);
    n_idx.shuffle(&mut rng);

    // one running slot counter across classes, so k = n still fills every fold
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (slot, &i) in y_idx.iter().chain(&n_idx).enumerate() {
        folds[slot % k].push(i);
    }
    if folds.iter().any(Vec::is_empty) {
        return Err(Error::BadFoldCount {
            size: vectors.len(),
            k,
        });
    }

    let mut fold_reports = Vec::with_capacity(k);
    for held_out in &folds {
        let held: std::collections::HashSet<usize> = held_out.iter().copied().collect();
        let mut train_vs = Vec::new();
        let mut train_ls = Vec::new();
        for i in 0..vectors.len() {
            if !held.contains(&i) {
                train_vs.push(vectors[i].clone());
                train_ls.push(labels[i]);
            }
        }
        let model = train(&train_vs, &train_ls)?;
        let mut preds = Vec::with_capacity(held_out.len());
        let mut golds = Vec::with_capacity(held_out.len());
        for &i in held_out {
            preds.push(model.predict(&vectors[i])?);
            golds.push(labels[i]);
        }
        fold_reports.push(score(&preds, &golds)?);
    }

    let mean = mean_report(&fold_reports);
    Ok(CvReport {
        folds: fold_reports,
        mean,
    })
}

fn mean_report(reports: &[MetricReport]) -> MetricReport {
    let n = reports.len() as f64;
    let avg = |f: fn(&MetricReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    MetricReport {
        accuracy: avg(|r| r.accuracy),
        y_precision: avg(|r| r.y_precision),
        y_recall: avg(|r| r.y_recall),
        n_precision: avg(|r| r.n_precision),
        n_recall: avg(|r| r.n_recall),
        f1_y: avg(|r| r.f1_y),
        f1_n: avg(|r| r.f1_n),
        macro_f1: avg(|r| r.macro_f1),
    }
}

/// Tab-separated `metric ⟨tab⟩ value` lines plus the one-line summary.
pub fn format_report(r: &MetricReport) -> String {
    let mut out = String::new();
    for (name, v) in [
        ("accuracy", r.accuracy),
        ("y_precision", r.y_precision),
        ("y_recall", r.y_recall),
        ("n_precision", r.n_precision),
        ("n_recall", r.n_recall),
        ("f1_y", r.f1_y),
        ("f1_n", r.f1_n),
        ("macro_f1", r.macro_f1),
    ] {
        out.push_str(&format!("{name}\t{v:.6}\n"));
    }
    out.push_str(&format!(
        "MacroF1 {:.4} Acc {:.4}\n",
        r.macro_f1 * 100.0,
        r.accuracy * 100.0
    ));
    out
}
