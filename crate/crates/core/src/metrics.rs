//! Run metrics and rank correlation.
//!
//! A miss is an FOI that was not transmitted, whatever the detector said
//! about it. `p_miss = n_miss / n_foi`, `p_trans = n_trans / n_frames`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::Decision;
use crate::stream::Truth;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    /// Absent when the stream contains no FOI.
    pub p_miss: Option<f64>,
    pub p_trans: f64,
    pub n_foi: u64,
    pub n_miss: u64,
    pub n_trans: u64,
    pub n_frames: u64,
}

pub fn run_metrics(truth: &[Truth], decisions: &[Decision]) -> Result<RunMetrics> {
    if truth.len() != decisions.len() {
        return Err(Error::input(format!(
            "length mismatch: {} truths vs {} decisions",
            truth.len(),
            decisions.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::input("run_metrics needs at least one frame"));
    }
    let (mut n_foi, mut n_miss, mut n_trans) = (0u64, 0u64, 0u64);
    for (t, d) in truth.iter().zip(decisions) {
        let sent = d.is_transmit();
        n_trans += sent as u64;
        if t.is_foi() {
            n_foi += 1;
            n_miss += (!sent) as u64;
        }
    }
    let n_frames = truth.len() as u64;
    Ok(RunMetrics {
        p_miss: (n_foi > 0).then(|| n_miss as f64 / n_foi as f64),
        p_trans: n_trans as f64 / n_frames as f64,
        n_foi,
        n_miss,
        n_trans,
        n_frames,
    })
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let rank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Spearman's rho with average-rank tie handling.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::input(format!(
            "spearman: length mismatch {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::input("spearman needs at least two points"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::input("spearman: NaN input"));
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::input("spearman undefined for a constant input"));
    }
    Ok(pearson(&average_ranks(x), &average_ranks(y)))
}
