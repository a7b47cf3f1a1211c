//! Cost of a single false positive on an all-background stream.
//!
//! For each `(N, k)` the gate is run on `stream_len` background predictions,
//! then again with one prediction flipped to FOI. The difference in the number
//! of transmitted frames is compared against `2N + 1` (the lazy-deactivation
//! worst case of `2N` extra frames, plus the injected frame itself).

use serde::Serialize;

use crate::detector::Prediction;
use crate::error::{Error, Result};
use crate::gate::{run, Gate, GateConfig, PeriodMode};

/// Injection positions to try (0-based frame indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Positions {
    All,
    At(Vec<u64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FpEntry {
    pub n: u32,
    /// Period `k = f_r / f_min`; `None` when the periodic branch is disabled.
    pub k: Option<u32>,
    pub max_extra: i64,
    pub worst_position: u64,
    pub bound: i64,
}

impl FpEntry {
    pub fn within_bound(&self) -> bool {
        self.max_extra <= self.bound
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FpReport {
    pub stream_len: u64,
    pub entries: Vec<FpEntry>,
}

impl FpReport {
    pub fn max_extra(&self) -> i64 {
        self.entries.iter().map(|e| e.max_extra).max().unwrap_or(0)
    }

    pub fn within_bound(&self) -> bool {
        self.entries.iter().all(FpEntry::within_bound)
    }

    /// Largest `max_extra - 2N` over all entries; at most 1 when the bound holds.
    pub fn max_excess_over_2n(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| e.max_extra - 2 * i64::from(e.n))
            .max()
            .unwrap_or(0)
    }
}

fn gate_for(n: u32, k: Option<u32>, mode: PeriodMode) -> Result<GateConfig> {
    match k {
        None => GateConfig::new(n, 1, 0, mode),
        Some(k) => GateConfig::new(n, k, 1, mode),
    }
}

/// `counts[i]` = frames transmitted among the first `i` of an all-background run.
fn background_prefix_counts(cfg: &GateConfig, len: u64) -> Vec<i64> {
    let mut gate = Gate::new(*cfg);
    let mut counts = Vec::with_capacity(len as usize + 1);
    let mut total = 0i64;
    counts.push(0);
    for _ in 0..len {
        total += gate.push(Prediction::Background).decision.is_transmit() as i64;
        counts.push(total);
    }
    counts
}

fn transmitted(ys: &[Prediction], cfg: &GateConfig) -> i64 {
    run(ys, cfg).iter().filter(|o| o.decision.is_transmit()).count() as i64
}

fn check_one(cfg: &GateConfig, len: u64, positions: &Positions) -> (i64, u64) {
    let mut worst = (i64::MIN, 0u64);
    let mut consider = |extra: i64, p: u64| {
        if extra > worst.0 {
            worst = (extra, p);
        }
    };
    match positions {
        Positions::All => {
            // A FOI prediction returns the gate to its initial state, so the
            // run after the injected frame is a fresh all-background run:
            // total(p) = B(p) + 1 + B(len - p - 1).
            let b = background_prefix_counts(cfg, len);
            let base = b[len as usize];
            for p in 0..len {
                let with = b[p as usize] + 1 + b[(len - p - 1) as usize];
                consider(with - base, p);
            }
        }
        Positions::At(list) => {
            let bg = vec![Prediction::Background; len as usize];
            let base = transmitted(&bg, cfg);
            for &p in list {
                let mut ys = bg.clone();
                ys[p as usize] = Prediction::Foi;
                consider(transmitted(&ys, cfg) - base, p);
            }
        }
    }
    worst
}

/// Run the check for every `N` in `1..=n_max` and every period in `k_set`.
pub fn inject_fp_check(
    n_max: u32,
    k_set: &[Option<u32>],
    stream_len: u64,
    positions: &Positions,
    mode: PeriodMode,
) -> Result<FpReport> {
    if n_max == 0 {
        return Err(Error::config("n_max", "must be at least 1"));
    }
    if stream_len == 0 {
        return Err(Error::config("stream_len", "must be at least 1"));
    }
    if k_set.is_empty() {
        return Err(Error::config("k_set", "must not be empty"));
    }
    if let Positions::At(list) = positions {
        if list.is_empty() {
            return Err(Error::config("positions", "must not be empty"));
        }
        if let Some(&p) = list.iter().find(|&&p| p >= stream_len) {
            return Err(Error::config(
                "positions",
                format!("position {p} outside a stream of {stream_len} frames"),
            ));
        }
    }
    let mut entries = Vec::new();
    for &k in k_set {
        for n in 1..=n_max {
            let cfg = gate_for(n, k, mode)?;
            let (max_extra, worst_position) = check_one(&cfg, stream_len, positions);
            entries.push(FpEntry {
                n,
                k,
                max_extra,
                worst_position,
                bound: 2 * i64::from(n) + 1,
            });
        }
    }
    Ok(FpReport {
        stream_len,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disabled_period_after_window_costs_n_plus_one() {
        for n in 1..=6u32 {
            let positions = Positions::At((u64::from(n)..40).collect());
            let r = inject_fp_check(n, &[None], 60, &positions, PeriodMode::Faithful).unwrap();
            let e = r.entries.last().unwrap();
            assert_eq!(e.n, n);
            assert_eq!(e.max_extra, i64::from(n) + 1);
        }
    }

    #[test]
    fn disabled_period_inside_window() {
        // 0-based position p < N adds p + 1 frames, at most N.
        let n = 5u32;
        for p in 0..u64::from(n) {
            let r = inject_fp_check(n, &[None], 50, &Positions::At(vec![p]), PeriodMode::Faithful)
                .unwrap();
            let e = r.entries.last().unwrap();
            assert_eq!(e.max_extra, p as i64 + 1);
            assert!(e.max_extra <= i64::from(n));
        }
    }

    #[test]
    fn all_positions_matches_direct_injection() {
        let len = 120;
        let every = Positions::At((0..len).collect());
        for mode in [PeriodMode::Faithful, PeriodMode::StrictPeriod] {
            let ks = [None, Some(2), Some(3), Some(5)];
            let fast = inject_fp_check(6, &ks, len, &Positions::All, mode).unwrap();
            let slow = inject_fp_check(6, &ks, len, &every, mode).unwrap();
            assert_eq!(fast, slow, "{mode:?}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(inject_fp_check(0, &[None], 10, &Positions::All, PeriodMode::Faithful).is_err());
        assert!(inject_fp_check(2, &[], 10, &Positions::All, PeriodMode::Faithful).is_err());
        assert!(
            inject_fp_check(2, &[None], 10, &Positions::At(vec![10]), PeriodMode::Faithful)
                .is_err()
        );
        // k = 1 is degenerate in faithful mode
        assert!(inject_fp_check(2, &[Some(1)], 10, &Positions::All, PeriodMode::Faithful).is_err());
    }
}
