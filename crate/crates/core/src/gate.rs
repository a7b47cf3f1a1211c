//! Transmission gate: lazy deactivation plus minimum transmission frequency.
//!
//! The gate consumes one near-sensor prediction per frame and decides whether
//! the frame is sent to the server. It keeps three counters:
//!
//! * `c1` counts consecutive background predictions while the gate is in the
//!   high-frequency ("lazy") regime;
//! * `c2` counts consecutive low-frequency periods since the last FOI;
//! * `c3` is the position inside the current low-frequency period, and is
//!   zero exactly while the gate is in the high-frequency regime.
//!
//! On a background prediction in the high regime the gate keeps transmitting
//! while `c1 <= max(1, N / 2^c2)`. Once that window is exhausted it drops to
//! the low regime, where (with `k = f_r / f_min`) it transmits one frame per
//! period. Any FOI prediction resets all three counters.
//!
//! [`PeriodMode::Faithful`] follows the reference pseudocode branch for
//! branch: the periodic transmit puts the gate back in the high regime with
//! `c1 = 1`, so every period is followed by a (decayed) lazy window.
//! [`PeriodMode::StrictPeriod`] stays in the low regime and transmits every
//! `k`-th frame until the next FOI.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::detector::Prediction;
use crate::error::{Error, Result};

/// Upper bound for `c3` when the periodic branch is disabled (`f_min = 0`).
/// Only equality with `k` is ever tested, so saturating is a no-op.
pub const C3_CAP: u32 = i32::MAX as u32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodMode {
    #[default]
    Faithful,
    StrictPeriod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CameraMode {
    HighRes,
    LowRes,
}

impl CameraMode {
    pub fn token(self) -> &'static str {
        match self {
            CameraMode::HighRes => "high",
            CameraMode::LowRes => "low",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Transmit,
    Drop,
}

impl Decision {
    pub fn is_transmit(self) -> bool {
        matches!(self, Decision::Transmit)
    }

    /// `D` as written in decision logs.
    pub fn bit(self) -> u8 {
        self.is_transmit() as u8
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GateOutput {
    pub decision: Decision,
    pub camera_mode: CameraMode,
}

impl GateOutput {
    const fn new(decision: Decision, camera_mode: CameraMode) -> Self {
        GateOutput {
            decision,
            camera_mode,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateState {
    pub c1: u32,
    pub c2: u32,
    pub c3: u32,
}

impl GateState {
    pub const INITIAL: GateState = GateState { c1: 0, c2: 0, c3: 0 };

    pub fn in_high_regime(&self) -> bool {
        self.c3 == 0
    }
}

impl fmt::Display for GateState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.c1, self.c2, self.c3)
    }
}

/// Validated gate parameters. Construct with [`GateConfig::new`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GateConfig {
    n: u32,
    f_r: u32,
    f_min: u32,
    period_mode: PeriodMode,
    periodic_camera: CameraMode,
    bypass: bool,
}

impl GateConfig {
    /// `n` is the deactivation count `N`, `f_r` the camera refresh rate and
    /// `f_min` the minimum transmission frequency (0 disables it).
    pub fn new(n: u32, f_r: u32, f_min: u32, period_mode: PeriodMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("n", "deactivation count must be at least 1"));
        }
        if f_r == 0 {
            return Err(Error::config("f_r", "refresh rate must be at least 1 Hz"));
        }
        if f_min > f_r {
            return Err(Error::config(
                "f_min",
                format!("must not exceed f_r ({f_min} > {f_r})"),
            ));
        }
        if f_min > 0 && !f_r.is_multiple_of(f_min) {
            return Err(Error::config(
                "f_min",
                format!("f_r ({f_r}) must be a multiple of f_min ({f_min})"),
            ));
        }
        if f_min > 0 && f_r / f_min == 1 && period_mode == PeriodMode::Faithful {
            return Err(Error::config(
                "f_min",
                "f_min = f_r never fires in faithful mode; use strict-period mode or bypass",
            ));
        }
        Ok(GateConfig {
            n,
            f_r,
            f_min,
            period_mode,
            periodic_camera: CameraMode::LowRes,
            bypass: false,
        })
    }

    /// Conventional system: every frame is transmitted on the high-res camera.
    pub fn bypass(f_r: u32) -> Result<Self> {
        let mut cfg = GateConfig::new(1, f_r, 0, PeriodMode::Faithful)?;
        cfg.bypass = true;
        Ok(cfg)
    }

    pub fn with_bypass(mut self, bypass: bool) -> Self {
        self.bypass = bypass;
        self
    }

    /// Camera used for frames sent by the minimum-frequency branch.
    pub fn with_periodic_camera(mut self, camera: CameraMode) -> Self {
        self.periodic_camera = camera;
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn f_r(&self) -> u32 {
        self.f_r
    }

    pub fn f_min(&self) -> u32 {
        self.f_min
    }

    pub fn period_mode(&self) -> PeriodMode {
        self.period_mode
    }

    pub fn is_bypass(&self) -> bool {
        self.bypass
    }

    /// `k = f_r / f_min`, or `None` when the periodic branch is disabled.
    pub fn period(&self) -> Option<u32> {
        (self.f_min > 0).then(|| self.f_r / self.f_min)
    }
}

/// `max(1, n / 2^c2)`, exact in binary floating point.
pub fn decay_threshold(n: u32, c2: u32) -> f64 {
    // Division by a power of two is exact until the quotient leaves the
    // normal range, long after it has dropped below 1.
    let shift = c2.min(1100) as i32;
    (f64::from(n) * 2f64.powi(-shift)).max(1.0)
}

/// One gate transition.
pub fn step(state: GateState, config: &GateConfig, y: Prediction) -> (GateState, GateOutput) {
    use CameraMode::*;
    use Decision::*;

    if config.bypass {
        return (state, GateOutput::new(Transmit, HighRes));
    }
    if y == Prediction::Foi {
        return (GateState::INITIAL, GateOutput::new(Transmit, HighRes));
    }

    let GateState { c1, c2, c3 } = state;
    if c3 == 0 {
        let c1 = c1.saturating_add(1);
        if f64::from(c1) <= decay_threshold(config.n, c2) {
            (GateState { c1, c2, c3 }, GateOutput::new(Transmit, HighRes))
        } else {
            let next = GateState {
                c1: 0,
                c2: c2.saturating_add(1),
                c3: 1,
            };
            (next, GateOutput::new(Drop, HighRes))
        }
    } else {
        let Some(k) = config.period() else {
            let next = GateState {
                c3: c3.saturating_add(1).min(C3_CAP),
                ..state
            };
            return (next, GateOutput::new(Drop, LowRes));
        };
        match config.period_mode {
            PeriodMode::Faithful => {
                let c3 = c3 + 1;
                if c3 == k {
                    let next = GateState {
                        c1: c1.saturating_add(1),
                        c2,
                        c3: 0,
                    };
                    (next, GateOutput::new(Transmit, config.periodic_camera))
                } else {
                    (GateState { c1, c2, c3 }, GateOutput::new(Drop, LowRes))
                }
            }
            PeriodMode::StrictPeriod => {
                // c3 cycles through 1..=k, so `c3 == k` is `c3 mod k == 0`.
                let c3 = if c3 >= k { 1 } else { c3 + 1 };
                let out = if c3 == k {
                    GateOutput::new(Transmit, config.periodic_camera)
                } else {
                    GateOutput::new(Drop, LowRes)
                };
                (GateState { c1, c2, c3 }, out)
            }
        }
    }
}

/// A gate bound to one stream.
#[derive(Clone, Debug)]
pub struct Gate {
    config: GateConfig,
    state: GateState,
}

impl Gate {
    pub fn new(config: GateConfig) -> Self {
        Gate {
            config,
            state: GateState::INITIAL,
        }
    }

    pub fn state(&self) -> GateState {
        self.state
    }

    pub fn config(&self) -> &GateConfig {
        &self.config
    }

    pub fn push(&mut self, y: Prediction) -> GateOutput {
        let (next, out) = step(self.state, &self.config, y);
        self.state = next;
        out
    }
}

/// Fold [`step`] over a prediction sequence from the initial state.
pub fn run(predictions: &[Prediction], config: &GateConfig) -> Vec<GateOutput> {
    let mut gate = Gate::new(*config);
    predictions.iter().map(|&y| gate.push(y)).collect()
}

/// One row of a decision log: the input, the output and the post-step state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LogRecord {
    pub index: u64,
    pub y: Prediction,
    pub output: GateOutput,
    pub state: GateState,
}

pub fn run_logged(predictions: &[Prediction], config: &GateConfig) -> Vec<LogRecord> {
    let mut gate = Gate::new(*config);
    predictions
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let output = gate.push(y);
            LogRecord {
                index: i as u64,
                y,
                output,
                state: gate.state(),
            }
        })
        .collect()
}

pub const LOG_HEADER: &str = "index,y,decision,camera_mode,c1,c2,c3";

/// Write `index,y,decision,camera_mode,c1,c2,c3`; decision is 1/0, camera is high/low.
pub fn write_log<W: Write>(mut out: W, records: &[LogRecord]) -> std::io::Result<()> {
    writeln!(out, "{LOG_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.index,
            r.y.bit(),
            r.output.decision.bit(),
            r.output.camera_mode.token(),
            r.state.c1,
            r.state.c2,
            r.state.c3
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Prediction::{Background as B, Foi as F};

    fn decisions(ys: &[Prediction], cfg: &GateConfig) -> String {
        run(ys, cfg)
            .iter()
            .map(|o| if o.decision.is_transmit() { 'T' } else { 'D' })
            .collect()
    }

    #[test]
    fn decay_threshold_values() {
        assert_eq!(decay_threshold(4, 0), 4.0);
        assert_eq!(decay_threshold(4, 3), 1.0);
        assert_eq!(decay_threshold(3, 1), 1.5);
        assert_eq!(decay_threshold(1, 0), 1.0);
        assert_eq!(decay_threshold(16, 2), 4.0);
        assert_eq!(decay_threshold(u32::MAX, u32::MAX), 1.0);
        // c1 = 1 passes and c1 = 2 fails against 1.5
        assert!(1.0 <= decay_threshold(3, 1) && 2.0 > decay_threshold(3, 1));
    }

    #[test]
    fn lazy_window_keeps_misdetected_fois() {
        let cfg = GateConfig::new(3, 30, 0, PeriodMode::Faithful).unwrap();
        assert_eq!(decisions(&[F, B, F, B, B], &cfg), "TTTTT");
    }

    #[test]
    fn hand_traced_n4_k3() {
        // Worked by hand from the pseudocode, all-background input:
        // f1-f4 lazy T (c1 = 1..4); f5 c1 = 5 > 4 -> (0,1,1) D; f6 c3 = 2 D;
        // f7 c3 = 3 = k -> (1,1,0) T; f8 c1 = 2 <= 4/2 T; f9 c1 = 3 > 2 ->
        // (0,2,1) D; f10 D; f11 T (1,2,0); f12 c1 = 2 > 1 -> (0,3,1) D;
        // f13 D; f14 T (1,3,0).
        let cfg = GateConfig::new(4, 30, 10, PeriodMode::Faithful).unwrap();
        let log = run_logged(&[B; 14], &cfg);
        let got: String = log
            .iter()
            .map(|r| if r.output.decision.is_transmit() { 'T' } else { 'D' })
            .collect();
        assert_eq!(got, "TTTTDDTTDDTDDT");
        let states: Vec<(u32, u32, u32)> =
            log.iter().map(|r| (r.state.c1, r.state.c2, r.state.c3)).collect();
        assert_eq!(
            states,
            vec![
                (1, 0, 0),
                (2, 0, 0),
                (3, 0, 0),
                (4, 0, 0),
                (0, 1, 1),
                (0, 1, 2),
                (1, 1, 0),
                (2, 1, 0),
                (0, 2, 1),
                (0, 2, 2),
                (1, 2, 0),
                (0, 3, 1),
                (0, 3, 2),
                (1, 3, 0),
            ]
        );
        // frame 8 is a lazy-branch transmit at threshold 2
        assert_eq!(log[7].output.camera_mode, CameraMode::HighRes);
        assert_eq!(log[6].output.camera_mode, CameraMode::LowRes);
    }

    #[test]
    fn disabled_min_frequency_transmits_first_n_only() {
        for n in 1..=6 {
            let cfg = GateConfig::new(n, 30, 0, PeriodMode::Faithful).unwrap();
            let out = run(&[B; 50], &cfg);
            let sent: Vec<usize> = out
                .iter()
                .enumerate()
                .filter(|(_, o)| o.decision.is_transmit())
                .map(|(i, _)| i)
                .collect();
            assert_eq!(sent, (0..n as usize).collect::<Vec<_>>());
        }
    }

    #[test]
    fn empty_and_all_foi() {
        let cfg = GateConfig::new(2, 30, 15, PeriodMode::Faithful).unwrap();
        assert!(run(&[], &cfg).is_empty());
        let out = run(&[F; 20], &cfg);
        assert!(out
            .iter()
            .all(|o| *o == GateOutput::new(Decision::Transmit, CameraMode::HighRes)));
    }

    #[test]
    fn foi_resets_from_any_state() {
        let cfg = GateConfig::new(3, 30, 10, PeriodMode::Faithful).unwrap();
        for c1 in 0..4 {
            for c2 in 0..4 {
                for c3 in 0..3 {
                    let s = GateState { c1, c2, c3 };
                    let (next, out) = step(s, &cfg, F);
                    assert_eq!(next, GateState::INITIAL);
                    assert_eq!(out.decision, Decision::Transmit);
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        use PeriodMode::*;
        assert!(GateConfig::new(0, 30, 0, Faithful).is_err());
        assert!(GateConfig::new(1, 0, 0, Faithful).is_err());
        assert!(GateConfig::new(1, 30, 60, Faithful).is_err());
        assert!(GateConfig::new(1, 30, 7, Faithful).is_err());
        assert!(GateConfig::new(1, 30, 30, Faithful).is_err());
        assert!(GateConfig::new(1, 30, 30, StrictPeriod).is_ok());
        assert!(GateConfig::new(1, 30, 15, Faithful).is_ok());
        assert_eq!(GateConfig::new(1, 30, 10, Faithful).unwrap().period(), Some(3));
        assert_eq!(GateConfig::new(1, 30, 0, Faithful).unwrap().period(), None);
        match GateConfig::new(1, 30, 7, Faithful) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "f_min"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strict_period_every_kth_frame() {
        // N = 1: f1 lazy T, f2 exits D (c3 = 1), then every 3rd frame.
        let cfg = GateConfig::new(1, 30, 10, PeriodMode::StrictPeriod).unwrap();
        assert_eq!(decisions(&[B; 11], &cfg), "TDDTDDTDDTD");
        let cfg = GateConfig::new(1, 30, 30, PeriodMode::StrictPeriod).unwrap();
        assert_eq!(decisions(&[B; 6], &cfg), "TDTTTT");
    }

    #[test]
    fn steady_state_rates() {
        for k in 2..=6u32 {
            for mode in [PeriodMode::Faithful, PeriodMode::StrictPeriod] {
                let cfg = GateConfig::new(4, 60 * k, 60, mode).unwrap();
                let out = run(&vec![B; 20_000], &cfg);
                let tail = &out[10_000..];
                let rate = tail.iter().filter(|o| o.decision.is_transmit()).count() as f64
                    / tail.len() as f64;
                assert!((rate - 1.0 / k as f64).abs() < 1e-3, "k={k} {mode:?}: {rate}");
            }
        }
    }

    #[test]
    fn c3_saturates_without_min_frequency() {
        let cfg = GateConfig::new(1, 30, 0, PeriodMode::Faithful).unwrap();
        let s = GateState { c1: 0, c2: 1, c3: C3_CAP };
        let (next, out) = step(s, &cfg, B);
        assert_eq!(next.c3, C3_CAP);
        assert_eq!(out.decision, Decision::Drop);
    }

    #[test]
    fn bypass_transmits_everything() {
        let cfg = GateConfig::bypass(30).unwrap();
        let out = run(&[B, F, B, B, B, B, B], &cfg);
        assert!(out
            .iter()
            .all(|o| o.decision.is_transmit() && o.camera_mode == CameraMode::HighRes));
    }

    #[test]
    fn periodic_camera_override() {
        let cfg = GateConfig::new(1, 30, 15, PeriodMode::Faithful)
            .unwrap()
            .with_periodic_camera(CameraMode::HighRes);
        // f1 T lazy, f2 D exit, f3 periodic T
        let out = run(&[B, B, B], &cfg);
        assert_eq!(out[2], GateOutput::new(Decision::Transmit, CameraMode::HighRes));
    }

    #[test]
    fn log_format() {
        let cfg = GateConfig::new(1, 30, 15, PeriodMode::Faithful).unwrap();
        let mut buf = Vec::new();
        write_log(&mut buf, &run_logged(&[F, B, B, B], &cfg)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "index,y,decision,camera_mode,c1,c2,c3\n\
             0,1,1,high,0,0,0\n\
             1,0,1,high,1,0,0\n\
             2,0,0,high,0,1,1\n\
             3,0,1,low,1,1,0\n"
        );
    }
}
