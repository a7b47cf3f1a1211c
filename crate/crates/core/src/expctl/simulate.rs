use rand::Rng;
use serde::Serialize;

use crate::detector::{classify, score, Prediction, ScoreModel, Threshold};
use crate::energy::{account, conventional_baseline, savings, EnergyParams, EnergyReport};
use crate::error::Result;
use crate::gate::{Decision, Gate, GateConfig, GateOutput, LogRecord};
use crate::metrics::{run_metrics, RunMetrics};
use crate::rng::rng_from_seed;
use crate::stream::{generate, Frame, StreamSpec, Truth};

/// Result of one end-to-end run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationOutcome {
    pub metrics: RunMetrics,
    pub energy: EnergyReport,
    pub baseline: EnergyReport,
    /// `1 - energy.e_total / baseline.e_total`
    pub savings: f64,
    #[serde(skip)]
    pub log: Option<Vec<LogRecord>>,
}

/// Generate a stream from `spec`, score it with detector noise seeded by
/// `seed`, gate it and account the result.
pub fn simulate(
    spec: &StreamSpec,
    detector: &ScoreModel,
    threshold: Threshold,
    gate: &GateConfig,
    energy: &EnergyParams,
    seed: u64,
    keep_log: bool,
) -> Result<SimulationOutcome> {
    let frames = generate(spec)?;
    simulate_frames(&frames, detector, threshold, gate, energy, seed, keep_log)
}

/// Same as [`simulate`] over an existing frame sequence (e.g. a loaded trace).
pub fn simulate_frames(
    frames: &[Frame],
    detector: &ScoreModel,
    threshold: Threshold,
    gate_config: &GateConfig,
    energy: &EnergyParams,
    seed: u64,
    keep_log: bool,
) -> Result<SimulationOutcome> {
    detector.validate()?;
    energy.validate()?;
    let mut rng = rng_from_seed(seed);
    run_pipeline(frames, detector, threshold, gate_config, energy, &mut rng, keep_log)
}

fn run_pipeline<R: Rng>(
    frames: &[Frame],
    detector: &ScoreModel,
    threshold: Threshold,
    gate_config: &GateConfig,
    energy: &EnergyParams,
    rng: &mut R,
    keep_log: bool,
) -> Result<SimulationOutcome> {
    let mut gate = Gate::new(*gate_config);
    let mut truths: Vec<Truth> = Vec::with_capacity(frames.len());
    let mut outputs: Vec<GateOutput> = Vec::with_capacity(frames.len());
    let mut log = keep_log.then(|| Vec::with_capacity(frames.len()));

    for (i, frame) in frames.iter().enumerate() {
        let s = score(frame, detector, rng)?;
        let y: Prediction = classify(s, threshold);
        let output = gate.push(y);
        if let Some(log) = log.as_mut() {
            log.push(LogRecord {
                index: i as u64,
                y,
                output,
                state: gate.state(),
            });
        }
        truths.push(frame.truth);
        outputs.push(output);
    }

    let decisions: Vec<Decision> = outputs.iter().map(|o| o.decision).collect();
    let metrics = run_metrics(&truths, &decisions)?;
    let report = account(&outputs, energy);
    let baseline = conventional_baseline(frames.len() as u64, energy);
    let savings = savings(&report, &baseline)?;
    Ok(SimulationOutcome {
        metrics,
        energy: report,
        baseline,
        savings,
        log,
    })
}
