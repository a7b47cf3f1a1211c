//! Drive the simulator from a score trace.
//!
//! Writes a trace (`index,label,score`) the way a real detector log would look,
//! reads it back and runs the gate over the replayed scores at several
//! thresholds.
//!
//! Run with: `cargo run --example trace_replay [PATH]`

use sensegate::detector::{score_frames, ScoreModel, Threshold};
use sensegate::energy::EnergyParams;
use sensegate::expctl::simulate_frames;
use sensegate::gate::{GateConfig, PeriodMode};
use sensegate::rng::rng_from_seed;
use sensegate::stream::{generate, load_trace, write_trace, StreamSpec};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("sensegate_trace.csv"));

    let mut frames = generate(&StreamSpec::new(10_000, 10.0, 15, 8)).unwrap();
    let model = ScoreModel::calibrated_for_auc(0.97, 1.0).unwrap();
    score_frames(&mut frames, &model, &mut rng_from_seed(8)).unwrap();
    let file = std::fs::File::create(&path).unwrap();
    write_trace(std::io::BufWriter::new(file), &frames).unwrap();
    println!("wrote {} frames to {}", frames.len(), path.display());

    let replayed = load_trace(&path).unwrap();
    let gate = GateConfig::new(3, 30, 10, PeriodMode::Faithful).unwrap();
    for t in [0.3, 0.5, 0.7, 0.9] {
        let out = simulate_frames(
            &replayed,
            &ScoreModel::Replay,
            Threshold::new(t).unwrap(),
            &gate,
            &EnergyParams::CALIBRATED,
            0,
            false,
        )
        .unwrap();
        println!(
            "T = {t}: p_miss {:.4}  p_trans {:.4}  savings {:.3}",
            out.metrics.p_miss.unwrap_or(f64::NAN),
            out.metrics.p_trans,
            out.savings
        );
    }
}
