//! Transmission and energy against the background:FOI ratio M.
//!
//! The FOI count is held fixed and background frames are added to raise M,
//! so the conventional cost grows with the stream while the gated cost
//! tracks the (fixed) FOI content.
//!
//! Run with: `cargo run --release --example ratio_sweep`

use sensegate::detector::{ScoreModel, Threshold};
use sensegate::energy::EnergyParams;
use sensegate::expctl::simulate;
use sensegate::gate::{GateConfig, PeriodMode};
use sensegate::stream::StreamSpec;

fn main() {
    let foi_frames = 1_000.0;
    let detector = ScoreModel::calibrated_for_auc(0.99, 1.0).unwrap();
    let gate = GateConfig::new(2, 30, 0, PeriodMode::Faithful).unwrap();
    println!("{:>4} {:>8} {:>9} {:>9} {:>12} {:>12}", "M", "frames", "p_miss", "p_trans", "gated J", "conv. J");
    for m in [1.0, 5.0, 10.0, 20.0, 50.0, 100.0] {
        let n = (foi_frames * (1.0 + m)) as u64;
        let spec = StreamSpec::new(n, m, 50, 1);
        let out = simulate(
            &spec,
            &detector,
            Threshold::new(0.5).unwrap(),
            &gate,
            &EnergyParams::CALIBRATED,
            2,
            false,
        )
        .unwrap();
        println!(
            "{m:>4} {n:>8} {:>9.4} {:>9.4} {:>12.1} {:>12.1}",
            out.metrics.p_miss.unwrap_or(f64::NAN),
            out.metrics.p_trans,
            out.energy.e_total,
            out.baseline.e_total
        );
    }
}
