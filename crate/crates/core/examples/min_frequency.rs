//! Minimum transmission frequency on a long background run.
//!
//! With `k = f_r / f_min`, both period modes settle at one transmission every
//! `k` frames; they differ in how they get there. Faithful mode re-enters the
//! (decaying) lazy window after each periodic transmit, strict-period mode
//! stays in the low regime until the next FOI.
//!
//! Run with: `cargo run --example min_frequency`

use sensegate::detector::Prediction;
use sensegate::gate::{run, GateConfig, PeriodMode};

fn pattern(cfg: &GateConfig, len: usize) -> String {
    run(&vec![Prediction::Background; len], cfg)
        .iter()
        .map(|o| if o.decision.is_transmit() { '#' } else { '.' })
        .collect()
}

fn main() {
    let f_r = 30;
    for f_min in [0, 10, 15] {
        for mode in [PeriodMode::Faithful, PeriodMode::StrictPeriod] {
            let cfg = GateConfig::new(4, f_r, f_min, mode).unwrap();
            let long = run(&vec![Prediction::Background; 30_000], &cfg);
            let rate = long[10_000..].iter().filter(|o| o.decision.is_transmit()).count() as f64
                / 20_000.0;
            println!(
                "f_min = {f_min:>2} Hz {:<14} {}  steady rate {rate:.4}",
                format!("{mode:?}"),
                pattern(&cfg, 48),
            );
        }
    }
    // f_min = f_r only makes sense in strict-period mode.
    println!(
        "faithful with f_min = f_r: {}",
        GateConfig::new(4, f_r, f_r, PeriodMode::Faithful).unwrap_err()
    );
    let cfg = GateConfig::new(4, f_r, f_r, PeriodMode::StrictPeriod).unwrap();
    println!("strict with f_min = f_r:   {}", pattern(&cfg, 48));
}
