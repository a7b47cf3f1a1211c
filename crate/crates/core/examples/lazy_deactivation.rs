//! Lazy sensor deactivation on a short prediction sequence.
//!
//! Compares an eager gate (N = 1) against a lazy one (N = 3) with the minimum
//! transmission frequency disabled, then shows how the lazy window shrinks
//! across consecutive low-frequency periods.
//!
//! Run with: `cargo run --example lazy_deactivation`

use sensegate::detector::Prediction;
use sensegate::gate::{decay_threshold, run_logged, GateConfig, PeriodMode};
use sensegate::stream::Truth;

fn main() {
    // Ground truth: five FOIs in a row, then background.
    let truth = [Truth::Foi; 5]
        .into_iter()
        .chain([Truth::Background; 5])
        .collect::<Vec<_>>();
    // The near-sensor model misses frames 2, 4 and 5.
    let y = [1, 0, 1, 0, 0, 0, 0, 0, 0, 0].map(|b| Prediction::from_bit(b == 1));

    for n in [1, 3] {
        let cfg = GateConfig::new(n, 30, 0, PeriodMode::Faithful).unwrap();
        let log = run_logged(&y, &cfg);
        println!("N = {n}");
        println!("{:>5} {:>5} {:>3} {:>4}  (c1,c2,c3)", "frame", "truth", "y", "sent");
        for (rec, t) in log.iter().zip(&truth) {
            println!(
                "{:>5} {:>5} {:>3} {:>4}  {}",
                rec.index + 1,
                t.label(),
                rec.y.bit(),
                if rec.output.decision.is_transmit() { "yes" } else { "-" },
                rec.state
            );
        }
        let missed = log
            .iter()
            .zip(&truth)
            .filter(|(r, t)| t.is_foi() && !r.output.decision.is_transmit())
            .count();
        println!("missed FOIs: {missed}\n");
    }

    println!("lazy window per low-frequency period for N = 16:");
    let windows: Vec<String> = (0..7).map(|c2| decay_threshold(16, c2).to_string()).collect();
    println!("  {}", windows.join(" -> "));
}
