//! Calibrated detector models: ROC curves and the threshold trade-off.
//!
//! Run with: `cargo run --example detector_roc`

use sensegate::detector::{classify, roc, score, Prediction, ScoreModel, Threshold};
use sensegate::rng::rng_from_seed;
use sensegate::stream::{Frame, Truth};

fn main() {
    let samples = 100_000u64;
    for target in [0.80, 0.90, 0.95, 0.99] {
        let model = ScoreModel::calibrated_for_auc(target, 1.0).unwrap();
        let mut rng = rng_from_seed(1);
        let labeled: Vec<(Truth, f64)> = (0..samples)
            .map(|i| {
                let t = if i % 2 == 0 { Truth::Foi } else { Truth::Background };
                (t, score(&Frame::new(i, t), &model, &mut rng).unwrap())
            })
            .collect();
        let curve = roc(&labeled).unwrap();
        println!(
            "target AUC {target:.2}: empirical {:.4}, closed form {:.4}, {} ROC points",
            curve.auc,
            model.binormal_auc().unwrap(),
            curve.points.len()
        );

        // Stricter thresholds call fewer frames FOI.
        let line: Vec<String> = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .map(|&t| {
                let th = Threshold::new(t).unwrap();
                let pos = labeled.iter().filter(|(_, s)| classify(*s, th) == Prediction::Foi).count();
                format!("T={t}: {:.3}", pos as f64 / samples as f64)
            })
            .collect();
        println!("    fraction predicted FOI  {}", line.join("  "));
    }
}
