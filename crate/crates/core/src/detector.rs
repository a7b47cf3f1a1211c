//! Near-sensor detector models.
//!
//! The detector is reduced to one number per frame: the highest objectness
//! confidence over all candidate boxes (no non-max suppression). A frame is
//! predicted FOI when that confidence strictly exceeds the threshold `T`.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::stream::{Frame, Truth};

/// Source of per-frame confidence scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreModel {
    /// 1.0 for every FOI, 0.0 for every background frame.
    Ideal,
    /// Class-conditional Gaussian latent, squashed by the logistic function.
    Calibrated {
        mu_bg: f64,
        sigma_bg: f64,
        mu_foi: f64,
        sigma_foi: f64,
    },
    /// Score 1.0 with probability `tpr` (FOI) or `fpr` (background), else 0.0.
    Confusion { tpr: f64, fpr: f64 },
    /// Use the score already attached to the frame.
    Replay,
}

impl ScoreModel {
    /// Equal-variance binormal model with the requested AUC.
    pub fn calibrated_for_auc(auc: f64, sigma: f64) -> Result<Self> {
        if !(auc > 0.5 && auc < 1.0) {
            return Err(Error::config("auc", format!("must lie in (0.5, 1), got {auc}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::config("sigma", "must be positive"));
        }
        // AUC = Phi(d / (sigma * sqrt 2))
        let d = std_normal().inverse_cdf(auc) * sigma * std::f64::consts::SQRT_2;
        Ok(ScoreModel::Calibrated {
            mu_bg: -d / 2.0,
            sigma_bg: sigma,
            mu_foi: d / 2.0,
            sigma_foi: sigma,
        })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoreModel::Ideal | ScoreModel::Replay => Ok(()),
            ScoreModel::Calibrated {
                mu_bg,
                sigma_bg,
                mu_foi,
                sigma_foi,
            } => {
                if !(sigma_bg.is_finite() && sigma_bg > 0.0) {
                    return Err(Error::config("sigma_bg", "must be positive and finite"));
                }
                if !(sigma_foi.is_finite() && sigma_foi > 0.0) {
                    return Err(Error::config("sigma_foi", "must be positive and finite"));
                }
                if !(mu_bg.is_finite() && mu_foi.is_finite()) {
                    return Err(Error::config("mu_foi", "means must be finite"));
                }
                if mu_foi <= mu_bg {
                    return Err(Error::config(
                        "mu_foi",
                        format!("must exceed mu_bg ({mu_foi} <= {mu_bg})"),
                    ));
                }
                Ok(())
            }
            ScoreModel::Confusion { tpr, fpr } => {
                if !(0.0..=1.0).contains(&tpr) {
                    return Err(Error::config("tpr", format!("must lie in [0, 1], got {tpr}")));
                }
                if !(0.0..=1.0).contains(&fpr) {
                    return Err(Error::config("fpr", format!("must lie in [0, 1], got {fpr}")));
                }
                Ok(())
            }
        }
    }

    /// Closed-form AUC of a calibrated model, `None` for other variants.
    ///
    /// The logistic map is strictly increasing, so the AUC of the squashed
    /// scores equals the binormal AUC of the latent variable.
    pub fn binormal_auc(&self) -> Option<f64> {
        match *self {
            ScoreModel::Calibrated {
                mu_bg,
                sigma_bg,
                mu_foi,
                sigma_foi,
            } => {
                let z = (mu_foi - mu_bg) / (sigma_bg * sigma_bg + sigma_foi * sigma_foi).sqrt();
                Some(std_normal().cdf(z))
            }
            _ => None,
        }
    }

    pub fn is_replay(&self) -> bool {
        matches!(self, ScoreModel::Replay)
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal")
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Score one frame. Only `Calibrated` and `Confusion` draw from `rng`.
pub fn score<R: Rng + ?Sized>(frame: &Frame, model: &ScoreModel, rng: &mut R) -> Result<f64> {
    let foi = frame.truth.is_foi();
    Ok(match *model {
        ScoreModel::Ideal => {
            if foi {
                1.0
            } else {
                0.0
            }
        }
        ScoreModel::Calibrated {
            mu_bg,
            sigma_bg,
            mu_foi,
            sigma_foi,
        } => {
            let (mu, sigma) = if foi {
                (mu_foi, sigma_foi)
            } else {
                (mu_bg, sigma_bg)
            };
            let z: f64 = StandardNormal.sample(rng);
            logistic(mu + sigma * z)
        }
        ScoreModel::Confusion { tpr, fpr } => {
            let p = if foi { tpr } else { fpr };
            if rng.random_bool(p) {
                1.0
            } else {
                0.0
            }
        }
        ScoreModel::Replay => frame.score.ok_or_else(|| {
            Error::input(format!("replay model needs a score on frame {}", frame.index))
        })?,
    })
}

/// Attach a score to every frame in place.
pub fn score_frames<R: Rng + ?Sized>(
    frames: &mut [Frame],
    model: &ScoreModel,
    rng: &mut R,
) -> Result<()> {
    model.validate()?;
    for frame in frames.iter_mut() {
        frame.score = Some(score(frame, model, rng)?);
    }
    Ok(())
}

/// Confidence threshold `T` in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

impl Threshold {
    pub fn new(t: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&t) {
            Ok(Threshold(t))
        } else {
            Err(Error::config("threshold", format!("must lie in [0, 1], got {t}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Threshold {
    type Error = Error;

    fn try_from(t: f64) -> Result<Self> {
        Threshold::new(t)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}

/// Binary near-sensor prediction `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Prediction {
    Background,
    Foi,
}

impl Prediction {
    pub fn bit(self) -> u8 {
        match self {
            Prediction::Background => 0,
            Prediction::Foi => 1,
        }
    }

    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Prediction::Foi
        } else {
            Prediction::Background
        }
    }
}

/// `y = 1` iff `score > t`.
pub fn classify(score: f64, threshold: Threshold) -> Prediction {
    Prediction::from_bit(score > threshold.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    /// Scores `>= threshold` are called positive. The first point uses +inf.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// Empirical ROC with one step per distinct score, and its trapezoidal AUC.
pub fn roc(labeled: &[(Truth, f64)]) -> Result<RocCurve> {
    if labeled.iter().any(|(_, s)| s.is_nan()) {
        return Err(Error::input("roc: NaN score"));
    }
    let n_pos = labeled.iter().filter(|(t, _)| t.is_foi()).count();
    let n_neg = labeled.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::input(
            "roc needs at least one FOI and one background entry",
        ));
    }

    let mut sorted: Vec<(Truth, f64)> = labeled.to_vec();
    sorted.sort_by(|a, b| b.1.total_cmp(&a.1));

    let (pos, neg) = (n_pos as f64, n_neg as f64);
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let mut auc = 0.0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let s = sorted[i].1;
        while i < sorted.len() && sorted[i].1 == s {
            if sorted[i].0.is_foi() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        let prev = *points.last().expect("non-empty");
        let next = RocPoint {
            threshold: s,
            fpr: fp as f64 / neg,
            tpr: tp as f64 / pos,
        };
        auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
        points.push(next);
    }
    Ok(RocCurve { points, auc })
}

impl RocCurve {
    /// `threshold,fpr,tpr` rows followed by `# auc=<value>`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "threshold,fpr,tpr")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.threshold, p.fpr, p.tpr)?;
        }
        writeln!(out, "# auc={}", self.auc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn frame(truth: Truth) -> Frame {
        Frame::new(0, truth)
    }

    #[test]
    fn ideal_scores() {
        let mut rng = rng_from_seed(0);
        assert_eq!(score(&frame(Truth::Foi), &ScoreModel::Ideal, &mut rng).unwrap(), 1.0);
        assert_eq!(
            score(&frame(Truth::Background), &ScoreModel::Ideal, &mut rng).unwrap(),
            0.0
        );
    }

    #[test]
    fn replay_passes_score_through() {
        let mut rng = rng_from_seed(0);
        let mut f = frame(Truth::Background);
        assert!(score(&f, &ScoreModel::Replay, &mut rng).is_err());
        f.score = Some(0.42);
        assert_eq!(score(&f, &ScoreModel::Replay, &mut rng).unwrap(), 0.42);
    }

    #[test]
    fn calibrated_means_are_ordered() {
        let model = ScoreModel::Calibrated {
            mu_bg: -2.0,
            sigma_bg: 1.0,
            mu_foi: 2.0,
            sigma_foi: 1.0,
        };
        let mut rng = rng_from_seed(5);
        let mean = |truth, rng: &mut _| {
            (0..10_000)
                .map(|_| score(&frame(truth), &model, rng).unwrap())
                .sum::<f64>()
                / 10_000.0
        };
        let foi = mean(Truth::Foi, &mut rng);
        let bg = mean(Truth::Background, &mut rng);
        assert!(foi > bg, "{foi} <= {bg}");
    }

    #[test]
    fn confusion_emits_extremes_at_requested_rates() {
        let model = ScoreModel::Confusion { tpr: 0.8, fpr: 0.1 };
        let mut rng = rng_from_seed(9);
        let n = 20_000;
        let mut hits = 0;
        for _ in 0..n {
            let s = score(&frame(Truth::Foi), &model, &mut rng).unwrap();
            assert!(s == 0.0 || s == 1.0);
            hits += (s == 1.0) as usize;
        }
        assert!((hits as f64 / n as f64 - 0.8).abs() < 0.02);
    }

    #[test]
    fn score_is_deterministic_per_seed() {
        let model = ScoreModel::calibrated_for_auc(0.9, 1.0).unwrap();
        let draw = |seed| {
            let mut rng = rng_from_seed(seed);
            (0..32)
                .map(|i| score(&frame(if i % 3 == 0 { Truth::Foi } else { Truth::Background }), &model, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
        assert_ne!(draw(3), draw(4));
    }

    #[test]
    fn model_validation() {
        let bad = [
            ScoreModel::Calibrated { mu_bg: 0.0, sigma_bg: 0.0, mu_foi: 1.0, sigma_foi: 1.0 },
            ScoreModel::Calibrated { mu_bg: 0.0, sigma_bg: 1.0, mu_foi: 1.0, sigma_foi: -1.0 },
            ScoreModel::Calibrated { mu_bg: 1.0, sigma_bg: 1.0, mu_foi: 1.0, sigma_foi: 1.0 },
            ScoreModel::Confusion { tpr: 1.2, fpr: 0.0 },
            ScoreModel::Confusion { tpr: 0.5, fpr: -0.1 },
        ];
        for m in bad {
            assert!(m.validate().is_err(), "{m:?}");
        }
        // fpr > tpr is allowed.
        assert!(ScoreModel::Confusion { tpr: 0.1, fpr: 0.9 }.validate().is_ok());
    }

    #[test]
    fn calibrated_for_auc_round_trips() {
        for auc in [0.6, 0.8, 0.95, 0.99] {
            let m = ScoreModel::calibrated_for_auc(auc, 1.3).unwrap();
            assert!((m.binormal_auc().unwrap() - auc).abs() < 1e-9);
        }
        assert!(ScoreModel::calibrated_for_auc(0.4, 1.0).is_err());
    }

    #[test]
    fn classify_is_strict() {
        let t = Threshold::new(0.5).unwrap();
        assert_eq!(classify(0.7, t), Prediction::Foi);
        assert_eq!(classify(0.5, t), Prediction::Background);
        assert_eq!(classify(0.0, Threshold::new(0.0).unwrap()), Prediction::Background);
        assert_eq!(classify(1.0, Threshold::new(1.0).unwrap()), Prediction::Background);
        assert!(Threshold::new(1.5).is_err());
        assert!(Threshold::new(f64::NAN).is_err());
    }

    #[test]
    fn roc_ideal_and_chance() {
        let ideal = [(Truth::Foi, 1.0), (Truth::Foi, 1.0), (Truth::Background, 0.0)];
        let c = roc(&ideal).unwrap();
        assert_eq!(c.auc, 1.0);
        let first = c.points[0];
        let last = *c.points.last().unwrap();
        assert_eq!((first.fpr, first.tpr), (0.0, 0.0));
        assert_eq!((last.fpr, last.tpr), (1.0, 1.0));

        let flat = [(Truth::Foi, 0.3), (Truth::Background, 0.3), (Truth::Background, 0.3)];
        let c = roc(&flat).unwrap();
        assert_eq!(c.auc, 0.5);
        assert_eq!(c.points.len(), 2);
    }

    #[test]
    fn roc_rejects_single_class() {
        assert!(roc(&[(Truth::Foi, 0.1)]).is_err());
        assert!(roc(&[(Truth::Background, 0.1), (Truth::Background, 0.2)]).is_err());
        assert!(roc(&[]).is_err());
    }

    #[test]
    fn roc_matches_pair_counting() {
        // AUC = P(s_foi > s_bg) + P(tie) / 2, counted over all pairs.
        let mut rng = rng_from_seed(17);
        let data: Vec<(Truth, f64)> = (0..300)
            .map(|i| {
                let t = if i % 3 == 0 { Truth::Foi } else { Truth::Background };
                // coarse scores force plenty of ties
                let s = (rng.random_range(0..10) as f64 + if t.is_foi() { 3.0 } else { 0.0 }) / 13.0;
                (t, s)
            })
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for &(ta, sa) in &data {
            for &(tb, sb) in &data {
                if ta.is_foi() && !tb.is_foi() {
                    den += 1.0;
                    if sa > sb {
                        num += 1.0;
                    } else if sa == sb {
                        num += 0.5;
                    }
                }
            }
        }
        let c = roc(&data).unwrap();
        assert!((c.auc - num / den).abs() < 1e-12, "{} vs {}", c.auc, num / den);
        // thresholds strictly descending after the +inf anchor
        for w in c.points.windows(2) {
            assert!(w[0].threshold > w[1].threshold);
            assert!(w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr);
        }
    }

    #[test]
    fn roc_csv_has_auc_trailer() {
        let c = roc(&[(Truth::Foi, 0.9), (Truth::Background, 0.2)]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("threshold,fpr,tpr\ninf,0,0\n"));
        assert!(text.ends_with("# auc=1\n"));
    }
}
