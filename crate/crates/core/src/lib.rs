//! Selective sensor-data transmission.
//!
//! A near-sensor detector scores each captured frame; a small state machine
//! (the [`gate`]) turns those predictions into transmit/drop decisions using
//! lazy deactivation and a minimum transmission frequency. The remaining
//! modules generate or replay frame streams, model the detector, account
//! energy and storage, compute miss and transmission rates, and drive
//! parameter sweeps.
//!
//! ```
//! use sensegate::detector::Prediction::{Background as B, Foi as F};
//! use sensegate::gate::{run, GateConfig, PeriodMode};
//!
//! let cfg = GateConfig::new(3, 30, 0, PeriodMode::Faithful).unwrap();
//! let out = run(&[F, B, F, B, B], &cfg);
//! assert!(out.iter().all(|o| o.decision.is_transmit()));
//! ```

pub mod detector;
pub mod energy;
mod error;
pub mod expctl;
pub mod gate;
pub mod metrics;
pub mod rng;
pub mod stream;

pub use error::{Error, Result};
