//! Experiment control: single runs, parameter sweeps and the false-positive
//! cost check.

mod fpcheck;
mod simulate;
mod sweep;

pub use fpcheck::{inject_fp_check, FpEntry, FpReport, Positions};
pub use simulate::{simulate, simulate_frames, SimulationOutcome};
pub use sweep::{
    aggregate, run_sweep, spearman_matrix, write_sweep_csv, write_sweep_json, GridPoint,
    LengthMode, ReplicateResult, SpearmanMatrix, StreamTemplate, SweepGrid, SweepMetric,
    SweepParam, SweepRow, SWEEP_CSV_HEADER,
};
