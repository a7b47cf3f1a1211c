//! Four-parameter sweep over `(T, M, f_min, N)`.
//!
//! Each grid point is run `replicates` times. Replicate `r` of point
//! `(t, m, f_min, n)` uses the run seed
//!
//! ```text
//! derive_seed(base_seed, [t.to_bits(), m.to_bits(), f_min, n, r])
//! ```
//!
//! from which the stream seed and the detector seed are derived with the
//! `STREAM_TAG` and `DETECTOR_TAG` words. Results are collected in grid order,
//! so output does not depend on how runs are scheduled across threads.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{ScoreModel, Threshold};
use crate::energy::EnergyParams;
use crate::error::{Error, Result};
use crate::gate::{GateConfig, PeriodMode};
use crate::metrics::spearman;
use crate::rng::{derive_seed, DETECTOR_TAG, STREAM_TAG};
use crate::stream::StreamSpec;

use super::simulate::simulate;

/// How the stream length follows `M`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthMode {
    /// `frames` is the total frame count for every `M`.
    FixedTotal,
    /// `frames` is the expected FOI count; the stream has
    /// `round(frames * (1 + M))` frames, so background grows with `M`.
    #[default]
    FixedFoi,
}

/// Stream parameters shared by every grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamTemplate {
    pub frames: u64,
    pub mean_segment_len: u32,
    #[serde(default)]
    pub length_mode: LengthMode,
}

impl StreamTemplate {
    pub fn n_frames(&self, m: f64) -> u64 {
        match self.length_mode {
            LengthMode::FixedTotal => self.frames,
            LengthMode::FixedFoi => (self.frames as f64 * (1.0 + m)).round() as u64,
        }
    }

    pub fn spec(&self, m: f64, seed: u64) -> StreamSpec {
        StreamSpec::new(self.n_frames(m), m, self.mean_segment_len, seed)
    }
}

/// Cartesian experiment grid. Fields missing from a grid file take their
/// [`Default`] values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepGrid {
    pub t_values: Vec<f64>,
    pub m_values: Vec<f64>,
    /// `f_min` as a fraction of `f_r`; `0` disables the periodic branch.
    pub fmin_values: Vec<f64>,
    pub n_values: Vec<u32>,
    pub replicates: u32,
    pub base_seed: u64,
    pub f_r: u32,
    pub stream: StreamTemplate,
    pub detector: ScoreModel,
    pub energy: EnergyParams,
    #[serde(default)]
    pub period_mode: PeriodMode,
}

impl Default for SweepGrid {
    /// The built-in grid: `T` in 0.1..=0.9, `M` in {1, 5, 10, 20, 50},
    /// `f_min / f_r` in {0, 1/4, 1/2}, `N` in {1, 2, 4, 8}, three replicates,
    /// 500 expected FOI frames per run and an AUC 0.95 detector.
    fn default() -> Self {
        SweepGrid {
            t_values: (1..=9).map(|i| f64::from(i) / 10.0).collect(),
            m_values: vec![1.0, 5.0, 10.0, 20.0, 50.0],
            fmin_values: vec![0.0, 0.25, 0.5],
            n_values: vec![1, 2, 4, 8],
            replicates: 3,
            base_seed: 2024,
            f_r: 60,
            stream: StreamTemplate {
                frames: 500,
                mean_segment_len: 10,
                length_mode: LengthMode::FixedFoi,
            },
            detector: ScoreModel::calibrated_for_auc(0.95, 1.0).expect("valid auc"),
            energy: EnergyParams::CALIBRATED,
            period_mode: PeriodMode::Faithful,
        }
    }
}

/// One `(T, M, f_min, N)` combination, `f_min` in Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub t: Threshold,
    pub m: f64,
    pub f_min: u32,
    pub n: u32,
}

impl GridPoint {
    fn seed_words(&self, replicate: u32) -> [u64; 5] {
        [
            self.t.value().to_bits(),
            self.m.to_bits(),
            u64::from(self.f_min),
            u64::from(self.n),
            u64::from(replicate),
        ]
    }
}

/// A validated grid point, ready to run.
#[derive(Clone, Copy, Debug)]
struct Job {
    point: GridPoint,
    gate: GateConfig,
}

impl SweepGrid {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::config("grid_file", format!("{}: {e}", path.display())))
    }

    fn fmin_hz(&self, fraction: f64) -> Result<u32> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::config(
                "fmin_values",
                format!("fraction {fraction} outside [0, 1]"),
            ));
        }
        let hz = fraction * f64::from(self.f_r);
        let rounded = hz.round();
        if (hz - rounded).abs() > 1e-9 {
            return Err(Error::config(
                "fmin_values",
                format!("{fraction} * f_r ({}) is not an integer frequency", self.f_r),
            ));
        }
        Ok(rounded as u32)
    }

    /// Validate the whole grid and list its points in lexicographic
    /// `(T, M, f_min, N)` order.
    pub fn points(&self) -> Result<Vec<GridPoint>> {
        Ok(self.jobs()?.into_iter().map(|j| j.point).collect())
    }

    fn jobs(&self) -> Result<Vec<Job>> {
        let nonempty = |name, len: usize| {
            if len == 0 {
                Err(Error::config(name, "must not be empty"))
            } else {
                Ok(())
            }
        };
        nonempty("t_values", self.t_values.len())?;
        nonempty("m_values", self.m_values.len())?;
        nonempty("fmin_values", self.fmin_values.len())?;
        nonempty("n_values", self.n_values.len())?;
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.stream.frames == 0 {
            return Err(Error::config("stream.frames", "must be at least 1"));
        }
        self.detector.validate()?;
        if self.detector.is_replay() {
            return Err(Error::config(
                "detector",
                "replay has no scores for synthetic sweep streams",
            ));
        }
        self.energy.validate()?;

        let thresholds = self
            .t_values
            .iter()
            .map(|&t| Threshold::new(t))
            .collect::<Result<Vec<_>>>()?;
        for &m in &self.m_values {
            self.stream.spec(m, 0).validate()?;
        }
        let fmins = self
            .fmin_values
            .iter()
            .map(|&f| self.fmin_hz(f))
            .collect::<Result<Vec<_>>>()?;

        let mut jobs = Vec::new();
        for &t in &thresholds {
            for &m in &self.m_values {
                for &f_min in &fmins {
                    for &n in &self.n_values {
                        let gate = GateConfig::new(n, self.f_r, f_min, self.period_mode)?;
                        jobs.push(Job {
                            point: GridPoint { t, m, f_min, n },
                            gate,
                        });
                    }
                }
            }
        }
        Ok(jobs)
    }

    fn run_job(&self, job: &Job, replicate: u32) -> Result<ReplicateResult> {
        let run_seed = derive_seed(self.base_seed, &job.point.seed_words(replicate));
        let spec = self
            .stream
            .spec(job.point.m, derive_seed(run_seed, &[STREAM_TAG]));
        let out = simulate(
            &spec,
            &self.detector,
            job.point.t,
            &job.gate,
            &self.energy,
            derive_seed(run_seed, &[DETECTOR_TAG]),
            false,
        )?;
        Ok(ReplicateResult {
            p_miss: out.metrics.p_miss,
            p_trans: out.metrics.p_trans,
            savings: out.savings,
        })
    }

    /// Run a single replicate of one grid point.
    pub fn run_replicate(&self, point: &GridPoint, replicate: u32) -> Result<ReplicateResult> {
        let gate = GateConfig::new(point.n, self.f_r, point.f_min, self.period_mode)?;
        self.run_job(&Job { point: *point, gate }, replicate)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicateResult {
    pub p_miss: Option<f64>,
    pub p_trans: f64,
    pub savings: f64,
}

/// Aggregated result of one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub m: f64,
    pub fmin: u32,
    pub n: u32,
    pub p_miss_mean: Option<f64>,
    pub p_miss_std: Option<f64>,
    pub p_trans_mean: f64,
    pub p_trans_std: f64,
    pub savings_mean: f64,
    /// Replicates that contributed to the miss rate (those with at least one FOI).
    pub replicates: u32,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Aggregate replicates of one point (mean and sample standard deviation).
pub fn aggregate(point: &GridPoint, reps: &[ReplicateResult]) -> SweepRow {
    let misses: Vec<f64> = reps.iter().filter_map(|r| r.p_miss).collect();
    let trans: Vec<f64> = reps.iter().map(|r| r.p_trans).collect();
    let savings: Vec<f64> = reps.iter().map(|r| r.savings).collect();
    let (p_miss_mean, p_miss_std) = if misses.is_empty() {
        (None, None)
    } else {
        let (m, s) = mean_std(&misses);
        (Some(m), Some(s))
    };
    let (p_trans_mean, p_trans_std) = mean_std(&trans);
    SweepRow {
        t: point.t.value(),
        m: point.m,
        fmin: point.f_min,
        n: point.n,
        p_miss_mean,
        p_miss_std,
        p_trans_mean,
        p_trans_std,
        savings_mean: mean_std(&savings).0,
        replicates: misses.len() as u32,
    }
}

/// Validate the grid, then run every replicate of every point in parallel.
pub fn run_sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    let jobs = grid.jobs()?;
    let reps = grid.replicates;
    let results: Vec<ReplicateResult> = (0..jobs.len() * reps as usize)
        .into_par_iter()
        .map(|i| grid.run_job(&jobs[i / reps as usize], (i % reps as usize) as u32))
        .collect::<Result<_>>()?;
    Ok(jobs
        .iter()
        .zip(results.chunks(reps as usize))
        .map(|(job, chunk)| aggregate(&job.point, chunk))
        .collect())
}

pub const SWEEP_CSV_HEADER: &str =
    "t,m,fmin,n,p_miss_mean,p_miss_std,p_trans_mean,p_trans_std,savings_mean,replicates";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Tidy long-form CSV, one row per grid point. Absent miss rates are empty.
pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.m,
            r.fmin,
            r.n,
            opt(r.p_miss_mean),
            opt(r.p_miss_std),
            r.p_trans_mean,
            r.p_trans_std,
            r.savings_mean,
            r.replicates
        )?;
    }
    Ok(())
}

pub fn write_sweep_json<W: Write>(out: W, rows: &[SweepRow]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(out, rows).map_err(std::io::Error::from)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    T,
    M,
    FMin,
    N,
}

impl SweepParam {
    pub const ALL: [SweepParam; 4] = [SweepParam::T, SweepParam::M, SweepParam::FMin, SweepParam::N];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::T => "T",
            SweepParam::M => "M",
            SweepParam::FMin => "f_min",
            SweepParam::N => "N",
        }
    }

    fn value(self, row: &SweepRow) -> f64 {
        match self {
            SweepParam::T => row.t,
            SweepParam::M => row.m,
            SweepParam::FMin => f64::from(row.fmin),
            SweepParam::N => f64::from(row.n),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepMetric {
    PMiss,
    PTrans,
}

impl SweepMetric {
    pub const ALL: [SweepMetric; 2] = [SweepMetric::PMiss, SweepMetric::PTrans];

    pub fn name(self) -> &'static str {
        match self {
            SweepMetric::PMiss => "p_miss",
            SweepMetric::PTrans => "p_trans",
        }
    }

    fn value(self, row: &SweepRow) -> Option<f64> {
        match self {
            SweepMetric::PMiss => row.p_miss_mean,
            SweepMetric::PTrans => Some(row.p_trans_mean),
        }
    }
}

/// Spearman coefficients, parameters by metrics. Undefined cells are `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpearmanMatrix {
    cells: [[Option<f64>; 2]; 4],
}

impl SpearmanMatrix {
    pub fn get(&self, param: SweepParam, metric: SweepMetric) -> Option<f64> {
        let p = SweepParam::ALL.iter().position(|&x| x == param).expect("param");
        let m = SweepMetric::ALL.iter().position(|&x| x == metric).expect("metric");
        self.cells[p][m]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "param,p_miss,p_trans")?;
        for param in SweepParam::ALL {
            writeln!(
                out,
                "{},{},{}",
                param.name(),
                opt(self.get(param, SweepMetric::PMiss)),
                opt(self.get(param, SweepMetric::PTrans))
            )?;
        }
        Ok(())
    }
}

/// Rank correlation of each parameter column against each metric-mean column.
/// Rows without a miss rate are left out of the `p_miss` column.
pub fn spearman_matrix(rows: &[SweepRow]) -> SpearmanMatrix {
    let mut cells = [[None; 2]; 4];
    for (pi, param) in SweepParam::ALL.into_iter().enumerate() {
        for (mi, metric) in SweepMetric::ALL.into_iter().enumerate() {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter_map(|r| metric.value(r).map(|y| (param.value(r), y)))
                .unzip();
            cells[pi][mi] = spearman(&xs, &ys).ok();
        }
    }
    SpearmanMatrix { cells }
}
