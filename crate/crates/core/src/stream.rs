//! Symbolic frame streams.
//!
//! A stream alternates contiguous runs of frames of interest (FOI) and
//! background frames. Run lengths are geometric: FOI runs have mean
//! `mean_segment_len`, background runs have mean `ratio_m * mean_segment_len`,
//! so the long-run background:FOI frame ratio is `ratio_m`.
//!
//! Streams can also be replayed from a CSV trace (`index,label,score`), which
//! is how scores logged from a real detector drive the simulator.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Ground-truth class of a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    Foi,
    Background,
}

impl Truth {
    pub fn is_foi(self) -> bool {
        matches!(self, Truth::Foi)
    }

    /// Token used in trace files.
    pub fn label(self) -> &'static str {
        match self {
            Truth::Foi => "foi",
            Truth::Background => "bg",
        }
    }

    fn from_label(token: &str) -> Option<Self> {
        match token {
            "foi" => Some(Truth::Foi),
            "bg" => Some(Truth::Background),
            _ => None,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One timestep of the sensor stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub index: u64,
    pub truth: Truth,
    /// Objectness confidence in `[0, 1]`, once a detector has scored the frame.
    pub score: Option<f64>,
}

impl Frame {
    pub fn new(index: u64, truth: Truth) -> Self {
        Frame {
            index,
            truth,
            score: None,
        }
    }
}

/// Parameters of a synthetic stream.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub n_frames: u64,
    /// Background frame count divided by FOI frame count (long-run).
    pub ratio_m: f64,
    /// Mean length of an FOI run. Background runs are `ratio_m` times longer.
    pub mean_segment_len: u32,
    pub seed: u64,
}

impl StreamSpec {
    pub fn new(n_frames: u64, ratio_m: f64, mean_segment_len: u32, seed: u64) -> Self {
        StreamSpec {
            n_frames,
            ratio_m,
            mean_segment_len,
            seed,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        StreamSpec { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::config("n_frames", "must be at least 1"));
        }
        if !(self.ratio_m.is_finite() && self.ratio_m > 0.0) {
            return Err(Error::config(
                "ratio_m",
                format!("must be a positive finite number, got {}", self.ratio_m),
            ));
        }
        if self.mean_segment_len == 0 {
            return Err(Error::config("mean_segment_len", "must be at least 1"));
        }
        // A geometric run on {1, 2, ...} cannot have a mean below one frame.
        if self.background_mean() < 1.0 {
            return Err(Error::config(
                "ratio_m",
                format!(
                    "ratio_m * mean_segment_len must be >= 1 (got {})",
                    self.background_mean()
                ),
            ));
        }
        Ok(())
    }

    pub fn foi_mean(&self) -> f64 {
        f64::from(self.mean_segment_len)
    }

    pub fn background_mean(&self) -> f64 {
        self.ratio_m * f64::from(self.mean_segment_len)
    }

    /// Long-run probability that a frame is an FOI.
    pub fn foi_probability(&self) -> f64 {
        1.0 / (1.0 + self.ratio_m)
    }
}

/// Geometric run length on `{1, 2, ...}` with the given mean.
struct RunLength(Option<Geometric>);

impl RunLength {
    fn with_mean(mean: f64) -> Self {
        let p = 1.0 / mean;
        if p >= 1.0 {
            RunLength(None)
        } else {
            RunLength(Some(Geometric::new(p).expect("p in (0, 1)")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.0 {
            None => 1,
            // rand_distr counts failures before the first success.
            Some(g) => g.sample(rng).saturating_add(1),
        }
    }
}

/// Generate a segment-alternating stream. Deterministic in `spec.seed`.
pub fn generate(spec: &StreamSpec) -> Result<Vec<Frame>> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let foi_len = RunLength::with_mean(spec.foi_mean());
    let bg_len = RunLength::with_mean(spec.background_mean());

    let mut class = if rng.random_bool(spec.foi_probability()) {
        Truth::Foi
    } else {
        Truth::Background
    };

    let total = spec.n_frames;
    let mut frames = Vec::with_capacity(usize::try_from(total).unwrap_or(0));
    let mut index = 0u64;
    while index < total {
        let len = match class {
            Truth::Foi => foi_len.sample(&mut rng),
            Truth::Background => bg_len.sample(&mut rng),
        };
        let end = index.saturating_add(len).min(total);
        frames.extend((index..end).map(|i| Frame::new(i, class)));
        index = end;
        class = match class {
            Truth::Foi => Truth::Background,
            Truth::Background => Truth::Foi,
        };
    }
    Ok(frames)
}

pub const TRACE_HEADER: &str = "index,label,score";

/// Load a trace file. Indices are renumbered from 0 in file order.
pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_trace(BufReader::new(file), path)
}

/// Parse trace rows from any reader; `origin` is only used in error messages.
pub fn parse_trace<R: BufRead>(reader: R, origin: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let origin = origin.as_ref();
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        reason,
    };

    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header.trim_end_matches('\r') == TRACE_HEADER => {}
        Some((_, Ok(header))) => {
            return Err(parse_err(
                1,
                format!("expected header `{TRACE_HEADER}`, found `{header}`"),
            ))
        }
        Some((_, Err(e))) => return Err(Error::io(origin, e)),
        None => return Err(parse_err(1, "empty file, missing header".into())),
    }

    let mut frames = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(origin, e))?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 fields, found {}", fields.len()),
            ));
        }
        fields[0]
            .trim()
            .parse::<u64>()
            .map_err(|_| parse_err(lineno, format!("bad index `{}`", fields[0])))?;
        let truth = Truth::from_label(fields[1].trim())
            .ok_or_else(|| parse_err(lineno, format!("unknown label `{}`", fields[1])))?;
        let score: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad score `{}`", fields[2])))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(parse_err(
                lineno,
                format!("score {score} outside [0, 1]"),
            ));
        }
        frames.push(Frame {
            index: frames.len() as u64,
            truth,
            score: Some(score),
        });
    }
    Ok(frames)
}

/// Write frames in trace format. Every frame must carry a score.
pub fn write_trace<W: Write>(mut out: W, frames: &[Frame]) -> Result<()> {
    let io = |e| Error::io("<trace output>", e);
    writeln!(out, "{TRACE_HEADER}").map_err(io)?;
    for (i, frame) in frames.iter().enumerate() {
        let score = frame
            .score
            .ok_or_else(|| Error::input(format!("frame {i} has no score")))?;
        writeln!(out, "{},{},{:.6}", i, frame.truth.label(), score).map_err(io)?;
    }
    Ok(())
}

/// Fraction of frames that are FOIs.
pub fn foi_fraction(frames: &[Frame]) -> Result<f64> {
    if frames.is_empty() {
        return Err(Error::input("foi_fraction of an empty stream"));
    }
    let foi = frames.iter().filter(|f| f.truth.is_foi()).count();
    Ok(foi as f64 / frames.len() as f64)
}
