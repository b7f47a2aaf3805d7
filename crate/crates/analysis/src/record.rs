//! Experiment records and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::AnalysisError;

pub const SCHEMA_VERSION: u32 = 1;

const HEADER: [&str; 10] = [
    "schema_version",
    "kind",
    "config_hash",
    "seed",
    "size",
    "p",
    "trials",
    "estimate",
    "stderr",
    "batch_means",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CodeCapacityMarginal,
    CodeCapacityMinweight,
    Entropy,
    MutualInfo,
    SpacetimeFailure,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CodeCapacityMarginal => "code-capacity-marginal",
            Self::CodeCapacityMinweight => "code-capacity-minweight",
            Self::Entropy => "entropy",
            Self::MutualInfo => "mutual-info",
            Self::SpacetimeFailure => "spacetime-failure",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::CodeCapacityMarginal,
            Self::CodeCapacityMinweight,
            Self::Entropy,
            Self::MutualInfo,
            Self::SpacetimeFailure,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

/// Estimate at one `(size, p)`; `size` is the depth `d` or, for the
/// entropy experiment, the number of distillation rounds `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub size: usize,
    pub p: f64,
    pub trials: usize,
    pub estimate: f64,
    pub stderr: f64,
    /// Means over contiguous trial batches, used for jackknife refits.
    pub batch_means: Vec<f64>,
}

/// Bounds of batch `b` when `trials` are split into `batches` contiguous
/// runs.
pub fn batch_range(trials: usize, batches: usize, b: usize) -> std::ops::Range<usize> {
    b * trials / batches..(b + 1) * trials / batches
}

impl Point {
    /// Mean, `sample-std/√trials` and `batches` batch means of `samples`.
    pub fn from_samples(size: usize, p: f64, samples: &[f64], batches: usize) -> Self {
        let t = samples.len();
        let mean = if t == 0 { 0.0 } else { samples.iter().sum::<f64>() / t as f64 };
        let stderr = if t < 2 {
            0.0
        } else {
            let var = samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (t - 1) as f64;
            (var / t as f64).sqrt()
        };
        let b = batches.min(t);
        let batch_means = (0..b)
            .map(|i| {
                let r = batch_range(t, b, i);
                let n = r.len() as f64;
                samples[r].iter().sum::<f64>() / n
            })
            .collect();
        Self {
            size,
            p,
            trials: t,
            estimate: mean,
            stderr,
            batch_means,
        }
    }

    /// Estimate with batch `b` left out. Terms are summed in sorted order
    /// so the result does not depend on batch labels.
    pub fn leave_out(&self, b: usize) -> f64 {
        let nb = self.batch_means.len();
        let mut terms = Vec::with_capacity(nb);
        let mut count = 0usize;
        for (i, m) in self.batch_means.iter().enumerate() {
            if i != b {
                let n = batch_range(self.trials, nb, i).len();
                terms.push(m * n as f64);
                count += n;
            }
        }
        terms.sort_by(f64::total_cmp);
        terms.iter().sum::<f64>() / count as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub config_hash: String,
    pub seed: u64,
    pub points: Vec<Point>,
}

impl ExperimentRecord {
    pub fn new(kind: ExperimentKind, seed: u64, points: Vec<Point>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            kind,
            config_hash: String::new(),
            seed,
            points,
        }
    }

    /// Distinct sizes in increasing order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.points.iter().map(|p| p.size).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn point(&self, size: usize, p: f64) -> Option<&Point> {
        self.points.iter().find(|x| x.size == size && x.p == p)
    }

    /// Smallest batch count over all points.
    pub fn num_batches(&self) -> usize {
        self.points.iter().map(|p| p.batch_means.len()).min().unwrap_or(0)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), AnalysisError> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(HEADER)?;
        for pt in &self.points {
            let batches: Vec<String> = pt.batch_means.iter().map(|m| m.to_string()).collect();
            out.write_record([
                self.schema_version.to_string(),
                self.kind.as_str().to_string(),
                self.config_hash.clone(),
                self.seed.to_string(),
                pt.size.to_string(),
                pt.p.to_string(),
                pt.trials.to_string(),
                pt.estimate.to_string(),
                pt.stderr.to_string(),
                batches.join(" "),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self, AnalysisError> {
        let mut reader = csv::Reader::from_reader(r);
        let header = reader.headers()?.clone();
        if header.iter().ne(HEADER) {
            return Err(AnalysisError::Schema(format!("unexpected header {header:?}")));
        }
        let bad = |what: &str, v: &str| AnalysisError::Schema(format!("bad {what} {v:?}"));
        let mut meta: Option<(u32, ExperimentKind, String, u64)> = None;
        let mut points = Vec::new();
        for row in reader.records() {
            let row = row?;
            let field = |i: usize| row.get(i).unwrap_or("");
            let version: u32 = field(0).parse().map_err(|_| bad("schema version", field(0)))?;
            if version != SCHEMA_VERSION {
                return Err(AnalysisError::Schema(format!("unsupported schema version {version}")));
            }
            let kind = ExperimentKind::parse(field(1)).ok_or_else(|| bad("kind", field(1)))?;
            let seed: u64 = field(3).parse().map_err(|_| bad("seed", field(3)))?;
            let row_meta = (version, kind, field(2).to_string(), seed);
            match &meta {
                None => meta = Some(row_meta),
                Some(m) if *m != row_meta => {
                    return Err(AnalysisError::Schema("rows from different experiments".into()))
                }
                _ => {}
            }
            let num = |i: usize, what: &str| field(i).parse::<f64>().map_err(|_| bad(what, field(i)));
            let batch_means = field(9)
                .split_whitespace()
                .map(|s| s.parse::<f64>().map_err(|_| bad("batch mean", s)))
                .collect::<Result<Vec<_>, _>>()?;
            points.push(Point {
                size: field(4).parse().map_err(|_| bad("size", field(4)))?,
                p: num(5, "p")?,
                trials: field(6).parse().map_err(|_| bad("trials", field(6)))?,
                estimate: num(7, "estimate")?,
                stderr: num(8, "stderr")?,
                batch_means,
            });
        }
        let (schema_version, kind, config_hash, seed) =
            meta.ok_or_else(|| AnalysisError::Schema("record has no rows".into()))?;
        Ok(Self {
            schema_version,
            kind,
            config_hash,
            seed,
            points,
        })
    }
}
