//! Finite-size scaling fits `y = A + Bx + Cx²`, `x = size^λ (p − p_c)`,
//! with jackknife errors on `p_c`.

use serde::{Deserialize, Serialize};

use crate::record::{ExperimentRecord, SCHEMA_VERSION};
use crate::AnalysisError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataPoint {
    pub size: f64,
    pub p: f64,
    pub y: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub schema_version: u32,
    pub p_c: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub window: [f64; 2],
    /// Mean squared error at the optimum.
    pub residual: f64,
    pub points: usize,
    /// Jackknife standard deviation of `p_c`.
    pub sigma_p_c: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Initial `[p_min, p_max]`; the full grid when absent.
    #[serde(default)]
    pub window: Option<[f64; 2]>,
    /// Extreme points are dropped while their inclusion multiplies
    /// `σ(p_c)` by more than this.
    #[serde(default = "default_truncation")]
    pub truncation_factor: f64,
}

fn default_truncation() -> f64 {
    2.0
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            window: None,
            truncation_factor: default_truncation(),
        }
    }
}

const LAMBDA_RANGE: (f64, f64) = (0.05, 3.0);
const GRID: usize = 60;

/// Solves the 3×3 normal equations `m a = v`. A ridge of relative size
/// 1e-12 keeps rank-deficient systems (all `x` equal) solvable.
fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> [f64; 3] {
    let scale = m.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += scale * 1e-12;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, pivot);
        v.swap(col, pivot);
        for r in col + 1..3 {
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            v[r] -= f * v[col];
        }
    }
    let mut a = [0.0; 3];
    for r in (0..3).rev() {
        let mut s = v[r];
        for c in r + 1..3 {
            s -= m[r][c] * a[c];
        }
        a[r] = s / m[r][r];
    }
    a
}

/// Least-squares `(A, B, C)` and the mean squared error for fixed
/// `(p_c, λ)`.
pub fn inner_fit(points: &[DataPoint], p_c: f64, lambda: f64) -> ([f64; 3], f64) {
    let xs: Vec<f64> = points.iter().map(|d| d.size.powf(lambda) * (d.p - p_c)).collect();
    let s = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let s = if s > 0.0 { s } else { 1.0 };
    let mut m = [[0.0; 3]; 3];
    let mut v = [0.0; 3];
    for (x, d) in xs.iter().zip(points) {
        let t = x / s;
        let basis = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            v[i] += basis[i] * d.y;
        }
    }
    let [a, b, c] = solve3(m, v);
    let coeffs = [a, b / s, c / (s * s)];
    let mse = xs
        .iter()
        .zip(points)
        .map(|(x, d)| {
            let r = d.y - coeffs[0] - coeffs[1] * x - coeffs[2] * x * x;
            r * r
        })
        .sum::<f64>()
        / points.len() as f64;
    (coeffs, mse)
}

/// Mean squared error at `v = (p_c, λ)`, infinite outside `p_c ∈ [lo, hi]`
/// and the λ search range.
fn objective(points: &[DataPoint], v: [f64; 2], lo: f64, hi: f64) -> f64 {
    if !(v[0] >= lo && v[0] <= hi && v[1] >= LAMBDA_RANGE.0 && v[1] <= LAMBDA_RANGE.1) {
        return f64::INFINITY;
    }
    inner_fit(points, v[0], v[1]).1
}

/// Nelder–Mead on two parameters.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);
        let size = (1..3)
            .map(|i| ((simplex[i][0] - simplex[0][0]) / step[0]).abs().max(((simplex[i][1] - simplex[0][1]) / step[1]).abs()))
            .fold(0.0f64, f64::max);
        if size < 1e-10 {
            break;
        }
        let centroid = [(simplex[0][0] + simplex[1][0]) / 2.0, (simplex[0][1] + simplex[1][1]) / 2.0];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let r = along(-1.0);
        let fr = f(r);
        if fr < values[0] {
            let e = along(-2.0);
            let fe = f(e);
            if fe < fr {
                simplex[2] = e;
                values[2] = fe;
            } else {
                simplex[2] = r;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = r;
            values[2] = fr;
        } else {
            let c = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(c);
            if fc < values[2].min(fr) {
                simplex[2] = c;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    simplex[best]
}

/// Fits the ansatz to `points`. `p_c` is searched within the range of
/// `p` values present.
pub fn fit_points(points: &[DataPoint]) -> Result<ScalingFit, AnalysisError> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.size
            .total_cmp(&b.size)
            .then(a.p.total_cmp(&b.p))
            .then(a.y.total_cmp(&b.y))
    });
    let mut sizes: Vec<f64> = pts.iter().map(|d| d.size).collect();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(AnalysisError::Degenerate("need at least two distinct sizes".into()));
    }
    let mut ps: Vec<f64> = pts.iter().map(|d| d.p).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    if ps.len() < 4 {
        return Err(AnalysisError::Degenerate(format!("need at least 4 error rates, got {}", ps.len())));
    }
    let (lo, hi) = (ps[0], ps[ps.len() - 1]);
    let dp = (hi - lo) / GRID as f64;
    let dl = (LAMBDA_RANGE.1 - LAMBDA_RANGE.0) / GRID as f64;
    let mut best = ([lo, LAMBDA_RANGE.0], f64::INFINITY);
    for i in 0..=GRID {
        for j in 0..=GRID {
            let v = [lo + dp * i as f64, LAMBDA_RANGE.0 + dl * j as f64];
            let f = objective(&pts, v, lo, hi);
            if f < best.1 {
                best = (v, f);
            }
        }
    }
    let v = nelder_mead(|v| objective(&pts, v, lo, hi), best.0, [dp, dl]);
    let v = if objective(&pts, v, lo, hi) <= best.1 { v } else { best.0 };
    let (coeffs, mse) = inner_fit(&pts, v[0], v[1]);
    Ok(ScalingFit {
        schema_version: SCHEMA_VERSION,
        p_c: v[0],
        lambda: v[1],
        a: coeffs[0],
        b: coeffs[1],
        c: coeffs[2],
        window: [lo, hi],
        residual: mse,
        points: pts.len(),
        sigma_p_c: None,
    })
}

fn in_window(p: f64, window: [f64; 2]) -> bool {
    p >= window[0] && p <= window[1]
}

fn window_points(record: &ExperimentRecord, window: [f64; 2], leave_out: Option<usize>) -> Vec<DataPoint> {
    record
        .points
        .iter()
        .filter(|pt| in_window(pt.p, window))
        .map(|pt| DataPoint {
            size: pt.size as f64,
            p: pt.p,
            y: match leave_out {
                None => pt.estimate,
                Some(b) => pt.leave_out(b),
            },
        })
        .collect()
}

fn full_window(record: &ExperimentRecord) -> [f64; 2] {
    let lo = record.points.iter().map(|p| p.p).fold(f64::INFINITY, f64::min);
    let hi = record.points.iter().map(|p| p.p).fold(f64::NEG_INFINITY, f64::max);
    [lo, hi]
}

pub fn fit_scaling_ansatz(record: &ExperimentRecord, window: Option<[f64; 2]>) -> Result<ScalingFit, AnalysisError> {
    let w = window.unwrap_or_else(|| full_window(record));
    fit_points(&window_points(record, w, None))
}

/// Leave-one-batch-out refits; `σ² = (B−1)/B · Σ_b (p_c^(b) − mean)²`.
pub fn jackknife_pc(record: &ExperimentRecord, window: Option<[f64; 2]>) -> Result<f64, AnalysisError> {
    let w = window.unwrap_or_else(|| full_window(record));
    let b = record.num_batches();
    if b < 2 {
        return Err(AnalysisError::Degenerate(format!("jackknife needs at least 2 batches, got {b}")));
    }
    let estimates = (0..b)
        .map(|i| fit_points(&window_points(record, w, Some(i))).map(|f| f.p_c))
        .collect::<Result<Vec<_>, _>>()?;
    // Σ_b (x_b − mean)² written as a pairwise sum, exact for equal values
    let mut pair = 0.0;
    for x in &estimates {
        for y in &estimates {
            pair += (x - y) * (x - y);
        }
    }
    let ss = pair / (2.0 * b as f64);
    Ok(((b - 1) as f64 / b as f64 * ss).sqrt())
}

/// Distinct `p` values inside `window`.
fn window_ps(record: &ExperimentRecord, window: [f64; 2]) -> Vec<f64> {
    let mut ps: Vec<f64> = record.points.iter().map(|p| p.p).filter(|&p| in_window(p, window)).collect();
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    ps
}

/// Narrows `window` by dropping the lowest or highest `p` while including
/// it raises the jackknife `σ(p_c)` by more than `factor`. At least four
/// error rates are kept.
pub fn truncate_window(record: &ExperimentRecord, window: Option<[f64; 2]>, factor: f64) -> Result<[f64; 2], AnalysisError> {
    let mut w = window.unwrap_or_else(|| full_window(record));
    let mut sigma = jackknife_pc(record, Some(w))?;
    loop {
        let ps = window_ps(record, w);
        if ps.len() <= 4 {
            return Ok(w);
        }
        let candidates = [[ps[1], w[1]], [w[0], ps[ps.len() - 2]]];
        let mut best: Option<([f64; 2], f64)> = None;
        for c in candidates {
            let s = jackknife_pc(record, Some(c))?;
            if sigma > factor * s && best.is_none_or(|(_, bs)| s < bs) {
                best = Some((c, s));
            }
        }
        match best {
            Some((c, s)) => {
                w = c;
                sigma = s;
            }
            None => return Ok(w),
        }
    }
}

/// Window truncation, fit and jackknife error in one call.
pub fn fit_with_errors(record: &ExperimentRecord, options: &FitOptions) -> Result<ScalingFit, AnalysisError> {
    let w = truncate_window(record, options.window, options.truncation_factor)?;
    let mut fit = fit_scaling_ansatz(record, Some(w))?;
    fit.window = w;
    fit.sigma_p_c = Some(jackknife_pc(record, Some(w))?);
    Ok(fit)
}
