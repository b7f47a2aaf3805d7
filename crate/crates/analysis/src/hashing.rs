//! Hashing bound `R = 1 − h₂(p) − p·log₂3` for depolarizing noise.

use crate::AnalysisError;

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

pub fn hashing_rate(p: f64) -> f64 {
    1.0 - h2(p) - p * 3f64.log2()
}

/// Depolarizing rate at which the hashing rate equals `rate`, by
/// bisection on `(0, 3/4)` to 1e-9. The rate is decreasing there.
pub fn hashing_bound(rate: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(AnalysisError::NoRoot(rate));
    }
    let (mut lo, mut hi) = (0.0f64, 0.75f64);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if hashing_rate(mid) > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
