//! Richardson extrapolation of ε → 0 limits with an error expansion in powers of √ε.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ExtrapolateError {
    #[error("need at least two samples")]
    TooFew,
    #[error("ε must be positive and strictly decreasing with a constant ratio")]
    NotGeometric,
    #[error("non-finite sample value")]
    NonFinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Limit {
    pub value: f64,
    /// Distance from the final value to the best estimate one level down.
    pub error: f64,
    /// Triangular tableau, level by level.
    pub tableau: Vec<Vec<f64>>,
}

/// Extrapolates samples (ε_k, T(ε_k)) to ε = 0 assuming T = T₀ + c₁√ε + c₂ε + ….
pub fn limit_extrapolate(samples: &[(f64, f64)]) -> Result<Limit, ExtrapolateError> {
    if samples.len() < 2 {
        return Err(ExtrapolateError::TooFew);
    }
    if samples.iter().any(|s| !s.1.is_finite()) {
        return Err(ExtrapolateError::NonFinite);
    }
    let ratio = samples[0].0 / samples[1].0;
    for w in samples.windows(2) {
        if !(w[0].0 > 0.0 && w[1].0 > 0.0 && w[1].0 < w[0].0) || ((w[0].0 / w[1].0) / ratio - 1.0).abs() > 1e-9 {
            return Err(ExtrapolateError::NotGeometric);
        }
    }
    let s_ratio = libm::sqrt(ratio);
    let mut tableau = alloc::vec![samples.iter().map(|s| s.1).collect::<Vec<f64>>()];
    for j in 1..samples.len() {
        let q = libm::pow(s_ratio, j as f64);
        let prev = &tableau[j - 1];
        let next: Vec<f64> = (0..prev.len() - 1).map(|i| prev[i + 1] + (prev[i + 1] - prev[i]) / (q - 1.0)).collect();
        tableau.push(next);
    }
    let value = tableau.last().expect("nonempty")[0];
    let below = &tableau[tableau.len() - 2];
    let error = (value - below[below.len() - 1]).abs();
    Ok(Limit { value, error, tableau })
}

/// Geometric ε schedule: `count` values ending at `last`, each `ratio` times the next.
pub fn geometric_schedule(last: f64, ratio: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| last * libm::pow(ratio, (count - 1 - k) as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_models() {
        let eps = geometric_schedule(1e-2 / 64.0, 4.0, 4);
        let s: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 0.5 + libm::sqrt(e))).collect();
        let l = limit_extrapolate(&s).unwrap();
        assert!((l.value - 0.5).abs() < 1e-6);
        let c: Vec<(f64, f64)> = eps.iter().map(|&e| (e, 0.7)).collect();
        assert_eq!(limit_extrapolate(&c).unwrap().value, 0.7);
        assert!(limit_extrapolate(&c[..1]).is_err());
        assert!(limit_extrapolate(&[(1.0, 0.0), (0.5, 0.0), (0.1, 0.0)]).is_err());
    }
}
