//! Least-squares fits used by the scaling diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// `y ≈ intercept + slope x` with the root-mean-square residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
    pub n_points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return invalid(format!("fit inputs differ in length: {} vs {}", x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return invalid("a linear fit needs at least two points");
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return invalid("a linear fit needs at least two distinct abscissae");
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(LinearFit { slope, intercept, rms_residual: (ss / nf).sqrt(), n_points: n })
}

/// `|y| ≈ coefficient · |x|^{-exponent}`, fitted in log-log coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub coefficient: f64,
    pub exponent: f64,
    /// RMS residual of the log-log fit.
    pub log_residual: f64,
    pub n_points: usize,
}

/// Fits a decaying power law to the pairs with `x ≠ 0` and `y ≠ 0`.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        x.iter().zip(y).filter(|(a, b)| **a != 0.0 && **b != 0.0).map(|(a, b)| (a.abs().ln(), b.abs().ln())).unzip();
    let f = linear_fit(&lx, &ly)?;
    Ok(PowerFit {
        coefficient: f.intercept.exp(),
        exponent: -f.slope,
        log_residual: f.rms_residual,
        n_points: f.n_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..50).map(|k| k as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v.powf(-0.5)).collect();
        let f = power_law_fit(&x, &y).unwrap();
        assert!((f.exponent - 0.5).abs() < 1e-13 && (f.coefficient - 2.5).abs() < 1e-12);
        assert!(f.log_residual < 1e-13);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[2.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[2.0, 3.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[2.0]).is_err());
    }
}
