use serde::Serialize;

use crate::error::{Error, Result};

/// `R²` below which a peak-scaling fit is reported as showing no clear
/// exponential scaling.
pub const CLEAR_SCALING_R2: f64 = 0.95;

/// Least-squares line `ln y = intercept + slope · r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    /// `ln y₀`.
    pub intercept: f64,
    /// `-β` in `y = y₀ e^{-βr}`.
    pub slope: f64,
    pub r_squared: f64,
    /// Points used, as `(r, y)`.
    pub used: Vec<(f64, f64)>,
    /// Rates whose value was non-positive and therefore dropped.
    pub excluded: Vec<f64>,
}

impl ScalingFit {
    pub fn clear_scaling(&self) -> bool {
        self.r_squared >= CLEAR_SCALING_R2
    }

    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }

    pub fn predict_ln(&self, rate: f64) -> f64 {
        self.intercept + self.slope * rate
    }
}

/// Fits `ln y` against the reset rate. Non-positive `y` are excluded and
/// listed; at least four distinct rates must remain.
pub fn fit_peak_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    for &(r, y) in points {
        if !(r.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("non-finite fit point ({r}, {y})")));
        }
        if y > 0.0 {
            used.push((r, y));
        } else {
            excluded.push(r);
        }
    }
    let mut rates: Vec<f64> = used.iter().map(|p| p.0).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    if rates.len() < 4 {
        return Err(Error::Domain(format!(
            "peak-scaling fit needs at least 4 distinct rates with positive peaks, got {}",
            rates.len()
        )));
    }

    let n = used.len() as f64;
    let mean_x = used.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = used.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in &used {
        let (dx, dy) = (x - mean_x, y.ln() - mean_y);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = used
        .iter()
        .map(|&(x, y)| (y.ln() - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(ScalingFit {
        intercept,
        slope,
        r_squared,
        used,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let pts: Vec<_> = [0.0, 0.01, 0.02, 0.04]
            .iter()
            .map(|&r: &f64| (r, 0.8 * (-12.0 * r).exp()))
            .collect();
        let fit = fit_peak_scaling(&pts).unwrap();
        assert!((fit.slope + 12.0).abs() < 1e-9);
        assert!((fit.prefactor() - 0.8).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-9);
        assert!(fit.clear_scaling());
    }

    #[test]
    fn vanishing_peak_is_flagged() {
        let pts = [(0.0, 0.8), (0.1, 0.5), (0.2, 0.3), (0.3, 0.2), (0.4, 0.0)];
        let fit = fit_peak_scaling(&pts).unwrap();
        assert_eq!(fit.excluded, vec![0.4]);
        assert_eq!(fit.used.len(), 4);
    }

    #[test]
    fn too_few_rates() {
        assert!(fit_peak_scaling(&[(0.0, 1.0), (0.1, 0.5), (0.2, 0.2)]).is_err());
        assert!(fit_peak_scaling(&[(0.0, 1.0), (0.0, 0.5), (0.1, 0.2), (0.2, 0.1)]).is_err());
    }

    #[test]
    fn scattered_data_has_no_clear_scaling() {
        let pts = [(0.0, 0.2), (0.1, 0.5), (0.2, 0.15), (0.3, 0.45), (0.4, 0.2)];
        let fit = fit_peak_scaling(&pts).unwrap();
        assert!(fit.r_squared < CLEAR_SCALING_R2);
        assert!(!fit.clear_scaling());
    }
}
