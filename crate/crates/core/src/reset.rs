//! Poissonian reset of the environment, averaged over reset histories.
//!
//! With rate `r` the averaged mode density matrix at elapsed time `s` is the
//! renewal mixture
//!
//! ```text
//! ρ_r(s) = r ∫₀ˢ e^{-r s'} ρ₀(s') ds' + e^{-r s} ρ₀(s)
//! ```
//!
//! where `ρ₀` is the reset-free trajectory. A reset restarts the whole drive
//! protocol, so `ρ₀` is evaluated at the time elapsed since the last reset.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{Basis, Mat2, ModeDensityMatrix};

/// Trace drift above which emitted matrices are renormalized.
const TRACE_DRIFT_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetConfig {
    rate: f64,
}

impl ResetConfig {
    pub fn new(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::Config(format!(
                "reset rate must be finite and non-negative, got {rate}"
            )));
        }
        Ok(ResetConfig { rate })
    }

    pub fn none() -> Self {
        ResetConfig { rate: 0.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Default for ResetConfig {
    fn default() -> Self {
        ResetConfig::none()
    }
}

/// `(1 - e^{-z}(1 + z)) / z`, stable for small `z`.
fn ramp_weight(z: f64) -> f64 {
    if z < 1e-2 {
        z * (0.5 - z * (1.0 / 3.0 - z * (0.125 - z * (1.0 / 30.0 - z * (1.0 / 144.0 - z / 840.0)))))
    } else {
        (-(-z).exp_m1() - z * (-z).exp()) / z
    }
}

/// Weights `(w0, w1)` with `r ∫_{s0}^{s1} e^{-rs} ρ(s) ds = w0 ρ(s0) + w1 ρ(s1)`
/// exactly when `ρ` is linear on the interval.
fn interval_weights(rate: f64, s0: f64, s1: f64) -> (f64, f64) {
    if rate == 0.0 {
        return (0.0, 0.0);
    }
    let survival = (-rate * s0).exp();
    let z = rate * (s1 - s0);
    let total = -survival * (-z).exp_m1();
    let w1 = survival * ramp_weight(z);
    (total - w1, w1)
}

/// `∫₀¹ θⁿ e^{-zθ} dθ` for `n = 0..=3`.
fn exponential_moments(z: f64) -> [f64; 4] {
    let mut m = [0.0; 4];
    if z < 1.0 {
        // Σ_j (-z)^j / (j! (n + j + 1)); every m_n exceeds 1/(e(n+1)) here, so
        // the sum stops once a term is below roundoff (at most 24 terms).
        let mut term = 1.0;
        for j in 0..24 {
            for (n, slot) in m.iter_mut().enumerate() {
                *slot += term / (n + j + 1) as f64;
            }
            term *= -z / (j + 1) as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
    } else {
        let tail = (-z).exp();
        m[0] = -(-z).exp_m1() / z;
        for n in 1..4 {
            m[n] = (n as f64 * m[n - 1] - tail) / z;
        }
    }
    m
}

/// Weights `[a0, b0, a1, b1]` with
/// `r ∫_{s0}^{s1} e^{-rs} ρ(s) ds = a0 ρ(s0) + b0 ρ'(s0) + a1 ρ(s1) + b1 ρ'(s1)`
/// exactly when `ρ` is a cubic on the interval.
#[cfg(test)]
fn hermite_weights(rate: f64, s0: f64, s1: f64) -> [f64; 4] {
    if rate == 0.0 {
        return [0.0; 4];
    }
    let shape = hermite_shape(rate, s1 - s0);
    let survival = (-rate * s0).exp();
    shape.map(|w| survival * w)
}

/// The weights of [`hermite_weights`] for an interval starting at `s = 0`.
fn hermite_shape(rate: f64, h: f64) -> [f64; 4] {
    let z = rate * h;
    let [m0, m1, m2, m3] = exponential_moments(z);
    [
        z * (m0 - 3.0 * m2 + 2.0 * m3),
        z * h * (m1 - 2.0 * m2 + m3),
        z * (3.0 * m2 - 2.0 * m3),
        z * h * (m3 - m2),
    ]
}

/// Streaming accumulator for the reset integral of one trajectory.
///
/// The exponential weight is integrated exactly against an interpolant of
/// `ρ₀`: the cubic Hermite interpolant when both ends of an interval carry
/// `dρ₀/ds`, the linear one otherwise. Either way a constant trajectory is a
/// fixed point and the trace of the integral is `1 - e^{-rs}` to roundoff
/// (the derivative of a density matrix is traceless).
#[derive(Debug, Clone)]
pub struct ResetAccumulator {
    rate: f64,
    integral: Mat2,
    last: Option<(f64, Mat2)>,
    last_derivative: Option<Mat2>,
    /// Step length and [`hermite_shape`] of a recent interval; integrator
    /// steps repeat, so this saves most moment evaluations.
    shape_cache: Option<(f64, [f64; 4])>,
}

impl ResetAccumulator {
    pub fn new(config: ResetConfig) -> Self {
        ResetAccumulator {
            rate: config.rate(),
            integral: Mat2::zeros(),
            last: None,
            last_derivative: None,
            shape_cache: None,
        }
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    /// `r ∫₀ˢ e^{-r s'} ρ₀(s') ds'` up to the latest sample.
    pub fn integral_term(&self) -> &Mat2 {
        &self.integral
    }

    pub fn last_elapsed(&self) -> Option<f64> {
        self.last.map(|(s, _)| s)
    }

    /// Adds the reset-free sample `ρ₀(s)`. The first sample must sit at
    /// `s = 0`, later ones at strictly increasing `s`.
    pub fn absorb(&mut self, elapsed: f64, rho0: &Mat2) -> Result<()> {
        self.absorb_sample(elapsed, rho0, None)
    }

    /// Like [`absorb`](Self::absorb), with the exact derivative `dρ₀/ds`
    /// at the sample; raises the quadrature from second to fourth order.
    pub fn absorb_with_derivative(&mut self, elapsed: f64, rho0: &Mat2, drho0: &Mat2) -> Result<()> {
        self.absorb_sample(elapsed, rho0, Some(drho0))
    }

    fn hermite_weights(&mut self, s0: f64, s1: f64) -> [f64; 4] {
        if self.rate == 0.0 {
            return [0.0; 4];
        }
        let h = s1 - s0;
        let shape = match self.shape_cache {
            Some((cached, shape)) if cached == h => shape,
            _ => {
                let shape = hermite_shape(self.rate, h);
                self.shape_cache = Some((h, shape));
                shape
            }
        };
        let survival = (-self.rate * s0).exp();
        shape.map(|w| survival * w)
    }

    fn absorb_sample(&mut self, elapsed: f64, rho0: &Mat2, drho0: Option<&Mat2>) -> Result<()> {
        match self.last {
            None if elapsed != 0.0 => {
                return Err(Error::Contract(format!(
                    "reset trajectory must start at elapsed time 0, got {elapsed}"
                )))
            }
            Some((prev, _)) if !(elapsed > prev) => {
                return Err(Error::Contract(format!(
                    "reset samples must be strictly increasing in time: {elapsed} after {prev}"
                )))
            }
            Some((prev, prev_rho)) => match (self.last_derivative, drho0) {
                (Some(d0), Some(d1)) => {
                    let [a0, b0, a1, b1] = self.hermite_weights(prev, elapsed);
                    for (((slot, &p), (&dp, &r)), &dr) in self
                        .integral
                        .iter_mut()
                        .zip(prev_rho.iter())
                        .zip(d0.iter().zip(rho0.iter()))
                        .zip(d1.iter())
                    {
                        *slot += p * a0 + dp * b0 + r * a1 + dr * b1;
                    }
                }
                _ => {
                    let (w0, w1) = interval_weights(self.rate, prev, elapsed);
                    self.integral += prev_rho * Complex64::new(w0, 0.0)
                        + rho0 * Complex64::new(w1, 0.0);
                }
            },
            None => {}
        }
        self.last = Some((elapsed, *rho0));
        self.last_derivative = drho0.copied();
        Ok(())
    }

    /// Raw `ρ_r(s)` at the latest sample, without renormalization.
    pub fn averaged(&self) -> Option<Mat2> {
        self.last.map(|(s, rho)| {
            let survival = if self.rate == 0.0 {
                1.0
            } else {
                (-self.rate * s).exp()
            };
            self.integral + rho * Complex64::new(survival, 0.0)
        })
    }

    /// `ρ_r(s)` at the latest sample, renormalized if its trace drifted by
    /// more than 1e-10.
    pub fn emit(&self, basis: Basis) -> Option<ResetSample> {
        let (elapsed, _) = self.last?;
        let raw = self.averaged()?;
        let trace = raw[(0, 0)] + raw[(1, 1)];
        let drift = trace.re - 1.0;
        let renormalized = drift.abs() > TRACE_DRIFT_LIMIT;
        let rho = if renormalized {
            raw / Complex64::new(trace.re, 0.0)
        } else {
            raw
        };
        Some(ResetSample {
            elapsed,
            rho: ModeDensityMatrix::new(rho, basis),
            trace_drift: drift,
            renormalized,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResetSample {
    pub elapsed: f64,
    pub rho: ModeDensityMatrix,
    /// `tr ρ_r - 1` before any renormalization.
    pub trace_drift: f64,
    pub renormalized: bool,
}

/// Reset-averages a time-ordered reset-free trajectory, emitting one
/// averaged matrix per input sample.
pub fn reset_average_stream<I>(trajectory: I, config: ResetConfig) -> Result<Vec<ResetSample>>
where
    I: IntoIterator<Item = (f64, ModeDensityMatrix)>,
{
    let mut acc = ResetAccumulator::new(config);
    let mut basis = None;
    let mut out = Vec::new();
    for (elapsed, rho) in trajectory {
        match basis {
            None => basis = Some(rho.basis),
            Some(b) if b != rho.basis => {
                return Err(Error::Contract(format!(
                    "reset trajectory mixes bases {b:?} and {:?}",
                    rho.basis
                )))
            }
            Some(_) => {}
        }
        acc.absorb(elapsed, &rho.rho)?;
        out.extend(acc.emit(rho.basis));
    }
    Ok(out)
}

/// `tr(ρ²)`, between 1/2 (maximally mixed) and 1 (pure).
pub fn reset_purity(rho: &ModeDensityMatrix) -> f64 {
    rho.purity()
}
