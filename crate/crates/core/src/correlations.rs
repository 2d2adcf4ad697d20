//! From mode overlaps to two-qubit correlations.
//!
//! The qubits start in a Werner state with weight `a` on `|Φ⁺⟩`. Only the
//! `|↑↑⟩`/`|↓↓⟩` coherence is sensitive to the environment, and it picks up
//! the cross-branch overlap of the `+δ` and `-δ` chains; the two `ε = 0`
//! branches act identically on both sides of every other coherence, so
//! their overlap is 1 and they never enter.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::modes::{ModeDensityMatrix, SpinorAmplitudes};

/// Overlaps outside `[-tol, 1 + tol]` indicate a real inconsistency rather
/// than roundoff.
const OVERLAP_TOLERANCE: f64 = 1e-10;

/// Imaginary part of a mixed-state overlap that is silently discarded.
const IMAGINARY_TOLERANCE: f64 = 1e-8;

/// `F_k ∈ [0, 1]` for one mode.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ModeOverlap(f64);

impl ModeOverlap {
    /// Clamps roundoff excursions into `[0, 1]` and rejects anything larger.
    pub fn from_raw(raw: f64) -> Result<Self> {
        if !raw.is_finite() || raw < -OVERLAP_TOLERANCE || raw > 1.0 + OVERLAP_TOLERANCE {
            return Err(Error::Numerical(format!(
                "mode overlap {raw} outside [0, 1]"
            )));
        }
        Ok(ModeOverlap(raw.clamp(0.0, 1.0)))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `F_k = |u₊* u₋ + v₊* v₋|²` for normalized spinors.
pub fn mode_overlap_pure(plus: &SpinorAmplitudes, minus: &SpinorAmplitudes) -> ModeOverlap {
    let raw = plus.inner(minus).norm_sqr();
    debug_assert!(raw <= 1.0 + OVERLAP_TOLERANCE, "overlap {raw} of unnormalized spinors");
    ModeOverlap(raw.clamp(0.0, 1.0))
}

/// Density-matrix form of the overlap,
/// `F_k = ρ⁺₁₁ρ⁻₁₁ + ρ⁺₂₂ρ⁻₂₂ + ρ⁺₁₂ρ⁻₂₁ + ρ⁺₂₁ρ⁻₁₂ = tr(ρ⁺ρ⁻)`.
///
/// Both matrices must be written in one common basis; the trace form is
/// basis independent only then, and for pure states it reduces to
/// [`mode_overlap_pure`].
pub fn mode_overlap_mixed(
    rho_plus: &ModeDensityMatrix,
    rho_minus: &ModeDensityMatrix,
) -> Result<ModeOverlap> {
    if rho_plus.basis != rho_minus.basis {
        return Err(Error::Contract(format!(
            "branch density matrices in different bases: {:?} and {:?}",
            rho_plus.basis, rho_minus.basis
        )));
    }
    let (p, m) = (&rho_plus.rho, &rho_minus.rho);
    let f: Complex64 = p[(0, 0)] * m[(0, 0)]
        + p[(1, 1)] * m[(1, 1)]
        + p[(0, 1)] * m[(1, 0)]
        + p[(1, 0)] * m[(0, 1)];
    if f.im.abs() > IMAGINARY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "mixed overlap has imaginary part {:e}",
            f.im
        )));
    }
    ModeOverlap::from_raw(f.re)
}

/// `|D| = ∏_k F_k`, carried in the log domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceFactor {
    log_modulus: f64,
}

impl DecoherenceFactor {
    pub fn from_log(log_modulus: f64) -> Self {
        debug_assert!(log_modulus <= 0.0 || log_modulus.is_nan());
        DecoherenceFactor {
            log_modulus: log_modulus.min(0.0),
        }
    }

    pub fn unity() -> Self {
        DecoherenceFactor { log_modulus: 0.0 }
    }

    /// `ln |D|`; `-∞` when some mode overlap vanishes.
    pub fn log_modulus(&self) -> f64 {
        self.log_modulus
    }

    pub fn modulus(&self) -> f64 {
        self.log_modulus.exp()
    }
}

/// Sums `ln F_k` in the order given; callers pass modes by ascending `k`.
pub fn decoherence_factor(overlaps: &[ModeOverlap]) -> DecoherenceFactor {
    DecoherenceFactor::from_log(overlaps.iter().map(|f| f.value().ln()).sum())
}

/// Adiabatic estimate of `|D|` deep in the paramagnetic phase,
/// `exp[-Nδ² / (4h²(h² - 1))]`.
pub fn decoherence_paramagnetic_approx(chain_len: usize, delta: f64, h: f64) -> Result<f64> {
    if !(h.abs() > 1.0) {
        return Err(Error::Domain(format!(
            "paramagnetic approximation needs |h| > 1, got h = {h}"
        )));
    }
    let h2 = h * h;
    Ok((-(chain_len as f64) * delta * delta / (4.0 * h2 * (h2 - 1.0))).exp())
}

/// Reduced state of the two central qubits,
///
/// ```text
///        ⎛1+a   0    0   2ad⎞
///  1/4 · ⎜ 0   1-a   0    0 ⎟ ,   d = √|D|
///        ⎜ 0    0   1-a   0 ⎟
///        ⎝2ad   0    0   1+a⎠
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    pub a: f64,
    pub d: f64,
}

impl TwoQubitState {
    pub fn matrix(&self) -> Matrix4<f64> {
        let (a, d) = (self.a, self.d);
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0 + a;
        m[(3, 3)] = 1.0 + a;
        m[(1, 1)] = 1.0 - a;
        m[(2, 2)] = 1.0 - a;
        m[(0, 3)] = 2.0 * a * d;
        m[(3, 0)] = 2.0 * a * d;
        m / 4.0
    }

    /// Closed-form spectrum from the corner block.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let (a, d) = (self.a, self.d);
        [
            (1.0 - a) / 4.0,
            (1.0 - a) / 4.0,
            (1.0 + a + 2.0 * a * d) / 4.0,
            (1.0 + a - 2.0 * a * d) / 4.0,
        ]
    }
}

fn check_werner(a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Config(format!("a must lie in [0,1], got {a}")));
    }
    Ok(())
}

pub fn reduced_two_qubit_state(a: f64, factor: &DecoherenceFactor) -> Result<TwoQubitState> {
    check_werner(a)?;
    Ok(TwoQubitState {
        a,
        d: factor.modulus().sqrt(),
    })
}

/// `C = max[a(√|D| + 1/2) - 1/2, 0]`.
pub fn concurrence(a: f64, d_abs: f64) -> f64 {
    (a * (d_abs.sqrt() + 0.5) - 0.5).max(0.0)
}

/// `λ log₂ λ` with `0 log 0 = 0`; roundoff negatives are treated as 0.
fn entropy_term(lambda: f64) -> f64 {
    debug_assert!(lambda > -1e-12, "eigenvalue {lambda}");
    if lambda <= 0.0 {
        0.0
    } else {
        lambda * lambda.log2()
    }
}

/// `f(a) = 1 - (1+a)/2 log₂((1+a)/2) - (1-a)/2 log₂((1-a)/2)`.
pub fn werner_classical_term(a: f64) -> f64 {
    1.0 - entropy_term((1.0 + a) / 2.0) - entropy_term((1.0 - a) / 2.0)
}

/// `QD = Σ_m λ_m log₂ λ_m + f(a)` over the spectrum of the X state.
pub fn quantum_discord(a: f64, d_abs: f64) -> f64 {
    let state = TwoQubitState {
        a,
        d: d_abs.sqrt(),
    };
    let sum: f64 = state.eigenvalues().iter().map(|&l| entropy_term(l)).sum();
    sum + werner_classical_term(a)
}
