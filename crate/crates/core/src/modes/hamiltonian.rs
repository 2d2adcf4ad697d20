use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{Basis, Branch, BranchField, SpinorAmplitudes};
use crate::error::{Error, Result};

/// Gap below which a mode is treated as degenerate.
const DEGENERACY_GAP: f64 = 1e-14;

/// Orientation of the `σ_z` term of the mode Hamiltonian.
///
/// The two orientations are related by conjugation with `σ_x`, so every
/// overlap between branches evolved under the same orientation agrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldConvention {
    /// `h_z = h + ε - cos k`.
    #[default]
    BlochVector,
    /// `h_z = -(h + ε - cos k)`.
    NegatedField,
}

impl FieldConvention {
    pub fn sign(self) -> f64 {
        match self {
            FieldConvention::BlochVector => 1.0,
            FieldConvention::NegatedField => -1.0,
        }
    }
}

/// `H = h_z σ_z + h_x σ_x` for one mode at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeHamiltonian {
    pub hz: f64,
    pub hx: f64,
}

impl ModeHamiltonian {
    pub fn new(k: f64, h: f64, branch: &BranchField) -> Self {
        ModeHamiltonian {
            hz: h + branch.epsilon() - k.cos(),
            hx: k.sin(),
        }
    }

    pub fn with_convention(self, convention: FieldConvention) -> Self {
        ModeHamiltonian {
            hz: convention.sign() * self.hz,
            hx: self.hx,
        }
    }

    /// Positive eigenvalue `E`; the spectrum is `{-E, +E}`.
    pub fn energy(&self) -> f64 {
        self.hz.hypot(self.hx)
    }

    pub fn matrix(&self) -> Matrix2<Complex64> {
        let c = |x: f64| Complex64::new(x, 0.0);
        Matrix2::new(c(self.hz), c(self.hx), c(self.hx), c(-self.hz))
    }

    /// Ground and excited eigenvectors in the half-angle gauge.
    ///
    /// With `θ = atan2(h_x, h_z)` the ground state is `(-sin θ/2, cos θ/2)`
    /// and the excited state `(cos θ/2, sin θ/2)`. For `h_x > 0` the angle
    /// stays inside `(0, π)`, so both vectors vary smoothly along the ramp
    /// and never flip sign. Returns `None` when the gap closes.
    pub fn eigenbasis(&self, branch: Branch) -> Option<BasisPair> {
        if self.energy() < DEGENERACY_GAP {
            return None;
        }
        let half = 0.5 * self.hx.atan2(self.hz);
        let (s, c) = half.sin_cos();
        Some(BasisPair {
            ground: SpinorAmplitudes::real(-s, c),
            excited: SpinorAmplitudes::real(c, s),
            basis: Basis::Instantaneous(branch),
        })
    }
}

/// An ordered orthonormal pair `(ground, excited)` with its basis tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisPair {
    pub ground: SpinorAmplitudes,
    pub excited: SpinorAmplitudes,
    pub basis: Basis,
}

impl BasisPair {
    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let gg = (self.ground.norm_sqr() - 1.0).abs();
        let ee = (self.excited.norm_sqr() - 1.0).abs();
        let ge = self.ground.inner(&self.excited).norm();
        gg.max(ee).max(ge)
    }
}

pub fn mode_hamiltonian(k: f64, h: f64, branch: &BranchField) -> ModeHamiltonian {
    ModeHamiltonian::new(k, h, branch)
}

pub fn instantaneous_eigenbasis(k: f64, h: f64, branch: &BranchField) -> Result<BasisPair> {
    ModeHamiltonian::new(k, h, branch)
        .eigenbasis(branch.branch)
        .ok_or(Error::Degenerate { k, h })
}

/// Normalized eigenvector of eigenvalue `-E`.
pub fn ground_state_spinor(k: f64, h: f64, branch: &BranchField) -> Result<SpinorAmplitudes> {
    instantaneous_eigenbasis(k, h, branch).map(|pair| pair.ground)
}
