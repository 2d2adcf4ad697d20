//! Momentum-mode decomposition of the driven Ising environment.
//!
//! After Jordan–Wigner and Fourier transformation the chain splits into
//! `N/2` independent two-level problems, one per wave number
//! `k = (2m - 1)π/N`. Each qubit-pair eigenstate selects a branch in which
//! the chain sees the shifted field `h(t) + ε`, and only the `ε = ±δ`
//! branches dephase the qubits.

mod density;
mod hamiltonian;
mod propagate;

pub use density::{project_to_instantaneous, Basis, Mat2, ModeDensityMatrix};
pub use hamiltonian::{
    ground_state_spinor, instantaneous_eigenbasis, mode_hamiltonian, BasisPair, FieldConvention,
    ModeHamiltonian,
};
pub use propagate::{
    propagate_branch, propagate_branch_with, IntegrationGrid, ModeDrive, NodeVisit,
    ISING_ENERGY_SCALE,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear drive `h(t) = t/τ` between `h_initial` and `h_final`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RampProtocol {
    h_initial: f64,
    h_final: f64,
    tau: f64,
}

impl RampProtocol {
    pub fn new(h_initial: f64, h_final: f64, tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {tau}")));
        }
        if !(h_initial.is_finite() && h_final.is_finite()) {
            return Err(Error::Config("ramp endpoints must be finite".into()));
        }
        if h_initial >= h_final {
            return Err(Error::Config(format!(
                "h_i must be below h_f, got h_i = {h_initial}, h_f = {h_final}"
            )));
        }
        Ok(RampProtocol {
            h_initial,
            h_final,
            tau,
        })
    }

    pub fn h_initial(&self) -> f64 {
        self.h_initial
    }

    pub fn h_final(&self) -> f64 {
        self.h_final
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn t_initial(&self) -> f64 {
        self.h_initial * self.tau
    }

    pub fn t_final(&self) -> f64 {
        self.h_final * self.tau
    }

    pub fn field_at(&self, t: f64) -> f64 {
        t / self.tau
    }

    pub fn time_at(&self, h: f64) -> f64 {
        h * self.tau
    }

    /// Largest field magnitude reached along the ramp.
    pub fn max_abs_field(&self) -> f64 {
        self.h_initial.abs().max(self.h_final.abs())
    }
}

/// One momentum mode of an `N`-site periodic chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIndex {
    pub chain_len: usize,
    pub m: usize,
    pub k: f64,
}

/// The `N/2` positive wave numbers `k = (2m - 1)π/N`, ascending in `m`.
pub fn momentum_grid(chain_len: usize) -> Result<Vec<ModeIndex>> {
    if chain_len < 2 || chain_len % 2 != 0 {
        return Err(Error::Config(format!(
            "N must be even and at least 2, got {chain_len}"
        )));
    }
    let n = chain_len as f64;
    Ok((1..=chain_len / 2)
        .map(|m| ModeIndex {
            chain_len,
            m,
            k: (2 * m - 1) as f64 * PI / n,
        })
        .collect())
}

/// Which eigenvalue of the qubit-pair operator the chain evolves under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `ε = +δ`, qubits in `|↑↑⟩`.
    Plus,
    /// `ε = -δ`, qubits in `|↓↓⟩`.
    Minus,
    /// `ε = 0`; also the uncoupled chain the environment is prepared in.
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchField {
    pub branch: Branch,
    pub delta: f64,
}

impl BranchField {
    pub fn plus(delta: f64) -> Self {
        BranchField {
            branch: Branch::Plus,
            delta,
        }
    }

    pub fn minus(delta: f64) -> Self {
        BranchField {
            branch: Branch::Minus,
            delta,
        }
    }

    pub fn bare() -> Self {
        BranchField {
            branch: Branch::Bare,
            delta: 0.0,
        }
    }

    pub fn epsilon(&self) -> f64 {
        match self.branch {
            Branch::Plus => self.delta,
            Branch::Minus => -self.delta,
            Branch::Bare => 0.0,
        }
    }
}

/// Mode state `(v, u)` in the fixed fermion basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorAmplitudes {
    pub v: Complex64,
    pub u: Complex64,
}

impl SpinorAmplitudes {
    pub fn new(v: Complex64, u: Complex64) -> Self {
        SpinorAmplitudes { v, u }
    }

    pub fn real(v: f64, u: f64) -> Self {
        SpinorAmplitudes {
            v: Complex64::new(v, 0.0),
            u: Complex64::new(u, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.v.norm_sqr() + self.u.norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &SpinorAmplitudes) -> Complex64 {
        self.v.conj() * other.v + self.u.conj() * other.u
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        SpinorAmplitudes {
            v: self.v * c,
            u: self.u * c,
        }
    }

    /// `|ψ⟩⟨ψ|` in the fixed basis.
    pub fn projector(&self) -> ModeDensityMatrix {
        ModeDensityMatrix::new(
            Mat2::new(
                self.v * self.v.conj(),
                self.v * self.u.conj(),
                self.u * self.v.conj(),
                self.u * self.u.conj(),
            ),
            Basis::FixedFermion,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_small_chains() {
        let g = momentum_grid(4).unwrap();
        assert_eq!(g.len(), 2);
        assert_relative_eq!(g[0].k, PI / 4.0);
        assert_relative_eq!(g[1].k, 3.0 * PI / 4.0);
        let g = momentum_grid(2).unwrap();
        assert_eq!(g.len(), 1);
        assert_relative_eq!(g[0].k, PI / 2.0);
    }

    #[test]
    fn grid_figure_size() {
        let g = momentum_grid(500).unwrap();
        assert_eq!(g.len(), 250);
        assert_relative_eq!(g[0].k, PI / 500.0);
        assert!(g.windows(2).all(|w| w[1].k > w[0].k));
        assert!(g.iter().all(|m| m.k > 0.0 && m.k < PI));
        assert_eq!(g.last().unwrap().m, 250);
    }

    #[test]
    fn grid_rejects_odd_and_zero() {
        assert!(matches!(momentum_grid(3), Err(Error::Config(_))));
        assert!(matches!(momentum_grid(0), Err(Error::Config(_))));
        assert!(matches!(momentum_grid(1), Err(Error::Config(_))));
    }

    #[test]
    fn ramp_endpoints_exact() {
        let ramp = RampProtocol::new(-5.0, 5.0, 250.0).unwrap();
        assert_eq!(ramp.t_initial(), -1250.0);
        assert_eq!(ramp.field_at(ramp.t_initial()), -5.0);
        assert_eq!(ramp.field_at(ramp.t_final()), 5.0);
    }

    #[test]
    fn ramp_rejects_bad_input() {
        assert!(RampProtocol::new(-5.0, 5.0, 0.0).is_err());
        assert!(RampProtocol::new(-5.0, 5.0, -1.0).is_err());
        assert!(RampProtocol::new(5.0, -5.0, 1.0).is_err());
        assert!(RampProtocol::new(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn branch_epsilons() {
        assert_eq!(BranchField::plus(0.01).epsilon(), 0.01);
        assert_eq!(BranchField::minus(0.01).epsilon(), -0.01);
        assert_eq!(BranchField::bare().epsilon(), 0.0);
    }
}
