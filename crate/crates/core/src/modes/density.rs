use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{BasisPair, Branch};
use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;

/// Basis a [`ModeDensityMatrix`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    FixedFermion,
    /// Instantaneous eigenbasis of the mode Hamiltonian of the given branch,
    /// ordered (ground, excited).
    Instantaneous(Branch),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDensityMatrix {
    pub rho: Mat2,
    pub basis: Basis,
}

impl ModeDensityMatrix {
    pub fn new(rho: Mat2, basis: Basis) -> Self {
        ModeDensityMatrix { rho, basis }
    }

    pub fn maximally_mixed(basis: Basis) -> Self {
        let half = Complex64::new(0.5, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        ModeDensityMatrix::new(Mat2::new(half, zero, zero, half), basis)
    }

    pub fn trace(&self) -> Complex64 {
        self.rho[(0, 0)] + self.rho[(1, 1)]
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let r = &self.rho;
        (r[(0, 0)] * r[(0, 0)]
            + r[(1, 1)] * r[(1, 1)]
            + r[(0, 1)] * r[(1, 0)]
            + r[(1, 0)] * r[(0, 1)])
            .re
    }

    /// Largest elementwise deviation `|ρ_ij - ρ_ji*|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let r = &self.rho;
        let diag = r[(0, 0)].im.abs().max(r[(1, 1)].im.abs());
        diag.max((r[(0, 1)] - r[(1, 0)].conj()).norm())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let r = &self.rho;
        let a = r[(0, 0)].re;
        let d = r[(1, 1)].re;
        let b = 0.5 * (r[(0, 1)] + r[(1, 0)].conj());
        let mean = 0.5 * (a + d);
        let radius = (0.5 * (a - d)).hypot(b.norm());
        [mean - radius, mean + radius]
    }

    /// Checks the density-matrix invariants: Hermitian to 1e-12, unit trace
    /// to 1e-10, eigenvalues above -1e-10.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > 1e-12 {
            return Err(Error::Numerical(format!(
                "mode density matrix not Hermitian (defect {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Numerical(format!(
                "mode density matrix trace {tr} differs from 1"
            )));
        }
        let low = self.eigenvalues()[0];
        if low < -1e-10 {
            return Err(Error::Numerical(format!(
                "mode density matrix has negative eigenvalue {low:e}"
            )));
        }
        Ok(())
    }
}

/// Expresses `rho` (fixed basis) in the given eigenbasis:
/// `ρ^(d)_ij = ⟨b_i|ρ|b_j⟩` with `b_1` the ground and `b_2` the excited state.
pub fn project_to_instantaneous(
    rho: &ModeDensityMatrix,
    basis: &BasisPair,
) -> Result<ModeDensityMatrix> {
    if rho.basis != Basis::FixedFermion {
        return Err(Error::Contract(format!(
            "projection expects a fixed-basis density matrix, got {:?}",
            rho.basis
        )));
    }
    let defect = basis.orthonormality_defect();
    if defect > 1e-10 {
        return Err(Error::Contract(format!(
            "basis pair is not orthonormal (defect {defect:e})"
        )));
    }
    // Columns of `w` are the basis vectors; ρ^(d) = W† ρ W.
    let w = Mat2::new(
        basis.ground.v,
        basis.excited.v,
        basis.ground.u,
        basis.excited.u,
    );
    let projected = w.adjoint() * rho.rho * w;
    Ok(ModeDensityMatrix::new(projected, basis.basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{instantaneous_eigenbasis, BranchField, SpinorAmplitudes};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ground_projector_becomes_diag_one_zero() {
        let pair = instantaneous_eigenbasis(0.7, -0.3, &BranchField::plus(0.01)).unwrap();
        let rho = pair.ground.projector();
        let d = project_to_instantaneous(&rho, &pair).unwrap();
        assert_abs_diff_eq!(d.rho[(0, 0)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.rho[(1, 1)].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.rho[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        assert_eq!(d.basis, Basis::Instantaneous(Branch::Plus));
    }

    #[test]
    fn maximally_mixed_is_basis_independent() {
        let pair = instantaneous_eigenbasis(2.1, 0.4, &BranchField::minus(0.2)).unwrap();
        let rho = ModeDensityMatrix::maximally_mixed(Basis::FixedFermion);
        let d = project_to_instantaneous(&rho, &pair).unwrap();
        assert_abs_diff_eq!((d.rho - rho.rho).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pure_spinor_matches_amplitude_pattern() {
        let psi = SpinorAmplitudes::new(c(0.3, -0.4), c(0.5, 0.7));
        let n = psi.norm_sqr().sqrt();
        let psi = psi.scaled(c(1.0 / n, 0.0));
        let pair = instantaneous_eigenbasis(1.3, 0.2, &BranchField::plus(0.05)).unwrap();
        // amplitudes in the instantaneous basis
        let v = pair.ground.inner(&psi);
        let u = pair.excited.inner(&psi);
        let d = project_to_instantaneous(&psi.projector(), &pair).unwrap();
        assert_abs_diff_eq!((d.rho[(0, 0)] - v * v.conj()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((d.rho[(0, 1)] - v * u.conj()).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((d.rho[(1, 0)] - v.conj() * u).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!((d.rho[(1, 1)] - u * u.conj()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn projection_preserves_trace_and_spectrum() {
        let rho = ModeDensityMatrix::new(
            Mat2::new(c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)),
            Basis::FixedFermion,
        );
        rho.validate().unwrap();
        let pair = instantaneous_eigenbasis(0.4, 1.7, &BranchField::bare()).unwrap();
        let d = project_to_instantaneous(&rho, &pair).unwrap();
        assert_abs_diff_eq!(d.trace().re, 1.0, epsilon = 1e-14);
        let (a, b) = (rho.eigenvalues(), d.eigenvalues());
        assert_abs_diff_eq!(a[0], b[0], epsilon = 1e-14);
        assert_abs_diff_eq!(a[1], b[1], epsilon = 1e-14);
    }

    #[test]
    fn non_orthonormal_basis_rejected() {
        let bad = BasisPair {
            ground: SpinorAmplitudes::real(1.0, 0.0),
            excited: SpinorAmplitudes::real(0.6, 0.8),
            basis: Basis::Instantaneous(Branch::Plus),
        };
        let rho = ModeDensityMatrix::maximally_mixed(Basis::FixedFermion);
        assert!(matches!(
            project_to_instantaneous(&rho, &bad),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn validation_flags_broken_matrices() {
        let not_herm = ModeDensityMatrix::new(
            Mat2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)),
            Basis::FixedFermion,
        );
        assert!(not_herm.validate().is_err());
        let negative = ModeDensityMatrix::new(
            Mat2::new(c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)),
            Basis::FixedFermion,
        );
        assert!(negative.validate().is_err());
        assert_abs_diff_eq!(
            ModeDensityMatrix::maximally_mixed(Basis::FixedFermion).purity(),
            0.5
        );
    }
}
