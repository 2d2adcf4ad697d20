use num_complex::Complex64;

use super::{
    BranchField, FieldConvention, Mat2, ModeHamiltonian, ModeIndex, RampProtocol,
    SpinorAmplitudes,
};
use crate::error::{Error, Result};

/// Factor between the Bloch form `h_z σ_z + h_x σ_x` and the generator of
/// the chain's time evolution. With `H_E = Σ σ^x σ^x + h σ^z` the
/// quasiparticle energies are `±2E`, which sets the revival period
/// `π/(4τδ)` in the field domain.
pub const ISING_ENERGY_SCALE: f64 = 2.0;

/// Largest norm drift tolerated before a trajectory is declared failed.
const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// The time-dependent generator of one mode on one branch:
/// `scale · (h_z(t) σ_z + h_x σ_x)` with `h_z(t) = t/τ + ε - cos k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDrive {
    pub k: f64,
    pub hx: f64,
    pub cos_k: f64,
    pub epsilon: f64,
    pub tau: f64,
    pub scale: f64,
    pub convention: FieldConvention,
}

impl ModeDrive {
    pub fn new(mode: &ModeIndex, branch: &BranchField, tau: f64) -> Self {
        ModeDrive {
            k: mode.k,
            hx: mode.k.sin(),
            cos_k: mode.k.cos(),
            epsilon: branch.epsilon(),
            tau,
            scale: ISING_ENERGY_SCALE,
            convention: FieldConvention::BlochVector,
        }
    }

    pub fn with_convention(mut self, convention: FieldConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Unscaled Bloch Hamiltonian at time `t`.
    pub fn hamiltonian(&self, t: f64) -> ModeHamiltonian {
        ModeHamiltonian {
            hz: self.hz(t),
            hx: self.hx,
        }
    }

    fn hz(&self, t: f64) -> f64 {
        self.convention.sign() * (t / self.tau + self.epsilon - self.cos_k)
    }

    /// `dρ/dt = -i scale [H(t), ρ]` for the density matrix `ρ` at time `t`.
    pub fn density_derivative(&self, t: f64, rho: &Mat2) -> Mat2 {
        // H = hz σz + hx σx is real, so [H, ρ] has a short closed form.
        let (hz, hx) = (self.scale * self.hz(t), self.scale * self.hx);
        let (a, b, c, d) = (rho[(0, 0)], rho[(0, 1)], rho[(1, 0)], rho[(1, 1)]);
        let commutator = Mat2::new(
            (c - b) * hx,
            b * (2.0 * hz) + (d - a) * hx,
            (a - d) * hx - c * (2.0 * hz),
            (b - c) * hx,
        );
        commutator * Complex64::new(0.0, -1.0)
    }

    /// Propagator over `[t, t + dt]` from the fourth-order Magnus expansion
    /// with two Gauss–Legendre nodes.
    ///
    /// For a traceless 2×2 generator the exponential is closed form, so the
    /// step is unitary to roundoff: `Ω = -i w·σ`,
    /// `exp(Ω) = cos|w| - i sin|w| (ŵ·σ)`.
    pub fn step_matrix(&self, t: f64, dt: f64) -> [[Complex64; 2]; 2] {
        const GAUSS_OFFSET: f64 = 0.288_675_134_594_812_9; // √3/6
        let z1 = self.hz(t + (0.5 - GAUSS_OFFSET) * dt);
        let z2 = self.hz(t + (0.5 + GAUSS_OFFSET) * dt);
        let s = self.scale * dt;
        let wx = s * self.hx;
        let wz = 0.5 * s * (z1 + z2);
        // commutator term: (√3/12) dt² [A2, A1] with A = -i scale H
        let wy = GAUSS_OFFSET * s * s * self.hx * (z2 - z1);
        let theta = (wx * wx + wy * wy + wz * wz).sqrt();
        let (sin, cos) = theta.sin_cos();
        let f = if theta > 0.0 { sin / theta } else { 1.0 };
        [
            [Complex64::new(cos, -f * wz), Complex64::new(-f * wy, -f * wx)],
            [Complex64::new(f * wy, -f * wx), Complex64::new(cos, f * wz)],
        ]
    }

    pub fn step(&self, psi: &SpinorAmplitudes, t: f64, dt: f64) -> SpinorAmplitudes {
        let m = self.step_matrix(t, dt);
        SpinorAmplitudes {
            v: m[0][0] * psi.v + m[0][1] * psi.u,
            u: m[1][0] * psi.v + m[1][1] * psi.u,
        }
    }
}

/// Output samples at uniform field spacing `Δh = (h_f - h_i)/n_intervals`,
/// each interval split into `substeps` equal integration steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationGrid {
    ramp: RampProtocol,
    n_intervals: usize,
    substeps: usize,
}

impl IntegrationGrid {
    pub fn new(ramp: RampProtocol, n_intervals: usize, substeps: usize) -> Result<Self> {
        if n_intervals == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        if substeps == 0 {
            return Err(Error::Config("substeps must be at least 1".into()));
        }
        Ok(IntegrationGrid {
            ramp,
            n_intervals,
            substeps,
        })
    }

    /// Chooses the substep count so that `dt · max‖H‖ ≤ step_safety`, with
    /// `max‖H‖` bounded by `scale · (max|h| + 1 + δ)`.
    pub fn with_step_bound(
        ramp: RampProtocol,
        n_intervals: usize,
        step_safety: f64,
        delta: f64,
    ) -> Result<Self> {
        if !(step_safety.is_finite() && step_safety > 0.0) {
            return Err(Error::Config(format!(
                "step_safety must be positive, got {step_safety}"
            )));
        }
        if n_intervals == 0 {
            return Err(Error::Config("n_samples must be at least 1".into()));
        }
        let norm_bound = ISING_ENERGY_SCALE * (ramp.max_abs_field() + 1.0 + delta.abs());
        let interval =
            ramp.tau() * (ramp.h_final() - ramp.h_initial()) / n_intervals as f64;
        let substeps = (interval * norm_bound / step_safety).ceil().max(1.0);
        if substeps > 1e9 {
            return Err(Error::Config(format!(
                "step_safety {step_safety} needs {substeps:e} substeps per sample"
            )));
        }
        IntegrationGrid::new(ramp, n_intervals, substeps as usize)
    }

    pub fn ramp(&self) -> &RampProtocol {
        &self.ramp
    }

    pub fn n_intervals(&self) -> usize {
        self.n_intervals
    }

    /// Number of output samples, endpoints included.
    pub fn n_samples(&self) -> usize {
        self.n_intervals + 1
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Same samples with every integration step halved.
    pub fn refined(&self) -> Self {
        IntegrationGrid {
            substeps: 2 * self.substeps,
            ..*self
        }
    }

    /// Field at sample `j`; the endpoints are exactly `h_i` and `h_f`.
    pub fn sample_field(&self, j: usize) -> f64 {
        let (hi, hf) = (self.ramp.h_initial(), self.ramp.h_final());
        if j == 0 {
            hi
        } else if j >= self.n_intervals {
            hf
        } else {
            hi + (hf - hi) * (j as f64 / self.n_intervals as f64)
        }
    }

    pub fn sample_time(&self, j: usize) -> f64 {
        self.ramp.time_at(self.sample_field(j))
    }

    /// Time of integration node `s` (0..=substeps) inside interval `j`.
    pub fn node_time(&self, j: usize, s: usize) -> f64 {
        let (t0, t1) = (self.sample_time(j), self.sample_time(j + 1));
        if s == 0 {
            t0
        } else if s >= self.substeps {
            t1
        } else {
            t0 + (t1 - t0) * (s as f64 / self.substeps as f64)
        }
    }
}

/// One integration node handed to a [`propagate_branch_with`] visitor.
#[derive(Debug, Clone, Copy)]
pub struct NodeVisit<'a> {
    pub time: f64,
    /// `t - t_i`.
    pub elapsed: f64,
    /// Output sample index when the node is a sample point.
    pub sample: Option<usize>,
    pub state: &'a SpinorAmplitudes,
}

/// Integrates `i dψ/dt = scale·H(t) ψ` across the grid, calling `visit` at
/// every integration node including the initial one. Returns the final state.
pub fn propagate_branch_with<F>(
    initial: &SpinorAmplitudes,
    drive: &ModeDrive,
    grid: &IntegrationGrid,
    mut visit: F,
) -> Result<SpinorAmplitudes>
where
    F: FnMut(NodeVisit<'_>),
{
    let start_norm = initial.norm_sqr();
    if (start_norm - 1.0).abs() > 1e-10 {
        return Err(Error::Contract(format!(
            "initial spinor for k = {} has norm² {start_norm}",
            drive.k
        )));
    }
    let t_initial = grid.sample_time(0);
    let mut psi = *initial;
    visit(NodeVisit {
        time: t_initial,
        elapsed: 0.0,
        sample: Some(0),
        state: &psi,
    });
    for j in 0..grid.n_intervals() {
        let mut t = grid.node_time(j, 0);
        for s in 1..=grid.substeps() {
            let next = grid.node_time(j, s);
            psi = drive.step(&psi, t, next - t);
            t = next;
            let sample = (s == grid.substeps()).then_some(j + 1);
            visit(NodeVisit {
                time: t,
                elapsed: t - t_initial,
                sample,
                state: &psi,
            });
        }
        let drift = psi.norm_sqr() - 1.0;
        if !drift.is_finite() || drift.abs() > NORM_DRIFT_LIMIT {
            return Err(Error::Integration {
                k: drive.k,
                t,
                reason: format!("norm drift {drift:e}"),
            });
        }
    }
    Ok(psi)
}

/// Reset-free trajectory of one mode on one branch, sampled on the grid's
/// output points.
pub fn propagate_branch(
    initial: &SpinorAmplitudes,
    mode: &ModeIndex,
    branch: &BranchField,
    grid: &IntegrationGrid,
) -> Result<Vec<SpinorAmplitudes>> {
    let drive = ModeDrive::new(mode, branch, grid.ramp().tau());
    let mut samples = Vec::with_capacity(grid.n_samples());
    propagate_branch_with(initial, &drive, grid, |node| {
        if node.sample.is_some() {
            samples.push(*node.state);
        }
    })?;
    Ok(samples)
}
