use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::correlations::{
    concurrence, decoherence_factor, mode_overlap_mixed, mode_overlap_pure, quantum_discord,
    DecoherenceFactor, ModeOverlap,
};
use crate::error::{Error, Result};
use crate::modes::{
    momentum_grid, project_to_instantaneous, propagate_branch_with, Basis, Branch, BranchField,
    FieldConvention, IntegrationGrid, ModeDrive, ModeHamiltonian, ModeIndex, RampProtocol,
    SpinorAmplitudes,
};
use crate::reset::{ResetAccumulator, ResetConfig, ResetSample};

/// Which overlap formula assembles `F_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapRoute {
    /// Spinor overlaps without reset, density matrices with reset.
    #[default]
    Auto,
    /// `|⟨ψ₊|ψ₋⟩|²`; only valid for `r = 0`.
    Spinor,
    /// `tr(ρ₊ρ₋)` of the reset-averaged matrices in the instantaneous
    /// eigenbasis.
    Density,
}

impl OverlapRoute {
    fn resolve(self, rate: f64) -> Result<OverlapRoute> {
        match (self, rate > 0.0) {
            (OverlapRoute::Auto, false) => Ok(OverlapRoute::Spinor),
            (OverlapRoute::Auto, true) => Ok(OverlapRoute::Density),
            (OverlapRoute::Spinor, true) => Err(Error::Config(
                "the spinor overlap route cannot represent reset (r > 0)".into(),
            )),
            (route, _) => Ok(route),
        }
    }
}

/// Everything a single trajectory depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub chain_len: usize,
    pub delta: f64,
    pub a: f64,
    pub ramp: RampProtocol,
    pub reset: ResetConfig,
    /// Number of output intervals; records are written at `n_samples + 1`
    /// fields including both endpoints.
    pub n_samples: usize,
    /// Upper bound on `dt · max‖H‖` for the integration substeps.
    pub step_safety: f64,
    #[serde(default)]
    pub route: OverlapRoute,
    #[serde(skip)]
    pub convention: FieldConvention,
}

impl RunConfig {
    pub const DEFAULT_CHAIN_LEN: usize = 500;
    pub const DEFAULT_DELTA: f64 = 0.01;
    pub const DEFAULT_A: f64 = 0.9;
    pub const DEFAULT_H_INITIAL: f64 = -5.0;
    pub const DEFAULT_H_FINAL: f64 = 5.0;
    pub const DEFAULT_N_SAMPLES: usize = 2000;
    pub const DEFAULT_STEP_SAFETY: f64 = 0.05;

    /// `N = 500`, `δ = 0.01`, `a = 0.9`, `h: -5 → 5`, no reset.
    pub fn figure_defaults(tau: f64) -> Result<Self> {
        let config = RunConfig {
            chain_len: Self::DEFAULT_CHAIN_LEN,
            delta: Self::DEFAULT_DELTA,
            a: Self::DEFAULT_A,
            ramp: RampProtocol::new(Self::DEFAULT_H_INITIAL, Self::DEFAULT_H_FINAL, tau)?,
            reset: ResetConfig::none(),
            n_samples: Self::DEFAULT_N_SAMPLES,
            step_safety: Self::DEFAULT_STEP_SAFETY,
            route: OverlapRoute::Auto,
            convention: FieldConvention::BlochVector,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        momentum_grid(self.chain_len)?;
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!(
                "delta must be finite and non-negative, got {}",
                self.delta
            )));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::Config(format!("a must lie in [0,1], got {}", self.a)));
        }
        RampProtocol::new(self.ramp.h_initial(), self.ramp.h_final(), self.ramp.tau())?;
        ResetConfig::new(self.reset.rate())?;
        self.route.resolve(self.reset.rate())?;
        self.environment().grid().map(|_| ())
    }

    pub fn environment(&self) -> EnvironmentSpec {
        EnvironmentSpec {
            chain_len: self.chain_len,
            delta: self.delta,
            ramp: self.ramp,
            n_samples: self.n_samples,
            step_safety: self.step_safety,
            convention: self.convention,
        }
    }

    /// Short stable digest of the configuration, stamped on every output.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// The part of a [`RunConfig`] the environment propagation depends on.
/// Reset rate and Werner parameter only enter afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentSpec {
    pub chain_len: usize,
    pub delta: f64,
    pub ramp: RampProtocol,
    pub n_samples: usize,
    pub step_safety: f64,
    pub convention: FieldConvention,
}

impl EnvironmentSpec {
    pub fn grid(&self) -> Result<IntegrationGrid> {
        IntegrationGrid::with_step_bound(self.ramp, self.n_samples, self.step_safety, self.delta)
    }

    fn branch_drive(&self, mode: &ModeIndex, branch: BranchField) -> ModeDrive {
        ModeDrive::new(mode, &branch, self.ramp.tau()).with_convention(self.convention)
    }

    /// Instantaneous eigenbasis of the uncoupled mode; both branches are
    /// projected onto it so their matrices share one basis.
    fn common_basis(&self, mode: &ModeIndex, h: f64) -> Result<crate::modes::BasisPair> {
        ModeHamiltonian::new(mode.k, h, &BranchField::bare())
            .with_convention(self.convention)
            .eigenbasis(Branch::Bare)
            .ok_or(Error::Degenerate { k: mode.k, h })
    }
}

/// One decoherence series to compute: a reset rate and how to build `F_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRequest {
    pub rate: f64,
    pub route: OverlapRoute,
}

/// Sampled branch states of one mode.
#[derive(Debug, Clone)]
pub struct ModeSeries {
    pub mode: ModeIndex,
    /// Reset-free `(ψ₊, ψ₋)` at each output sample, when requested.
    pub spinors: Option<[Vec<SpinorAmplitudes>; 2]>,
    /// Reset-averaged `(ρ₊, ρ₋)` in the fixed basis at each output sample,
    /// one entry per requested rate.
    pub reset_states: Vec<[Vec<ResetSample>; 2]>,
}

/// Propagates both branches of one mode from the ground state of the
/// uncoupled chain at `h_i`, feeding every integration node to one reset
/// accumulator per rate.
///
/// The renewal average mixes the reset-free states as operators in the
/// fixed fermion basis; projection onto an instantaneous basis happens only
/// afterwards, when the overlap is formed.
pub fn propagate_mode(
    env: &EnvironmentSpec,
    grid: &IntegrationGrid,
    mode: &ModeIndex,
    rates: &[f64],
    keep_spinors: bool,
) -> Result<ModeSeries> {
    let h_initial = grid.sample_field(0);
    let initial = env.common_basis(mode, h_initial)?.ground;
    let configs = rates
        .iter()
        .map(|&r| ResetConfig::new(r))
        .collect::<Result<Vec<_>>>()?;

    let run_branch = |branch: BranchField| -> Result<(Vec<SpinorAmplitudes>, Vec<Vec<ResetSample>>)> {
        let drive = env.branch_drive(mode, branch);
        let mut accumulators: Vec<ResetAccumulator> =
            configs.iter().map(|&c| ResetAccumulator::new(c)).collect();
        let mut spinors = Vec::with_capacity(if keep_spinors { grid.n_samples() } else { 0 });
        let mut states: Vec<Vec<ResetSample>> = accumulators
            .iter()
            .map(|_| Vec::with_capacity(grid.n_samples()))
            .collect();
        let mut failure = None;
        propagate_branch_with(&initial, &drive, grid, |node| {
            if failure.is_some() {
                return;
            }
            if keep_spinors && node.sample.is_some() {
                spinors.push(*node.state);
            }
            if accumulators.is_empty() {
                return;
            }
            let rho0 = node.state.projector().rho;
            let drho0 = drive.density_derivative(node.time, &rho0);
            let absorbed = accumulators.iter_mut().zip(states.iter_mut()).try_for_each(
                |(acc, out)| -> Result<()> {
                    acc.absorb_with_derivative(node.elapsed, &rho0, &drho0)?;
                    if node.sample.is_some() {
                        out.extend(acc.emit(Basis::FixedFermion));
                    }
                    Ok(())
                },
            );
            if let Err(e) = absorbed {
                failure = Some(Error::Integration {
                    k: mode.k,
                    t: node.time,
                    reason: e.to_string(),
                });
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok((spinors, states)),
        }
    };

    let (plus_spinors, plus_states) = run_branch(BranchField::plus(env.delta))?;
    // Without coupling the branches are the same trajectory.
    let (minus_spinors, minus_states) = if env.delta == 0.0 {
        (plus_spinors.clone(), plus_states.clone())
    } else {
        run_branch(BranchField::minus(env.delta))?
    };
    Ok(ModeSeries {
        mode: *mode,
        spinors: keep_spinors.then_some([plus_spinors, minus_spinors]),
        reset_states: plus_states
            .into_iter()
            .zip(minus_states)
            .map(|(p, m)| [p, m])
            .collect(),
    })
}

/// `F_k` at every sample, one row per request.
fn mode_overlaps(
    env: &EnvironmentSpec,
    grid: &IntegrationGrid,
    mode: &ModeIndex,
    requests: &[SeriesRequest],
) -> Result<Vec<Vec<ModeOverlap>>> {
    let density_rates: Vec<f64> = requests
        .iter()
        .filter(|r| r.route == OverlapRoute::Density)
        .map(|r| r.rate)
        .collect();
    let keep_spinors = requests.iter().any(|r| r.route == OverlapRoute::Spinor);
    let series = propagate_mode(env, grid, mode, &density_rates, keep_spinors)?;

    let bases = if density_rates.is_empty() {
        Vec::new()
    } else {
        (0..grid.n_samples())
            .map(|j| env.common_basis(mode, grid.sample_field(j)))
            .collect::<Result<Vec<_>>>()?
    };

    let mut density_slot = 0;
    let mut rows = Vec::with_capacity(requests.len());
    for request in requests {
        let row = match request.route {
            OverlapRoute::Spinor => {
                let [plus, minus] = series.spinors.as_ref().expect("spinors kept");
                plus.iter()
                    .zip(minus)
                    .map(|(p, m)| mode_overlap_pure(p, m))
                    .collect()
            }
            OverlapRoute::Density => {
                let [plus, minus] = &series.reset_states[density_slot];
                density_slot += 1;
                plus.iter()
                    .zip(minus)
                    .enumerate()
                    .map(|(j, (p, m))| {
                        let basis = &bases[j];
                        let overlap = project_to_instantaneous(&p.rho, basis).and_then(|p| {
                            mode_overlap_mixed(&p, &project_to_instantaneous(&m.rho, basis)?)
                        });
                        overlap.map_err(|e| Error::Integration {
                            k: mode.k,
                            t: grid.sample_time(j),
                            reason: e.to_string(),
                        })
                    })
                    .collect::<Result<Vec<ModeOverlap>>>()?
            }
            OverlapRoute::Auto => unreachable!("routes are resolved before propagation"),
        };
        rows.push(row);
    }
    Ok(rows)
}

/// `|D(t)|` at every output sample for each request. Modes run in parallel
/// on `threads` workers (0 = rayon default); the log-overlaps are summed in
/// ascending `k` regardless of scheduling, so the result does not depend on
/// the worker count.
pub fn decoherence_series(
    env: &EnvironmentSpec,
    requests: &[SeriesRequest],
    threads: usize,
) -> Result<Vec<Vec<DecoherenceFactor>>> {
    let resolved = requests
        .iter()
        .map(|r| {
            ResetConfig::new(r.rate)?;
            Ok(SeriesRequest {
                rate: r.rate,
                route: r.route.resolve(r.rate)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = env.grid()?;
    let modes = momentum_grid(env.chain_len)?;

    let compute = || {
        modes
            .par_iter()
            .map(|mode| mode_overlaps(env, &grid, mode, &resolved))
            .collect::<Result<Vec<_>>>()
    };
    let per_mode = if threads == 0 {
        compute()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {threads} worker threads: {e}")))?
            .install(compute)?
    };

    let mut out = Vec::with_capacity(resolved.len());
    for slot in 0..resolved.len() {
        let series = (0..grid.n_samples())
            .map(|j| {
                let overlaps: Vec<ModeOverlap> =
                    per_mode.iter().map(|rows| rows[slot][j]).collect();
                decoherence_factor(&overlaps)
            })
            .collect();
        out.push(series);
    }
    Ok(out)
}

/// One output row of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub h: f64,
    pub d_abs: f64,
    pub concurrence: f64,
    pub discord: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub config: RunConfig,
    pub fingerprint: String,
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub(crate) fn assemble(
        config: &RunConfig,
        grid: &IntegrationGrid,
        factors: &[DecoherenceFactor],
    ) -> Trajectory {
        let records = factors
            .iter()
            .enumerate()
            .map(|(j, factor)| {
                let d_abs = factor.modulus();
                TrajectoryRecord {
                    t: grid.sample_time(j),
                    h: grid.sample_field(j),
                    d_abs,
                    concurrence: concurrence(config.a, d_abs),
                    discord: quantum_discord(config.a, d_abs),
                }
            })
            .collect();
        Trajectory {
            config: config.clone(),
            fingerprint: config.fingerprint(),
            records,
        }
    }
}

pub fn run_trajectory(config: &RunConfig) -> Result<Trajectory> {
    run_trajectory_with(config, 0)
}

pub fn run_trajectory_with(config: &RunConfig, threads: usize) -> Result<Trajectory> {
    config.validate()?;
    let env = config.environment();
    let request = SeriesRequest {
        rate: config.reset.rate(),
        route: config.route,
    };
    let mut series = decoherence_series(&env, &[request], threads)?;
    let factors = series.pop().expect("one series per request");
    Ok(Trajectory::assemble(config, &env.grid()?, &factors))
}
