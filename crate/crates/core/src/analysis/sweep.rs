use serde::Serialize;

use super::run::{decoherence_series, RunConfig, SeriesRequest, Trajectory};
use super::Measure;
use crate::error::{Error, Result};
use crate::modes::RampProtocol;
use crate::reset::ResetConfig;

/// Axes of a sweep. Each axis is sorted ascending and deduplicated, so the
/// point order is canonical whatever order the values were given in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    rates: Vec<f64>,
    taus: Vec<f64>,
    a_values: Vec<f64>,
}

fn canonical_axis(name: &str, mut values: Vec<f64>) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::Config(format!("sweep axis {name} is empty")));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Config(format!("sweep axis {name} contains {bad}")));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

impl SweepGrid {
    pub fn new(rates: Vec<f64>, taus: Vec<f64>, a_values: Vec<f64>) -> Result<Self> {
        Ok(SweepGrid {
            rates: canonical_axis("r", rates)?,
            taus: canonical_axis("tau", taus)?,
            a_values: canonical_axis("a", a_values)?,
        })
    }

    /// A sweep over reset rates only; τ and `a` come from `base`.
    pub fn over_rates(base: &RunConfig, rates: Vec<f64>) -> Result<Self> {
        SweepGrid::new(rates, vec![base.ramp.tau()], vec![base.a])
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn a_values(&self) -> &[f64] {
        &self.a_values
    }

    /// Points in lexicographic `(r, τ, a)` order.
    pub fn points(&self) -> Vec<SweepPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.rates {
            for &tau in &self.taus {
                for &a in &self.a_values {
                    out.push(SweepPoint { r, tau, a });
                }
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.rates.len() * self.taus.len() * self.a_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub r: f64,
    pub tau: f64,
    pub a: f64,
}

impl SweepPoint {
    pub fn apply(&self, base: &RunConfig) -> Result<RunConfig> {
        let mut config = base.clone();
        config.ramp = RampProtocol::new(base.ramp.h_initial(), base.ramp.h_final(), self.tau)?;
        config.reset = ResetConfig::new(self.r)?;
        config.a = self.a;
        config.validate()?;
        Ok(config)
    }
}

/// Why a grid point produced no trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointFailure {
    pub message: String,
    pub exit_code: i32,
}

impl From<&Error> for PointFailure {
    fn from(e: &Error) -> Self {
        PointFailure {
            message: e.to_string(),
            exit_code: e.exit_code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub point: SweepPoint,
    pub outcome: std::result::Result<Trajectory, PointFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub base: RunConfig,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn trajectories(&self) -> impl Iterator<Item = (&SweepPoint, &Trajectory)> {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().ok().map(|t| (&e.point, t)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&SweepPoint, &PointFailure)> {
        self.entries
            .iter()
            .filter_map(|e| e.outcome.as_ref().err().map(|f| (&e.point, f)))
    }

    pub fn get(&self, r: f64, tau: f64, a: f64) -> Option<&SweepEntry> {
        self.entries
            .iter()
            .find(|e| e.point.r == r && e.point.tau == tau && e.point.a == a)
    }

    /// Height of the `revival_index`-th revival of `measure` at every
    /// successful point; `None` where that revival does not exist.
    pub fn revival_maxima(
        &self,
        measure: Measure,
        revival_index: usize,
    ) -> Vec<(SweepPoint, Option<f64>)> {
        self.trajectories()
            .map(|(p, t)| {
                let peaks = t.revival_peaks(measure);
                (*p, peaks.revival(revival_index).map(|pk| pk.value))
            })
            .collect()
    }
}

/// Runs every grid point of `grid` on top of `base`.
///
/// Points sharing a ramp time share one environment propagation: `|D|` does
/// not depend on `a`, and all reset rates are accumulated from the same
/// reset-free branch states. Results are bitwise identical to running each
/// point through [`run_trajectory`](super::run_trajectory). A failing point
/// becomes an error row; the rest of the sweep carries on.
pub fn sweep(base: &RunConfig, grid: &SweepGrid, threads: usize) -> Result<SweepResult> {
    base.validate()?;
    let points = grid.points();
    let mut outcomes: Vec<Option<std::result::Result<Trajectory, PointFailure>>> =
        vec![None; points.len()];

    for &tau in grid.taus() {
        let mut members: Vec<(usize, RunConfig)> = Vec::new();
        for (idx, point) in points.iter().enumerate().filter(|(_, p)| p.tau == tau) {
            match point.apply(base) {
                Ok(config) => members.push((idx, config)),
                Err(e) => outcomes[idx] = Some(Err(PointFailure::from(&e))),
            }
        }
        let Some((_, first)) = members.first() else {
            continue;
        };
        let env = first.environment();
        let mut requests: Vec<SeriesRequest> = Vec::new();
        for (_, config) in &members {
            let request = SeriesRequest {
                rate: config.reset.rate(),
                route: config.route,
            };
            if !requests.contains(&request) {
                requests.push(request);
            }
        }
        log::info!(
            "sweep: tau = {tau}, {} rate(s), {} point(s)",
            requests.len(),
            members.len()
        );
        match decoherence_series(&env, &requests, threads).and_then(|s| Ok((s, env.grid()?))) {
            Ok((series, integration_grid)) => {
                for (idx, config) in members {
                    let slot = requests
                        .iter()
                        .position(|q| q.rate == config.reset.rate())
                        .expect("request registered");
                    outcomes[idx] = Some(Ok(Trajectory::assemble(
                        &config,
                        &integration_grid,
                        &series[slot],
                    )));
                }
            }
            Err(e) => {
                log::warn!("sweep: tau = {tau} failed: {e}");
                for (idx, _) in members {
                    outcomes[idx] = Some(Err(PointFailure::from(&e)));
                }
            }
        }
    }

    let entries = points
        .into_iter()
        .zip(outcomes)
        .map(|(point, outcome)| SweepEntry {
            point,
            outcome: outcome.expect("every point visited"),
        })
        .collect();
    Ok(SweepResult {
        base: base.clone(),
        entries,
    })
}
