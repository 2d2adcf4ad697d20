//! Trajectories, sweeps and the post-processing applied to them.

mod fit;
mod peaks;
mod period;
mod run;
mod sweep;

pub use fit::{fit_peak_scaling, ScalingFit, CLEAR_SCALING_R2};
pub use peaks::{detect_revival_peaks, Peak, PeakOptions, PeakSet};
pub use period::{estimate_oscillation_period, PeriodOptions};
pub use run::{
    decoherence_series, propagate_mode, run_trajectory, run_trajectory_with, EnvironmentSpec,
    ModeSeries, OverlapRoute, RunConfig, SeriesRequest, Trajectory, TrajectoryRecord,
};
pub use sweep::{sweep, PointFailure, SweepEntry, SweepGrid, SweepPoint, SweepResult};

use serde::{Deserialize, Serialize};

/// Quantity read off a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Concurrence,
    Discord,
    Decoherence,
}

impl Measure {
    pub fn of(&self, rec: &TrajectoryRecord) -> f64 {
        match self {
            Measure::Concurrence => rec.concurrence,
            Measure::Discord => rec.discord,
            Measure::Decoherence => rec.d_abs,
        }
    }

    /// Column name used in result tables.
    pub fn column(&self) -> &'static str {
        match self {
            Measure::Concurrence => "C",
            Measure::Discord => "QD",
            Measure::Decoherence => "D_abs",
        }
    }

    pub fn parse(s: &str) -> Option<Measure> {
        match s {
            "C" | "concurrence" => Some(Measure::Concurrence),
            "QD" | "discord" => Some(Measure::Discord),
            "D" | "D_abs" | "decoherence" => Some(Measure::Decoherence),
            _ => None,
        }
    }
}

impl Trajectory {
    pub fn fields(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.h).collect()
    }

    pub fn series(&self, measure: Measure) -> Vec<f64> {
        self.records.iter().map(|r| measure.of(r)).collect()
    }

    /// Revival peaks of `measure` strictly between the critical points.
    pub fn revival_peaks(&self, measure: Measure) -> PeakSet {
        detect_revival_peaks(&self.fields(), &self.series(measure), &PeakOptions::default())
    }

    /// Oscillation period of `measure` beyond the second critical point.
    pub fn oscillation_period(&self, measure: Measure) -> Option<f64> {
        estimate_oscillation_period(
            &self.fields(),
            &self.series(measure),
            &PeriodOptions::default(),
        )
    }
}
