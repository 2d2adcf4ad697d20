//! Configuration documents, result tables and plots.

mod config;
mod plot;
mod table;

pub use config::{parse_config, parse_config_str, ConfigDocument, ConfigSyntax, OutputSettings};
pub use plot::{emit_plot, render_svg, Curve, Mark, Plot};
pub use table::{format_number, read_results, write_results, Cell, ResultTable, TableFormat};

use crate::analysis::{
    Measure, RunConfig, ScalingFit, SweepPoint, SweepResult, Trajectory, TrajectoryRecord,
};

pub const TRAJECTORY_COLUMNS: [&str; 5] = ["t", "h", "D_abs", "C", "QD"];
const POINT_COLUMNS: [&str; 3] = ["r", "tau", "a"];

fn stamped(table: ResultTable, config: &RunConfig) -> ResultTable {
    table
        .with_metadata("version", crate::VERSION)
        .with_metadata("fingerprint", config.fingerprint())
        .with_metadata(
            "run_config",
            serde_json::to_string(config).expect("config serializes"),
        )
}

fn record_cells(rec: &TrajectoryRecord) -> [Cell; 5] {
    [
        rec.t.into(),
        rec.h.into(),
        rec.d_abs.into(),
        rec.concurrence.into(),
        rec.discord.into(),
    ]
}

/// `t, h, D_abs, C, QD`, one row per sample.
pub fn trajectory_table(trajectory: &Trajectory) -> ResultTable {
    let mut table = stamped(ResultTable::new(TRAJECTORY_COLUMNS), &trajectory.config);
    for rec in &trajectory.records {
        table.push_row(record_cells(rec).to_vec());
    }
    table
}

/// Every successful trajectory of a sweep in long form:
/// `r, tau, a, t, h, D_abs, C, QD`, points in canonical order.
pub fn sweep_trajectory_table(result: &SweepResult) -> ResultTable {
    let header = POINT_COLUMNS.iter().chain(TRAJECTORY_COLUMNS.iter()).copied();
    let mut table = stamped(ResultTable::new(header), &result.base);
    for (p, t) in result.trajectories() {
        for rec in &t.records {
            let mut row = vec![p.r.into(), p.tau.into(), p.a.into()];
            row.extend(record_cells(rec));
            table.push_row(row);
        }
    }
    table
}

/// One row per grid point with revival and period summaries; failed points
/// carry their error message.
pub fn sweep_summary_table(result: &SweepResult, revival_index: usize) -> ResultTable {
    let header = [
        "r",
        "tau",
        "a",
        "status",
        "n_peaks_C",
        "h_peak_C",
        "C_max",
        "QD_max",
        "peak_spacing",
        "period_C",
        "period_QD",
        "error",
    ];
    let mut table = stamped(ResultTable::new(header), &result.base)
        .with_metadata("revival_index", revival_index.to_string());
    for entry in &result.entries {
        let p = entry.point;
        let mut row: Vec<Cell> = vec![p.r.into(), p.tau.into(), p.a.into()];
        match &entry.outcome {
            Ok(t) => {
                let c = t.revival_peaks(Measure::Concurrence);
                let q = t.revival_peaks(Measure::Discord);
                let c_peak = c.revival(revival_index);
                row.extend([
                    "ok".into(),
                    (c.len() as f64).into(),
                    c_peak.map(|pk| pk.h).into(),
                    c_peak.map(|pk| pk.value).into(),
                    q.revival(revival_index).map(|pk| pk.value).into(),
                    c.mean_spacing().into(),
                    t.oscillation_period(Measure::Concurrence).into(),
                    t.oscillation_period(Measure::Discord).into(),
                    Cell::Missing,
                ]);
            }
            Err(failure) => {
                row.push("failed".into());
                row.extend(std::iter::repeat_n(Cell::Missing, 7));
                row.push(failure.message.clone().into());
            }
        }
        table.push_row(row);
    }
    table
}

/// Fit input and result: `r, value, ln_value, fitted_ln, used`, with the
/// fit parameters in the metadata.
pub fn fit_table(points: &[(f64, f64)], fit: &ScalingFit, measure: Measure) -> ResultTable {
    let mut table = ResultTable::new(["r", "value", "ln_value", "fitted_ln", "used"])
        .with_metadata("version", crate::VERSION)
        .with_metadata("measure", measure.column())
        .with_metadata("slope", format_number(fit.slope))
        .with_metadata("intercept", format_number(fit.intercept))
        .with_metadata("r_squared", format_number(fit.r_squared))
        .with_metadata(
            "scaling",
            if fit.clear_scaling() { "clear" } else { "no clear scaling" },
        );
    for &(r, value) in points {
        let used = value > 0.0;
        table.push_row(vec![
            r.into(),
            value.into(),
            used.then(|| value.ln()).into(),
            fit.predict_ln(r).into(),
            (if used { 1.0 } else { 0.0 }).into(),
        ]);
    }
    table
}

/// Oscillation periods beyond `h = 1`, one row per point.
pub fn period_table(rows: &[(Option<SweepPoint>, Option<f64>, Option<f64>)]) -> ResultTable {
    let mut table = ResultTable::new(["r", "tau", "a", "period_C", "period_QD"])
        .with_metadata("version", crate::VERSION);
    for (p, c, q) in rows {
        let coords: [Cell; 3] = match p {
            Some(p) => [p.r.into(), p.tau.into(), p.a.into()],
            None => [Cell::Missing, Cell::Missing, Cell::Missing],
        };
        let mut row = coords.to_vec();
        row.extend([(*c).into(), (*q).into()]);
        table.push_row(row);
    }
    table
}

/// Sampled records read back from a trajectory table or a long-form sweep
/// table.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordGroup {
    pub point: Option<SweepPoint>,
    pub records: Vec<TrajectoryRecord>,
}

impl RecordGroup {
    pub fn fields(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.h).collect()
    }

    pub fn series(&self, measure: Measure) -> Vec<f64> {
        self.records.iter().map(|r| measure.of(r)).collect()
    }
}

/// Splits a table produced by [`trajectory_table`] or
/// [`sweep_trajectory_table`] back into per-point record lists.
pub fn record_groups(table: &ResultTable) -> Result<Vec<RecordGroup>, String> {
    let column = |name: &str| {
        table
            .column_index(name)
            .ok_or_else(|| format!("missing column {name}"))
    };
    let traj: Vec<usize> = TRAJECTORY_COLUMNS
        .iter()
        .map(|c| column(c))
        .collect::<Result<_, _>>()?;
    let coords: Option<Vec<usize>> = POINT_COLUMNS.iter().map(|c| table.column_index(c)).collect();

    let number = |row: &[Cell], i: usize, line: usize| {
        row[i]
            .as_number()
            .ok_or_else(|| format!("row {line}: column {} is not a number", table.header()[i]))
    };
    let mut groups: Vec<RecordGroup> = Vec::new();
    for (line, row) in table.rows().iter().enumerate() {
        let point = match &coords {
            Some(c) => Some(SweepPoint {
                r: number(row, c[0], line)?,
                tau: number(row, c[1], line)?,
                a: number(row, c[2], line)?,
            }),
            None => None,
        };
        let rec = TrajectoryRecord {
            t: number(row, traj[0], line)?,
            h: number(row, traj[1], line)?,
            d_abs: number(row, traj[2], line)?,
            concurrence: number(row, traj[3], line)?,
            discord: number(row, traj[4], line)?,
        };
        match groups.last_mut() {
            Some(g) if g.point == point => g.records.push(rec),
            _ => groups.push(RecordGroup {
                point,
                records: vec![rec],
            }),
        }
    }
    Ok(groups)
}

/// Legend label for a grid point, naming only the axes that vary.
pub fn point_label(point: &SweepPoint, vary: [bool; 3]) -> String {
    let mut parts = Vec::new();
    if vary[0] {
        parts.push(format!("r = {}", point.r));
    }
    if vary[1] {
        parts.push(format!("tau = {}", point.tau));
    }
    if vary[2] {
        parts.push(format!("a = {}", point.a));
    }
    if parts.is_empty() {
        format!("r = {}", point.r)
    } else {
        parts.join(", ")
    }
}

/// `measure` against `h` with the critical-point guides, one curve per
/// labelled record list.
pub fn trajectory_plot(measure: Measure, curves: &[(String, &[TrajectoryRecord])]) -> Plot {
    let name = match measure {
        Measure::Concurrence => "concurrence C",
        Measure::Discord => "quantum discord QD",
        Measure::Decoherence => "|D|",
    };
    let mut plot = Plot::new(format!("{name} vs h(t)"), "h(t) = t/tau", measure.column())
        .with_critical_guides()
        .with_metadata("version", crate::VERSION);
    for (label, records) in curves {
        plot = plot.with_curve(Curve::line(
            label.clone(),
            records.iter().map(|r| (r.h, measure.of(r))).collect(),
        ));
    }
    plot
}

/// Scatter of `(r, ln y)` with the fitted line.
pub fn fit_plot(fit: &ScalingFit, measure: Measure) -> Plot {
    let pts: Vec<(f64, f64)> = fit.used.iter().map(|&(r, y)| (r, y.ln())).collect();
    let (lo, hi) = pts
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), p| (lo.min(p.0), hi.max(p.0)));
    Plot::new(
        format!("ln {}_max vs r (R^2 = {:.4})", measure.column(), fit.r_squared),
        "r",
        format!("ln {}_max", measure.column()),
    )
    .with_metadata("version", crate::VERSION)
    .with_curve(Curve::points("peaks", pts))
    .with_curve(Curve::line(
        format!("slope {:.4e}", fit.slope),
        vec![(lo, fit.predict_ln(lo)), (hi, fit.predict_ln(hi))],
    ))
}
