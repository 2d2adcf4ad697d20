//! Command-line front end: `trajectory`, `sweep`, `fit-peaks`, `period`.
//!
//! Every command reads a configuration document (or, for the analysis
//! commands, a previously written trajectory table), writes its tables into
//! the output directory and optionally SVG plots next to them.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    detect_revival_peaks, estimate_oscillation_period, fit_peak_scaling, run_trajectory_with,
    sweep, Measure, PeakOptions, PeriodOptions, SweepResult,
};
use crate::error::{Error, Result};
use crate::io::{
    emit_plot, fit_plot, fit_table, parse_config, period_table, point_label, read_results,
    record_groups, sweep_summary_table, sweep_trajectory_table, trajectory_plot, trajectory_table,
    write_results, ConfigDocument, RecordGroup, ResultTable, TableFormat,
};

#[derive(Debug, Parser)]
#[command(name = "resetcorr", version, about = "Qubit correlations in a driven, reset Ising environment")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trajectory and write t, h, |D|, C, QD.
    Trajectory(CommonArgs),
    /// Run every point of the configured grid.
    Sweep(CommonArgs),
    /// Fit ln of the revival peak height against the reset rate.
    FitPeaks(AnalysisArgs),
    /// Estimate the oscillation period beyond the second critical point.
    Period(AnalysisArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Configuration document (TOML, or JSON by extension).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to `output.dir` of the config, then `.`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Table format; overrides `output.formats`.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also write SVG plots.
    #[arg(long)]
    pub plot: bool,
    /// Worker threads for the mode propagation (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AnalysisArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Analyse an existing trajectory or sweep table instead of running
    /// the configuration.
    #[arg(long, conflicts_with = "config")]
    pub input: Option<PathBuf>,
    /// Revival counted from h = -1 upward, starting at 0 (fit-peaks only).
    #[arg(long)]
    pub revival_index: Option<usize>,
}

struct Outputs {
    dir: PathBuf,
    formats: Vec<TableFormat>,
    plot: bool,
    written: Vec<PathBuf>,
}

impl Outputs {
    fn new(args: &CommonArgs, doc: Option<&ConfigDocument>) -> Result<Outputs> {
        let dir = args
            .out
            .clone()
            .or_else(|| doc.and_then(|d| d.output.dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let formats = match args.format {
            Some(f) => vec![f.into()],
            None => doc.map_or(vec![TableFormat::Csv], |d| d.output.formats.clone()),
        };
        Ok(Outputs {
            dir,
            formats,
            plot: args.plot || doc.is_some_and(|d| d.output.plot),
            written: Vec::new(),
        })
    }

    fn table(&mut self, stem: &str, table: &ResultTable) -> Result<()> {
        for &format in &self.formats {
            let path = self.dir.join(format!("{stem}.{}", format.extension()));
            write_results(table, format, &path)?;
            self.written.push(path);
        }
        Ok(())
    }

    fn plot(&mut self, stem: &str, plot: &crate::io::Plot) -> Result<()> {
        if self.plot {
            let path = self.dir.join(format!("{stem}.svg"));
            if emit_plot(plot, &path)? {
                self.written.push(path);
            }
        }
        Ok(())
    }
}

fn load(config: &Option<PathBuf>) -> Result<ConfigDocument> {
    let path = config
        .as_ref()
        .ok_or_else(|| Error::Config("--config <path> is required".into()))?;
    parse_config(path)
}

fn with_document(table: ResultTable, doc: &ConfigDocument) -> ResultTable {
    table.with_metadata("config", doc.effective_json())
}

/// Metadata carried from the analysed data into every derived output.
type Provenance = Vec<(String, String)>;

fn document_provenance(doc: &ConfigDocument) -> Provenance {
    vec![("config".into(), doc.effective_json())]
}

/// Keys of an input table that identify the run it came from.
const CARRIED_KEYS: [&str; 3] = ["config", "run_config", "fingerprint"];

fn table_provenance(table: &ResultTable, path: &Path) -> Provenance {
    let mut carried: Provenance = CARRIED_KEYS
        .iter()
        .filter_map(|&k| table.metadata.get(k).map(|v| (k.to_string(), v.clone())))
        .collect();
    carried.push(("source".into(), display(path)));
    carried
}

fn stamp_table(mut table: ResultTable, provenance: &Provenance) -> ResultTable {
    for (k, v) in provenance {
        table = table.with_metadata(k.clone(), v.clone());
    }
    table
}

fn stamp_plot(mut plot: crate::io::Plot, provenance: &Provenance) -> crate::io::Plot {
    for (k, v) in provenance {
        plot = plot.with_metadata(k.clone(), v.clone());
    }
    plot
}

const PLOTTED: [(Measure, &str); 3] = [
    (Measure::Concurrence, "C"),
    (Measure::Discord, "QD"),
    (Measure::Decoherence, "D"),
];

fn trajectory(args: &CommonArgs) -> Result<Outputs> {
    let doc = load(&args.config)?;
    if doc.is_sweep() {
        return Err(Error::Config(
            "the configuration defines a grid; use the sweep subcommand".into(),
        ));
    }
    let mut out = Outputs::new(args, Some(&doc))?;
    let traj = run_trajectory_with(&doc.run, args.threads)?;
    out.table("trajectory", &with_document(trajectory_table(&traj), &doc))?;
    let label = format!("r = {}", doc.run.reset.rate());
    for (measure, suffix) in PLOTTED {
        let plot = trajectory_plot(measure, &[(label.clone(), &traj.records[..])])
            .with_metadata("config", doc.effective_json());
        out.plot(&format!("trajectory_{suffix}"), &plot)?;
    }
    Ok(out)
}

fn run_sweep(doc: &ConfigDocument, threads: usize) -> Result<SweepResult> {
    let result = sweep(&doc.run, &doc.sweep_grid(), threads)?;
    for (p, failure) in result.failures() {
        log::error!("point r = {}, tau = {}, a = {} failed: {}", p.r, p.tau, p.a, failure.message);
    }
    Ok(result)
}

fn sweep_groups(result: &SweepResult) -> Vec<RecordGroup> {
    result
        .trajectories()
        .map(|(p, t)| RecordGroup {
            point: Some(*p),
            records: t.records.clone(),
        })
        .collect()
}

fn varying_axes(groups: &[RecordGroup]) -> [bool; 3] {
    let points: Vec<_> = groups.iter().filter_map(|g| g.point).collect();
    let varies = |f: fn(&crate::analysis::SweepPoint) -> f64| {
        points.windows(2).any(|w| f(&w[0]) != f(&w[1]))
    };
    [varies(|p| p.r), varies(|p| p.tau), varies(|p| p.a)]
}

fn plot_groups(out: &mut Outputs, stem: &str, groups: &[RecordGroup], provenance: &Provenance) -> Result<()> {
    let vary = varying_axes(groups);
    let curves: Vec<(String, &[crate::analysis::TrajectoryRecord])> = groups
        .iter()
        .map(|g| {
            let label = g.point.map_or_else(|| "trajectory".to_string(), |p| point_label(&p, vary));
            (label, &g.records[..])
        })
        .collect();
    for (measure, suffix) in PLOTTED {
        let plot = stamp_plot(trajectory_plot(measure, &curves), provenance);
        out.plot(&format!("{stem}_{suffix}"), &plot)?;
    }
    Ok(())
}

/// Exit code for a sweep that ran but lost some points.
fn failures_code(result: &SweepResult) -> i32 {
    result.failures().map(|(_, f)| f.exit_code).max().unwrap_or(0)
}

fn sweep_command(args: &CommonArgs) -> Result<(Outputs, i32)> {
    let doc = load(&args.config)?;
    let mut out = Outputs::new(args, Some(&doc))?;
    let result = run_sweep(&doc, args.threads)?;
    out.table(
        "sweep_summary",
        &with_document(sweep_summary_table(&result, doc.revival_index), &doc),
    )?;
    out.table(
        "sweep_trajectories",
        &with_document(sweep_trajectory_table(&result), &doc),
    )?;
    plot_groups(&mut out, "sweep", &sweep_groups(&result), &document_provenance(&doc))?;
    Ok((out, failures_code(&result)))
}

/// Record groups to analyse, either read from `--input` or computed from
/// `--config`.
struct AnalysisInput {
    groups: Vec<RecordGroup>,
    doc: Option<ConfigDocument>,
    provenance: Provenance,
    exit_code: i32,
}

fn analysis_input(args: &AnalysisArgs) -> Result<AnalysisInput> {
    match &args.input {
        Some(path) => {
            let table = read_results(path)?;
            let groups = record_groups(&table).map_err(|message| Error::Table {
                path: path.clone(),
                message,
            })?;
            Ok(AnalysisInput {
                groups,
                doc: None,
                provenance: table_provenance(&table, path),
                exit_code: 0,
            })
        }
        None => {
            let doc = load(&args.common.config)?;
            let result = run_sweep(&doc, args.common.threads)?;
            Ok(AnalysisInput {
                groups: sweep_groups(&result),
                provenance: document_provenance(&doc),
                exit_code: failures_code(&result),
                doc: Some(doc),
            })
        }
    }
}

fn fit_peaks(args: &AnalysisArgs) -> Result<(Outputs, i32)> {
    let AnalysisInput {
        groups,
        doc,
        provenance,
        exit_code,
    } = analysis_input(args)?;
    let revival_index = args
        .revival_index
        .or(doc.as_ref().map(|d| d.revival_index))
        .unwrap_or(0);
    let mut out = Outputs::new(&args.common, doc.as_ref())?;

    let points: Vec<_> = groups
        .iter()
        .map(|g| {
            g.point.ok_or_else(|| {
                Error::Config("fit-peaks needs a sweep table with r, tau, a columns".into())
            })
        })
        .collect::<Result<_>>()?;
    if let Some(first) = points.first() {
        if points.iter().any(|p| p.tau != first.tau || p.a != first.a) {
            return Err(Error::Config(
                "fit-peaks expects a grid over r only (single tau and a)".into(),
            ));
        }
    }

    for (measure, suffix) in [(Measure::Concurrence, "C"), (Measure::Discord, "QD")] {
        let data: Vec<(f64, f64)> = groups
            .iter()
            .zip(&points)
            .map(|(g, p)| {
                let peaks = detect_revival_peaks(&g.fields(), &g.series(measure), &PeakOptions::default());
                let value = peaks.revival(revival_index).map_or(0.0, |pk| pk.value);
                if value <= 0.0 {
                    log::warn!("r = {}: no revival #{revival_index} of {suffix}; excluded", p.r);
                }
                (p.r, value)
            })
            .collect();
        let fit = fit_peak_scaling(&data)?;
        log::info!(
            "{suffix}: slope {:.6e}, intercept {:.6}, R^2 {:.6}{}",
            fit.slope,
            fit.intercept,
            fit.r_squared,
            if fit.clear_scaling() { "" } else { " (no clear scaling)" }
        );
        let table = fit_table(&data, &fit, measure)
            .with_metadata("revival_index", revival_index.to_string());
        out.table(&format!("fit_{suffix}"), &stamp_table(table, &provenance))?;
        out.plot(&format!("fit_{suffix}"), &stamp_plot(fit_plot(&fit, measure), &provenance))?;
    }
    Ok((out, exit_code))
}

fn period(args: &AnalysisArgs) -> Result<(Outputs, i32)> {
    let AnalysisInput {
        groups,
        doc,
        provenance,
        exit_code,
    } = analysis_input(args)?;
    let mut out = Outputs::new(&args.common, doc.as_ref())?;
    let options = PeriodOptions::default();
    let rows: Vec<_> = groups
        .iter()
        .map(|g| {
            let h = g.fields();
            (
                g.point,
                estimate_oscillation_period(&h, &g.series(Measure::Concurrence), &options),
                estimate_oscillation_period(&h, &g.series(Measure::Discord), &options),
            )
        })
        .collect();
    out.table("period", &stamp_table(period_table(&rows), &provenance))?;
    plot_groups(&mut out, "period", &groups, &provenance)?;
    Ok((out, exit_code))
}

fn execute(cli: &Cli) -> Result<(Outputs, i32)> {
    match &cli.command {
        Command::Trajectory(args) => trajectory(args).map(|o| (o, 0)),
        Command::Sweep(args) => sweep_command(args),
        Command::FitPeaks(args) => fit_peaks(args),
        Command::Period(args) => period(args),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code: 0 on success, 1 for configuration
/// errors, 2 for numerical failures.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((out, code)) => {
            for path in &out.written {
                println!("{}", display(path));
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
