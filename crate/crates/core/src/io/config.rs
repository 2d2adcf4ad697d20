//! Run and sweep configuration documents.
//!
//! A document is TOML (or JSON, picked by the `.json` extension) with the
//! sections below; every key except `drive.tau` (or `drive.tau_grid`) has a
//! default taken from the figure parameter set.
//!
//! ```toml
//! [environment]
//! N = 500
//! delta = 0.01
//! h_i = -5.0
//! h_f = 5.0
//!
//! [qubits]
//! a = 0.9            # or a_grid = [0.2, 0.9]
//!
//! [drive]
//! tau = 250.0        # or tau_grid = [0.1, 1.0]
//!
//! [reset]
//! r = 0.0            # or r_grid = [0.0, 4e-6, 8e-6]
//!
//! [numerics]
//! n_samples = 2000
//! step_safety = 0.05
//! overlap = "auto"   # "spinor" | "density"
//!
//! [analysis]
//! revival_index = 0
//!
//! [output]
//! dir = "out"
//! formats = ["csv"]
//! plot = false
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{OverlapRoute, RunConfig, SweepGrid};
use crate::error::{Error, Result};
use crate::modes::RampProtocol;
use crate::reset::ResetConfig;

use super::table::TableFormat;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    environment: EnvironmentSection,
    #[serde(default)]
    qubits: QubitsSection,
    #[serde(default)]
    drive: DriveSection,
    #[serde(default)]
    reset: ResetSection,
    #[serde(default)]
    numerics: NumericsSection,
    #[serde(default)]
    analysis: AnalysisSection,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentSection {
    #[serde(rename = "N", default = "defaults::chain_len")]
    chain_len: usize,
    #[serde(default = "defaults::delta")]
    delta: f64,
    #[serde(default = "defaults::h_initial")]
    h_i: f64,
    #[serde(default = "defaults::h_final")]
    h_f: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QubitsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriveSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResetSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r_grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsSection {
    #[serde(default = "defaults::n_samples")]
    n_samples: usize,
    #[serde(default = "defaults::step_safety")]
    step_safety: f64,
    #[serde(default)]
    overlap: OverlapRoute,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisSection {
    #[serde(default)]
    revival_index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dir: Option<PathBuf>,
    #[serde(default = "defaults::formats")]
    formats: Vec<TableFormat>,
    #[serde(default)]
    plot: bool,
}

mod defaults {
    use super::*;

    pub fn chain_len() -> usize {
        RunConfig::DEFAULT_CHAIN_LEN
    }
    pub fn delta() -> f64 {
        RunConfig::DEFAULT_DELTA
    }
    pub fn h_initial() -> f64 {
        RunConfig::DEFAULT_H_INITIAL
    }
    pub fn h_final() -> f64 {
        RunConfig::DEFAULT_H_FINAL
    }
    pub fn n_samples() -> usize {
        RunConfig::DEFAULT_N_SAMPLES
    }
    pub fn step_safety() -> f64 {
        RunConfig::DEFAULT_STEP_SAFETY
    }
    pub fn formats() -> Vec<TableFormat> {
        vec![TableFormat::Csv]
    }
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        EnvironmentSection {
            chain_len: defaults::chain_len(),
            delta: defaults::delta(),
            h_i: defaults::h_initial(),
            h_f: defaults::h_final(),
        }
    }
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            n_samples: defaults::n_samples(),
            step_safety: defaults::step_safety(),
            overlap: OverlapRoute::Auto,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            formats: defaults::formats(),
            plot: false,
        }
    }
}

/// Syntax of a configuration document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigSyntax {
    Toml,
    Json,
}

impl ConfigSyntax {
    pub fn from_path(path: &Path) -> ConfigSyntax {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => ConfigSyntax::Json,
            _ => ConfigSyntax::Toml,
        }
    }
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    pub formats: Vec<TableFormat>,
    pub plot: bool,
}

/// A validated configuration document.
#[derive(Debug, Clone)]
pub struct ConfigDocument {
    /// The single-point configuration, or the base of a sweep (first value
    /// of every grid axis).
    pub run: RunConfig,
    /// Present when any of `a_grid`, `tau_grid`, `r_grid` is given.
    pub grid: Option<SweepGrid>,
    pub revival_index: usize,
    pub output: OutputSettings,
    effective: Document,
}

impl ConfigDocument {
    pub fn is_sweep(&self) -> bool {
        self.grid.is_some()
    }

    /// The grid to run: the configured one, or the single point of `run`.
    pub fn sweep_grid(&self) -> SweepGrid {
        self.grid.clone().unwrap_or_else(|| {
            SweepGrid::new(
                vec![self.run.reset.rate()],
                vec![self.run.ramp.tau()],
                vec![self.run.a],
            )
            .expect("validated single point")
        })
    }

    /// The document with every default filled in, as compact JSON. Written
    /// into the metadata of every output file.
    pub fn effective_json(&self) -> String {
        serde_json::to_string(&self.effective).expect("document serializes")
    }

    /// The document with every default filled in, as TOML.
    pub fn effective_toml(&self) -> String {
        toml::to_string(&self.effective).expect("document serializes")
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

fn syntax_tree(text: &str, syntax: ConfigSyntax) -> Result<serde_json::Value> {
    match syntax {
        ConfigSyntax::Json => serde_json::from_str(text).map_err(|e| Error::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }),
        ConfigSyntax::Toml => {
            let table: toml::Table = toml::from_str(text).map_err(|e| {
                let (line, column) = e
                    .span()
                    .map_or((0, 0), |span| line_column(text, span.start));
                Error::Syntax {
                    line,
                    column,
                    message: e.message().trim().to_string(),
                }
            })?;
            serde_json::to_value(table).map_err(|e| Error::Syntax {
                line: 0,
                column: 0,
                message: e.to_string(),
            })
        }
    }
}

fn structure(tree: serde_json::Value) -> Result<Document> {
    serde_path_to_error::deserialize(tree).map_err(|e| {
        Error::semantic(e.path().to_string(), e.inner().to_string())
    })
}

fn check_unit_interval(key: &str, a: f64) -> Result<()> {
    if (0.0..=1.0).contains(&a) {
        Ok(())
    } else {
        Err(Error::semantic(key, format!("a must lie in [0,1], got {a}")))
    }
}

fn check_rate(key: &str, r: f64) -> Result<()> {
    ResetConfig::new(r)
        .map(|_| ())
        .map_err(|_| Error::semantic(key, format!("reset rate must be finite and >= 0, got {r}")))
}

fn check_tau(key: &str, tau: f64) -> Result<()> {
    if tau.is_finite() && tau > 0.0 {
        Ok(())
    } else {
        Err(Error::semantic(key, format!("tau must be finite and > 0, got {tau}")))
    }
}

/// Either the scalar or the grid form of one axis (not both); `None` when
/// neither is given.
fn axis(
    section: &str,
    name: &str,
    scalar: Option<f64>,
    grid: &Option<Vec<f64>>,
    check: fn(&str, f64) -> Result<()>,
) -> Result<Option<(f64, Option<Vec<f64>>)>> {
    match (scalar, grid) {
        (Some(_), Some(_)) => Err(Error::semantic(
            format!("{section}.{name}_grid"),
            format!("give either {name} or {name}_grid, not both"),
        )),
        (Some(v), None) => {
            check(&format!("{section}.{name}"), v)?;
            Ok(Some((v, None)))
        }
        (None, Some(values)) => {
            if values.is_empty() {
                return Err(Error::semantic(
                    format!("{section}.{name}_grid"),
                    "grid must not be empty",
                ));
            }
            for (i, &v) in values.iter().enumerate() {
                check(&format!("{section}.{name}_grid[{i}]"), v)?;
            }
            Ok(Some((values[0], Some(values.clone()))))
        }
        (None, None) => Ok(None),
    }
}

fn validate(doc: &Document) -> Result<(RunConfig, Option<SweepGrid>)> {
    let env = &doc.environment;
    if env.chain_len < 2 || env.chain_len % 2 != 0 {
        return Err(Error::semantic(
            "environment.N",
            format!("N must be even and at least 2, got {}", env.chain_len),
        ));
    }
    if !(env.delta.is_finite() && env.delta >= 0.0) {
        return Err(Error::semantic(
            "environment.delta",
            format!("delta must be finite and >= 0, got {}", env.delta),
        ));
    }
    if !(env.h_i.is_finite() && env.h_f.is_finite() && env.h_i < env.h_f) {
        return Err(Error::semantic(
            "environment.h_f",
            format!("need finite h_i < h_f, got h_i = {}, h_f = {}", env.h_i, env.h_f),
        ));
    }
    let a = axis("qubits", "a", doc.qubits.a, &doc.qubits.a_grid, check_unit_interval)?
        .unwrap_or((RunConfig::DEFAULT_A, None));
    let tau = axis("drive", "tau", doc.drive.tau, &doc.drive.tau_grid, check_tau)?
        .ok_or_else(|| Error::semantic("drive.tau", "tau (or tau_grid) is required"))?;
    let r = axis("reset", "r", doc.reset.r, &doc.reset.r_grid, check_rate)?.unwrap_or((0.0, None));

    let num = &doc.numerics;
    if num.n_samples == 0 {
        return Err(Error::semantic("numerics.n_samples", "n_samples must be at least 1"));
    }
    if !(num.step_safety.is_finite() && num.step_safety > 0.0 && num.step_safety <= 0.5) {
        return Err(Error::semantic(
            "numerics.step_safety",
            format!("step_safety must lie in (0, 0.5], got {}", num.step_safety),
        ));
    }
    let rates = r.1.clone().unwrap_or_else(|| vec![r.0]);
    if num.overlap == OverlapRoute::Spinor && rates.iter().any(|&r| r > 0.0) {
        return Err(Error::semantic(
            "numerics.overlap",
            "the spinor overlap cannot represent reset; use \"density\" or \"auto\" when r > 0",
        ));
    }
    if doc.output.formats.is_empty() {
        return Err(Error::semantic("output.formats", "at least one format is required"));
    }

    let run = RunConfig {
        chain_len: env.chain_len,
        delta: env.delta,
        a: a.0,
        ramp: RampProtocol::new(env.h_i, env.h_f, tau.0)?,
        reset: ResetConfig::new(r.0)?,
        n_samples: num.n_samples,
        step_safety: num.step_safety,
        route: num.overlap,
        convention: Default::default(),
    };
    run.validate()?;

    let grid = if a.1.is_some() || tau.1.is_some() || r.1.is_some() {
        Some(SweepGrid::new(
            rates,
            tau.1.unwrap_or_else(|| vec![tau.0]),
            a.1.unwrap_or_else(|| vec![a.0]),
        )?)
    } else {
        None
    };
    Ok((run, grid))
}

/// Parses and validates a configuration document held in memory.
pub fn parse_config_str(text: &str, syntax: ConfigSyntax) -> Result<ConfigDocument> {
    let doc = structure(syntax_tree(text, syntax)?)?;
    let (run, grid) = validate(&doc)?;
    let mut effective = doc.clone();
    if effective.qubits.a.is_none() && effective.qubits.a_grid.is_none() {
        effective.qubits.a = Some(run.a);
    }
    if effective.reset.r.is_none() && effective.reset.r_grid.is_none() {
        effective.reset.r = Some(0.0);
    }
    Ok(ConfigDocument {
        run,
        grid,
        revival_index: doc.analysis.revival_index,
        output: OutputSettings {
            dir: doc.output.dir,
            formats: doc.output.formats,
            plot: doc.output.plot,
        },
        effective,
    })
}

/// Reads, parses and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<ConfigDocument> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, ConfigSyntax::from_path(path))
}
