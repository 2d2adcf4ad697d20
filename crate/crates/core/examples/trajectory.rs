//! One full trajectory: |D|, concurrence and discord against the field,
//! written as CSV plus SVG plots.
//!
//!     cargo run --release --example trajectory -- [tau] [r] [out_dir]

use std::path::PathBuf;

use resetcorr::analysis::{run_trajectory, Measure, RunConfig};
use resetcorr::io::{emit_plot, trajectory_plot, trajectory_table, write_results, TableFormat};
use resetcorr::reset::ResetConfig;

fn main() -> resetcorr::Result<()> {
    let mut args = std::env::args().skip(1);
    let tau: f64 = args.next().map_or(250.0, |s| s.parse().expect("tau"));
    let rate: f64 = args.next().map_or(0.0, |s| s.parse().expect("r"));
    let out = PathBuf::from(args.next().unwrap_or_else(|| "target/example-output".into()));
    std::fs::create_dir_all(&out).expect("output directory");

    let mut config = RunConfig::figure_defaults(tau)?;
    config.reset = ResetConfig::new(rate)?;
    let trajectory = run_trajectory(&config)?;

    let csv = out.join("trajectory.csv");
    write_results(&trajectory_table(&trajectory), TableFormat::Csv, &csv)?;
    println!("wrote {}", csv.display());
    let label = format!("tau = {tau}, r = {rate}");
    for (measure, suffix) in [
        (Measure::Concurrence, "C"),
        (Measure::Discord, "QD"),
        (Measure::Decoherence, "D"),
    ] {
        let plot = trajectory_plot(measure, &[(label.clone(), &trajectory.records[..])]);
        let path = out.join(format!("trajectory_{suffix}.svg"));
        emit_plot(&plot, &path)?;
        println!("wrote {}", path.display());
    }

    let peaks = trajectory.revival_peaks(Measure::Concurrence);
    println!("{} revival peaks of C in (-1, 1)", peaks.len());
    for p in &peaks.peaks {
        println!("  h = {:+.4}  C = {:.4}", p.h, p.value);
    }
    if let Some(s) = peaks.mean_spacing() {
        let expected = std::f64::consts::PI / (4.0 * tau * config.delta);
        println!("mean spacing {s:.5} (pi/(4 tau delta) = {expected:.5})");
    }
    Ok(())
}
