//! Fits ln C_max and ln QD_max against the reset rate. Concurrence peaks
//! decay exponentially in r; discord has no comparably clean law.
//!
//!     cargo run --release --example peak_scaling -- [N]

use resetcorr::analysis::{fit_peak_scaling, sweep, Measure, RunConfig, SweepGrid};

fn main() -> resetcorr::Result<()> {
    let chain_len: usize = std::env::args().nth(1).map_or(50, |s| s.parse().expect("N"));
    let mut base = RunConfig::figure_defaults(250.0)?;
    base.chain_len = chain_len;
    base.n_samples = 1000;
    let rates = vec![0.0, 4e-6, 8e-6, 1.6e-5, 3.2e-5];
    let result = sweep(&base, &SweepGrid::over_rates(&base, rates)?, 0)?;

    for measure in [Measure::Concurrence, Measure::Discord] {
        let points: Vec<(f64, f64)> = result
            .revival_maxima(measure, 0)
            .into_iter()
            .map(|(p, v)| (p.r, v.unwrap_or(0.0)))
            .collect();
        let fit = fit_peak_scaling(&points)?;
        println!(
            "{:>3}: ln max = {:.4} {:+.4e} r   R^2 = {:.5}  ({})",
            measure.column(),
            fit.intercept,
            fit.slope,
            fit.r_squared,
            if fit.clear_scaling() { "clear scaling" } else { "no clear scaling" }
        );
        for r in &fit.excluded {
            println!("     excluded r = {r}: no revival");
        }
    }
    Ok(())
}
