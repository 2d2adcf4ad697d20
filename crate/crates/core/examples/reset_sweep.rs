//! Reset-rate sweep on the slow ramp: first-revival heights of C and QD
//! shrink as the rate grows. All rates share one propagation.
//!
//!     cargo run --release --example reset_sweep -- [N]

use resetcorr::analysis::{sweep, Measure, RunConfig, SweepGrid};

fn main() -> resetcorr::Result<()> {
    let chain_len: usize = std::env::args().nth(1).map_or(50, |s| s.parse().expect("N"));
    let mut base = RunConfig::figure_defaults(250.0)?;
    base.chain_len = chain_len;
    base.n_samples = 1000;

    // Rates in inverse time; on this ramp 4e-6 per unit time is 1e-3 per
    // unit of swept field.
    let grid = SweepGrid::over_rates(&base, vec![0.0, 4e-6, 8e-6, 1.6e-5, 3.2e-5])?;
    let result = sweep(&base, &grid, 0)?;

    let c = result.revival_maxima(Measure::Concurrence, 0);
    let qd = result.revival_maxima(Measure::Discord, 0);
    println!("N = {chain_len}, tau = 250, first revival after h = -1");
    println!("{:>10}  {:>8}  {:>8}", "r", "C_max", "QD_max");
    for ((p, c), (_, q)) in c.iter().zip(&qd) {
        let show = |v: &Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        println!("{:>10.1e}  {:>8}  {:>8}", p.r, show(c), show(q));
    }
    for (p, failure) in result.failures() {
        println!("r = {} failed: {}", p.r, failure.message);
    }
    Ok(())
}
