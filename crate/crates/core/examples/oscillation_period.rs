//! Post-criticality oscillations under reset: estimated period of C and QD
//! beyond h = 1 for a few rates and ramp times.
//!
//!     cargo run --release --example oscillation_period

use resetcorr::analysis::{run_trajectory, Measure, RunConfig};
use resetcorr::reset::ResetConfig;

fn main() -> resetcorr::Result<()> {
    println!("{:>5}  {:>5}  {:>9}  {:>9}  {:>9}", "tau", "r", "period C", "period QD", "|D|(h=5)");
    for tau in [1.0, 0.1] {
        for rate in [0.5, 1.0, 1.5, 2.0] {
            let mut config = RunConfig::figure_defaults(tau)?;
            config.chain_len = 200;
            config.reset = ResetConfig::new(rate)?;
            let t = run_trajectory(&config)?;
            let show = |p: Option<f64>| p.map_or("absent".to_string(), |x| format!("{x:.4}"));
            println!(
                "{tau:>5}  {rate:>5}  {:>9}  {:>9}  {:>9.2e}",
                show(t.oscillation_period(Measure::Concurrence)),
                show(t.oscillation_period(Measure::Discord)),
                t.records.last().map_or(f64::NAN, |r| r.d_abs),
            );
        }
    }
    Ok(())
}
