//! Compares the computed decoherence factor with its closed form in the
//! paramagnetic phase, exp[-N delta^2 / (4 h^2 (h^2 - 1))].
//!
//!     cargo run --release --example paramagnetic_oracle -- [N]

use resetcorr::analysis::{run_trajectory, RunConfig};
use resetcorr::correlations::decoherence_paramagnetic_approx;

fn main() -> resetcorr::Result<()> {
    let chain_len: usize = std::env::args().nth(1).map_or(200, |s| s.parse().expect("N"));
    let mut config = RunConfig::figure_defaults(250.0)?;
    config.chain_len = chain_len;
    config.n_samples = 40;
    let t = run_trajectory(&config)?;
    println!("{:>6}  {:>12}  {:>12}  {:>9}", "h", "|D|", "closed form", "rel. err");
    for rec in t.records.iter().filter(|r| r.h <= -1.5) {
        let approx = decoherence_paramagnetic_approx(chain_len, config.delta, rec.h)?;
        println!(
            "{:>6.2}  {:>12.9}  {:>12.9}  {:>9.2e}",
            rec.h,
            rec.d_abs,
            approx,
            (rec.d_abs - approx).abs() / approx
        );
    }
    Ok(())
}
