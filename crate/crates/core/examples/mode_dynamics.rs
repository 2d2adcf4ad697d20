//! Propagates a single momentum mode through both critical points and
//! prints how far it strays from the instantaneous ground state.
//!
//!     cargo run --release --example mode_dynamics -- [tau]

use resetcorr::modes::{
    ground_state_spinor, momentum_grid, propagate_branch, BranchField, IntegrationGrid,
    RampProtocol,
};

fn main() -> resetcorr::Result<()> {
    let tau: f64 = std::env::args().nth(1).map_or(Ok(1.0), |s| s.parse()).expect("tau");
    let ramp = RampProtocol::new(-5.0, 5.0, tau)?;
    let grid = IntegrationGrid::with_step_bound(ramp, 20, 0.05, 0.01)?;
    let modes = momentum_grid(500)?;
    let bare = BranchField::bare();

    println!("tau = {tau}: excitation probability 1 - |<g(h)|psi>|^2");
    print!("{:>8}", "h");
    let picked = [0, 62, 124, 249];
    for &m in &picked {
        print!("  k={:<9.5}", modes[m].k);
    }
    println!();

    let paths: Vec<_> = picked
        .iter()
        .map(|&m| {
            let mode = &modes[m];
            let start = ground_state_spinor(mode.k, -5.0, &bare)?;
            propagate_branch(&start, mode, &bare, &grid)
        })
        .collect::<resetcorr::Result<_>>()?;

    for j in 0..grid.n_samples() {
        let h = grid.sample_field(j);
        print!("{h:>8.2}");
        for (&m, path) in picked.iter().zip(&paths) {
            let ground = ground_state_spinor(modes[m].k, h, &bare)?;
            print!("  {:<11.3e}", 1.0 - ground.inner(&path[j]).norm_sqr());
        }
        println!();
    }
    Ok(())
}
