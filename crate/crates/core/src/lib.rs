//! Entanglement and quantum discord of two central qubits coupled to a
//! linearly driven transverse-field Ising chain whose state is reset at
//! Poisson-distributed times.
//!
//! The pipeline, bottom-up:
//!
//! - [`modes`]: per-momentum two-level Hamiltonians for the `±δ` branches,
//!   ground states, unitary propagation along the ramp, instantaneous
//!   eigenbases.
//! - [`reset`]: renewal average of a mode's reset-free density matrix.
//! - [`correlations`]: mode overlaps, the decoherence factor, the reduced
//!   two-qubit X state, concurrence and quantum discord.
//! - [`analysis`]: full trajectories, parameter sweeps, revival peaks,
//!   exponential peak-scaling fits and oscillation periods.
//! - [`io`]: configuration documents, CSV/JSON tables, SVG plots.
//! - [`cli`]: the `resetcorr` command-line front end.
//!
//! ```no_run
//! use resetcorr::analysis::{run_trajectory, RunConfig};
//!
//! let mut config = RunConfig::figure_defaults(250.0).unwrap();
//! config.chain_len = 100;
//! let trajectory = run_trajectory(&config).unwrap();
//! for rec in trajectory.records.iter().step_by(100) {
//!     println!("{:+.3}  |D| = {:.5}  C = {:.4}  QD = {:.4}", rec.h, rec.d_abs, rec.concurrence, rec.discord);
//! }
//! ```

pub mod analysis;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod io;
pub mod modes;
pub mod reset;

pub use error::{Error, Result};

/// Version string embedded in every output file.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
