//! Transmon spectrum and drive operator from exact charge-basis diagonalization.
//!
//! The qubit is modeled in the charge basis `|m>`, `m = -N..=N`, where the
//! Hamiltonian is tridiagonal: `4 E_C (m - n_g)^2` on the diagonal and
//! `-E_J / 2` on the first off-diagonals. Diagonalizing and retaining the
//! lowest few eigenstates yields the level energies and the charge (drive)
//! operator used by the time-domain device simulator.
//!
//! All energies are stored as ordinary frequencies in GHz; factors of `2*pi`
//! are applied by consumers that integrate equations of motion.

mod calibrate;
mod charge;
mod eigen;
mod error;
mod params;
mod rwa;

pub use calibrate::calibrate_ec;
pub use charge::build_charge_hamiltonian;
pub use eigen::{diagonalize, TransmonEigensystem};
pub use error::TransmonError;
pub use params::TransmonParams;
pub use rwa::rwa_reference_evolution;
