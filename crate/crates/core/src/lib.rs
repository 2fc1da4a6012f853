//! Band structure and quench dynamics of a one-dimensional optomechanical
//! array driven with a linear phase gradient.
//!
//! Each cell holds one optical and one mechanical mode. In Bloch space the
//! array reduces to a 2×2 problem per wavenumber (`model`, `bands`); the
//! enhanced coupling comes from a mean-field solve (`meanfield`); a linear
//! ramp of the coupling is propagated with a second-order Magnus expansion
//! (`quench`) and checked against brute-force references (`oracle`).

pub mod bands;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod meanfield;
pub mod model;
pub mod oracle;
pub mod quench;

pub use bands::{band_energies, band_scan, gap_extrema, hybrid_basis, BandRow, ExtremumKind, GapExtremum, HybridBasis};
pub use error::{Error, Result};
pub use linalg::{Propagator2, Rotation2};
pub use meanfield::{solve_meanfield, DriveParams, MeanFieldSolution};
pub use model::{
    bloch_hamiltonian, kd_grid, normalize_phase, reduced_coeffs, BlochPoint, LatticeParams, ReducedCoeffs,
};
pub use quench::{
    magnus_propagator, magnus_terms, quench_map, quench_scan, quench_trace, thermal_populations, QuenchRecord,
    QuenchSchedule, QuenchTime, ThermalPopulations,
};
