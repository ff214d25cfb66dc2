//! Entanglement entropy, particle-number measurement entropy and accessible
//! (number-superselected) entanglement entropy of free-fermion states.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`] builds one-body correlation matrices of Fermi seas restricted
//!   to a real-space region.
//! * [`spectrum`] diagonalizes them and evaluates the von Neumann entropy and
//!   the number cumulants.
//! * [`fcs`] holds the counting statistics: the generating function, the
//!   exact charge distribution, measurement entropy and its Gaussian bound.
//! * [`oracle`] is a brute-force Fock-space engine for a handful of modes,
//!   used to validate everything above.
//! * [`analytic`] collects closed-form reference models (switched and biased
//!   point contacts, Luttinger liquid, Widom asymptotics).
//! * [`sweep`] runs size sweeps, fits logarithmic scaling laws and writes
//!   CSV/JSON/SVG output.
//!
//! All entropies are in nats.

pub mod analytic;
pub mod error;
pub mod fcs;
pub mod kernel;
pub mod numfmt;
pub mod oracle;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result};
pub use fcs::ChargeDistribution;
pub use kernel::{CorrelationMatrix, FermiSeaSpec, RegionSpec};
pub use spectrum::{EntropyReport, OccupationSpectrum};
