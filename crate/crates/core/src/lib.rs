//! Casimir energies of a relativistic perfect fluid in a D-dimensional
//! hypercube with Dirichlet or Neumann walls, evaluated in arbitrary decimal
//! precision and checked against a brute-force regularized mode sum.
//!
//! All energies are expressed in units of β = v/L.

pub mod analysis;
pub mod arithmetic;
pub mod cli;
pub mod energy;
pub mod error;
pub mod oracle;
pub mod specfun;

pub use arithmetic::{const_pi, to_sig_digits, PrecisionContext, Real};
pub use energy::{dirichlet_energy, neumann_energy, BoundaryCondition, EnergyResult, EnergySign};
pub use error::{Error, Result};
