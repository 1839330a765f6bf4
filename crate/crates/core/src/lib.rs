//! Exact localization computations for stationary open Gromov-Witten invariants
//! of the pair (CP^1, RP^1).

pub mod bc_volume;
pub mod combinat;
pub mod error;
pub mod exactalg;
pub mod fixed_point;
pub mod genus0;
pub mod higher_genus;
pub mod oracles;
pub mod polytope;
pub mod psi_hodge;
pub mod spec_core;
pub mod suites;

pub use error::{Error, Result};
pub use exactalg::{Laurent, Rational};
pub use spec_core::{DescendentProblem, ModuliSpec, Sign, SpecComponent};
