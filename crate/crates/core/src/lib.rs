//! Exact rational computations with first-order differential calculi, Cartan
//! pairs (noncommutative vector fields), their differential operators and
//! connections, over finite-dimensional algebras given by structure constants.

pub mod algebra;
pub mod builtins;
pub mod calculus;
pub mod cartan;
pub mod connections;
pub mod diffops;
pub mod error;
pub mod linalg;
pub mod report;

pub use algebra::{Algebra, Bimodule, BimoduleMap, DualBimodule, LeftModule, Side};
pub use calculus::{DifferentialCalculus, UniversalCalculus};
pub use cartan::{CartanPair, CoUniversalPair};
pub use connections::Connection;
pub use diffops::{FreeWord, Letter};
pub use error::{Error, Result};
pub use linalg::{Matrix, Rational, Subspace, Vector};
pub use report::{Law, Report, Slot, Violation};
