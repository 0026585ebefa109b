//! Genuine tripartite nonlocality of three-qubit states through eigenvalue
//! bounds on the Svetlichny expectation value.
//!
//! The pipeline reduces a three-qubit state to a two-qubit marginal, measures
//! the marginal's nonlocality against a CHSH witness, and turns a handful of
//! spectral quantities into lower and upper bounds on `<S_v>`. A multi-start
//! optimizer over measurement directions serves as an independent check.

pub mod bounds;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod nonlocality;
pub mod operators;
pub mod optimizer;
pub mod reproduce;
pub mod sampling;
pub mod statefile;
pub mod states;

#[cfg(test)]
mod cross_check_tests;

pub use bounds::{detect_genuine, BoundConfig, BoundsReport, DetectOptions, Intermediates, Outcome, Verdict};
pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{ComplexMatrix, EigenSpectrum};
pub use nonlocality::{NonlocalityStrength, Regime};
pub use operators::{ChshSettings, Plane, SvetlichnySettings, UnitVector3};
pub use optimizer::{OptimizerConfig, Optimum};
pub use states::{DensityMatrix, ExampleFamily, Pair, ReferenceState, Subsystem};
