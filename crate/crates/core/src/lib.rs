//! Pseudospectral parametric Willmore flow of immersed tori.
//!
//! The torus is parametrized over `[0,1)^2` through the chart `w = x1 + tau * x2`,
//! with the flat unit-volume metric `h = b^{-1} |dw|^2`. Immersions into `R^m`
//! are stored as nodal samples and differentiated spectrally.

pub mod dbar;
pub mod diagnostics;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod moduli;
pub mod surfaces;
pub mod willmore;

pub use num_complex::Complex64;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("grid size {0} must be even and at least 8")]
    BadGrid(usize),
    #[error("invalid modulus a = {a}, b = {b}")]
    BadModulus { a: f64, b: f64 },
    #[error("field mean {mean:e} is not zero")]
    NonZeroMean { mean: f64 },
    #[error("immersion degenerates at node ({i1}, {i2})")]
    DegenerateImmersion { i1: usize, i2: usize },
    #[error("right-hand side has mean {mean:e}; the dbar equation is not solvable")]
    NonSolvable { mean: f64 },
    #[error("conformal class degenerates (b = {b:e})")]
    SingularModulus { b: f64 },
    #[error("step rejected: {0}")]
    StepRejected(String),
    #[error("reprojection failed at defect {defect:e}")]
    ReprojectionFailed { defect: f64 },
    #[error("no admissible radius: concentration {energy} exceeds beta at R = {radius:e}")]
    NoAdmissibleR { radius: f64, energy: f64 },
    #[error("bad parameters: {0}")]
    BadParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;
