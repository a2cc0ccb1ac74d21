//! Error type shared across the crate.

use std::fmt;

/// Errors produced by mesh construction, assembly, and the solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Mesh construction was given no elements or a non-increasing node list.
    InvalidMesh(String),
    /// Thickness outside the admissible range `[0, 1]`.
    InvalidThickness(f64),
    /// Basis evaluation at a point outside the closed element.
    PointOutsideElement { x: f64, a: f64, b: f64 },
    /// Unknown boundary condition tag; expected one of cc, cs, cf, ss.
    UnknownBoundaryCondition(String),
    /// The local test Gram matrix of an element is not positive definite.
    SingularGram { element: usize },
    /// The global matrix lost positive definiteness at the given pivot.
    NotPositiveDefinite { pivot: usize },
    /// The 4x4 boundary-condition system for the exact solution is singular.
    SingularBoundarySystem,
    /// Rate estimation needs at least two records with distinct mesh sizes.
    NotEnoughRecords,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidMesh(msg) => write!(f, "invalid mesh: {msg}"),
            Error::InvalidThickness(t) => {
                write!(f, "thickness {t} outside the admissible range [0, 1]")
            }
            Error::PointOutsideElement { x, a, b } => {
                write!(f, "point {x} outside element [{a}, {b}]")
            }
            Error::UnknownBoundaryCondition(s) => {
                write!(
                    f,
                    "unknown boundary condition {s:?}; expected cc, cs, cf, or ss"
                )
            }
            Error::SingularGram { element } => {
                write!(
                    f,
                    "test Gram matrix of element {element} is not positive definite"
                )
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "global matrix is not positive definite at pivot {pivot}")
            }
            Error::SingularBoundarySystem => {
                write!(
                    f,
                    "boundary-condition system for the exact solution is singular"
                )
            }
            Error::NotEnoughRecords => {
                write!(
                    f,
                    "rate estimation needs at least two records with distinct mesh sizes"
                )
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
