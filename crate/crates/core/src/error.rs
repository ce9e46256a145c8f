//! Error type shared by every module of the library.

use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix has determinant {0}, expected 1")]
    Determinant(i128),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(i128),
    #[error("axis is vertical (c = 0)")]
    VerticalAxis,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("fundamental-domain reduction did not finish within {0} steps")]
    ReductionCap(usize),
    #[error("need M >= {needed} coefficients, have {have}")]
    InsufficientCoefficients { needed: usize, have: usize },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("malformed Maass file: {0}")]
    MalformedFile(String),
    #[error("Maass file failed its self-check: {0}")]
    SelfCheck(String),
    #[error("vertex {0} with positive mass has no edges")]
    IsolatedMass(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("composition closure failure for D = {0}")]
    Composition(i128),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
