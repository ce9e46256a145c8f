//! A laboratory for geodesic and vertical periods of automorphic forms on
//! the modular surface `PSL2(Z) \ H`.
//!
//! The crate enumerates cusp double cosets and hyperbolic conjugacy classes,
//! builds the bipartite graph joining them, evaluates holomorphic, Maass and
//! Eisenstein forms, integrates them along closed geodesics and vertical
//! lines, and provides the statistics used to study the resulting periods.

pub mod automorphic;
pub mod binary_form;
pub mod cache;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod hyperbolic;
pub mod periods;
pub mod quadratic;
pub mod quadrature;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
