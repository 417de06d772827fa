//! Split quaternionic analysis: exact Laurent-type function ring over 2x2
//! complex matrices, SU(1,1) discrete-series matrix coefficients, the
//! conformal Lie algebra action, the invariant pairing, reproducing kernels
//! and equivariant projectors.

pub mod coefficients;
pub mod error;
pub mod kernels;
pub mod laurent;
pub mod lie_action;
pub mod matrix;
pub mod pairing;
pub mod projectors;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod suites;

pub use coefficients::{
    basis_element, classify_component, enumerate_basis, tau, Bounds, CoeffIndex, ComponentLabel, Series,
};
pub use error::*;
pub use laurent::{Homogeneity, LaurentElement, Var};
pub use matrix::{Mat2, MatrixHC, PointHC};
pub use scalar::{Field, GaussianRational, Ring};
