//! Earthquake and Teichmüller-horocycle flows on exactly computable models of
//! Teichmüller space.
//!
//! Two models are provided:
//!
//! * the flat torus, where a point of Teichmüller space is `τ` in the upper
//!   half-plane and extremal lengths have a closed form ([`torus`]);
//! * the once-punctured torus with a complete hyperbolic metric, coordinatized
//!   by Markov trace triples ([`ptorus`]).
//!
//! On top of these sit unit-area quadratic differentials and the horocycle
//! flow ([`qd`]), projective boundary machinery ([`boundary`]) and trajectory
//! orchestration ([`flow`]). Everything here is pure and allocation-only; IO
//! lives in the companion `teichflow-lab` crate.

#![no_std]
// `!(x < y)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod error;
pub mod flow;
pub mod ptorus;
pub mod qd;
pub mod slopes;
pub mod torus;

pub use boundary::ProjectiveVector;
pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowTrace};
pub use ptorus::MarkovTriple;
pub use qd::MarkedQuadDiff;
pub use slopes::{CurveFamily, FoliationVector, MappingClass, Slope};
pub use torus::TorusPoint;
