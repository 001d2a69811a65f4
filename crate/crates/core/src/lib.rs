//! Exact finite and affine crystallographic root systems, Coxeter diagrams,
//! and reflection subgroups of Euclidean reflection groups.
//!
//! All arithmetic is exact (`i128` rationals). The crate is organized
//! bottom-up:
//!
//! * [`rootsys`]: finite root systems, reflections, lowest roots, Weyl orders.
//! * [`diagram`]: Coxeter diagrams, catalog classification, special nodes,
//!   isomorphisms and canonical forms.
//! * [`affine`]: affine roots, alcoves, chambers, exact volumes.
//! * [`subsystems`]: reflection subgroups of finite reflection groups.
//! * [`subgroups`]: reflection subgroups of affine reflection groups.
//! * [`manifest`], [`verify`], [`json`]: expected values, verification
//!   report and the serialized schema.

pub mod affine;
pub mod diagram;
pub mod error;
pub mod json;
pub mod linalg;
pub mod manifest;
pub mod rootsys;
pub mod subgroups;
pub mod subsystems;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{Vector, Q};
