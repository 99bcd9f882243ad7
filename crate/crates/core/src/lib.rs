//! Exact homological algebra for finitely generated modules and bounded
//! complexes over finite-dimensional algebras over prime fields.

pub mod algebra;
pub mod cohomology;
pub mod complex;
pub mod error;
pub mod io;
pub mod linalg;
pub mod linsys;
pub mod module;
pub mod par;
pub mod gorenstein;
pub mod resolution;
pub mod verify;

pub use error::{Error, Result};
