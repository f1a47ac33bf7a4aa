//! Finite-precision computer algebra for p-adic Hodge theory at desk scale.
//!
//! The crate is organised in layers. `padic`, `tower` and `matrix` provide
//! precision-tracked scalars over Q_p, monogenic quotient rings approximating
//! rings of integers, and Smith-normal-form linear algebra over Z/p^M.
//! `witt` implements p-typical and big Witt vectors over pluggable
//! coefficient rings. `tilt` and `period` build the characteristic-p tilt
//! and the Witt-vector period ring with its theta map, kernel generator and
//! logarithm elements. `robba` is a truncated Laurent-series model of the
//! Robba ring carrying the Frobenius and Gamma substitutions, and `phigamma`
//! computes Herr-complex cohomology, cup products, duality pairings, slopes
//! and extensions of (phi,Gamma)-modules built on top of it. `experiment`
//! drives reproducible check tables for the command-line binary.

pub mod error;
pub mod experiment;
pub mod matrix;
pub mod padic;
pub mod period;
pub mod phigamma;
pub mod profile;
pub mod robba;
pub mod tilt;
pub mod tower;
pub mod witt;

pub use error::{Error, Result};
pub use profile::Profile;
