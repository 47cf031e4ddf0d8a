//! Carnot–Carathéodory metric quantities on model hypersurfaces
//! bΩ = {Im z₂ = P(z₁)} ⊂ ℂ², for subharmonic non-harmonic P.
//!
//! The crate computes the global structure Λ(p,δ) by stockyard
//! optimization, decomposes control paths into simple cycles with
//! Green's-theorem masses, certifies uniform-global-structure conditions,
//! and estimates large-scale distances and ball volumes.

pub mod control;
pub mod cycle;
pub mod error;
pub mod geometry;
pub mod metric;
pub mod potential;
pub mod quadrature;
pub mod stockyard;
pub mod ugs;

pub use control::{BoundaryPoint, ControlPair, Orientation};
pub use error::{CcError, Result};
pub use potential::{PotentialField, PotentialSpec, TRegime};
pub use stockyard::{Pen, Stockyard, Strategy};
pub use ugs::{UgsReport, Verdict};

pub use num_complex::Complex64;
