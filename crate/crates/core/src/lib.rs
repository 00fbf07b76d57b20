//! Finite unit-norm frames and their coherence parameters.
//!
//! The crate builds eight deterministic and randomized frame families,
//! measures worst-case coherence μ, average coherence ν, and the spectral
//! norm, evaluates lower bounds on achievable coherence, searches for
//! sign-flip patterns that shrink ν without touching μ, and runs sparse
//! recovery and weak restricted-isometry experiments on top of the same
//! frames.
//!
//! ```
//! use frame_forge_core::constructions::chirp;
//! use frame_forge_core::coherence::{average_coherence, worst_case_coherence};
//!
//! let f = chirp(5).unwrap();
//! let mu = worst_case_coherence(&f).unwrap();
//! assert!((mu - 1.0 / 5.0f64.sqrt()).abs() < 1e-12);
//! assert!((average_coherence(&f).unwrap() - 1.0 / 6.0).abs() < 1e-12);
//! ```

// range guards are written !(x > 0.0) so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence;
pub mod constructions;
pub mod designs;
pub mod equivalence;
pub mod error;
pub mod frame;
pub mod gf2m;
pub mod rng;
pub mod sparse;

pub use coherence::{BoundRow, BoundTable, CoherenceReport, ScpFlags, SufficientConditions};
pub use constructions::{ConstructionDescriptor, Family, HarmonicSelection};
pub use error::{FrameError, Result};
pub use frame::{Frame, GramMatrix};
pub use num_complex::Complex64;
