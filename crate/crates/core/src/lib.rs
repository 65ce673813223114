//! Temporal second-order coherence `g²(τ)` of displaced-squeezed thermal
//! states prepared and evolved by a degenerate parametric amplifier.
//!
//! - [`gaussian`]: state parameters, amplifier inversion, displaced amplitude.
//! - [`coherence`]: closed-form photon number and `g²`, with the `r = 0`
//!   and `α = 0` limits and the long-lag asymptote.
//! - [`analysis`]: classical-inequality regimes, crossings, minima, and the
//!   optimal displacement.
//! - [`fock`]: brute-force truncated Fock-space evaluation used to check the
//!   closed forms.

pub mod analysis;
pub mod coherence;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod numerics;

pub use coherence::CoherencePoint;
pub use error::{Error, Result};
pub use gaussian::{AmplitudeForm, DpaParams, GaussianParams};
