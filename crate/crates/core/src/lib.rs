//! Curve shortening flow near the Abresch-Langer self-similar curves.
//!
//! Curves are described by their support function `h(θ)` on `[0, 2mπ]`,
//! where `m` is the rotation index. The crate builds the stationary profiles
//! `h_{m,n}` (which satisfy `h (h + h_θθ) = 1`), perturbs them with the
//! area-preserving family `h_ε`, and evolves them under the unnormalized flow
//! `h_t = -1/(h + h_θθ)` or the area-normalized flow `h̃_τ = h̃ - κ̃`,
//! monitoring the entropy-type functionals along the way.
//!
//! Module map:
//!
//! * [`spectral`]: periodic grids, Fourier differentiation and quadrature.
//! * [`al_profile`]: shooting plus collocation-Newton construction of `h_{m,n}`.
//! * [`flow`]: method-of-lines integration and run control.
//! * [`functionals`]: area, arc length, entropies, width and diagnostics.
//! * [`geometry`]: curve reconstruction and leaf areas.

pub mod al_profile;
pub mod error;
pub mod flow;
pub mod functionals;
pub mod geometry;
mod ode;
pub mod spectral;

pub use al_profile::{ALProfile, CurveClass, PerturbedProfile, ShootingResult};
pub use error::{Error, Result};
pub use flow::{FlowState, Frame, Representation, RunConfig, RunOutcome, Verdict};
pub use functionals::DiagnosticsRecord;
pub use geometry::{CurveSample, LeafGeometry};
pub use spectral::{Grid, PeriodicProfile, ProfileKind};
