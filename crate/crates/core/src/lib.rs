//! Rate-distortion-equivocation analysis for semantic sources transmitted
//! over degraded wiretap channels.
//!
//! The model: an intrinsic (semantic) state `S` is observed through a noisy
//! sensor as `U`; an encoder describes the pair over a main channel to a
//! legitimate receiver while an eavesdropper taps a degraded output. The
//! quantities of interest form tuples
//! `(R, R_k, D_s, D_u, delta_s, delta_u, delta_su)`:
//! channel uses per source symbol, secret-key rate, semantic and observation
//! distortions, and the eavesdropper's residual uncertainty (equivocation)
//! about `S`, `U`, and the pair.
//!
//! Module map:
//! - [`gauss`]: jointly Gaussian source and Gaussian wiretap channel closed
//!   forms (rate-distortion functions, capacities, differential entropies).
//! - [`outer`]: converse region evaluation and boundary tracing for the
//!   Gaussian model.
//! - [`inner`]: achievable region via a layered linear-Gaussian scheme, with
//!   a derivative-free parameter optimizer and boundary tracing.
//! - [`discrete`]: exact finite-alphabet counterparts — entropy/mutual
//!   information, Blahut-Arimoto solvers for classic/bivariate/semantic
//!   rate-distortion functions, channel and secrecy capacities, and both
//!   region checkers.
//! - [`mc`]: Monte Carlo validation of the linear-Gaussian scheme against
//!   its closed forms.
//!
//! All internal computation is in nats. [`units::LogBase`] converts at the
//! boundary; consumers that report in bits divide by `ln 2`.

pub mod discrete;
pub mod gauss;
pub mod inner;
pub mod mc;
pub mod outer;
pub mod region;
pub mod units;

mod optim;

pub use region::{FeasibilityReport, RegionPoint, SecrecyMode, Slack, TraceGrid};
pub use units::LogBase;
