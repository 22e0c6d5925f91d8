//! Photodetection with vacuum-mode back-action.
//!
//! A two-level detector is driven by a coherent laser mode and damped into
//! an electronic reservoir (which carries the photocurrent) and a radiative
//! vacuum reservoir. The crate provides:
//!
//! - [`analytic`]: Markov closed forms for the mean current, its variance and
//!   its two-time correlation.
//! - [`kernels`]: the time kernels of the formal solution.
//! - [`oracle`]: an exact finite-mode reference that certifies the closed forms.
//! - [`cavity`]: the bad-cavity branching ratio and efficiency sweeps.
//! - [`run`]: config files, result records and the command implementations
//!   behind the `vacdetect` binary.

pub mod analytic;
pub mod cavity;
pub mod error;
pub mod fit;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod run;

pub use error::{Error, Result};
pub use model::{validate, DetectorSpec, DriveSpec, ReservoirKind, ReservoirSpec, SystemSpec};
