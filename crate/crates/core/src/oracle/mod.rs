//! Independent checks: time-domain Markovian Bloch equations, the quantum
//! regression spectrum, and kernel transforms by quadrature.
//!
//! The regression theorem only holds for a memoryless reservoir, so the
//! time-domain oracles accept free-space parameters only.

pub mod bloch_ode;
pub mod kernel_check;
pub mod quad;
pub mod regression;

pub use bloch_ode::{integrate_markovian_bloch, BlochTrajectory, BlochVector, MarkovianGenerator};
pub use kernel_check::{kernel_from_dos, kernel_transform_check, KernelCheckOptions, KernelCheckReport};
pub use regression::{regression_spectrum, RegressionOptions, RegressionSpectrum};
