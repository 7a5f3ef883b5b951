//! Adaptive rational approximation in weighted Bergman spaces.
//!
//! The library implements pre-orthogonal adaptive Fourier decomposition
//! (POAFD) for two reproducing-kernel Hilbert spaces of holomorphic
//! functions: the weighted Bergman spaces A^2_alpha on the unit disc
//! (alpha > -1) and the Bergman space A^2 on the upper half-plane.
//!
//! The decomposition greedily expands a target function over parameterized
//! reproducing kernels. Repeated parameter selections are meaningful: the
//! n-th repetition of a point contributes the (n-1)-st derivative kernel,
//! so the orthonormalized system stays well defined without ever forming
//! the residual function explicitly. All inner products reduce to closed
//! kernel formulas, which is what makes the method "pre-orthogonal".
//!
//! Module map:
//! - [`space`]: space descriptors and domain guards
//! - [`kernels`]: reproducing kernels, derivative kernels, closed-form inner products
//! - [`quadrature`]: numerical integration rules used as an independent check
//! - [`funcspace`]: target-function representations, pairings and norms
//! - [`orthosystem`]: Gram-Schmidt systems over generalized kernels
//! - [`poafd`]: maximal selection and the decomposition loop
//! - [`invariant`]: zero-based products and invariant-subspace diagnostics
//! - [`analysis`]: coefficient norms, membership and inclusion probes
//! - [`halfplane`]: upper half-plane entry points

pub mod analysis;
pub mod error;
pub mod funcspace;
pub mod halfplane;
pub mod invariant;
pub mod kernels;
pub(crate) mod math;
pub mod orthosystem;
pub mod poafd;
pub mod quadrature;
pub mod space;

pub use error::{Error, Result};
pub use funcspace::{inner_product, MixTerm, TargetFunction, TargetSpec};
pub use kernels::{kernel_eval, kernel_inner, kernel_norm_squared, normalized_kernel, KernelRef};
pub use orthosystem::BroSystem;
pub use poafd::{
    decompose, objective_profile, select_next, selection_objective, DecomposeConfig,
    Decomposition, GridSpec, IterationRecord, SelectionConfig, StopReason,
};
pub use space::{Geometry, SpaceSpec};

pub use num_complex::Complex64;
