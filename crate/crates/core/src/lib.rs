//! Numerical toolkit for studying how well split-step integrators of the
//! two-dimensional Gross-Pitaevskii equation
//!
//! ```text
//! dψ/dt = (i/2) Δψ + (i/2) (1 - |ψ|²) ψ
//! ```
//!
//! preserve a steady straight vortex `ψ₀ = √ρ(r) e^{iθ}`.
//!
//! The crate is organised bottom-up:
//!
//! * [`pade`]: diagonal Padé approximations `ρ_q` of the vortex density
//!   (q = 2, 3, 4) with exact residual analysis.
//! * [`bvp`]: finite-difference solution of the compactified profile
//!   equation, giving a tabulated reference density.
//! * [`grid`]: uniform and geometrically stretched grids with trapezoidal
//!   weights.
//! * [`fd`] and [`krylov`]: nonuniform finite-difference Laplacian, its
//!   weight symmetrisation and a Lanczos exp-action propagator.
//! * [`spectral`]: mirrored Fourier representation, exact kinetic flow,
//!   off-grid evaluation and the regularity study.
//! * [`dynamics`]: Strang splitting, vortex initial data, error metric,
//!   preservation runs.
//! * [`experiment`]: CSV-producing drivers used by the `gpvortex` binary.
//! * [`verify`]: executable acceptance checks.

// Range checks are written as `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bvp;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod fd;
mod fft2;
pub mod grid;
pub mod krylov;
pub mod pade;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num::complex::Complex64;
