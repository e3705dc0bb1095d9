//! Numerical toolkit for half-harmonic maps in one dimension.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: sampling grids on the truncated line and on the circle, the
//!   [`Field`] type shared by every operator, interpolation and field I/O.
//! - [`fracops`]: fractional Laplacians (spectral and singular-integral routes),
//!   the Riesz transform, the inverse quarter Laplacian and the Poisson kernels
//!   of the line and the circle.
//! - [`norms`]: discrete `L^p`, Lorentz `L^{2,1}` / `L^{2,∞}` and `Ḣ^{1/2}` norms.
//! - [`commutators`]: the compensated bilinear operators `T`, `S`, `F`, `Λ`.
//! - [`pohozaev`]: verifiers for the Pohozaev identities on the line, the circle
//!   and the plane, and the `M±` integral operators.
//! - [`stereo`]: stereographic transfer between line and circle fields.
//! - [`halfharmonic`]: energy, Euler–Lagrange and horizontality residuals, a
//!   projected gradient flow, Möbius compositions and the bubbling experiment.
//! - [`counterexample`]: the non-quantization example built from two explicit
//!   profiles and its neck diagnostics.
//! - [`acceptance`]: the end-to-end acceptance checks, shared by the test suite
//!   and the `selftest` command.

pub mod acceptance;
pub mod commutators;
pub mod counterexample;
pub mod error;
pub mod fit;
pub mod fracops;
pub mod geometry;
pub mod halfharmonic;
pub mod norms;
pub mod pohozaev;
pub mod quadrature;
pub mod spectral;
pub mod stereo;

pub use error::{Error, Result};
pub use fracops::Convention;
pub use geometry::{CircleGrid, Field, FracExponent, Grid, LineGrid, TailModel};
pub use halfharmonic::{FlowOptions, FlowState, NeckReport, PlaneDistribution, SphereDistribution};
pub use norms::Region;
pub use pohozaev::{PlaneField, PohozaevReport};

/// Crate version, embedded in every machine-readable report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
