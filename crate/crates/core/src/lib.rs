//! Numerical spectral geometry for low-dimensional tori, at desk scale.
//!
//! The crate builds finite-rank truncations of Dirac-type operators in three
//! settings — constant-metric "quantum torus" mode decompositions, circle and
//! two-torus Dirac operators for variable Fourier-polynomial metrics, and
//! finite-triple products — and provides the analysis layer used to study how
//! their spectra move when the metric moves:
//!
//! * eigenvalue counts in a window `[-Λ, Λ]` and their stabilization along a
//!   metric sweep,
//! * Hausdorff distance between window-restricted spectra,
//! * labeled (sorted, signed) eigenvalue deviations,
//! * a certified first-order deviation bound `r_g(h)` with the graph-norm
//!   constant `Q(g)` it depends on, and
//! * quantitative distance upper bounds (tunnel extent, semigroup slope, time
//!   horizon, and the `5Kε` headline bound) driven by measured deviations.
//!
//! Numerical conventions are fixed once, crate-wide:
//!
//! * matrices are dense `ndarray` arrays over `Complex64`; Hermiticity is a
//!   validated invariant ([`HermitianMatrix`]);
//! * eigenvalues come from LAPACK's `zheevd`/`dsyev` (Householder
//!   tridiagonalization + a deterministic dense solver), always ascending;
//! * Fourier-side truncations retain modes with `‖n‖∞ ≤ N`; grids are uniform
//!   with resolution at least four times the largest retained index so that
//!   sup-norms and convolution coefficient tables are alias-safe.
//!
//! The five analysis entry points most users want are re-exported at the
//! crate root; everything else lives in the topical modules below.

pub mod analysis;
pub mod bound;
pub mod clifford;
pub mod error;
pub mod fourier;
pub mod frames;
pub mod linalg;
pub mod metric;
pub mod product;
pub mod qtorus;
pub mod riemann;

pub use analysis::{convergence_report, hausdorff, ConvergenceReport};
pub use bound::{propinquity_upper_bound, BoundReport, DeviationEstimates};
pub use clifford::CliffordRep;
pub use error::{Error, Result};
pub use frames::InnerProduct;
pub use linalg::{CMatrix, HermitianMatrix, RMatrix, Spectrum};
pub use metric::MetricField;
pub use qtorus::TorusTripleSpec;
pub use riemann::{assemble_dirac, DiracAssembly, SpinStructure};
