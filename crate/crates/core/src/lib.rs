//! Split-form discontinuous Galerkin spectral element laboratory for the
//! one-dimensional variable-speed advection equation
//!
//! ```text
//! u_t + (a(x) u)_x = θ a_x u,      a(x) > 0
//! ```
//!
//! where `θ = 0` is the conservative equation and `θ = 1` the
//! non-conservative one. The crate builds Gauss-Lobatto and Gauss nodal
//! operators, assembles the global semi-discrete operator `dU/dt = G U`,
//! computes its spectrum with a dense nonsymmetric eigensolver, marches it in
//! time with RK4, and checks the discrete `a`-norm and `1/a`-norm energy
//! estimates together with the aliasing coefficient `γ`.
//!
//! Data-parallel loops (element assembly, random-state property checks,
//! parameter sweeps) go through [`Execution`]; with the `parallel` feature
//! disabled every policy runs sequentially.

pub mod assembly;
pub mod eigen;
mod error;
mod exec;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod spectra;
pub mod speed;
pub mod timeint;

pub use assembly::{assemble, BoundaryCondition, GlobalOperator, LinearDynamics, Mesh};
pub use error::{Error, Result};
pub use exec::Execution;
pub use norms::{EnergyNorm, GammaCoefficient, WeightedNorm};
pub use operators::{
    ElementOperators, EquationForm, FluxKind, OverIntegration, OverIntegrationSpeed, SplitConfig,
};
pub use quadrature::{DerivativeMatrix, NodeFamily, QuadratureRule};
pub use spectra::{Spectrum, StabilityReport};
pub use speed::{AdvectionSpeed, Speed};
pub use timeint::{EnergyTrace, MarchOptions, MarchOutcome};
