//! Exact steady states of generalized exclusion processes.
//!
//! Particle hops, boundary injection/extraction and Langmuir kinetics on a
//! 1-D lattice are modeled as a probabilistic logical network: every
//! transition is a vector of per-site logical functions, each function
//! compiles to a structure matrix, the Khatri-Rao product composes them into
//! a whole-transition matrix, and the rate-weighted sum of those gives the
//! column-stochastic transition matrix whose fixed point is the stationary
//! distribution. A seeded Monte Carlo simulator of the same chain serves as
//! an independent cross-check.
//!
//! Numeric code is generic over the scalar type (any [`Scalar`], i.e. `f32`
//! or `f64`); the `*64` aliases at the crate root pick `f64`.
//!
//! ```
//! use stpx_core::{
//!     assemble, standard_transition, steady_state, LatticeSpec, Method, ModelSpec64,
//!     Restriction, SolveOptions, TransitionKind,
//! };
//!
//! # fn main() -> stpx_core::Result<()> {
//! let lattice = LatticeSpec::new(2, 2)?;
//! let transitions = vec![
//!     standard_transition(&TransitionKind::LeftEntry, &lattice, 0.2)?,
//!     standard_transition(&TransitionKind::RightExit, &lattice, 0.3)?,
//!     standard_transition(&TransitionKind::HopRight { site: 1 }, &lattice, 0.5)?,
//! ];
//! let model = ModelSpec64::new(lattice, transitions, Restriction::None)?;
//! let matrix = assemble(&model)?;
//! let report = steady_state(&matrix, Method::Power, &SolveOptions::default())?;
//! assert!((report.distribution.probs()[0] - 0.16).abs() < 1e-9);
//! # Ok(())
//! # }
//! ```

pub mod algebra;
pub mod error;
pub mod logic;
pub mod mc;
pub mod model;
pub mod observables;
pub mod scalar;
pub mod solve;
pub mod state;
pub mod stochastic;

pub use algebra::dense::{stp_dense, DenseMatrix};
pub use algebra::logical::{stp_logical, LogicalMatrix};
pub use algebra::structure::{structure_matrix, table1_matrix, transition_structure_matrix};
pub use error::{Error, Result};
pub use logic::{
    build_clear_function, build_mv_function, build_set_function, sigma_gate, standard_transition,
    ConditionSet, MvFunction, TransitionKind, TransitionSpec,
};
pub use mc::{simulate, simulate_with_threads, total_variation, EmpiricalDistribution, SimConfig};
pub use model::{allowable_states, normalize_rates, verify_closed, ModelSpec, Restriction};
pub use observables::{density_profile, site_current, DensityMatrix};
pub use scalar::Scalar;
pub use solve::{solve_steady_state, steady_state, Method, SolveOptions, SolveReport};
pub use state::{booleanize, debooleanize, LatticeSpec, State};
pub use stochastic::{assemble, restrict, Distribution, StateOrdering, StochasticMatrix};

/// `f64` aliases for the scalar-generic types.
pub type DenseMatrix64 = DenseMatrix<f64>;
pub type TransitionSpec64 = TransitionSpec<f64>;
pub type ModelSpec64 = ModelSpec<f64>;
pub type StochasticMatrix64 = StochasticMatrix<f64>;
pub type Distribution64 = Distribution<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type SolveReport64 = SolveReport<f64>;

/// `f32` aliases, for workloads where a coarse solve is enough.
pub type DenseMatrix32 = DenseMatrix<f32>;
pub type TransitionSpec32 = TransitionSpec<f32>;
pub type ModelSpec32 = ModelSpec<f32>;
pub type StochasticMatrix32 = StochasticMatrix<f32>;
pub type Distribution32 = Distribution<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
