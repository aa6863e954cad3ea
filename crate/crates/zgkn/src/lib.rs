//! Bound states of the Dirac operator on the zero-G Kerr-Newman spacetime.
//!
//! After separation of variables and a Prüfer transform, the angular and
//! radial equations become two flows on finite cylinders. Eigenvalues are the
//! parameter values at which the unstable manifold of the left saddle joins a
//! lift of the right saddle, and the lift shift (winding number) labels the
//! state. The crate finds those connectors by shooting and bisection, couples
//! the two searches in a contracting fixed-point iteration, and checks every
//! computable limit against closed forms.
//!
//! Units: `m = ħ = c = 1` throughout. Energies are fractions of `mc²`.
//!
//! ```
//! use zgkn::params::{ModelParams, WindingTarget};
//! use zgkn::solver::{solve_pair, SolveOptions};
//!
//! let params = ModelParams::new(1e-3, -0.3, 0.5);
//! let state = solve_pair(&params, WindingTarget::new(0, 0), &SolveOptions::default()).unwrap();
//! assert!((state.energy - (1.0f64 - 0.09).sqrt()).abs() < 1e-2);
//! assert_eq!(state.label.to_string(), "1s1/2");
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cylinder;
pub mod error;
pub mod integrator;
pub mod omega_system;
pub mod oracles;
pub mod params;
pub mod solver;
pub mod theta_system;
pub mod wavefunction;

pub use error::{Error, Result};
