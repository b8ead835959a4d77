//! Fast-slow actor-critic mean dynamics on an enlarged phase space.
//!
//! The toolkit simulates and verifies the coupled evolution of three state
//! variables: an actor parameter `θ` driving a softmax policy, a critic
//! state `w` driven by a coercive linear regression equation, and a state
//! law `μ` (a probability vector over a finite state space) that follows
//! the forward equation of the controlled Markov chain on a fast timescale
//! `1/δ`:
//!
//! ```text
//! θ̇ = D(θ) G̃(θ, w, μ)
//! ẇ = b(θ, μ) − A(θ, μ) w
//! δ μ̇ = Q_θ* μ
//! ```
//!
//! Everything needed to study this system at desk scale is here:
//!
//! - [`model`] evaluates the algebraic pieces (policy, occupancy, critic
//!   data, actor field, damping) and the exact and reduced vector fields;
//! - [`markov`] handles generator families, matrix exponentials,
//!   stationary laws, mixing and minorization constants, and pathwise
//!   propagators for the non-autonomous fast equation;
//! - [`integrate`] runs fixed-step RK4 or adaptive RK45 integrations of
//!   the exact, reduced, and lifted-reduced semiflows with simplex/box
//!   guards;
//! - [`analysis`] reproduces the tracking and attractor experiments and
//!   assembles the constants ledger;
//! - [`config`] and [`output`] read model configurations and write the
//!   CSV artifacts; [`cli`] wires it all into a command-line tool.
//!
//! # Example
//!
//! Evaluate the exact vector field of the builtin two-state model at the
//! center of its absorbing set and integrate it to the interior
//! equilibrium:
//!
//! ```
//! use fastslow::config::builtin_two_state;
//! use fastslow::integrate::{integrate_exact, IntegratorConfig};
//! use fastslow::model::{exact_vector_field, PhasePoint};
//! use nalgebra::DVector;
//!
//! let model = builtin_two_state();
//! let x0 = PhasePoint::new(
//!     DVector::from_vec(vec![0.0]),
//!     DVector::from_vec(vec![0.0]),
//!     DVector::from_vec(vec![0.5, 0.5]),
//!     &model,
//! )?;
//!
//! let tangent = exact_vector_field(&x0, 2.0, &model)?;
//! assert!((tangent.dtheta[0] - 0.375).abs() < 1e-12);
//! assert!((tangent.dw[0] - 0.375).abs() < 1e-12);
//!
//! let config = IntegratorConfig::fixed_rk4(0.01);
//! let trajectory = integrate_exact(&model, &x0, 2.0, 40.0, &config)?;
//! let last = trajectory.points.last().unwrap();
//! assert!((last.theta[0] - 0.59).abs() < 0.02);
//! # Ok::<(), fastslow::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod integrate;
pub mod markov;
pub mod model;
pub mod output;

pub use error::{Error, Result};
