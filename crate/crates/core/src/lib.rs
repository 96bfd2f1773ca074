//! Probability of unique localizability for collaborative positioning in
//! Poisson-distributed wireless networks.
//!
//! The library has two independent routes to every headline quantity:
//!
//! * an analytic route ([`analytic`]) that evaluates closed-form /
//!   quadrature expressions built from exact planar geometry
//!   ([`geometry`]) and Poisson point process distance distributions
//!   ([`pointprocess`]), and
//! * a stochastic-geometry Monte Carlo route ([`analytic::mc`]) that
//!   samples whole network realizations ([`propagation`]) and evaluates
//!   graph-theoretic localizability predicates ([`rigidity`]) per trial.
//!
//! The Monte Carlo route is the ground truth against which every analytic
//! approximation is validated. [`oracles`] holds additional brute-force
//! reference implementations used by the test suites and the CLI.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod oracles;
pub mod pointprocess;
pub mod propagation;
pub mod quad;
pub mod rigidity;
pub mod rng;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
