//! Three engines for the same one-dimensional discrete-time walk, plus the
//! analysis toolkit used to compare them.
//!
//! * [`quantum`] evolves the walk exactly by tracking complex amplitudes.
//!   It is the reference the stochastic engines are measured against.
//! * [`boxball`] emulates the walk with integer ball counts and one phase
//!   tag per box, using randomized rounding where amplitudes would split.
//! * [`activespin`] recasts the ball ensemble as density-coupled spin
//!   flips and biased hops; at hop rate 0.5 and full bias it reproduces the
//!   box engine step for step.
//! * [`analysis`] holds distributions, distance measures, spreading
//!   moments, convergence sweeps and multi-trial aggregation.
//!
//! Randomness is always drawn from [`rng`] streams so that every run is
//! reproducible from a `(seed, stream)` pair.

pub mod activespin;
pub mod analysis;
pub mod boxball;
pub mod coin;
pub mod error;
mod mixing;
pub mod quantum;
pub mod rng;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
