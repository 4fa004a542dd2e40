//! Cantor-set dynamical systems, represented dually as towers of finite systems.
//!
//! A homeomorphism of the Cantor set is an automorphism of its Boolean algebra of
//! clopen sets; every finite clopen partition carries a finite dynamical system,
//! and the whole system is the inverse limit of these. This crate works entirely
//! on that finite side:
//!
//! - [`findyn`]: finite systems, equivariant maps, cycle structure, products and
//!   backtracking morphism search.
//! - [`spiral`]: the spiral levels `W_n`, their collapse maps and wandering points.
//! - [`odometer`]: odometers, supernatural-number invariants and conjugacy.
//! - [`tower`]: inverse-limit towers, clopen sets, partitions, the odometer-like
//!   partition predicate and the bounded lifting game.
//! - [`fraisse`]: joint embedding, cycle/lcm amalgamation and generic chains.
//! - [`cli`]: the `cantor` command-line front end.

pub mod cli;
pub mod error;
pub mod findyn;
pub mod fraisse;
pub mod odometer;
pub mod spiral;
pub mod tower;

pub use error::{Error, Result};
