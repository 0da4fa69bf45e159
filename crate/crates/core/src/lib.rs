//! Majority colourings of finite digraphs.
//!
//! A colouring of a digraph is a *`1/k`-majority colouring* when every vertex
//! shares its colour with at most a `1/k` fraction of its out-neighbours.
//! This crate constructs such colourings with a Perron-weighted local search
//! (`2k` colours suffice for every digraph, and lists of size `m` suffice for
//! the `2/m` threshold), certifies small lower bounds by exhaustive search,
//! runs the random 3-colouring experiment on tournaments, and solves the
//! chain-constrained linear program that bounds the expected number of bad
//! vertices in exact rational arithmetic.
//!
//! Modules:
//!
//! - [`graph`]: the [`Digraph`] type, generators and the edge-list format.
//! - [`verify`]: colourings, list assignments and exact integer checks.
//! - [`spectral`]: the row-stochastic matrix of a digraph and its left
//!   Perron vector.
//! - [`solver`]: partition and list colouring, the tournament experiment and
//!   the exact minimum-colour search.
//! - [`lpbound`]: exact probabilities, the chain LP and bound reports.

pub mod error;
pub mod graph;
pub mod lpbound;
pub mod solver;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use graph::Digraph;
pub use verify::{Colouring, ListAssignment, Violation};
