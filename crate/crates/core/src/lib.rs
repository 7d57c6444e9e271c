//! Discretization error of graph-based minimum-time navigation in stationary
//! planar wind.
//!
//! The library covers the full chain: analytic wind fields ([`wind`]),
//! polyline trajectories and their travel time ([`trajectory`]), dense lattice
//! digraphs with A* search ([`graph`]), continuous trajectory optimization
//! ([`optimizer`]) and the three discretization error estimates ([`bounds`]).

pub mod bounds;
pub mod domain;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod optimizer;
pub mod quadrature;
pub mod trajectory;
pub mod wind;

pub use domain::Domain;
pub use error::{Error, Result};
pub use geometry::{Mat2, Tensor3, Vec2};
pub use wind::{Vortex, WindBounds, WindField};
