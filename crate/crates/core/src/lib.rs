//! Discrete Fréchet distance and Voronoi diagrams of polygonal chains.
//!
//! - [`geometry`]: points, chains, Euclidean distance in 2D and 3D.
//! - [`frechet`]: the distance itself, optimal alignments, and an exhaustive
//!   reference implementation.
//! - [`configspace`]: chains as points of R^{dk} and per-site distance fields.
//! - [`voronoi`]: nearest-site queries and sampled minimization diagrams over
//!   affine slices of configuration space.
//! - [`constructions`]: the Chebyshev-flat embedding and the co-planar
//!   segment family, with their checkers.
//! - [`io`]: chain files, slice specs, raster output.

pub mod configspace;
pub mod constructions;
mod error;
pub mod frechet;
pub mod geometry;
pub mod io;
pub mod voronoi;

pub use error::{Error, Result};
pub use frechet::{dfd, dfd_distance, dfd_oracle, dfd_segments, walk_cost, FrechetResult, PairedWalk};
pub use geometry::{euclid, euclid_sq, Chain, Dim, Point};
