//! Cylinders through and around small 3D point sets.
//!
//! * [`bestfit`]: the cylinder minimizing the variance of squared axis distances.
//! * [`four_point`]: minimal-radius cylinders circumscribed to four points.
//! * [`five_point`]: every cylinder circumscribed to five points, via a
//!   univariate polynomial of degree at most six.
//! * [`enclosing`]: the smallest enclosing cylinder of a point set.

pub mod bestfit;
pub mod cli;
pub mod enclosing;
pub mod error;
pub mod five_point;
pub mod fixtures;
pub mod four_point;
pub mod geometry;
pub mod numerics;

pub use error::{CylError, Result};
pub use geometry::{
    center_points, compute_moments, Cylinder, Moments, PointSet, SolverConfig, Vec3,
};
