//! Radial Gauss images of convex polytopes, Gauss image measures, harmonic
//! mean variations, and checkers for the uniqueness theorems built on them.

pub mod body;
pub mod gauss_image;
pub mod measure;
pub mod report;
pub mod rng;
pub mod sphere;
pub mod uniqueness;
pub mod variation;
