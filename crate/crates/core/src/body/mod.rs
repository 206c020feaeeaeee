//! Convex polytopes with the origin in the interior: support and radial
//! functions, polar duality, radii, faces and Minkowski combinations.

pub mod exact;
pub mod generate;
pub mod hull;
pub mod json;
mod polytope;

pub use exact::ExactPolytope;
pub use json::BodyFile;
pub use polytope::{convex_combination, Edge, FaceRegion, Facet, Polytope, RadiiPair};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BodyError {
    #[error("a body needs at least four points")]
    TooFewPoints,
    #[error("points do not span R³")]
    NotFullDimensional,
    #[error("the origin is not in the interior of the body")]
    OriginNotInterior,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("inconsistent polytope: {0}")]
    Inconsistent(&'static str),
    #[error("could not generate a valid random polytope")]
    GenerationFailed,
    #[error("cannot parse body: {0}")]
    Parse(String),
}

/// `h_K(x)`.
pub fn support(k: &Polytope, x: crate::sphere::Vec3) -> f64 {
    k.support(x)
}

/// `ρ_K(u)`.
pub fn radial(k: &Polytope, u: crate::sphere::UnitVec) -> f64 {
    k.radial(u)
}

/// `K*`.
pub fn polar(k: &Polytope) -> Result<Polytope, BodyError> {
    k.polar()
}

pub fn radii(k: &Polytope) -> RadiiPair {
    k.radii()
}
