//! Body files: `{"vertices": [[x, y, z], ...]}`. Coordinates are JSON
//! numbers or strings holding an exact rational (`"3/4"`, `"-2"`, `"0.125"`).

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::exact::{rational_from_f64, Rational};
use super::hull::P3;
use super::{BodyError, ExactPolytope, Polytope};
use crate::sphere::Vec3;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum Coord {
    Number(f64),
    Text(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct BodyFile {
    pub vertices: Vec<[Coord; 3]>,
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let q = Rational::new(num, den);
    Some(if neg { -q } else { q })
}

/// Exact value of a coordinate.
pub fn parse_coord(c: &Coord) -> Result<Rational, BodyError> {
    match c {
        Coord::Number(x) => rational_from_f64(*x).ok_or(BodyError::NonFinite),
        Coord::Text(s) => {
            let s = s.trim();
            let bad = || BodyError::Parse(format!("invalid coordinate {s:?}"));
            match s.split_once('/') {
                Some((p, q)) => {
                    let p = parse_decimal(p.trim()).ok_or_else(bad)?;
                    let q = parse_decimal(q.trim()).ok_or_else(bad)?;
                    if q.is_zero() {
                        return Err(bad());
                    }
                    Ok(p / q)
                }
                None => parse_decimal(s).ok_or_else(bad),
            }
        }
    }
}

impl BodyFile {
    pub fn parse(text: &str) -> Result<BodyFile, BodyError> {
        serde_json::from_str(text).map_err(|e| BodyError::Parse(e.to_string()))
    }

    pub fn exact_points(&self) -> Result<Vec<P3<Rational>>, BodyError> {
        self.vertices.iter().map(|p| Ok([parse_coord(&p[0])?, parse_coord(&p[1])?, parse_coord(&p[2])?])).collect()
    }

    pub fn float_points(&self) -> Result<Vec<Vec3>, BodyError> {
        self.exact_points()?
            .iter()
            .map(|p| {
                let f = |x: &Rational| x.to_f64().filter(|v| v.is_finite()).ok_or(BodyError::NonFinite);
                Ok(Vec3::new(f(&p[0])?, f(&p[1])?, f(&p[2])?))
            })
            .collect()
    }

    pub fn to_polytope(&self) -> Result<Polytope, BodyError> {
        Polytope::from_points(&self.float_points()?)
    }

    pub fn to_exact(&self) -> Result<ExactPolytope, BodyError> {
        ExactPolytope::from_points(&self.exact_points()?)
    }

    pub fn from_polytope(p: &Polytope) -> BodyFile {
        BodyFile { vertices: p.vertices().iter().map(|v| [v.x, v.y, v.z].map(Coord::Number)).collect() }
    }

    pub fn from_exact(p: &ExactPolytope) -> BodyFile {
        BodyFile {
            vertices: p.vertices().iter().map(|v| v.clone().map(|c| Coord::Text(format_rational(&c)))).collect(),
        }
    }
}

/// `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
