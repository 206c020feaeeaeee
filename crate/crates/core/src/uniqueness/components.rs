use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::measure::SphericalMeasure;
use crate::sphere::{sample_sphere, Cap, UnitVec, EPS_GEOM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    Atom { dir: UnitVec },
    Cap(Cap),
    Sphere,
}

/// A connected piece of `spt λ`: one atom, the whole sphere, or a union of
/// caps linked by overlaps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub id: String,
    pub generators: Vec<Generator>,
}

impl Component {
    pub fn is_atomic(&self) -> bool {
        matches!(self.generators.as_slice(), [Generator::Atom { .. }])
    }

    pub fn contains(&self, p: UnitVec) -> bool {
        self.generators.iter().any(|g| match g {
            Generator::Atom { dir } => dir.distance(p) <= EPS_GEOM,
            Generator::Cap(c) => c.contains(p, 0.0),
            Generator::Sphere => true,
        })
    }

    /// A random point of the component. Caps are picked by area.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> UnitVec {
        let total: f64 = self.generators.iter().map(weight).sum();
        let mut x = rng.random::<f64>() * total;
        let mut pick = &self.generators[self.generators.len() - 1];
        for g in &self.generators {
            if x < weight(g) {
                pick = g;
                break;
            }
            x -= weight(g);
        }
        match pick {
            Generator::Atom { dir } => *dir,
            Generator::Cap(c) => c.sample(rng),
            Generator::Sphere => sample_sphere(rng),
        }
    }
}

fn weight(g: &Generator) -> f64 {
    match g {
        Generator::Atom { .. } => 1.0,
        Generator::Cap(c) => c.area(),
        Generator::Sphere => 4.0 * std::f64::consts::PI,
    }
}

/// Components of `spt λ`, read off the measure's description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportComponents {
    pub components: Vec<Component>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

impl SupportComponents {
    pub fn from_measure(lambda: &SphericalMeasure) -> Self {
        let components = match lambda {
            SphericalMeasure::Uniform => {
                vec![Component { id: "sphere".into(), generators: vec![Generator::Sphere] }]
            }
            SphericalMeasure::Atoms(atoms) => atoms
                .iter()
                .enumerate()
                .map(|(i, a)| Component { id: format!("atom-{i}"), generators: vec![Generator::Atom { dir: a.dir }] })
                .collect(),
            SphericalMeasure::CapLebesgue { density, .. } if *density == 0.0 => Vec::new(),
            SphericalMeasure::CapLebesgue { caps, .. } => {
                let mut parent: Vec<usize> = (0..caps.len()).collect();
                for i in 0..caps.len() {
                    for j in 0..i {
                        if caps[i].meets_cap(&caps[j], 0.0) {
                            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                }
                let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
                for i in 0..caps.len() {
                    let r = find(&mut parent, i);
                    match groups.iter_mut().find(|g| g.0 == r) {
                        Some(g) => g.1.push(i),
                        None => groups.push((r, vec![i])),
                    }
                }
                groups
                    .into_iter()
                    .map(|(_, members)| Component {
                        id: format!("caps-{}", members.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("+")),
                        generators: members.iter().map(|&m| Generator::Cap(caps[m])).collect(),
                    })
                    .collect()
            }
        };
        SupportComponents { components }
    }

    /// Index of the component containing `p`.
    pub fn component_of(&self, p: UnitVec) -> Option<usize> {
        self.components.iter().position(|c| c.contains(p))
    }
}
