//! Seed splitting. Every random stream is derived from one root seed, a
//! label naming its purpose, and an index, so that streams are independent
//! of evaluation order and thread count.

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sphere::Vec3;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Seed of substream `(label, index)` under `root`.
pub fn derive_seed(root: u64, label: &str, index: u64) -> u64 {
    splitmix(splitmix(root ^ fnv1a(label)) ^ index)
}

pub fn substream(root: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, label, index))
}

/// Proper rotation as a row-major matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    pub const IDENTITY: Rotation = Rotation([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Uniformly distributed rotation (Shoemake's unit quaternion).
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
        let tau = std::f64::consts::TAU;
        let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
        let (w, x, y, z) = (a * (tau * u2).sin(), a * (tau * u2).cos(), b * (tau * u3).sin(), b * (tau * u3).cos());
        Rotation([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
            [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
            [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.0;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_differ_by_label_and_index() {
        let s = derive_seed(7, "partition", 0);
        assert_ne!(s, derive_seed(7, "partition", 1));
        assert_ne!(s, derive_seed(7, "sampling", 0));
        assert_eq!(s, derive_seed(7, "partition", 0));
    }

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = substream(1, "test", 0);
        let r = Rotation::random(&mut rng);
        let (a, b, c) = (r.apply(Vec3::X), r.apply(Vec3::Y), r.apply(Vec3::Z));
        assert!((a.norm() - 1.0).abs() < 1e-14 && a.dot(b).abs() < 1e-14);
        assert!((a.cross(b) - c).norm() < 1e-14);
    }
}
