//! The genus-two surface group: side pairings of the regular {8,8} octagon.

use super::{hyperbolic_distance, DiskPoint, HypError, MobiusMap};
use num_complex::Complex64;

/// Side-pairing transformations of the regular hyperbolic octagon centered
/// at the disk origin, all vertex angles 2π/8, so the quotient is a closed
/// genus-two surface.
///
/// `gens` holds eight maps `[g1, g2, g3, g4, g1⁻¹, g2⁻¹, g3⁻¹, g4⁻¹]`
/// labeled so that the surface-group relator g1·g2·g1⁻¹·g2⁻¹·g3·g4·g3⁻¹·g4⁻¹
/// composes to the identity.
#[derive(Debug, Clone)]
pub struct FuchsianGroupOctagon {
    pub gens: [MobiusMap; 8],
    /// Octagon vertices (Euclidean disk coordinates).
    pub vertices: [Complex64; 8],
    /// Images of the center under each of the eight maps: the centers of
    /// the eight adjacent tiles, one per octagon side.
    neighbor_centers: [Complex64; 8],
}

impl FuchsianGroupOctagon {
    /// The relator word g1 g2 g1⁻¹ g2⁻¹ g3 g4 g3⁻¹ g4⁻¹ as a composition.
    pub fn relator(&self) -> MobiusMap {
        let [g1, g2, g3, g4, ..] = &self.gens;
        g1.compose(g2)
            .compose(&g1.inverse())
            .compose(&g2.inverse())
            .compose(g3)
            .compose(g4)
            .compose(&g3.inverse())
            .compose(&g4.inverse())
    }

    /// Apply a word (list of generator indices into `gens`) left to right,
    /// i.e. `word = [i, j]` sends p to gens[i](gens[j](p)).
    pub fn apply_word(&self, word: &[usize], p: &DiskPoint) -> DiskPoint {
        word.iter().rev().fold(*p, |q, &i| self.gens[i].apply(&q))
    }

    /// Index of the inverse of generator i in `gens`.
    pub fn inverse_index(i: usize) -> usize {
        (i + 4) % 8
    }

    /// Whether z lies in the closed fundamental octagon, tested through the
    /// Dirichlet inequalities d(z, 0) ≤ d(z, gᵢ·0) for the eight neighbors.
    pub fn in_fundamental_domain(&self, z: &DiskPoint, tol: f64) -> bool {
        let d0 = hyperbolic_distance(z, &DiskPoint::origin());
        self.neighbor_centers.iter().all(|&c| {
            let dc = hyperbolic_distance(z, &DiskPoint { x: c.re, y: c.im });
            dc >= d0 - tol
        })
    }
}

/// Euclidean radius of the vertices of the regular {8,8} octagon.
///
/// The center-vertex-edge right triangle has angles π/8 at the center and
/// π/8 at the vertex (half the 2π/8 interior angle), so the hyperbolic
/// vertex distance R satisfies cosh R = cot²(π/8) = 3 + 2√2, and the disk
/// radius is tanh(R/2) = sinh R / (1 + cosh R).
fn vertex_radius() -> f64 {
    let cosh_r = 3.0 + 2.0 * 2.0f64.sqrt();
    (cosh_r * cosh_r - 1.0).sqrt() / (1.0 + cosh_r)
}

/// Build the side-pairing generators of the regular octagon.
///
/// Vertices are v_k = ρ·e^{ikπ/4}; side s_k runs from v_{k-1} to v_k
/// (1-based, counterclockwise). Sides are labeled in the canonical
/// genus-two pattern g1 g2 g1⁻¹ g2⁻¹ g3 g4 g3⁻¹ g4⁻¹, and the generator for
/// a letter maps the side carrying the inverse label onto the side carrying
/// the letter, reversing the boundary orientation. Each generator is the
/// rotation conjugate of the previous one, so all eight maps share one
/// translation length.
pub fn octagon_generators() -> FuchsianGroupOctagon {
    let rho = vertex_radius();
    let mut vertices = [Complex64::new(0.0, 0.0); 8];
    for (k, v) in vertices.iter_mut().enumerate() {
        *v = Complex64::from_polar(rho, k as f64 * std::f64::consts::FRAC_PI_4);
    }
    let v = |k: usize| vertices[k % 8];

    // Sides are glued in the pattern (s1, s3), (s2, s4), (s5, s7), (s6, s8).
    // Each pairing map sends side s_j traversed backwards onto side s_i
    // traversed forwards: v_j -> v_{i-1}, v_{j-1} -> v_i (side s_k goes
    // v_{k-1} -> v_k). Orienting the second and fourth letters from the
    // earlier side to the later one makes the commutator word
    // g1 g2 g1⁻¹ g2⁻¹ g3 g4 g3⁻¹ g4⁻¹ close up exactly.
    let pairs = [(1usize, 3usize), (4, 2), (5, 7), (8, 6)];
    let mut gens_fwd = Vec::with_capacity(4);
    for &(i, j) in &pairs {
        let m = MobiusMap::map_two_points(v(j), v(j - 1), v(i - 1), v(i));
        gens_fwd.push(m);
    }
    let gens = [
        gens_fwd[0],
        gens_fwd[1],
        gens_fwd[2],
        gens_fwd[3],
        gens_fwd[0].inverse(),
        gens_fwd[1].inverse(),
        gens_fwd[2].inverse(),
        gens_fwd[3].inverse(),
    ];
    let mut neighbor_centers = [Complex64::new(0.0, 0.0); 8];
    for (g, c) in gens.iter().zip(neighbor_centers.iter_mut()) {
        *c = g.apply_complex(Complex64::new(0.0, 0.0));
    }
    FuchsianGroupOctagon {
        gens,
        vertices,
        neighbor_centers,
    }
}

/// Maximum number of greedy reduction steps before reporting divergence.
pub const MAX_REDUCTION_STEPS: usize = 256;

/// Pull z into the closed fundamental octagon by greedily applying the
/// inverse of whichever generator brings it closest to the center
/// (lowest index wins ties). Returns the interior representative and the
/// word that maps it back to z.
pub fn reduce_to_fundamental_domain(
    group: &FuchsianGroupOctagon,
    z: &DiskPoint,
) -> Result<(DiskPoint, Vec<usize>), HypError> {
    let origin = DiskPoint::origin();
    let mut cur = *z;
    let mut word = Vec::new();
    for _ in 0..MAX_REDUCTION_STEPS {
        let d0 = hyperbolic_distance(&cur, &origin);
        let mut best: Option<(usize, f64)> = None;
        for (i, c) in group.neighbor_centers.iter().enumerate() {
            let dc = hyperbolic_distance(&cur, &DiskPoint { x: c.re, y: c.im });
            if best.map_or(true, |(_, d)| dc < d) {
                best = Some((i, dc));
            }
        }
        let (i, dc) = best.unwrap();
        if dc >= d0 - 1e-13 {
            // Dirichlet conditions hold: cur is in the closed octagon.
            return Ok((cur, word));
        }
        cur = group.gens[FuchsianGroupOctagon::inverse_index(i)].apply(&cur);
        word.push(i);
    }
    Err(HypError::ReductionDiverged {
        max_steps: MAX_REDUCTION_STEPS,
        abs: z.to_complex().norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn relator_is_identity() {
        let group = octagon_generators();
        let dev = group.relator().deviation_from_identity();
        assert!(dev < 1e-10, "relator deviates from identity by {dev:.3e}");
    }

    #[test]
    fn translation_lengths_agree() {
        let group = octagon_generators();
        let lengths: Vec<f64> = group.gens.iter().map(|g| g.translation_length()).collect();
        assert!(lengths[0] > 0.0);
        for l in &lengths {
            assert!((l - lengths[0]).abs() < 1e-10, "lengths {lengths:?}");
        }
    }

    #[test]
    fn neighbors_are_equidistant_from_center() {
        let group = octagon_generators();
        let o = DiskPoint::origin();
        let d: Vec<f64> = group
            .gens
            .iter()
            .map(|g| hyperbolic_distance(&g.apply(&o), &o))
            .collect();
        for v in &d {
            assert!((v - d[0]).abs() < 1e-10, "distances {d:?}");
        }
        // adjacent tile centers sit at twice the center-to-side distance,
        // cosh(d/2) = cot(π/8)
        let expect = 2.0 * (1.0 + 2.0f64.sqrt()).acosh();
        assert!((d[0] - expect).abs() < 1e-10);
    }

    #[test]
    fn generators_move_center_outside_domain() {
        let group = octagon_generators();
        let o = DiskPoint::origin();
        for g in &group.gens {
            let img = g.apply(&o);
            assert!(!group.in_fundamental_domain(&img, 1e-9));
        }
    }

    #[test]
    fn generators_are_isometries() {
        let group = octagon_generators();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z1 = DiskPoint::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)).unwrap();
            let z2 = DiskPoint::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)).unwrap();
            let d = hyperbolic_distance(&z1, &z2);
            for g in &group.gens {
                let dg = hyperbolic_distance(&g.apply(&z1), &g.apply(&z2));
                assert!((d - dg).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn reduction_center_and_single_step() {
        let group = octagon_generators();
        let o = DiskPoint::origin();
        let (p, word) = reduce_to_fundamental_domain(&group, &o).unwrap();
        assert_eq!(word, Vec::<usize>::new());
        assert_eq!((p.x(), p.y()), (0.0, 0.0));

        for i in 0..8 {
            let img = group.gens[i].apply(&o);
            let (p, word) = reduce_to_fundamental_domain(&group, &img).unwrap();
            assert_eq!(word, vec![i]);
            assert!(hyperbolic_distance(&p, &o) < 1e-10);
        }
    }

    #[test]
    fn reduction_roundtrip_random_points() {
        let group = octagon_generators();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            let rad = rng.gen_range(0.0..0.97);
            let z = DiskPoint::new(rad * theta.cos(), rad * theta.sin()).unwrap();
            let (p, word) = reduce_to_fundamental_domain(&group, &z).unwrap();
            assert!(group.in_fundamental_domain(&p, 1e-9));
            let back = group.apply_word(&word, &p);
            assert!(
                hyperbolic_distance(&back, &z) < 1e-9,
                "roundtrip drift {:.2e} for word of length {}",
                hyperbolic_distance(&back, &z),
                word.len()
            );
            // idempotent on the reduced representative
            let (p2, w2) = reduce_to_fundamental_domain(&group, &p).unwrap();
            assert!(w2.is_empty());
            assert_eq!((p2.x(), p2.y()), (p.x(), p.y()));
        }
    }
}
