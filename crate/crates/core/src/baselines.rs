//! Static benchmark placements.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;
use crate::geometry::{hex_candidate_grid, AltitudeBounds, HexRegion, Position3D};

/// Predefined positions the benchmark schemes may choose from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub horizontal: Vec<(f64, f64)>,
    pub altitudes: Vec<f64>,
    pub fixed_altitude: f64,
}

impl CandidateSet {
    pub fn build(
        region: &HexRegion,
        bounds: &AltitudeBounds,
        n_horizontal: usize,
        n_altitudes: usize,
        fixed_altitude: f64,
    ) -> Result<Self, GeometryError> {
        Ok(Self {
            horizontal: hex_candidate_grid(region, n_horizontal)?,
            altitudes: bounds.levels(n_altitudes),
            fixed_altitude,
        })
    }
}

/// Candidate whose smallest horizontal distance to `existing` is largest,
/// at the fixed altitude. Ties keep the lowest candidate index.
pub fn place_strategic(candidates: &CandidateSet, existing: &[Position3D]) -> Position3D {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, &(x, y)) in candidates.horizontal.iter().enumerate() {
        let probe = Position3D::new(x, y, candidates.fixed_altitude);
        let score = existing
            .iter()
            .map(|e| probe.horizontal_distance(e))
            .fold(f64::INFINITY, f64::min);
        if score > best_score {
            best = i;
            best_score = score;
        }
    }
    let (x, y) = candidates.horizontal[best];
    Position3D::new(x, y, candidates.fixed_altitude)
}

/// Places `n` UAVs one after another, each counting the earlier ones as
/// existing base stations.
pub fn place_strategic_all(
    candidates: &CandidateSet,
    existing: &[Position3D],
    n: usize,
) -> Vec<Position3D> {
    let mut all = existing.to_vec();
    let mut placed = Vec::with_capacity(n);
    for _ in 0..n {
        let p = place_strategic(candidates, &all);
        all.push(p);
        placed.push(p);
    }
    placed
}

/// Uniform horizontal point in the region at `fixed_altitude`.
pub fn place_random_fixed<R: Rng + ?Sized>(
    region: &HexRegion,
    fixed_altitude: f64,
    rng: &mut R,
) -> Position3D {
    let (x, y) = region.sample_xy(rng);
    Position3D::new(x, y, fixed_altitude)
}

/// Uniform pick from the horizontal × altitude candidate grid.
pub fn place_random<R: Rng + ?Sized>(candidates: &CandidateSet, rng: &mut R) -> Position3D {
    let (x, y) = candidates.horizontal[rng.gen_range(0..candidates.horizontal.len())];
    let h = candidates.altitudes[rng.gen_range(0..candidates.altitudes.len())];
    Position3D::new(x, y, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn setup() -> (HexRegion, AltitudeBounds, CandidateSet) {
        let region = HexRegion::centered(250.0).unwrap();
        let bounds = AltitudeBounds::new(22.5, 300.0).unwrap();
        let c = CandidateSet::build(&region, &bounds, 79, 28, 100.0).unwrap();
        (region, bounds, c)
    }

    #[test]
    fn strategic_against_center() {
        let (_, _, c) = setup();
        let center = [Position3D::new(0.0, 0.0, 25.0)];
        let p = place_strategic(&c, &center);
        let farthest = c
            .horizontal
            .iter()
            .map(|&(x, y)| x.hypot(y))
            .fold(0.0, f64::max);
        assert!((p.x.hypot(p.y) - farthest).abs() < 1e-9);
        assert_eq!(p.h, 100.0);
    }

    #[test]
    fn strategic_single_candidate() {
        let c = CandidateSet { horizontal: vec![(5.0, 6.0)], altitudes: vec![50.0], fixed_altitude: 100.0 };
        assert_eq!(place_strategic(&c, &[Position3D::new(5.0, 6.0, 25.0)]), Position3D::new(5.0, 6.0, 100.0));
    }

    #[test]
    fn strategic_never_repeats() {
        let (_, _, c) = setup();
        let placed = place_strategic_all(&c, &[Position3D::new(0.0, 0.0, 25.0)], 12);
        for i in 0..placed.len() {
            for j in 0..i {
                assert_ne!((placed[i].x, placed[i].y), (placed[j].x, placed[j].y));
            }
        }
    }

    #[test]
    fn random_fixed_properties() {
        let (region, _, _) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let p = place_random_fixed(&region, 100.0, &mut rng);
            assert_eq!(p.h, 100.0);
            assert!(region.contains(&p));
        }
        let a = place_random_fixed(&region, 100.0, &mut ChaCha8Rng::seed_from_u64(8));
        let b = place_random_fixed(&region, 100.0, &mut ChaCha8Rng::seed_from_u64(8));
        assert_eq!(a, b);
    }

    #[test]
    fn random_grid_support() {
        let (region, bounds, c) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut counts: HashMap<(usize, usize), usize> = HashMap::new();
        let n = 100_000;
        for _ in 0..n {
            let p = place_random(&c, &mut rng);
            assert!(region.contains(&p) && bounds.contains(p.h));
            let hi = c.horizontal.iter().position(|&(x, y)| x == p.x && y == p.y).unwrap();
            let ai = c.altitudes.iter().position(|&h| h == p.h).unwrap();
            *counts.entry((hi, ai)).or_default() += 1;
        }
        assert_eq!(counts.len(), 79 * 28);
        let expected = n as f64 / 2212.0;
        let sigma = expected.sqrt();
        // Max over 2212 cells; 5 sigma keeps the family-wise false alarm rate tiny.
        assert!(counts.values().all(|&c| (c as f64 - expected).abs() < 5.0 * sigma));
        let a = place_random(&c, &mut ChaCha8Rng::seed_from_u64(1));
        let b = place_random(&c, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
    }
}
