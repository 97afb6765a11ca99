//! Deployment area, user sampling, distances and the discrete UAV move set.
//!
//! The area is a flat-top hexagon: one vertex lies on the positive x axis at
//! `center + (radius, 0)` and the top/bottom edges sit at `y = ±apothem`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

const BOUNDARY_EPS: f64 = 1e-9;

/// A point in meters. `h` is the altitude above ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position3D {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Position3D {
    pub const fn new(x: f64, y: f64, h: f64) -> Self {
        Self { x, y, h }
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.h.is_finite() && self.h >= 0.0
    }

    /// Distance between the ground projections of the two points.
    pub fn horizontal_distance(&self, other: &Position3D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance(&self, other: &Position3D) -> f64 {
        distance_3d(self, other)
    }
}

/// Euclidean distance in 3D.
pub fn distance_3d(a: &Position3D, b: &Position3D) -> f64 {
    let r = a.horizontal_distance(b);
    r.hypot(a.h - b.h)
}

/// Flat-top regular hexagon, `radius` measured center to vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HexRegion {
    pub center: (f64, f64),
    pub radius: f64,
}

impl HexRegion {
    pub fn new(center: (f64, f64), radius: f64) -> Result<Self, GeometryError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    /// Hexagon of the given radius centered on the origin.
    pub fn centered(radius: f64) -> Result<Self, GeometryError> {
        Self::new((0.0, 0.0), radius)
    }

    pub fn apothem(&self) -> f64 {
        self.radius * 3f64.sqrt() / 2.0
    }

    pub fn contains_xy(&self, x: f64, y: f64) -> bool {
        let dx = (x - self.center.0).abs();
        let dy = (y - self.center.1).abs();
        let tol = BOUNDARY_EPS * self.radius.max(1.0);
        dy <= self.apothem() + tol && 3f64.sqrt() * dx + dy <= 3f64.sqrt() * self.radius + tol
    }

    /// True iff the horizontal part of `p` lies inside or on the boundary.
    pub fn contains(&self, p: &Position3D) -> bool {
        self.contains_xy(p.x, p.y)
    }

    /// Uniform point in the hexagon, by rejection from the bounding box.
    pub fn sample_xy<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let a = self.apothem();
        loop {
            let x = self.center.0 + rng.gen_range(-self.radius..=self.radius);
            let y = self.center.1 + rng.gen_range(-a..=a);
            if self.contains_xy(x, y) {
                return (x, y);
            }
        }
    }
}

/// Altitude interval allowed for UAVs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltitudeBounds {
    pub h_min: f64,
    pub h_max: f64,
}

impl AltitudeBounds {
    pub fn new(h_min: f64, h_max: f64) -> Result<Self, GeometryError> {
        if !(h_min > 0.0 && h_min <= h_max && h_max.is_finite()) {
            return Err(GeometryError::InvalidAltitudeBounds { h_min, h_max });
        }
        Ok(Self { h_min, h_max })
    }

    pub fn contains(&self, h: f64) -> bool {
        h >= self.h_min && h <= self.h_max
    }

    /// `count` altitudes evenly spaced over `[h_min, h_max]`, both ends included.
    pub fn levels(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![self.h_min],
            n => {
                let pitch = (self.h_max - self.h_min) / (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.h_max
                        } else {
                            self.h_min + pitch * i as f64
                        }
                    })
                    .collect()
            }
        }
    }
}

/// The seven moves available to a UAV.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Up,
    Down,
    Left,
    Right,
    Forward,
    Backward,
    NoChange,
}

impl Strategy {
    pub const COUNT: usize = 7;

    /// Policy order: `ALL[i]` is the strategy whose probability is `policy[i]`.
    pub const ALL: [Strategy; 7] = [
        Strategy::Up,
        Strategy::Down,
        Strategy::Left,
        Strategy::Right,
        Strategy::Forward,
        Strategy::Backward,
        Strategy::NoChange,
    ];

    /// Zero-based policy index.
    pub fn index(self) -> usize {
        self as usize
    }

    /// One-based ordinal (1..=7).
    pub fn ordinal(self) -> usize {
        self.index() + 1
    }

    pub fn from_index(i: usize) -> Option<Strategy> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Up => "up",
            Strategy::Down => "down",
            Strategy::Left => "left",
            Strategy::Right => "right",
            Strategy::Forward => "forward",
            Strategy::Backward => "backward",
            Strategy::NoChange => "no_change",
        }
    }

    /// Move that undoes this one.
    pub fn opposite(self) -> Strategy {
        match self {
            Strategy::Up => Strategy::Down,
            Strategy::Down => Strategy::Up,
            Strategy::Left => Strategy::Right,
            Strategy::Right => Strategy::Left,
            Strategy::Forward => Strategy::Backward,
            Strategy::Backward => Strategy::Forward,
            Strategy::NoChange => Strategy::NoChange,
        }
    }
}

/// Grid pitch for UAV moves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    pub xy: f64,
    pub h: f64,
}

impl Default for StepSizes {
    fn default() -> Self {
        Self { xy: 10.0, h: 10.27 }
    }
}

/// Executes a move. A move that would leave the region or the altitude
/// bounds is rejected and `p` is returned unchanged.
pub fn apply_strategy(
    p: Position3D,
    s: Strategy,
    steps: StepSizes,
    region: &HexRegion,
    bounds: &AltitudeBounds,
) -> Position3D {
    let mut next = p;
    match s {
        Strategy::Up => next.h += steps.h,
        Strategy::Down => next.h -= steps.h,
        Strategy::Left => next.x -= steps.xy,
        Strategy::Right => next.x += steps.xy,
        Strategy::Forward => next.y += steps.xy,
        Strategy::Backward => next.y -= steps.xy,
        Strategy::NoChange => return p,
    }
    if region.contains(&next) && bounds.contains(next.h) {
        next
    } else {
        p
    }
}

/// `n` users placed uniformly in `region` at altitude `user_altitude`.
pub fn sample_uniform_users<R: Rng + ?Sized>(
    region: &HexRegion,
    n: usize,
    user_altitude: f64,
    rng: &mut R,
) -> Vec<Position3D> {
    (0..n)
        .map(|_| {
            let (x, y) = region.sample_xy(rng);
            Position3D::new(x, y, user_altitude)
        })
        .collect()
}

/// Angle between the candidate lattice rows and the x axis. With the rows
/// off every symmetry axis of the hexagon, lattice points enter the region
/// in orbits of six, so every count of the form `1 + 6m` is reachable.
pub const LATTICE_ROTATION_DEG: f64 = 15.0;

/// Points of a triangular lattice with the given pitch, centered on the
/// region center and rotated by `rotation_deg`, that fall inside the region.
pub fn lattice_points(region: &HexRegion, pitch: f64, rotation_deg: f64) -> Vec<(f64, f64)> {
    let row_height = pitch * 3f64.sqrt() / 2.0;
    let reach = (region.radius / row_height).ceil() as i64 + 1;
    let (sin, cos) = rotation_deg.to_radians().sin_cos();
    let mut out = Vec::new();
    for j in -reach..=reach {
        let v = j as f64 * row_height;
        let shift = if j.rem_euclid(2) == 1 { pitch / 2.0 } else { 0.0 };
        for i in -reach..=reach {
            let u = i as f64 * pitch + shift;
            let x = region.center.0 + cos * u - sin * v;
            let y = region.center.1 + sin * u + cos * v;
            if region.contains_xy(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

/// Number of pitch values tried between `1.5 * radius` and `radius / 1000`.
const PITCH_SEARCH_STEPS: usize = 200_000;

/// A rotated triangular lattice clipped to the hexagon with exactly
/// `target_count` points. Pitch is scanned downward; the midpoint of the
/// first pitch interval that yields `target_count` points is used so that
/// the result does not hinge on a boundary coincidence.
///
/// The lattice is symmetric under rotation by 60 degrees about the center,
/// so only counts `1 + 6m` can be produced.
pub fn hex_candidate_grid(
    region: &HexRegion,
    target_count: usize,
) -> Result<Vec<(f64, f64)>, GeometryError> {
    if target_count == 0 || target_count % 6 != 1 {
        return Err(GeometryError::NoLatticePitch { target_count });
    }
    if target_count == 1 {
        return Ok(vec![region.center]);
    }
    let count = |pitch: f64| lattice_points(region, pitch, LATTICE_ROTATION_DEG).len();
    let hi = region.radius * 1.5;
    let lo = region.radius / 1000.0;
    let dp = (hi - lo) / PITCH_SEARCH_STEPS as f64;
    let mut interval_start: Option<f64> = None;
    for step in 0..=PITCH_SEARCH_STEPS {
        let pitch = hi - dp * step as f64;
        let n = count(pitch);
        match interval_start {
            None if n == target_count => interval_start = Some(pitch),
            Some(start) if n != target_count => {
                let last_hit = pitch + dp;
                let mid = 0.5 * (start + last_hit);
                return Ok(lattice_points(region, mid, LATTICE_ROTATION_DEG));
            }
            None if n > 4 * target_count => break,
            _ => {}
        }
    }
    Err(GeometryError::NoLatticePitch { target_count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn hex() -> HexRegion {
        HexRegion::centered(250.0).unwrap()
    }

    fn bounds() -> AltitudeBounds {
        AltitudeBounds::new(22.5, 300.0).unwrap()
    }

    #[test]
    fn contains_examples() {
        let r = hex();
        assert!(r.contains(&Position3D::new(0.0, 0.0, 0.0)));
        assert!(!r.contains(&Position3D::new(251.0, 0.0, 0.0)));
        let apothem = 250.0 * 3f64.sqrt() / 2.0;
        assert!((apothem - 216.506).abs() < 1e-3);
        assert!(!r.contains(&Position3D::new(0.0, apothem + 0.1, 0.0)));
        assert!(r.contains(&Position3D::new(0.0, apothem, 0.0)));
        assert!(r.contains(&Position3D::new(250.0, 0.0, 0.0)));
        assert!(r.contains(&Position3D::new(125.0, apothem, 0.0)));
        assert!(!r.contains(&Position3D::new(200.0, 100.0, 0.0)));
    }

    #[test]
    fn bad_region_and_bounds_rejected() {
        assert!(HexRegion::centered(0.0).is_err());
        assert!(HexRegion::centered(f64::NAN).is_err());
        assert!(AltitudeBounds::new(0.0, 10.0).is_err());
        assert!(AltitudeBounds::new(50.0, 10.0).is_err());
    }

    #[test]
    fn distance_examples() {
        let a = Position3D::new(0.0, 0.0, 100.0);
        let b = Position3D::new(0.0, 0.0, 1.5);
        assert_eq!(distance_3d(&a, &b), 98.5);

        let a = Position3D::new(3.0, 4.0, 0.0);
        let o = Position3D::new(0.0, 0.0, 0.0);
        assert_eq!(a.horizontal_distance(&o), 5.0);
        assert_eq!(distance_3d(&a, &o), 5.0);

        let a = Position3D::new(30.0, 40.0, 100.0);
        assert!((a.horizontal_distance(&b) - 50.0).abs() < 1e-12);
        assert!((distance_3d(&a, &b) - 110.4638).abs() < 1e-4);
    }

    #[test]
    fn strategy_examples() {
        let steps = StepSizes { xy: 10.0, h: 10.0 };
        let p = Position3D::new(0.0, 0.0, 100.0);
        assert_eq!(apply_strategy(p, Strategy::NoChange, steps, &hex(), &bounds()), p);
        let top = Position3D::new(0.0, 0.0, 295.0);
        assert_eq!(apply_strategy(top, Strategy::Up, steps, &hex(), &bounds()), top);
        assert_eq!(
            apply_strategy(p, Strategy::Forward, steps, &hex(), &bounds()),
            Position3D::new(0.0, 10.0, 100.0)
        );
        assert_eq!(
            apply_strategy(p, Strategy::Left, steps, &hex(), &bounds()),
            Position3D::new(-10.0, 0.0, 100.0)
        );
        let edge = Position3D::new(245.0, 0.0, 100.0);
        assert_eq!(apply_strategy(edge, Strategy::Right, steps, &hex(), &bounds()), edge);
    }

    #[test]
    fn strategy_ordering_is_stable() {
        for (i, s) in Strategy::ALL.iter().enumerate() {
            assert_eq!(s.index(), i);
            assert_eq!(s.ordinal(), i + 1);
            assert_eq!(Strategy::from_index(i), Some(*s));
            assert_eq!(s.opposite().opposite(), *s);
        }
        assert_eq!(Strategy::from_index(7), None);
    }

    #[test]
    fn sampling_is_deterministic_and_inside() {
        let r = hex();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(sample_uniform_users(&r, 0, 1.5, &mut rng).is_empty());

        let a = sample_uniform_users(&r, 1000, 1.5, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_uniform_users(&r, 1000, 1.5, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert!(a.iter().all(|p| r.contains(p) && p.h == 1.5));

        // For a uniform point in a regular hexagon of radius R,
        // Var(x) = Var(y) = 5 R^2 / 24.
        let sigma = (5.0 * 250.0f64.powi(2) / 24.0).sqrt() / (1000f64).sqrt();
        let mx = a.iter().map(|p| p.x).sum::<f64>() / 1000.0;
        let my = a.iter().map(|p| p.y).sum::<f64>() / 1000.0;
        assert!(mx.abs() < 3.0 * sigma, "mean x {mx}");
        assert!(my.abs() < 3.0 * sigma, "mean y {my}");
    }

    #[test]
    fn altitude_levels() {
        let levels = bounds().levels(28);
        assert_eq!(levels.len(), 28);
        assert_eq!(levels[0], 22.5);
        assert_eq!(levels[27], 300.0);
        assert!((levels[1] - levels[0] - 277.5 / 27.0).abs() < 1e-12);
        assert_eq!(bounds().levels(1), vec![22.5]);
    }

    #[test]
    fn candidate_grid_small_counts() {
        assert_eq!(hex_candidate_grid(&hex(), 1).unwrap(), vec![(0.0, 0.0)]);
        assert_eq!(hex_candidate_grid(&hex(), 7).unwrap().len(), 7);
        assert!(hex_candidate_grid(&hex(), 0).is_err());
        assert!(hex_candidate_grid(&hex(), 80).is_err());
    }
}
