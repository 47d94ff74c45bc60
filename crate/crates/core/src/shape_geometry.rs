//! Coordinates on the shape sphere, normalized squared sides and the
//! mass-weighted potential.
//!
//! Points are stored in the chart `(phi, theta)` where `phi` is the latitude
//! measured from the equator of collinear triangles and `theta` the longitude.
//! The round metric is `(1/4)(dphi^2 + cos^2(phi) dtheta^2)`, a sphere of
//! radius one half. Internally many routines use the unit-sphere embedding
//! `n = (cos phi cos theta, cos phi sin theta, sin phi)`, in which every
//! normalized squared side is `s_k = 1 - n . C_k = |n - C_k|^2 / 2` for the
//! collision point `C_k` on the equator.
//!
//! Letter convention: `s_k = r_ij^2` where `{i, j, k} = {1, 2, 3}`, and the
//! collision point `C_k` is where bodies `i` and `j` meet.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Squared sides below this raise [`Error::CollisionSingularity`].
pub const DEFAULT_EXCLUSION: f64 = 1e-10;

const HALF_SQRT3: f64 = 0.866_025_403_784_438_6;

/// A syzygy letter, naming a body (the middle one of a collinear
/// configuration) and, dually, the collision of the other two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    One,
    Two,
    Three,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::One, Letter::Two, Letter::Three];

    /// Zero-based index.
    pub fn index(self) -> usize {
        match self {
            Letter::One => 0,
            Letter::Two => 1,
            Letter::Three => 2,
        }
    }

    pub fn from_index(i: usize) -> Letter {
        Letter::ALL[i % 3]
    }

    pub fn digit(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_digit(d: u8) -> Option<Letter> {
        match d {
            1 => Some(Letter::One),
            2 => Some(Letter::Two),
            3 => Some(Letter::Three),
            _ => None,
        }
    }

    /// The two bodies other than `self`, in increasing order (zero-based).
    pub fn pair(self) -> (usize, usize) {
        match self {
            Letter::One => (1, 2),
            Letter::Two => (0, 2),
            Letter::Three => (0, 1),
        }
    }

    /// Longitude of the collision point `C_k`.
    pub fn collision_theta(self) -> f64 {
        match self {
            Letter::One => 0.0,
            Letter::Two => 4.0 * PI / 3.0,
            Letter::Three => 2.0 * PI / 3.0,
        }
    }

    /// Longitude of the Euler point in the middle of equatorial arc `k`.
    pub fn arc_midpoint_theta(self) -> f64 {
        (self.collision_theta() + PI).rem_euclid(TAU)
    }

    /// Unit-sphere position of the collision point `C_k`.
    pub fn collision_vector(self) -> Vec3 {
        match self {
            Letter::One => [1.0, 0.0, 0.0],
            Letter::Two => [-0.5, -HALF_SQRT3, 0.0],
            Letter::Three => [-0.5, HALF_SQRT3, 0.0],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.digit())
    }
}

/// Three positive masses together with the constants derived from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassTriple {
    m: [f64; 3],
}

impl MassTriple {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Result<Self> {
        let m = [m1, m2, m3];
        if m.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::Invalid(format!("masses must be positive and finite, got {m:?}")));
        }
        Ok(MassTriple { m })
    }

    pub fn equal() -> Self {
        MassTriple { m: [1.0; 3] }
    }

    /// Masses whose pairwise products `p_k = m_i m_j` equal `p`.
    pub fn from_products(p: [f64; 3]) -> Result<Self> {
        if p.iter().any(|&x| !(x.is_finite() && x > 0.0)) {
            return Err(Error::Invalid(format!("products must be positive, got {p:?}")));
        }
        let prod = (p[0] * p[1] * p[2]).sqrt();
        MassTriple::new(prod / p[0], prod / p[1], prod / p[2])
    }

    pub fn masses(&self) -> [f64; 3] {
        self.m
    }

    pub fn total(&self) -> f64 {
        self.m.iter().sum()
    }

    /// `p_k = m_i m_j`, the weight of `1/s_k` in the potential.
    pub fn products(&self) -> [f64; 3] {
        let [a, b, c] = self.m;
        [b * c, a * c, a * b]
    }

    /// Reduced mass of the pair colliding at `C_k`.
    pub fn reduced_mass(&self, k: Letter) -> f64 {
        let (i, j) = k.pair();
        self.m[i] * self.m[j] / (self.m[i] + self.m[j])
    }

    /// `d(m) = sqrt(3 m1 m2 m3 / M)`.
    pub fn d_m(&self) -> f64 {
        (3.0 * self.m[0] * self.m[1] * self.m[2] / self.total()).sqrt()
    }

    /// Radius of the Euclidean cylinder the end at `C_k` is asymptotic to.
    pub fn cyl_radius(&self, k: Letter) -> f64 {
        let (i, j) = k.pair();
        (self.reduced_mass(k) * self.m[i] * self.m[j]).sqrt()
    }

    pub fn is_equal(&self) -> bool {
        self.m[0] == self.m[1] && self.m[1] == self.m[2]
    }
}

impl Default for MassTriple {
    fn default() -> Self {
        MassTriple::equal()
    }
}

impl std::str::FromStr for MassTriple {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("bad mass list {s:?}: {e}")))?;
        match parts.as_slice() {
            [a, b, c] => MassTriple::new(*a, *b, *c),
            _ => Err(Error::Invalid(format!("expected three masses, got {s:?}"))),
        }
    }
}

/// A point of the shape sphere in latitude/longitude form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapePoint {
    pub phi: f64,
    pub theta: f64,
}

impl ShapePoint {
    pub fn new(phi: f64, theta: f64) -> Self {
        ShapePoint { phi, theta: theta.rem_euclid(TAU) }
    }

    pub const NORTH_LAGRANGE: ShapePoint = ShapePoint { phi: FRAC_PI_2, theta: 0.0 };
    pub const SOUTH_LAGRANGE: ShapePoint = ShapePoint { phi: -FRAC_PI_2, theta: 0.0 };

    pub fn collision(k: Letter) -> Self {
        ShapePoint::new(0.0, k.collision_theta())
    }

    pub fn euler(k: Letter) -> Self {
        ShapePoint::new(0.0, k.arc_midpoint_theta())
    }

    pub fn to_unit(self) -> Vec3 {
        let (sp, cp) = self.phi.sin_cos();
        let (st, ct) = self.theta.sin_cos();
        [cp * ct, cp * st, sp]
    }

    pub fn from_unit(n: Vec3) -> Self {
        let rho = n[0].hypot(n[1]);
        let phi = n[2].atan2(rho);
        let theta = if rho == 0.0 { 0.0 } else { n[1].atan2(n[0]) };
        ShapePoint::new(phi, theta)
    }

    pub fn sides(self) -> SideTriple {
        squared_sides(self)
    }
}

/// Normalized squared side lengths `s_k`, summing to three.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideTriple {
    pub s: [f64; 3],
}

impl SideTriple {
    pub const LAGRANGE: SideTriple = SideTriple { s: [1.0, 1.0, 1.0] };

    /// Sides of the configuration at unit vector `n`; `n` need not be exactly
    /// normalized.
    pub fn from_unit(n: Vec3) -> Self {
        let n = vec3::normalize(n);
        let s = Letter::ALL.map(|k| {
            let d = vec3::sub(n, k.collision_vector());
            0.5 * vec3::dot(d, d)
        });
        SideTriple { s }
    }

    pub fn min_side(&self) -> (Letter, f64) {
        let mut best = (Letter::One, self.s[0]);
        for k in [Letter::Two, Letter::Three] {
            if self.s[k.index()] < best.1 {
                best = (k, self.s[k.index()]);
            }
        }
        best
    }

    pub fn check_exclusion(&self, exclusion: f64) -> Result<()> {
        let (k, s) = self.min_side();
        if s < exclusion {
            Err(Error::CollisionSingularity { letter: k.digit(), side: s })
        } else {
            Ok(())
        }
    }

    /// `sum p_k / s_k^n` without the exclusion check.
    pub fn weighted_power_sum(&self, p: [f64; 3], n: i32) -> f64 {
        (0..3).map(|k| p[k] / self.s[k].powi(n)).sum()
    }
}

/// `(gamma_k(theta), gamma_k'(theta))`.
pub fn gamma(k: Letter, theta: f64) -> (f64, f64) {
    let arg = theta + k.index() as f64 * TAU / 3.0;
    (arg.cos(), -arg.sin())
}

/// `s_k = 1 - cos(phi) gamma_k(theta)`, evaluated in a form that keeps full
/// relative accuracy close to the collision points.
pub fn squared_sides(p: ShapePoint) -> SideTriple {
    let half_phi = (0.5 * p.phi).sin();
    let s = Letter::ALL.map(|k| {
        let arg = p.theta + k.index() as f64 * TAU / 3.0;
        let half = (0.5 * arg).sin();
        2.0 * half * half + arg.cos() * 2.0 * half_phi * half_phi
    });
    SideTriple { s }
}

/// The potential `U = sum p_k / s_k` on the normalized sphere.
pub fn potential(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    power_sums(p, m, 1)
}

pub fn potential_with(p: ShapePoint, m: &MassTriple, exclusion: f64) -> Result<f64> {
    let s = squared_sides(p);
    s.check_exclusion(exclusion)?;
    Ok(s.weighted_power_sum(m.products(), 1))
}

/// `sum p_k / s_k^n` for `n >= 1`.
pub fn power_sums(p: ShapePoint, m: &MassTriple, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Invalid("power sum order must be at least 1".into()));
    }
    let s = squared_sides(p);
    s.check_exclusion(DEFAULT_EXCLUSION)?;
    Ok(s.weighted_power_sum(m.products(), n as i32))
}

/// Round-metric distance from `p` to the collision point `C_k`.
pub fn collision_distance(p: ShapePoint, k: Letter) -> f64 {
    let s = squared_sides(p).s[k.index()];
    (0.5 * s).sqrt().min(1.0).asin()
}

/// Round-metric (radius one half) distance between two points.
pub fn round_distance(a: ShapePoint, b: ShapePoint) -> f64 {
    0.5 * vec3::angle(a.to_unit(), b.to_unit())
}

/// An element of the twelve-element symmetry group of the equal-mass
/// problem: `theta -> theta + 2 pi r / 3`, optionally preceded by
/// `theta -> -theta`, optionally combined with `phi -> -phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub rotation: u8,
    pub reflect_theta: bool,
    pub reflect_phi: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry { rotation: 0, reflect_theta: false, reflect_phi: false };

    pub fn all() -> Vec<Symmetry> {
        let mut out = Vec::with_capacity(12);
        for rotation in 0..3 {
            for reflect_theta in [false, true] {
                for reflect_phi in [false, true] {
                    out.push(Symmetry { rotation, reflect_theta, reflect_phi });
                }
            }
        }
        out
    }

    pub fn apply(&self, n: Vec3) -> Vec3 {
        let [mut x, mut y, mut z] = n;
        if self.reflect_theta {
            y = -y;
        }
        if self.reflect_phi {
            z = -z;
        }
        for _ in 0..self.rotation {
            let (nx, ny) = (-0.5 * x - HALF_SQRT3 * y, HALF_SQRT3 * x - 0.5 * y);
            x = nx;
            y = ny;
        }
        [x, y, z]
    }

    pub fn apply_point(&self, p: ShapePoint) -> ShapePoint {
        ShapePoint::from_unit(self.apply(p.to_unit()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(Letter::One, 0.0), (1.0, -0.0));
        let (g, dg) = gamma(Letter::Two, 0.0);
        assert!(close(g, -0.5, 1e-15) && close(dg, -HALF_SQRT3, 1e-15));
        let (g, dg) = gamma(Letter::One, PI);
        assert!(close(g, -1.0, 1e-15) && close(dg, 0.0, 1e-15));
    }

    #[test]
    fn sides_at_special_points() {
        let s = squared_sides(ShapePoint::new(FRAC_PI_2, 1.234)).s;
        for v in s {
            assert!(close(v, 1.0, 1e-15));
        }
        let s = squared_sides(ShapePoint::new(0.0, PI)).s;
        assert!(close(s[0], 2.0, 1e-15) && close(s[1], 0.5, 1e-15) && close(s[2], 0.5, 1e-15));
        let s = squared_sides(ShapePoint::new(0.0, 0.0)).s;
        assert!(close(s[0], 0.0, 1e-15) && close(s[1], 1.5, 1e-15) && close(s[2], 1.5, 1e-15));
    }

    #[test]
    fn potential_values() {
        let eq = MassTriple::equal();
        assert!(close(potential(ShapePoint::NORTH_LAGRANGE, &eq).unwrap(), 3.0, 1e-14));
        assert!(close(potential(ShapePoint::euler(Letter::One), &eq).unwrap(), 4.5, 1e-13));
        let m = MassTriple::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(m.products(), [2.0, 2.0, 1.0]);
        assert!(close(potential(ShapePoint::NORTH_LAGRANGE, &m).unwrap(), 5.0, 1e-14));
    }

    #[test]
    fn power_sum_values() {
        let eq = MassTriple::equal();
        let e = ShapePoint::euler(Letter::One);
        assert!(close(power_sums(ShapePoint::NORTH_LAGRANGE, &eq, 2).unwrap(), 3.0, 1e-14));
        assert!(close(power_sums(e, &eq, 2).unwrap(), 8.25, 1e-12));
        assert!(close(power_sums(e, &eq, 3).unwrap(), 16.125, 1e-12));
        assert!(power_sums(e, &eq, 0).is_err());
    }

    #[test]
    fn potential_rejects_collisions() {
        let eq = MassTriple::equal();
        for k in Letter::ALL {
            let err = potential(ShapePoint::collision(k), &eq).unwrap_err();
            assert!(matches!(err, Error::CollisionSingularity { letter, .. } if letter == k.digit()));
        }
        let near = ShapePoint::new(1e-4, 0.0);
        assert!(potential(near, &eq).is_ok());
        assert!(potential_with(near, &eq, 1e-6).is_err());
    }

    #[test]
    fn collision_distances() {
        for k in Letter::ALL {
            assert!(collision_distance(ShapePoint::collision(k), k).abs() < 1e-15);
            assert!(close(collision_distance(ShapePoint::NORTH_LAGRANGE, k), PI / 4.0, 1e-14));
            assert!(close(collision_distance(ShapePoint::euler(k), k), FRAC_PI_2, 1e-7));
        }
    }

    #[test]
    fn mass_constants() {
        let eq = MassTriple::equal();
        assert!(close(eq.d_m(), 1.0, 1e-15));
        for k in Letter::ALL {
            assert!(close(eq.cyl_radius(k), std::f64::consts::FRAC_1_SQRT_2, 1e-15));
        }
        let m = MassTriple::new(1.0, 1.0, 2.0).unwrap();
        assert!(close(m.cyl_radius(Letter::Three), std::f64::consts::FRAC_1_SQRT_2, 1e-15));
        let q = MassTriple::from_products([1.0, 1.0, 2.0]).unwrap();
        let p = q.products();
        assert!(close(p[0], 1.0, 1e-14) && close(p[1], 1.0, 1e-14) && close(p[2], 2.0, 1e-14));
        assert!(MassTriple::new(1.0, 0.0, 1.0).is_err());
        assert!("1, 2,3".parse::<MassTriple>().is_ok());
        assert!("1,2".parse::<MassTriple>().is_err());
    }

    #[test]
    fn equilateral_frame_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let th = rng.gen_range(0.0..TAU);
            for i in Letter::ALL {
                let (g, dg) = gamma(i, th);
                assert!(close(g * g + dg * dg, 1.0, 1e-12));
                for j in Letter::ALL {
                    if i != j {
                        let (h, dh) = gamma(j, th);
                        assert!(close(g * h + dg * dh, -0.5, 1e-12));
                    }
                }
            }
        }
    }

    #[test]
    fn side_symmetries_and_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let p = ShapePoint::new(rng.gen_range(-FRAC_PI_2..FRAC_PI_2), rng.gen_range(0.0..TAU));
            let s = squared_sides(p).s;
            assert!(close(s.iter().sum::<f64>(), 3.0, 1e-12));
            assert!(s.iter().all(|&v| (-1e-15..=2.0 + 1e-15).contains(&v)));
            let r = squared_sides(ShapePoint::new(-p.phi, p.theta)).s;
            let t = squared_sides(ShapePoint::new(p.phi, -p.theta)).s;
            for k in 0..3 {
                assert!(close(s[k], r[k], 1e-13));
            }
            assert!(close(s[0], t[0], 1e-13) && close(s[1], t[2], 1e-13) && close(s[2], t[1], 1e-13));
            let e = SideTriple::from_unit(p.to_unit()).s;
            for k in 0..3 {
                assert!(close(s[k], e[k], 1e-13));
            }
        }
    }

    #[test]
    fn collision_distance_matches_great_circle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let p = ShapePoint::new(rng.gen_range(-FRAC_PI_2..FRAC_PI_2), rng.gen_range(0.0..TAU));
            for k in Letter::ALL {
                let gc = round_distance(p, ShapePoint::collision(k));
                assert!(close(collision_distance(p, k), gc, 1e-10));
            }
        }
    }

    #[test]
    fn symmetry_group_preserves_side_multiset() {
        let p = ShapePoint::new(0.3, 1.1);
        let base = {
            let mut s = p.sides().s;
            s.sort_by(f64::total_cmp);
            s
        };
        let all = Symmetry::all();
        assert_eq!(all.len(), 12);
        for g in all {
            let mut s = g.apply_point(p).sides().s;
            s.sort_by(f64::total_cmp);
            for k in 0..3 {
                assert!(close(s[k], base[k], 1e-13));
            }
        }
        let rot = Symmetry { rotation: 1, reflect_theta: false, reflect_phi: false };
        let q = rot.apply_point(ShapePoint::new(0.2, 0.4));
        assert!(close(q.theta, 0.4 + TAU / 3.0, 1e-13) && close(q.phi, 0.2, 1e-14));
    }
}
