//! The Jacobi-Maupertuis metric `F ds_1^2` on the shape sphere.
//!
//! `ds_1^2` is the round metric of radius one half. For arbitrary masses the
//! conformal factor is `F = d(m) U lambda` with `lambda = d(m) M / sum p_k s_k`,
//! so `F = d(m)^2 M U / sum p_k s_k`; it collapses to `U` for equal unit masses.
//!
//! Besides the closed-form Gaussian curvature this module carries
//! finite-difference oracles for it, the cylindrical coordinates `(ell, chi)`
//! of each collision end, and a grid scan of the curvature sign.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::adaptive_simpson;
use crate::shape_geometry::{
    collision_distance, gamma, squared_sides, Letter, MassTriple, ShapePoint, SideTriple,
    DEFAULT_EXCLUSION,
};
use crate::vec3::{self, Vec3};

/// Default finite-difference step for the oracles.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Largest admissible finite-difference step.
pub const MAX_FD_STEP: f64 = 1e-2;
/// Reference radius where the end coordinate `ell` vanishes.
pub const END_REFERENCE_RADIUS: f64 = PI / 8.0;
/// Latitude band around each pole where the chart stencils give way to
/// great-circle stencils.
pub const POLE_BAND: f64 = 0.1;

const ELL_QUAD_TOL: f64 = 1e-10;

/// Conformal factor, curvature and sign governor at a point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub point: ShapePoint,
    pub conformal_factor: f64,
    pub curvature: f64,
    pub kappa: f64,
}

/// Cylindrical coordinates about a collision end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndChart {
    pub k: Letter,
    /// Grows without bound toward the collision.
    pub ell: f64,
    pub chi: f64,
    /// Circumferential factor: the JM metric along the circle of fixed `ell`
    /// is approximately `f^2 dchi^2`.
    pub f_value: f64,
    /// Round distance to the collision point.
    pub rho: f64,
}

struct SideSums {
    p: [f64; 3],
    s: [f64; 3],
    u: f64,
    ps: f64,
}

impl SideSums {
    fn new(s: &SideTriple, m: &MassTriple) -> Self {
        let p = m.products();
        let s = s.s;
        let u = (0..3).map(|k| p[k] / s[k]).sum();
        let ps = (0..3).map(|k| p[k] * s[k]).sum();
        SideSums { p, s, u, ps }
    }

    /// `sum' p_i p_j / (s_i^2 s_j^2)` over ordered pairs.
    fn a(&self) -> f64 {
        let q = [0, 1, 2].map(|k| self.p[k] / (self.s[k] * self.s[k]));
        2.0 * (q[0] * q[1] + q[0] * q[2] + q[1] * q[2])
    }
}

/// `sum' p_i p_j` over ordered pairs.
fn pair_product_sum(p: [f64; 3]) -> f64 {
    2.0 * (p[0] * p[1] + p[0] * p[2] + p[1] * p[2])
}

fn checked_sides(p: ShapePoint) -> Result<SideTriple> {
    let s = squared_sides(p);
    s.check_exclusion(DEFAULT_EXCLUSION)?;
    Ok(s)
}

/// Conformal factor in terms of the normalized squared sides.
pub fn conformal_factor_from_sides(s: &SideTriple, m: &MassTriple) -> f64 {
    let w = SideSums::new(s, m);
    let d = m.d_m();
    d * d * m.total() * w.u / w.ps
}

/// The factor `F` with `ds_J^2 = F ds_1^2`.
pub fn conformal_factor(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    Ok(conformal_factor_from_sides(&checked_sides(p)?, m))
}

/// `F` at a point of the unit-sphere embedding.
pub fn conformal_factor_unit(n: Vec3, m: &MassTriple) -> Result<f64> {
    let s = SideTriple::from_unit(n);
    s.check_exclusion(DEFAULT_EXCLUSION)?;
    Ok(conformal_factor_from_sides(&s, m))
}

/// Partial derivatives of `log F` with respect to the three squared sides.
pub fn log_factor_side_partials(s: &SideTriple, m: &MassTriple) -> [f64; 3] {
    let w = SideSums::new(s, m);
    [0, 1, 2].map(|k| -w.p[k] / (w.s[k] * w.s[k]) / w.u - w.p[k] / w.ps)
}

/// `(F, d log F / d phi, d log F / d theta)`, exact.
pub fn log_factor_chart_gradient(p: ShapePoint, m: &MassTriple) -> Result<(f64, f64, f64)> {
    let s = checked_sides(p)?;
    let dl = log_factor_side_partials(&s, m);
    let (sp, cp) = p.phi.sin_cos();
    let mut dphi = 0.0;
    let mut dtheta = 0.0;
    for k in Letter::ALL {
        let (g, dg) = gamma(k, p.theta);
        dphi += dl[k.index()] * sp * g;
        dtheta -= dl[k.index()] * cp * dg;
    }
    Ok((conformal_factor_from_sides(&s, m), dphi, dtheta))
}

/// `(F, grad log F)` on the unit sphere, the gradient taken tangentially.
pub fn log_factor_unit_gradient(n: Vec3, m: &MassTriple) -> Result<(f64, Vec3)> {
    let s = SideTriple::from_unit(n);
    s.check_exclusion(DEFAULT_EXCLUSION)?;
    let dl = log_factor_side_partials(&s, m);
    let mut g = [0.0; 3];
    for k in Letter::ALL {
        g = vec3::axpy(-dl[k.index()], k.collision_vector(), g);
    }
    Ok((conformal_factor_from_sides(&s, m), vec3::tangent_part(n, g)))
}

/// Gaussian curvature from the sides, mass-general closed form.
pub fn curvature_from_sides(s: &SideTriple, m: &MassTriple) -> f64 {
    let w = SideSums::new(s, m);
    let d = m.d_m();
    let lambda = d * m.total() / w.ps;
    let a = w.a();
    let b = pair_product_sum(w.p) * w.u * w.u / (w.ps * w.ps);
    -3.0 * (a - b) / (d * w.u.powi(3) * lambda)
}

/// Gaussian curvature of the JM metric.
pub fn curvature_closed_form(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    Ok(curvature_from_sides(&checked_sides(p)?, m))
}

/// The equal-mass curvature `-(3 sum' 1/(s_i^2 s_j^2) - 2 U^2) / U^3`, kept as
/// an independent cross-check of [`curvature_closed_form`].
pub fn curvature_equal_mass(p: ShapePoint) -> Result<f64> {
    let s = checked_sides(p)?.s;
    let u: f64 = s.iter().map(|x| 1.0 / x).sum();
    let q = s.map(|x| 1.0 / (x * x));
    let a = 2.0 * (q[0] * q[1] + q[0] * q[2] + q[1] * q[2]);
    Ok(-(3.0 * a - 2.0 * u * u) / u.powi(3))
}

pub fn kappa_from_sides(s: &SideTriple, m: &MassTriple) -> f64 {
    let w = SideSums::new(s, m);
    w.a().sqrt() * w.ps / w.u - pair_product_sum(w.p).sqrt()
}

/// Sign governor: `sign(K) = -sign(kappa)`.
pub fn kappa(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    Ok(kappa_from_sides(&checked_sides(p)?, m))
}

/// Conformal factor, curvature and kappa together. The curvature is written
/// as a multiple of kappa here, so the two signs agree even at round-off
/// level near the zero set.
pub fn metric_sample(p: ShapePoint, m: &MassTriple) -> Result<MetricSample> {
    let s = checked_sides(p)?;
    let w = SideSums::new(&s, m);
    let d = m.d_m();
    let lambda = d * m.total() / w.ps;
    let root_a = w.a().sqrt();
    let root_pp = pair_product_sum(w.p).sqrt();
    let kappa = root_a * w.ps / w.u - root_pp;
    let ratio = w.u / w.ps;
    let a_minus_b = kappa * ratio * (root_a + root_pp * ratio);
    Ok(MetricSample {
        point: p,
        conformal_factor: d * w.u * lambda,
        curvature: -3.0 * a_minus_b / (d * w.u.powi(3) * lambda),
        kappa,
    })
}

/// `(p1(p2^2+p3^2), p2(p1^2+p3^2), p3(p1^2+p2^2))` with a flag telling
/// whether it is degenerate (all three equal).
///
/// When two of the products coincide this is proportional, modulo
/// `sum ds_k`, to the differential of kappa at the Lagrange point. For three
/// distinct products the direction differs from the true differential (see
/// [`kappa_gradient_lagrange`]), but the degeneracy flag still agrees: both
/// vanish modulo `sum ds_k` exactly for equal products.
pub fn dkappa_lagrange(m: &MassTriple) -> ([f64; 3], bool) {
    dkappa_from_products(m.products())
}

pub fn dkappa_from_products(p: [f64; 3]) -> ([f64; 3], bool) {
    let v = [
        p[0] * (p[1] * p[1] + p[2] * p[2]),
        p[1] * (p[0] * p[0] + p[2] * p[2]),
        p[2] * (p[0] * p[0] + p[1] * p[1]),
    ];
    let scale = v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let degenerate = (v[0] - v[1]).abs() <= 1e-14 * scale && (v[1] - v[2]).abs() <= 1e-14 * scale;
    (v, degenerate)
}

/// Exact partials of kappa with respect to the three sides at `s = (1,1,1)`:
/// `2 p_k (sigma p_k - sum p^2) / (sigma sqrt(sum' p_i p_j))` with
/// `sigma = sum p`.
pub fn kappa_gradient_lagrange(m: &MassTriple) -> [f64; 3] {
    let p = m.products();
    let sigma: f64 = p.iter().sum();
    let sq: f64 = p.iter().map(|x| x * x).sum();
    let scale = 2.0 / (sigma * pair_product_sum(p).sqrt());
    p.map(|pk| scale * pk * (sigma * pk - sq))
}

/// Closed-form round Laplacian of `U`: `8 sum p_k / s_k^2`.
pub fn laplacian_u_closed(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    let s = checked_sides(p)?;
    Ok(8.0 * s.weighted_power_sum(m.products(), 2))
}

/// The quantity `S` with `|grad U|^2 = 4 S`.
pub fn gradsq_u_s(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    let s = checked_sides(p)?.s;
    let pr = m.products();
    let mut out = 0.0;
    for i in 0..3 {
        let p2 = pr[i] * pr[i];
        out += 2.0 * p2 / s[i].powi(3) - p2 / (s[i] * s[i]);
        for j in 0..3 {
            if i != j {
                let pp = pr[i] * pr[j];
                out += -1.5 * pp / (s[i] * s[i] * s[j] * s[j]) + 2.0 * pp / (s[i] * s[j] * s[j])
                    - pp / (s[i] * s[j]);
            }
        }
    }
    Ok(out)
}

pub fn gradsq_u_closed(p: ShapePoint, m: &MassTriple) -> Result<f64> {
    Ok(4.0 * gradsq_u_s(p, m)?)
}

fn check_stencil(p: ShapePoint, h: f64) -> Result<()> {
    if !(h > 0.0) {
        return Err(Error::Invalid(format!("finite-difference step must be positive, got {h}")));
    }
    if h > MAX_FD_STEP {
        return Err(Error::StepTooLarge(h));
    }
    for k in Letter::ALL {
        if collision_distance(p, k) <= 4.0 * h {
            return Err(Error::CollisionSingularity { letter: k.digit(), side: squared_sides(p).s[k.index()] });
        }
    }
    Ok(())
}

/// Round-metric (radius one half) Laplacian and squared gradient of `f` by
/// centered second-order differences.
fn fd_laplacian_gradsq<F>(f: F, p: ShapePoint, h: f64) -> Result<(f64, f64)>
where
    F: Fn(ShapePoint) -> Result<f64>,
{
    check_stencil(p, h)?;
    let f0 = f(p)?;
    if p.phi.abs() <= FRAC_PI_2 - POLE_BAND {
        let fpp = f(ShapePoint { phi: p.phi + h, theta: p.theta })?;
        let fpm = f(ShapePoint { phi: p.phi - h, theta: p.theta })?;
        let ftp = f(ShapePoint { phi: p.phi, theta: p.theta + h })?;
        let ftm = f(ShapePoint { phi: p.phi, theta: p.theta - h })?;
        let c = p.phi.cos();
        let f_phi = (fpp - fpm) / (2.0 * h);
        let f_theta = (ftp - ftm) / (2.0 * h);
        let f_phiphi = (fpp - 2.0 * f0 + fpm) / (h * h);
        let f_thth = (ftp - 2.0 * f0 + ftm) / (h * h);
        let lap = 4.0 * (f_phiphi - p.phi.tan() * f_phi + f_thth / (c * c));
        let gsq = 4.0 * (f_phi * f_phi + f_theta * f_theta / (c * c));
        Ok((lap, gsq))
    } else {
        let n = p.to_unit();
        let e1 = vec3::any_orthonormal(n);
        let e2 = vec3::cross(n, e1);
        let mut lap = 0.0;
        let mut gsq = 0.0;
        for e in [e1, e2] {
            let fp = f(ShapePoint::from_unit(vec3::great_circle(n, e, h)))?;
            let fm = f(ShapePoint::from_unit(vec3::great_circle(n, e, -h)))?;
            let d1 = (fp - fm) / (2.0 * h);
            lap += (fp - 2.0 * f0 + fm) / (h * h);
            gsq += d1 * d1;
        }
        Ok((4.0 * lap, 4.0 * gsq))
    }
}

/// Curvature from `K = (4 - (1/2) Lap log F) / F` with a finite-difference
/// Laplacian of step `h`.
pub fn curvature_fd_oracle(p: ShapePoint, m: &MassTriple, h: f64) -> Result<f64> {
    let (lap, _) = fd_laplacian_gradsq(|q| Ok(conformal_factor(q, m)?.ln()), p, h)?;
    Ok((4.0 - 0.5 * lap) / conformal_factor(p, m)?)
}

/// Finite-difference round Laplacian of `U`.
pub fn laplacian_u_oracle(p: ShapePoint, m: &MassTriple, h: f64) -> Result<f64> {
    Ok(fd_laplacian_gradsq(|q| crate::shape_geometry::potential(q, m), p, h)?.0)
}

/// Finite-difference squared round gradient of `U`.
pub fn gradsq_u_oracle(p: ShapePoint, m: &MassTriple, h: f64) -> Result<f64> {
    Ok(fd_laplacian_gradsq(|q| crate::shape_geometry::potential(q, m), p, h)?.1)
}

/// Orthonormal frame `(C_k, east, north)` at the collision point `C_k`.
fn end_frame(k: Letter) -> (Vec3, Vec3, Vec3) {
    let c = k.collision_vector();
    let east = [-c[1], c[0], 0.0];
    (c, east, [0.0, 0.0, 1.0])
}

/// Unit vector at round distance `rho` from `C_k` in polar direction `chi`.
pub fn end_point_unit(k: Letter, rho: f64, chi: f64) -> Vec3 {
    let (c, east, north) = end_frame(k);
    let (sc, cc) = chi.sin_cos();
    let dir = vec3::axpy(sc, north, vec3::scale(east, cc));
    vec3::great_circle(c, dir, 2.0 * rho)
}

pub fn end_point(k: Letter, rho: f64, chi: f64) -> ShapePoint {
    ShapePoint::from_unit(end_point_unit(k, rho, chi))
}

/// `(rho, chi)` of `p` about the end at `C_k`.
pub fn end_polar(p: ShapePoint, k: Letter) -> Result<(f64, f64)> {
    let n = p.to_unit();
    let (c, east, north) = end_frame(k);
    let rho = 0.5 * vec3::angle(n, c);
    let z = vec3::dot(n, north);
    let on_equator = z.abs() <= 1e-12;
    if rho >= FRAC_PI_2 - 1e-9 || (on_equator && rho >= FRAC_PI_3 - 1e-12) {
        return Err(Error::OutOfChart(k.digit()));
    }
    let chi = z.atan2(vec3::dot(n, east)).rem_euclid(TAU);
    Ok((rho, chi))
}

fn end_radial_speed(m: &MassTriple, k: Letter, rho: f64, chi: f64) -> Result<f64> {
    Ok(conformal_factor_unit(end_point_unit(k, rho, chi), m)?.sqrt())
}

/// `ell(rho, chi) = int_rho^{rho_0} sqrt(F) drho'` along the ray of fixed `chi`.
pub fn end_ell(m: &MassTriple, k: Letter, rho: f64, chi: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::CollisionSingularity { letter: k.digit(), side: 0.0 });
    }
    // Probe once so singular rays surface as errors instead of NaN.
    end_radial_speed(m, k, rho, chi)?;
    let mut failed = None;
    let val = adaptive_simpson(
        |u| {
            let r = u.exp();
            match end_radial_speed(m, k, r, chi) {
                Ok(v) => v * r,
                Err(e) => {
                    failed.get_or_insert(e);
                    0.0
                }
            }
        },
        rho.ln(),
        END_REFERENCE_RADIUS.ln(),
        ELL_QUAD_TOL,
    );
    match failed {
        Some(e) => Err(e),
        None => Ok(val),
    }
}

/// `f = (1/2) sin(2 rho) sqrt(F)`, the JM radius of the circle of fixed `rho`.
pub fn end_circumferential_factor(m: &MassTriple, k: Letter, rho: f64, chi: f64) -> Result<f64> {
    Ok(0.5 * (2.0 * rho).sin() * end_radial_speed(m, k, rho, chi)?)
}

/// Cylindrical coordinates of `p` about the end at `C_k`.
pub fn end_chart(p: ShapePoint, m: &MassTriple, k: Letter) -> Result<EndChart> {
    let (rho, chi) = end_polar(p, k)?;
    Ok(EndChart {
        k,
        ell: end_ell(m, k, rho, chi)?,
        chi,
        f_value: end_circumferential_factor(m, k, rho, chi)?,
        rho,
    })
}

/// Round radius `rho` at which `ell(rho, chi) = ell`.
pub fn end_rho_for_ell(m: &MassTriple, k: Letter, ell: f64, chi: f64) -> Result<f64> {
    // In u = ln(rho) the map is close to affine with slope -cyl_radius.
    let slope = m.cyl_radius(k);
    let mut u = END_REFERENCE_RADIUS.ln() - ell / slope;
    u = u.min(FRAC_PI_3.ln() - 0.05);
    for it in 0..60 {
        let r = u.exp();
        let cur = end_ell(m, k, r, chi)?;
        let deriv = end_radial_speed(m, k, r, chi)? * r;
        let step = ((cur - ell) / deriv).clamp(-2.0, 2.0);
        u += step;
        u = u.min(FRAC_PI_3.ln() - 1e-3);
        if step.abs() < 1e-13 {
            return Ok(u.exp());
        }
        if it == 59 {
            return Err(Error::NoConvergence { iterations: 60, residual: cur - ell });
        }
    }
    unreachable!()
}

/// Region sampled by [`curvature_scan`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ScanRegion {
    /// The whole sphere on a `(phi, theta)` grid including both poles.
    Sphere,
    /// A round-metric ball, sampled on a polar grid.
    Ball { center: ShapePoint, radius: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub resolution: usize,
    /// Round radius of the balls around the collision points left out.
    pub exclusion: f64,
    pub region: ScanRegion,
    /// Values within this of zero count as neither sign.
    pub sign_tolerance: f64,
    /// Threshold for reporting how far near-flat points sit from the poles.
    pub flat_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            resolution: 1000,
            exclusion: 0.05,
            region: ScanRegion::Sphere,
            sign_tolerance: 1e-12,
            flat_threshold: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    AllNonpositive,
    MixedSign,
    AllNonnegative,
}

/// Curvature on a rectangular sample grid. Rows and columns are neighbours
/// in the obvious way; columns wrap around.
#[derive(Clone, Debug)]
pub struct CurvatureGrid {
    pub rows: usize,
    pub cols: usize,
    pub points: Vec<ShapePoint>,
    /// `None` where the point was excluded.
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub evaluated: usize,
    pub excluded: usize,
    pub min_curvature: f64,
    pub min_at: ShapePoint,
    pub max_curvature: f64,
    pub max_at: ShapePoint,
    pub positive: usize,
    pub negative: usize,
    /// Number of neighbouring grid pairs with strictly opposite signs.
    pub sign_changes: usize,
    /// Midpoints of the first sign-change pairs.
    pub sign_change_sites: Vec<ShapePoint>,
    /// Largest `pi/2 - |phi|` among points with `|K| < flat_threshold`.
    pub flat_max_pole_gap: Option<f64>,
    pub verdict: Verdict,
}

fn grid_points(opts: &ScanOptions) -> (usize, usize, Vec<ShapePoint>) {
    let n = opts.resolution;
    match opts.region {
        ScanRegion::Sphere => {
            let mut pts = Vec::with_capacity(n * n);
            for i in 0..n {
                let phi = -FRAC_PI_2 + PI * i as f64 / (n - 1) as f64;
                for j in 0..n {
                    let theta = TAU * j as f64 / n as f64;
                    pts.push(ShapePoint { phi, theta });
                }
            }
            (n, n, pts)
        }
        ScanRegion::Ball { center, radius } => {
            let c = center.to_unit();
            let east = if c[0].hypot(c[1]) > 1e-12 {
                vec3::normalize([-c[1], c[0], 0.0])
            } else {
                [0.0, 1.0, 0.0]
            };
            let north = vec3::cross(c, east);
            let mut pts = Vec::with_capacity((n + 1) * n);
            for i in 0..=n {
                let r = radius * i as f64 / n as f64;
                for j in 0..n {
                    let chi = TAU * j as f64 / n as f64;
                    let dir = vec3::axpy(chi.sin(), north, vec3::scale(east, chi.cos()));
                    pts.push(ShapePoint::from_unit(vec3::great_circle(c, dir, 2.0 * r)));
                }
            }
            (n + 1, n, pts)
        }
    }
}

/// Closed-form curvature over the sample grid of `opts`.
pub fn curvature_grid(m: &MassTriple, opts: &ScanOptions) -> Result<CurvatureGrid> {
    if opts.resolution < 2 {
        return Err(Error::Invalid(format!("grid resolution must be at least 2, got {}", opts.resolution)));
    }
    if !(opts.exclusion >= 0.0) {
        return Err(Error::Invalid("exclusion radius must be nonnegative".into()));
    }
    let (rows, cols, points) = grid_points(opts);
    let values = points
        .par_iter()
        .map(|&p| {
            let excluded = Letter::ALL.iter().any(|&k| collision_distance(p, k) < opts.exclusion);
            if excluded {
                None
            } else {
                curvature_closed_form(p, m).ok()
            }
        })
        .collect();
    Ok(CurvatureGrid { rows, cols, points, values })
}

/// Summarizes a curvature grid.
pub fn summarize_grid(grid: &CurvatureGrid, opts: &ScanOptions) -> ScanReport {
    let tol = opts.sign_tolerance;
    let sign = |v: f64| {
        if v > tol {
            1
        } else if v < -tol {
            -1
        } else {
            0
        }
    };
    let mut report = ScanReport {
        evaluated: 0,
        excluded: 0,
        min_curvature: f64::INFINITY,
        min_at: ShapePoint::NORTH_LAGRANGE,
        max_curvature: f64::NEG_INFINITY,
        max_at: ShapePoint::NORTH_LAGRANGE,
        positive: 0,
        negative: 0,
        sign_changes: 0,
        sign_change_sites: Vec::new(),
        flat_max_pole_gap: None,
        verdict: Verdict::AllNonpositive,
    };
    for (idx, v) in grid.values.iter().enumerate() {
        let p = grid.points[idx];
        let Some(v) = *v else {
            report.excluded += 1;
            continue;
        };
        report.evaluated += 1;
        if v < report.min_curvature {
            report.min_curvature = v;
            report.min_at = p;
        }
        if v > report.max_curvature {
            report.max_curvature = v;
            report.max_at = p;
        }
        match sign(v) {
            1 => report.positive += 1,
            -1 => report.negative += 1,
            _ => {}
        }
        if v.abs() < opts.flat_threshold {
            let gap = FRAC_PI_2 - p.phi.abs();
            report.flat_max_pole_gap = Some(report.flat_max_pole_gap.map_or(gap, |g: f64| g.max(gap)));
        }
        let (r, c) = (idx / grid.cols, idx % grid.cols);
        let right = r * grid.cols + (c + 1) % grid.cols;
        let mut neighbours = vec![right];
        if r + 1 < grid.rows {
            neighbours.push(idx + grid.cols);
        }
        for nb in neighbours {
            if let Some(w) = grid.values[nb] {
                if sign(v) * sign(w) < 0 {
                    report.sign_changes += 1;
                    if report.sign_change_sites.len() < 64 {
                        let mid = vec3::normalize(vec3::add(p.to_unit(), grid.points[nb].to_unit()));
                        report.sign_change_sites.push(ShapePoint::from_unit(mid));
                    }
                }
            }
        }
    }
    report.verdict = if report.positive > 0 && report.negative > 0 {
        Verdict::MixedSign
    } else if report.positive > 0 {
        Verdict::AllNonnegative
    } else {
        Verdict::AllNonpositive
    };
    report
}

/// Closed-form curvature over a grid with collision balls removed, reduced to
/// extrema, sign counts and a verdict.
pub fn curvature_scan(m: &MassTriple, opts: &ScanOptions) -> Result<ScanReport> {
    Ok(summarize_grid(&curvature_grid(m, opts)?, opts))
}
