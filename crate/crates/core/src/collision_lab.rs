//! The unreduced planar problem in Jacobi coordinates, set up around the
//! 1-2 binary collision, and the open set of initial conditions that run
//! into it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Control, OdeOptions};
use crate::shape_geometry::MassTriple;
use crate::vec3::{self, Vec3};

pub type Vec2 = [f64; 2];

fn dot2(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn wedge(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn lin(a: f64, x: Vec2, b: f64, y: Vec2) -> Vec2 {
    [a * x[0] + b * y[0], a * x[1] + b * y[1]]
}

/// `zeta1 = x1 - x2`, `zeta2 = x3 - (m1 x1 + m2 x2)/(m1 + m2)`, and their
/// velocities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub zeta1: Vec2,
    pub zeta2: Vec2,
    pub zdot1: Vec2,
    pub zdot2: Vec2,
}

/// Reduced masses of the two Jacobi vectors.
pub fn jacobi_masses(m: &MassTriple) -> (f64, f64) {
    let [m1, m2, m3] = m.masses();
    let m12 = m1 + m2;
    (m1 * m2 / m12, m3 * m12 / m.total())
}

impl FullState {
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.zeta1[0], self.zeta1[1], self.zeta2[0], self.zeta2[1], self.zdot1[0], self.zdot1[1], self.zdot2[0], self.zdot2[1],
        ]
    }

    pub fn from_array(y: &[f64; 8]) -> Self {
        FullState { zeta1: [y[0], y[1]], zeta2: [y[2], y[3]], zdot1: [y[4], y[5]], zdot2: [y[6], y[7]] }
    }

    pub fn r(&self) -> f64 {
        dot2(self.zeta1, self.zeta1).sqrt()
    }

    pub fn r_dot(&self) -> f64 {
        dot2(self.zeta1, self.zdot1) / self.r()
    }

    /// Positions and velocities of the three bodies, center of mass at rest
    /// at the origin.
    pub fn to_cartesian(&self, m: &MassTriple) -> ([Vec2; 3], [Vec2; 3]) {
        let [m1, m2, m3] = m.masses();
        let m12 = m1 + m2;
        let big = m.total();
        let place = |z1: Vec2, z2: Vec2| {
            let c12 = lin(-m3 / big, z2, 0.0, z2);
            [lin(1.0, c12, m2 / m12, z1), lin(1.0, c12, -m1 / m12, z1), lin(m12 / big, z2, 0.0, z2)]
        };
        (place(self.zeta1, self.zeta2), place(self.zdot1, self.zdot2))
    }

    pub fn from_cartesian(x: &[Vec2; 3], v: &[Vec2; 3], m: &MassTriple) -> Self {
        let [m1, m2, _] = m.masses();
        let m12 = m1 + m2;
        let jac = |p: &[Vec2; 3]| {
            let c12 = lin(m1 / m12, p[0], m2 / m12, p[1]);
            (lin(1.0, p[0], -1.0, p[1]), lin(1.0, p[2], -1.0, c12))
        };
        let (zeta1, zeta2) = jac(x);
        let (zdot1, zdot2) = jac(v);
        FullState { zeta1, zeta2, zdot1, zdot2 }
    }
}

/// Difference vectors `x1 - x3` and `x2 - x3` in Jacobi coordinates.
fn outer_separations(z1: Vec2, z2: Vec2, m: &MassTriple) -> (Vec2, Vec2) {
    let [m1, m2, _] = m.masses();
    let m12 = m1 + m2;
    (lin(m2 / m12, z1, -1.0, z2), lin(-m1 / m12, z1, -1.0, z2))
}

/// `W = m1 m3 / r13^2 + m2 m3 / r23^2`.
pub fn interaction(s: &FullState, m: &MassTriple) -> Result<f64> {
    let [m1, m2, m3] = m.masses();
    let (d13, d23) = outer_separations(s.zeta1, s.zeta2, m);
    let (s13, s23) = (dot2(d13, d13), dot2(d23, d23));
    if s13 == 0.0 {
        return Err(Error::Singularity(1, 3));
    }
    if s23 == 0.0 {
        return Err(Error::Singularity(2, 3));
    }
    Ok(m1 * m3 / s13 + m2 * m3 / s23)
}

/// Full potential `sum m_i m_j / r_ij^2`.
pub fn potential(s: &FullState, m: &MassTriple) -> Result<f64> {
    let [m1, m2, _] = m.masses();
    let r2 = dot2(s.zeta1, s.zeta1);
    if r2 == 0.0 {
        return Err(Error::Singularity(1, 2));
    }
    Ok(m1 * m2 / r2 + interaction(s, m)?)
}

pub fn kinetic(s: &FullState, m: &MassTriple) -> f64 {
    let (mu1, mu2) = jacobi_masses(m);
    0.5 * (mu1 * dot2(s.zdot1, s.zdot1) + mu2 * dot2(s.zdot2, s.zdot2))
}

pub fn energy(s: &FullState, m: &MassTriple) -> Result<f64> {
    Ok(kinetic(s, m) - potential(s, m)?)
}

pub fn angular_momentum(s: &FullState, m: &MassTriple) -> f64 {
    let (mu1, mu2) = jacobi_masses(m);
    mu1 * wedge(s.zeta1, s.zdot1) + mu2 * wedge(s.zeta2, s.zdot2)
}

pub fn inertia(s: &FullState, m: &MassTriple) -> f64 {
    let (mu1, mu2) = jacobi_masses(m);
    mu1 * dot2(s.zeta1, s.zeta1) + mu2 * dot2(s.zeta2, s.zeta2)
}

pub fn inertia_dot(s: &FullState, m: &MassTriple) -> f64 {
    let (mu1, mu2) = jacobi_masses(m);
    2.0 * (mu1 * dot2(s.zeta1, s.zdot1) + mu2 * dot2(s.zeta2, s.zdot2))
}

/// Second derivative of the moment of inertia from the accelerations.
pub fn inertia_ddot(s: &FullState, m: &MassTriple) -> Result<f64> {
    let (mu1, mu2) = jacobi_masses(m);
    let d = full_rhs(s, m)?;
    let a1 = [d[4], d[5]];
    let a2 = [d[6], d[7]];
    Ok(4.0 * kinetic(s, m) + 2.0 * (mu1 * dot2(s.zeta1, a1) + mu2 * dot2(s.zeta2, a2)))
}

/// Angular momentum of the 1-2 pair per unit reduced mass.
pub fn j1(s: &FullState) -> f64 {
    wedge(s.zeta1, s.zdot1)
}

/// Time derivative of the state.
pub fn full_rhs(s: &FullState, m: &MassTriple) -> Result<[f64; 8]> {
    let [m1, m2, m3] = m.masses();
    let m12 = m1 + m2;
    let (mu1, mu2) = jacobi_masses(m);
    let r2 = dot2(s.zeta1, s.zeta1);
    if r2 == 0.0 {
        return Err(Error::Singularity(1, 2));
    }
    let (d13, d23) = outer_separations(s.zeta1, s.zeta2, m);
    let (s13, s23) = (dot2(d13, d13), dot2(d23, d23));
    if s13 == 0.0 {
        return Err(Error::Singularity(1, 3));
    }
    if s23 == 0.0 {
        return Err(Error::Singularity(2, 3));
    }
    // dW/d(x1 - x3) = -2 m1 m3 d13 / s13^2, likewise for 2-3.
    let g13 = -2.0 * m1 * m3 / (s13 * s13);
    let g23 = -2.0 * m2 * m3 / (s23 * s23);
    let dw1 = lin(g13 * m2 / m12, d13, -g23 * m1 / m12, d23);
    let dw2 = lin(-g13, d13, -g23, d23);
    let c = -2.0 * m12 / (r2 * r2);
    let a1 = lin(c, s.zeta1, 1.0 / mu1, dw1);
    let a2 = lin(1.0 / mu2, dw2, 0.0, dw2);
    Ok([s.zdot1[0], s.zdot1[1], s.zdot2[0], s.zdot2[1], a1[0], a1[1], a2[0], a2[1]])
}

/// Accelerations from Newton's law in Cartesian coordinates, for checking
/// the Jacobi form.
pub fn cartesian_accelerations(x: &[Vec2; 3], m: &MassTriple) -> [Vec2; 3] {
    let mm = m.masses();
    let mut a = [[0.0; 2]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                let d = lin(1.0, x[j], -1.0, x[i]);
                let r2 = dot2(d, d);
                let c = 2.0 * mm[j] / (r2 * r2);
                a[i] = lin(1.0, a[i], c, d);
            }
        }
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TimeUp,
    Collision,
    Escape,
    /// The 1-2 distance started to grow (only when requested).
    Receding,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimelineRow {
    pub t: f64,
    pub r: f64,
    pub r_dot: f64,
    pub j1: f64,
    pub energy: f64,
    pub inertia: f64,
    pub inertia_ddot: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub rows: Vec<TimelineRow>,
    pub stop: StopReason,
    pub final_state: FullState,
    pub initial_energy: f64,
    pub initial_angular_momentum: f64,
    /// Largest `|I'' - 4H|` over rows with `r` at least
    /// [`POINTWISE_CHECK_RADIUS`]. Closer in, both sides are differences of
    /// numbers of size `1/r^2` and carry only roundoff.
    pub max_lagrange_jacobi_residual: f64,
    /// Largest `|I(t) - I(0) - I'(0) t - 2 H t^2|` over the whole run.
    pub max_inertia_defect: f64,
    pub max_angular_momentum_drift: f64,
}

pub const POINTWISE_CHECK_RADIUS: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullOptions {
    pub tol: f64,
    /// `r` below which the collision counts as reached.
    pub eps_stop: f64,
    /// `|zeta2|` above which the run counts as an escape.
    pub escape_radius: f64,
    pub stop_when_receding: bool,
}

impl Default for FullOptions {
    fn default() -> Self {
        FullOptions { tol: 1e-12, eps_stop: 1e-6, escape_radius: 1e3, stop_when_receding: false }
    }
}

fn row(t: f64, s: &FullState, m: &MassTriple) -> Result<TimelineRow> {
    Ok(TimelineRow {
        t,
        r: s.r(),
        r_dot: s.r_dot(),
        j1: j1(s),
        energy: energy(s, m)?,
        inertia: inertia(s, m),
        inertia_ddot: inertia_ddot(s, m)?,
    })
}

pub fn integrate_full(state: &FullState, m: &MassTriple, t_max: f64, tol: f64) -> Result<Timeline> {
    integrate_full_with(state, m, t_max, &FullOptions { tol, ..Default::default() })
}

pub fn integrate_full_with(state: &FullState, m: &MassTriple, t_max: f64, opts: &FullOptions) -> Result<Timeline> {
    let h0 = energy(state, m)?;
    let j0 = angular_momentum(state, m);
    let i0 = inertia(state, m);
    let idot0 = inertia_dot(state, m);
    let mut rows = vec![row(0.0, state, m)?];
    let mut stop = StopReason::TimeUp;
    let mut lj: f64 = 0.0;
    let mut defect: f64 = 0.0;
    let mut jdrift: f64 = 0.0;
    let scale = |r: f64| if r >= POINTWISE_CHECK_RADIUS { 1.0 } else { 0.0 };
    lj = lj.max(scale(state.r()) * (rows[0].inertia_ddot - 4.0 * h0).abs());
    let ode_opts = OdeOptions { atol: opts.tol, rtol: opts.tol, h_init: 1e-6, h_min: 1e-24, h_max: 1e-2, max_steps: 5_000_000 };
    let end = ode::integrate(
        |_, y: &[f64; 8]| full_rhs(&FullState::from_array(y), m),
        0.0,
        state.to_array(),
        t_max,
        &ode_opts,
        |_, _, t, y| {
            let s = FullState::from_array(y);
            let rw = row(t, &s, m)?;
            if rw.r >= POINTWISE_CHECK_RADIUS {
                lj = lj.max((rw.inertia_ddot - 4.0 * rw.energy).abs());
            }
            defect = defect.max((rw.inertia - i0 - idot0 * t - 2.0 * h0 * t * t).abs());
            jdrift = jdrift.max((angular_momentum(&s, m) - j0).abs());
            let ctl = if rw.r < opts.eps_stop {
                stop = StopReason::Collision;
                Control::Stop
            } else if dot2(s.zeta2, s.zeta2).sqrt() > opts.escape_radius {
                stop = StopReason::Escape;
                Control::Stop
            } else if opts.stop_when_receding && rw.r_dot >= 0.0 {
                stop = StopReason::Receding;
                Control::Stop
            } else {
                Control::Continue
            };
            rows.push(rw);
            Ok(ctl)
        },
    )?;
    Ok(Timeline {
        rows,
        stop,
        final_state: FullState::from_array(&end.y),
        initial_energy: h0,
        initial_angular_momentum: j0,
        max_lagrange_jacobi_residual: lj,
        max_inertia_defect: defect,
        max_angular_momentum_drift: jdrift,
    })
}

/// Empirical constant in `|J1'| <= C r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub c: f64,
    pub max_j1_change: f64,
    pub intervals: usize,
}

pub fn j1_drift_bound(timeline: &Timeline) -> DriftReport {
    let mut c: f64 = 0.0;
    let mut change: f64 = 0.0;
    let j_start = timeline.rows.first().map_or(0.0, |r| r.j1);
    for w in timeline.rows.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 {
            continue;
        }
        let rate = ((w[1].j1 - w[0].j1) / dt).abs();
        let r = w[0].r.max(w[1].r);
        c = c.max(rate / r);
        change = change.max((w[1].j1 - j_start).abs());
    }
    DriftReport { c, max_j1_change: change, intervals: timeline.rows.len().saturating_sub(1) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollisionPredicate {
    pub j1_0: f64,
    pub r0: f64,
    pub delta: f64,
    pub kstar: f64,
}

/// `2 (m1 + m2) - J1(0)^2 - K* r(0) > delta^2`.
pub fn open_condition(pred: &CollisionPredicate, m: &MassTriple) -> bool {
    let [m1, m2, _] = m.masses();
    2.0 * (m1 + m2) - pred.j1_0 * pred.j1_0 - pred.kstar * pred.r0 > pred.delta * pred.delta
}

/// Builds a state with `H = 0`, total angular momentum zero, `I = 1` and
/// `r' < 0` from the 1-2 distance, the directions of both Jacobi vectors and
/// the velocity of the outer vector.
pub fn near_collision_state(m: &MassTriple, r0: f64, angle1: f64, angle2: f64, zdot2: Vec2) -> Result<FullState> {
    let (mu1, mu2) = jacobi_masses(m);
    let rho2 = (1.0 - mu1 * r0 * r0) / mu2;
    if !(rho2 > 0.0) || !(r0 > 0.0) {
        return Err(Error::Invalid(format!("no I = 1 state with r = {r0}")));
    }
    let e1 = [angle1.cos(), angle1.sin()];
    let zeta1 = [r0 * e1[0], r0 * e1[1]];
    let zeta2 = [rho2.sqrt() * angle2.cos(), rho2.sqrt() * angle2.sin()];
    let mut s = FullState { zeta1, zeta2, zdot1: [0.0; 2], zdot2 };
    let u = potential(&s, m)?;
    let j = -mu2 * wedge(zeta2, zdot2) / mu1;
    let v1sq = 2.0 * (u - 0.5 * mu2 * dot2(zdot2, zdot2)) / mu1;
    let rdot2 = v1sq - j * j / (r0 * r0);
    if !(rdot2 > 0.0) {
        return Err(Error::Invalid("outer velocity too large for zero energy".into()));
    }
    let rdot = -rdot2.sqrt();
    let perp = [-e1[1], e1[0]];
    s.zdot1 = lin(rdot, e1, j / r0, perp);
    Ok(s)
}

/// The collinear start: all bodies on the x-axis, `H = 0`, `J = 0`, `I = 1`,
/// `I' = 0`, with the 1-2 pair closing in.
pub fn collinear_start(m: &MassTriple, r0: f64) -> Result<FullState> {
    let (mu1, mu2) = jacobi_masses(m);
    let rho2 = (1.0 - mu1 * r0 * r0) / mu2;
    if !(rho2 > 0.0) || !(r0 > 0.0) {
        return Err(Error::Invalid(format!("no I = 1 state with r = {r0}")));
    }
    let rho = rho2.sqrt();
    let mut s = FullState { zeta1: [r0, 0.0], zeta2: [rho, 0.0], zdot1: [0.0; 2], zdot2: [0.0; 2] };
    let u = potential(&s, m)?;
    // I' = 0 ties the outer speed to the inner one.
    let c = -mu1 * r0 / (mu2 * rho);
    let rdot = -(2.0 * u / (mu1 + mu2 * c * c)).sqrt();
    s.zdot1 = [rdot, 0.0];
    s.zdot2 = [c * rdot, 0.0];
    Ok(s)
}

/// Moves a state back onto `J = 0`, `I = 1`, `H = 0` by removing the rigid
/// rotation, scaling positions, and scaling velocities.
pub fn project_to_constraints(s: &FullState, m: &MassTriple) -> Result<FullState> {
    let mut out = *s;
    let i = inertia(&out, m);
    let omega = angular_momentum(&out, m) / i;
    out.zdot1 = lin(1.0, out.zdot1, -omega, [-out.zeta1[1], out.zeta1[0]]);
    out.zdot2 = lin(1.0, out.zdot2, -omega, [-out.zeta2[1], out.zeta2[0]]);
    let k = 1.0 / i.sqrt();
    out.zeta1 = lin(k, out.zeta1, 0.0, out.zeta1);
    out.zeta2 = lin(k, out.zeta2, 0.0, out.zeta2);
    let t = kinetic(&out, m);
    if !(t > 0.0) {
        return Err(Error::Invalid("state has no kinetic energy to rescale".into()));
    }
    let c = (potential(&out, m)? / t).sqrt();
    out.zdot1 = lin(c, out.zdot1, 0.0, out.zdot1);
    out.zdot2 = lin(c, out.zdot2, 0.0, out.zdot2);
    Ok(out)
}

/// Adds a uniform perturbation of the given size to every coordinate and
/// velocity component, then projects back onto the constraints.
pub fn perturb(s: &FullState, m: &MassTriple, size: f64, rng: &mut impl Rng) -> Result<FullState> {
    let mut y = s.to_array();
    for v in y.iter_mut() {
        *v += size * rng.gen_range(-1.0..1.0);
    }
    project_to_constraints(&FullState::from_array(&y), m)
}

/// `r^2 r'^2 + J1(0)^2 - 2 (m1 + m2)` relative to `r(0)`, maximized over a
/// run that stops at collision, when `r` starts growing, or at `t = 1`.
fn calibration_ratio(s: &FullState, m: &MassTriple) -> Result<f64> {
    let [m1, m2, _] = m.masses();
    let j0 = j1(s);
    let r0 = s.r();
    let opts = FullOptions { tol: 1e-11, stop_when_receding: true, ..Default::default() };
    let tl = integrate_full_with(s, m, 1.0, &opts)?;
    Ok(tl
        .rows
        .iter()
        .filter(|row| row.r_dot < 0.0)
        .map(|row| (row.r * row.r * row.r_dot * row.r_dot + j0 * j0 - 2.0 * (m1 + m2)).abs() / r0)
        .fold(0.0, f64::max))
}

/// Random states with `r(0) < epsilon` on the zero-energy, zero angular
/// momentum, unit-inertia level.
pub fn sample_near_collision(m: &MassTriple, epsilon: f64, rng: &mut impl Rng) -> Result<FullState> {
    loop {
        let r0 = epsilon * rng.gen_range(0.25..1.0);
        let a1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let a2 = rng.gen_range(0.0..std::f64::consts::TAU);
        let zdot2 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        match near_collision_state(m, r0, a1, a2, zdot2) {
            Ok(s) => return Ok(s),
            Err(Error::Invalid(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Twice the largest observed ratio over `samples` random near-collision
/// states.
pub fn calibrate_kstar(m: &MassTriple, epsilon: f64, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 || !(epsilon > 0.0) {
        return Err(Error::Invalid("calibration needs samples and a positive epsilon".into()));
    }
    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            calibration_ratio(&sample_near_collision(m, epsilon, &mut rng)?, m)
        })
        .collect::<Result<_>>()?;
    Ok(2.0 * ratios.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub r0: f64,
    pub j1_0: f64,
    pub delta: f64,
    pub kstar: f64,
    pub open_condition: bool,
    /// `r(0)^2 / (2 delta)`.
    pub bound_time: f64,
    pub collision_time: Option<f64>,
    /// Smallest `-r r' - delta` seen before the stop.
    pub min_margin: f64,
    pub max_lagrange_jacobi_residual: f64,
    pub max_inertia_defect: f64,
    pub collided_within_bound: bool,
}

/// Integrates up to the predicted collision time and checks the collision
/// happens in time with `-r r' >= delta` all the way. A start that meets
/// the open condition but misses the bound is a `BoundViolated` error.
pub fn collision_bound_experiment(state: &FullState, m: &MassTriple, delta: f64, kstar: f64) -> Result<BoundReport> {
    if !(delta > 0.0) {
        return Err(Error::Invalid("delta must be positive".into()));
    }
    let r0 = state.r();
    let j1_0 = j1(state);
    let pred = CollisionPredicate { j1_0, r0, delta, kstar };
    let open = open_condition(&pred, m) && state.r_dot() < 0.0;
    let bound_time = r0 * r0 / (2.0 * delta);
    let tl = integrate_full(state, m, bound_time, 1e-12)?;
    let collision_time = (tl.stop == StopReason::Collision).then(|| tl.rows.last().map_or(0.0, |r| r.t));
    let min_margin = tl.rows.iter().map(|r| -r.r * r.r_dot - delta).fold(f64::INFINITY, f64::min);
    let collided_within_bound = collision_time.is_some_and(|t| t <= bound_time);
    let report = BoundReport {
        r0,
        j1_0,
        delta,
        kstar,
        open_condition: open,
        bound_time,
        collision_time,
        min_margin,
        max_lagrange_jacobi_residual: tl.max_lagrange_jacobi_residual,
        max_inertia_defect: tl.max_inertia_defect,
        collided_within_bound,
    };
    if open && (!collided_within_bound || min_margin < 0.0) {
        return Err(Error::BoundViolated(format!(
            "r0 = {r0}, delta = {delta}: collision at {collision_time:?}, bound {bound_time}, margin {min_margin}"
        )));
    }
    Ok(report)
}

/// Point on the unit shape sphere of a planar triangle: the normalized
/// squared sides fix the horizontal part, the orientation fixes the
/// hemisphere.
pub fn shape_of_triangle(x: &[Vec2; 3]) -> Vec3 {
    let side = |i: usize, j: usize| {
        let d = lin(1.0, x[i], -1.0, x[j]);
        dot2(d, d)
    };
    // s_k is the side opposite body k.
    let s = [side(1, 2), side(0, 2), side(0, 1)];
    let total: f64 = s.iter().sum();
    let hat = s.map(|v| 3.0 * v / total);
    let nx = 1.0 - hat[0];
    let ny = (1.0 - hat[2] + 0.5 * nx) * 2.0 / 3f64.sqrt();
    let area = wedge(lin(1.0, x[1], -1.0, x[0]), lin(1.0, x[2], -1.0, x[0]));
    let nz = (1.0 - nx * nx - ny * ny).max(0.0).sqrt();
    vec3::normalize([nx, ny, if area < 0.0 { -nz } else { nz }])
}

pub fn shape_of(s: &FullState, m: &MassTriple) -> Vec3 {
    shape_of_triangle(&s.to_cartesian(m).0)
}

/// Velocity of the shape point in Newtonian time, by a centered difference
/// along the straight-line motion of the bodies.
pub fn shape_velocity(s: &FullState, m: &MassTriple) -> Vec3 {
    let (x, v) = s.to_cartesian(m);
    let h = 1e-7;
    let moved = |k: f64| {
        let mut y = x;
        for i in 0..3 {
            y[i] = lin(1.0, x[i], k, v[i]);
        }
        shape_of_triangle(&y)
    };
    vec3::scale(vec3::sub(moved(h), moved(-h)), 0.5 / h)
}
