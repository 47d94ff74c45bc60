//! JM geodesics on the thrice-punctured sphere.
//!
//! Integration runs in the unit-sphere embedding, which has no pole
//! singularity: for `sigma = (1/2) log F` the geodesic equation of
//! `e^{2 sigma} g_round` reads
//! `n'' = -|n'|^2 n - 2 (grad sigma . n') n' + |n'|^2 grad sigma`.
//! The `(phi, theta)` form is kept in [`geodesic_rhs`] for callers that want
//! chart derivatives. Syzygies are the zeros of the `z` component.

use std::f64::consts::{SQRT_2, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jm_metric::{conformal_factor_unit, end_chart, log_factor_chart_gradient, log_factor_unit_gradient};
use crate::ode::{self, Control, OdeOptions};
use crate::shape_geometry::{collision_distance, Letter, MassTriple, ShapePoint, SideTriple, DEFAULT_EXCLUSION};
use crate::syzygy::{Sign, SignedWord};
use crate::vec3::{self, Vec3};

/// Point plus coordinate velocity per unit JM arclength.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub point: ShapePoint,
    pub v_phi: f64,
    pub v_theta: f64,
    pub s: f64,
}

/// Chart derivative of a [`GeodesicState`] with respect to arclength.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDerivative {
    pub phi: f64,
    pub theta: f64,
    pub v_phi: f64,
    pub v_theta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyzygyEvent {
    pub s_at: f64,
    pub theta_at: f64,
    pub letter: Letter,
    pub sign: Sign,
    /// Position and velocity in the unit-sphere embedding at the crossing.
    pub position: Vec3,
    pub velocity: Vec3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fate {
    Running,
    EnteredEnd(Letter),
    LeftDomain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    /// Newtonian time at each sample, starting from zero.
    pub newton_time: Vec<f64>,
    pub events: Vec<SyzygyEvent>,
    pub fate: Fate,
    /// Embedded position and velocity at the last accepted step.
    pub final_position: Vec3,
    pub final_velocity: Vec3,
    /// Largest relative speed correction applied after a step.
    pub max_speed_correction: f64,
    /// Sum of the relative speed corrections.
    pub total_speed_correction: f64,
}

impl Trajectory {
    pub fn arclength(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.s) - self.samples.first().map_or(0.0, |s| s.s)
    }

    /// Speed correction per unit arclength.
    pub fn drift_rate(&self) -> f64 {
        let len = self.arclength();
        if len > 0.0 {
            self.total_speed_correction / len
        } else {
            0.0
        }
    }

    /// The unsigned-phase signed word of the recorded events.
    pub fn word(&self) -> SignedWord {
        SignedWord {
            letters: self.events.iter().map(|e| e.letter).collect(),
            phase: self.events.first().map(|e| e.sign),
            periodic: false,
        }
    }

    pub fn final_state(&self) -> GeodesicState {
        let s = self.samples.last().map_or(0.0, |x| x.s);
        GeodesicState::from_embedded(self.final_position, self.final_velocity, s)
    }
}

fn chart_frame(p: ShapePoint) -> (Vec3, Vec3) {
    let (sp, cp) = p.phi.sin_cos();
    let (st, ct) = p.theta.sin_cos();
    ([-sp * ct, -sp * st, cp], [-st, ct, 0.0])
}

impl GeodesicState {
    /// Embedded position and velocity `dn/ds`.
    pub fn to_embedded(&self) -> (Vec3, Vec3) {
        let (e_phi, e_theta) = chart_frame(self.point);
        let c = self.point.phi.cos();
        let v = vec3::axpy(self.v_phi, e_phi, vec3::scale(e_theta, c * self.v_theta));
        (self.point.to_unit(), v)
    }

    /// Chart state from an embedded one. At a pole `v_theta` is set to zero
    /// and the whole speed is put into `v_phi`.
    pub fn from_embedded(n: Vec3, v: Vec3, s: f64) -> Self {
        let point = ShapePoint::from_unit(n);
        let (e_phi, e_theta) = chart_frame(point);
        let c = point.phi.cos();
        if c < 1e-300 {
            return GeodesicState { point, v_phi: vec3::norm(v), v_theta: 0.0, s };
        }
        GeodesicState { point, v_phi: vec3::dot(v, e_phi), v_theta: vec3::dot(v, e_theta) / c, s }
    }

    /// Unit-JM-speed state through `p` with heading measured from the
    /// direction of increasing `theta` toward increasing `phi`.
    pub fn launch(p: ShapePoint, heading: f64, m: &MassTriple) -> Result<Self> {
        let n = p.to_unit();
        let (e_phi, e_theta) = if p.phi.cos() > 1e-12 {
            chart_frame(p)
        } else {
            let e = vec3::any_orthonormal(n);
            (vec3::cross(n, e), e)
        };
        let dir = vec3::axpy(heading.sin(), e_phi, vec3::scale(e_theta, heading.cos()));
        let v = unit_speed(n, dir, m)?;
        Ok(GeodesicState::from_embedded(n, v, 0.0))
    }

    /// `F (1/4)(v_phi^2 + cos^2 phi v_theta^2) - 1`.
    pub fn speed_defect(&self, m: &MassTriple) -> Result<f64> {
        let (n, v) = self.to_embedded();
        Ok(conformal_factor_unit(n, m)? * 0.25 * vec3::dot(v, v) - 1.0)
    }

    /// Same point, opposite velocity.
    pub fn reversed(&self) -> Self {
        GeodesicState { v_phi: -self.v_phi, v_theta: -self.v_theta, ..*self }
    }
}

/// Scales the tangent direction `dir` at `n` to unit JM speed.
pub fn unit_speed(n: Vec3, dir: Vec3, m: &MassTriple) -> Result<Vec3> {
    let t = vec3::tangent_part(n, dir);
    let len = vec3::norm(t);
    if !(len > 0.0) {
        return Err(Error::Invalid("launch direction must be tangent and nonzero".into()));
    }
    let f = conformal_factor_unit(n, m)?;
    Ok(vec3::scale(t, 2.0 / (f.sqrt() * len)))
}

/// Exact geodesic acceleration in the `(phi, theta)` chart.
pub fn geodesic_rhs(state: &GeodesicState, m: &MassTriple) -> Result<StateDerivative> {
    let phi = state.point.phi;
    let c = phi.cos();
    if c.abs() < 1e-12 {
        return Err(Error::PoleSingularity { phi });
    }
    let (_, lphi, ltheta) = log_factor_chart_gradient(state.point, m)?;
    let (sphi, stheta) = (0.5 * lphi, 0.5 * ltheta);
    let (vp, vt) = (state.v_phi, state.v_theta);
    let dot = sphi * vp + stheta * vt;
    let sq = vp * vp + c * c * vt * vt;
    Ok(StateDerivative {
        phi: vp,
        theta: vt,
        v_phi: -phi.sin() * c * vt * vt - 2.0 * dot * vp + sq * sphi,
        v_theta: 2.0 * phi.tan() * vp * vt - 2.0 * dot * vt + sq * stheta / (c * c),
    })
}

/// Rate of Newtonian time per unit JM arclength, `1 / (sqrt(2) U~)` where
/// `U~ = F / lambda^2` is the potential in the mass-metric normalization.
pub fn newton_rate(n: Vec3, m: &MassTriple) -> Result<f64> {
    let s = SideTriple::from_unit(n);
    s.check_exclusion(DEFAULT_EXCLUSION)?;
    let f = crate::jm_metric::conformal_factor_from_sides(&s, m);
    let ps: f64 = (0..3).map(|k| m.products()[k] * s.s[k]).sum();
    let lambda = m.d_m() * m.total() / ps;
    Ok(lambda * lambda / (SQRT_2 * f))
}

/// Embedded first-order system `y = (n, v, t)` with `t` the Newtonian time.
pub fn embedded_rhs(y: &[f64; 7], m: &MassTriple) -> Result<[f64; 7]> {
    let n = [y[0], y[1], y[2]];
    let v = [y[3], y[4], y[5]];
    let (_, g) = log_factor_unit_gradient(n, m)?;
    let vv = vec3::dot(v, v);
    let gv = vec3::dot(g, v);
    let nn = vec3::dot(n, n);
    let mut a = [0.0; 3];
    for i in 0..3 {
        a[i] = -vv * n[i] / nn - gv * v[i] + 0.5 * vv * g[i];
    }
    Ok([v[0], v[1], v[2], a[0], a[1], a[2], newton_rate(n, m)?])
}

/// Middle body of the collinear configuration at equator angle `theta`.
pub fn classify_crossing(theta: f64) -> Result<Letter> {
    let s = crate::shape_geometry::squared_sides(ShapePoint::new(0.0, theta));
    if s.min_side().1 < DEFAULT_EXCLUSION {
        return Err(Error::AtCollision(theta));
    }
    Ok(longest_side(&s))
}

fn longest_side(s: &SideTriple) -> Letter {
    let mut best = Letter::One;
    for k in [Letter::Two, Letter::Three] {
        if s.s[k.index()] > s.s[best.index()] {
            best = k;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowOptions {
    pub tol: f64,
    /// A squared side below this ends the run with [`Fate::EnteredEnd`].
    pub end_threshold: f64,
    /// Events are located until `|z| <` this.
    pub event_tol: f64,
    /// Stop after this many events.
    pub max_events: Option<usize>,
    /// Keep every accepted step in `samples` (otherwise only the endpoints).
    pub record_samples: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { tol: 1e-10, end_threshold: 1e-9, event_tol: 1e-10, max_events: None, record_samples: true }
    }
}

/// Integrates a unit-speed geodesic for arclength `s_max` (negative values
/// run backwards) or until it enters an end.
pub fn integrate(start: &GeodesicState, m: &MassTriple, s_max: f64, tol: f64) -> Result<Trajectory> {
    let (n, v) = start.to_embedded();
    integrate_embedded(n, v, start.s, m, s_max, &FlowOptions { tol, ..Default::default() })
}

/// As [`integrate`], from an embedded position and velocity.
pub fn integrate_embedded(
    n0: Vec3,
    v0: Vec3,
    s0: f64,
    m: &MassTriple,
    s_max: f64,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    SideTriple::from_unit(n0).check_exclusion(DEFAULT_EXCLUSION)?;
    let n0 = vec3::normalize(n0);
    let v0 = unit_speed(n0, v0, m)?;
    let rhs = |_: f64, y: &[f64; 7]| embedded_rhs(y, m);
    let ode_opts = OdeOptions { atol: opts.tol, rtol: opts.tol, h_init: 1e-3, h_max: 0.25, ..Default::default() };

    let mut samples = vec![GeodesicState::from_embedded(n0, v0, s0)];
    let mut newton_time = vec![0.0];
    let mut events = Vec::new();
    let mut fate = Fate::Running;
    let mut max_corr: f64 = 0.0;
    let mut total_corr = 0.0;
    let mut last = (n0, v0, s0, 0.0);

    let y0 = [n0[0], n0[1], n0[2], v0[0], v0[1], v0[2], 0.0];
    let result = ode::integrate(rhs, s0, y0, s0 + s_max, &ode_opts, |t_prev, y_prev, t, y| {
        if y.iter().any(|x| !x.is_finite()) {
            fate = Fate::LeftDomain;
            return Ok(Control::Stop);
        }
        let n = vec3::normalize([y[0], y[1], y[2]]);
        let v_raw = vec3::tangent_part(n, [y[3], y[4], y[5]]);
        let sides = SideTriple::from_unit(n);
        let (k, smin) = sides.min_side();
        let v = if smin >= DEFAULT_EXCLUSION {
            let f = crate::jm_metric::conformal_factor_from_sides(&sides, m);
            let speed = 0.5 * f.sqrt() * vec3::norm(v_raw);
            let corr = (speed - 1.0).abs();
            max_corr = max_corr.max(corr);
            total_corr += corr;
            vec3::scale(v_raw, 1.0 / speed)
        } else {
            v_raw
        };
        y[..3].copy_from_slice(&n);
        y[3..6].copy_from_slice(&v);

        let mut stop = false;
        let z0 = y_prev[2];
        let z1 = y[2];
        if z0 * z1 < 0.0 {
            let h = t - t_prev;
            let mut f = rhs;
            let zeta = |dh: f64| -> Result<f64> {
                let (yy, _) = ode::dp5_step(&mut f, t_prev, y_prev, dh)?;
                Ok(yy[2] / vec3::norm([yy[0], yy[1], yy[2]]))
            };
            let dh = ode::illinois(zeta, h, z0, z1, opts.event_tol)?;
            let (ye, _) = ode::dp5_step(&mut f, t_prev, y_prev, dh)?;
            let ne = vec3::normalize([ye[0], ye[1], ye[2]]);
            let ve = vec3::tangent_part(ne, [ye[3], ye[4], ye[5]]);
            events.push(SyzygyEvent {
                s_at: t_prev + dh,
                theta_at: ne[1].atan2(ne[0]).rem_euclid(TAU),
                letter: longest_side(&SideTriple::from_unit(ne)),
                sign: if z0 > 0.0 { Sign::Plus } else { Sign::Minus },
                position: ne,
                velocity: ve,
            });
            if opts.max_events.is_some_and(|cap| events.len() >= cap) {
                stop = true;
            }
        }
        if smin < opts.end_threshold {
            fate = Fate::EnteredEnd(k);
            stop = true;
        }
        if opts.record_samples || stop {
            samples.push(GeodesicState::from_embedded(n, v, t));
            newton_time.push(y[6]);
        }
        last = (n, v, t, y[6]);
        Ok(if stop { Control::Stop } else { Control::Continue })
    });
    match result {
        Ok(_) => {}
        Err(Error::CollisionSingularity { letter, .. }) => {
            fate = Fate::EnteredEnd(Letter::from_digit(letter).unwrap_or(Letter::One));
        }
        // Step collapse this deep in an end is loss of precision in the
        // sides, not a failure of the flow.
        Err(Error::StepFailure { .. }) if SideTriple::from_unit(last.0).min_side().1 < 1e-6 => {
            fate = Fate::EnteredEnd(SideTriple::from_unit(last.0).min_side().0);
        }
        Err(e) => return Err(e),
    }
    let (n, v, s, t) = last;
    if samples.last().map(|x| x.s) != Some(s) {
        samples.push(GeodesicState::from_embedded(n, v, s));
        newton_time.push(t);
    }
    Ok(Trajectory {
        samples,
        newton_time,
        events,
        fate,
        final_position: n,
        final_velocity: v,
        max_speed_correction: max_corr,
        total_speed_correction: total_corr,
    })
}

/// Default `ell` threshold for [`detect_end_approach`].
pub const DEFAULT_END_ELL: f64 = 2.0;

/// Heuristic end detection: `Some(k)` when the end coordinate of end `k`
/// grows monotonically over the last `window` of arclength and finishes
/// above `DEFAULT_END_ELL`.
pub fn detect_end_approach(traj: &Trajectory, m: &MassTriple, window: f64) -> Option<Letter> {
    detect_end_approach_with(traj, m, window, DEFAULT_END_ELL)
}

pub fn detect_end_approach_with(traj: &Trajectory, m: &MassTriple, window: f64, threshold: f64) -> Option<Letter> {
    let last = traj.samples.last()?;
    let tail: Vec<&GeodesicState> = traj.samples.iter().filter(|x| x.s >= last.s - window).collect();
    if tail.len() < 3 {
        return None;
    }
    let k = crate::shape_geometry::squared_sides(last.point).min_side().0;
    let mut prev = f64::NEG_INFINITY;
    for st in tail {
        let ell = end_chart(st.point, m, k).ok()?.ell;
        if ell < prev - 1e-9 {
            return None;
        }
        prev = ell;
    }
    (prev > threshold).then_some(k)
}

/// Whether some recorded sample lies outside all three collision balls of
/// round radius `radius`.
pub fn passes_through_region(traj: &Trajectory, radius: f64) -> bool {
    traj.samples.iter().any(|st| Letter::ALL.iter().all(|&k| collision_distance(st.point, k) >= radius))
}

/// Largest `|phi|` over the recorded samples.
pub fn max_latitude(traj: &Trajectory) -> f64 {
    traj.samples.iter().map(|s| s.point.phi.abs()).fold(0.0, f64::max)
}

/// Largest deviation from the meridian `theta = theta0` (mod the antipodal
/// meridian), measured as the `y`-type component in the rotated frame.
pub fn max_meridian_deviation(traj: &Trajectory, theta0: f64) -> f64 {
    let normal = [-theta0.sin(), theta0.cos(), 0.0];
    traj.samples
        .iter()
        .map(|s| vec3::dot(s.point.to_unit(), normal).abs())
        .fold(0.0, f64::max)
}
