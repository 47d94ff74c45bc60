//! Closed JM geodesics in a prescribed free homotopy class.
//!
//! The class of a closed curve on the pair of pants is its reduced periodic
//! signed syzygy word. A seed polygon with the right word is shortened by
//! L-BFGS on its midpoint-rule length (rejecting steps that change the word
//! or touch a collision ball), and the result is polished by multiple
//! shooting between consecutive equator crossings.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic_flow::{integrate_embedded, unit_speed, FlowOptions};
use crate::jm_metric::{conformal_factor_unit, end_point_unit, end_rho_for_ell, log_factor_unit_gradient};
use crate::numerics::{aitken, solve_dense};
use crate::shape_geometry::{Letter, MassTriple, ShapePoint, SideTriple, Symmetry};
use crate::syzygy::{is_tied, reduce_stutters, Sign, SignedWord};
use crate::vec3::{self, Vec3};

/// A closed polygon on the shape sphere (great-circle edges) together with
/// the class it is meant to represent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLoop {
    pub vertices: Vec<ShapePoint>,
    pub target_word: SignedWord,
}

impl DiscreteLoop {
    pub fn from_units(units: &[Vec3], target_word: SignedWord) -> Self {
        DiscreteLoop { vertices: units.iter().map(|&u| ShapePoint::from_unit(u)).collect(), target_word }
    }

    pub fn units(&self) -> Vec<Vec3> {
        self.vertices.iter().map(|p| p.to_unit()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationResult {
    pub loop_: DiscreteLoop,
    pub jm_length: f64,
    pub converged: bool,
    /// Norm of the first variation: velocity and position mismatches at the
    /// shooting nodes after polishing, or the polygon gradient otherwise.
    pub gradient_norm: f64,
    /// Newton iterations of the shooting polish.
    pub iterations: usize,
    /// Midpoint-rule lengths of the accepted shortening iterates.
    pub length_history: Vec<f64>,
    /// Launch position and velocity of the closed geodesic.
    pub launch: Option<(Vec3, Vec3)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortenOptions {
    /// Target norm of the first variation.
    pub tol: f64,
    pub max_iter: usize,
    /// Round radius around each collision that vertices may not enter.
    pub exclusion: f64,
    /// Skip the shooting polish (plain curve shortening).
    pub polygon_only: bool,
    /// Integration tolerance for shooting.
    pub flow_tol: f64,
    /// Arclength spacing of the returned dense loop.
    pub sample_spacing: f64,
}

impl Default for ShortenOptions {
    fn default() -> Self {
        ShortenOptions { tol: 1e-10, max_iter: 4000, exclusion: 0.03, polygon_only: false, flow_tol: 1e-12, sample_spacing: 0.01 }
    }
}

fn is_upper(n: Vec3) -> bool {
    n[2] >= 0.0
}

fn longest_side(n: Vec3) -> Letter {
    let s = SideTriple::from_unit(n).s;
    let mut best = 0;
    for k in 1..3 {
        if s[k] > s[best] {
            best = k;
        }
    }
    Letter::from_index(best)
}

/// Equator crossings of a closed polygon: `(edge index, crossing point, sign)`.
fn polygon_crossings(units: &[Vec3]) -> Vec<(usize, Vec3, Sign)> {
    let n = units.len();
    let mut out = Vec::new();
    for i in 0..n {
        let a = units[i];
        let b = units[(i + 1) % n];
        if is_upper(a) != is_upper(b) {
            let t = a[2] / (a[2] - b[2]);
            let x = vec3::normalize(vec3::axpy(t, vec3::sub(b, a), a));
            let sign = if is_upper(a) { Sign::Plus } else { Sign::Minus };
            out.push((i, x, sign));
        }
    }
    out
}

/// Raw periodic signed word of a closed polygon.
pub fn polygon_word(units: &[Vec3]) -> SignedWord {
    let cr = polygon_crossings(units);
    SignedWord {
        letters: cr.iter().map(|c| longest_side(c.1)).collect(),
        phase: cr.first().map(|c| c.2),
        periodic: true,
    }
}

/// Reduced syzygy word of the loop.
pub fn loop_word(lp: &DiscreteLoop) -> SignedWord {
    reduce_stutters(&polygon_word(&lp.units()))
}

fn same_class(units: &[Vec3], target_reduced: &SignedWord) -> bool {
    reduce_stutters(&polygon_word(units)).same_cycle(target_reduced)
}

fn sqrt_factor(n: Vec3, m: &MassTriple) -> Result<f64> {
    Ok(conformal_factor_unit(n, m)?.sqrt())
}

/// JM length of the great arc from `a` to `b`, refining a composite midpoint
/// rule until successive values agree to 1e-8 relative.
pub fn edge_length(a: Vec3, b: Vec3, m: &MassTriple) -> Result<f64> {
    let ang = vec3::angle(a, b);
    if ang == 0.0 {
        return Ok(0.0);
    }
    let e = vec3::normalize(vec3::tangent_part(a, b));
    let mut pieces = 1usize;
    let mut prev = f64::NAN;
    loop {
        let dt = ang / pieces as f64;
        let mut acc = 0.0;
        for j in 0..pieces {
            acc += sqrt_factor(vec3::great_circle(a, e, (j as f64 + 0.5) * dt), m)?;
        }
        let val = acc * 0.5 * dt;
        if (val - prev).abs() <= 1e-8 * val || pieces >= 1 << 14 {
            return Ok(val);
        }
        prev = val;
        pieces *= 2;
    }
}

/// JM length of a polyline through unit vectors, closed or open.
pub fn polyline_length(units: &[Vec3], closed: bool, m: &MassTriple) -> Result<f64> {
    let n = units.len();
    let edges = if closed { n } else { n.saturating_sub(1) };
    let mut total = 0.0;
    for i in 0..edges {
        total += edge_length(units[i], units[(i + 1) % n], m)?;
    }
    Ok(total)
}

/// JM length of the closed polygon.
pub fn jm_length(lp: &DiscreteLoop, m: &MassTriple) -> Result<f64> {
    polyline_length(&lp.units(), true, m)
}

/// Simpson-rule length of the polygon and its gradient with respect to the
/// vertices. Sampling the endpoints keeps vertices from sliding into the
/// collisions, which the plain midpoint rule under-weights.
fn discrete_length_grad(units: &[Vec3], m: &MassTriple, grad: &mut [Vec3]) -> Result<f64> {
    let n = units.len();
    let mut g_vert = Vec::with_capacity(n);
    let mut dg_vert = Vec::with_capacity(n);
    for &a in units {
        let (f, glog) = log_factor_unit_gradient(a, m)?;
        let g = f.sqrt();
        g_vert.push(g);
        dg_vert.push(vec3::scale(glog, 0.5 * g));
    }
    for g in grad.iter_mut() {
        *g = [0.0; 3];
    }
    let mut total = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (units[i], units[j]);
        let sum = vec3::add(a, b);
        let sum_len = vec3::norm(sum);
        let mid = vec3::scale(sum, 1.0 / sum_len);
        let (f, glog) = log_factor_unit_gradient(mid, m)?;
        let gm = f.sqrt();
        let gbar = (g_vert[i] + 4.0 * gm + g_vert[j]) / 6.0;
        let ang = vec3::angle(a, b);
        total += 0.5 * ang * gbar;
        let sin = ang.sin().max(1e-300);
        // d(angle)/da and d(angle)/db, tangential.
        let da = vec3::scale(vec3::tangent_part(a, b), -1.0 / sin);
        let db = vec3::scale(vec3::tangent_part(b, a), -1.0 / sin);
        let dgm = vec3::scale(glog, 0.5 * gm / sum_len);
        let ga = vec3::add(vec3::scale(dg_vert[i], 1.0 / 6.0), vec3::scale(vec3::tangent_part(a, dgm), 4.0 / 6.0));
        let gb = vec3::add(vec3::scale(dg_vert[j], 1.0 / 6.0), vec3::scale(vec3::tangent_part(b, dgm), 4.0 / 6.0));
        grad[i] = vec3::add(grad[i], vec3::add(vec3::scale(da, 0.5 * gbar), vec3::scale(ga, 0.5 * ang)));
        grad[j] = vec3::add(grad[j], vec3::add(vec3::scale(db, 0.5 * gbar), vec3::scale(gb, 0.5 * ang)));
    }
    Ok(total)
}

fn longest_edge(units: &[Vec3]) -> f64 {
    let n = units.len();
    (0..n).map(|i| vec3::angle(units[i], units[(i + 1) % n])).fold(0.0, f64::max)
}

fn clear_of_collisions(units: &[Vec3], exclusion: f64) -> bool {
    let limit = 2.0 * exclusion.sin().powi(2);
    let n = units.len();
    (0..n).all(|i| {
        let a = units[i];
        let mid = vec3::normalize(vec3::add(a, units[(i + 1) % n]));
        SideTriple::from_unit(a).min_side().1 > limit && SideTriple::from_unit(mid).min_side().1 > limit
    })
}

fn slerp(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    let ang = vec3::angle(a, b);
    if ang < 1e-15 {
        return a;
    }
    let e = vec3::normalize(vec3::tangent_part(a, b));
    vec3::great_circle(a, e, t * ang)
}

fn check_realizable(word: &SignedWord) -> Result<SignedWord> {
    if word.phase.is_none() {
        return Err(Error::Invalid(format!("word {word} must carry signs")));
    }
    if !word.periodic {
        return Err(Error::Invalid(format!("word {word} must be periodic")));
    }
    if !word.is_stutter_free() {
        return Err(Error::Invalid(format!("word {word} has stutters")));
    }
    if word.len() % 2 == 1 {
        return Err(Error::OddPeriodicLength(word.len()));
    }
    if !is_tied(word) {
        return Err(Error::UntiedWord(word.to_string()));
    }
    Ok(word.clone())
}

/// Seed polygon for a tied word: crossings at the middle of the prescribed
/// arcs, joined through apices in alternating hemispheres.
pub fn seed_loop(word: &SignedWord, m: &MassTriple, n_per_letter: usize) -> Result<DiscreteLoop> {
    seed_loop_jittered(word, m, n_per_letter, None)
}

/// As [`seed_loop`], with crossing longitudes and apex heights perturbed by
/// a seeded random jitter.
pub fn seed_loop_jittered(word: &SignedWord, m: &MassTriple, n_per_letter: usize, seed: Option<u64>) -> Result<DiscreteLoop> {
    let word = check_realizable(word)?;
    let _ = m;
    build_seed(&word, n_per_letter, seed)
}

/// Seed polygon for any signed periodic stutter-free word, tied or not. Used
/// to watch curve shortening fail on untied classes.
pub fn seed_polygon(word: &SignedWord, n_per_letter: usize, seed: Option<u64>) -> Result<DiscreteLoop> {
    if word.phase.is_none() || !word.periodic || !word.is_stutter_free() || word.len() < 2 {
        return Err(Error::Invalid(format!("cannot seed {word}")));
    }
    build_seed(word, n_per_letter, seed)
}

fn build_seed(word: &SignedWord, n_per_letter: usize, seed: Option<u64>) -> Result<DiscreteLoop> {
    if n_per_letter < 3 {
        return Err(Error::Invalid("need at least three vertices per letter".into()));
    }
    let signs = word.signs().expect("signed");
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut jitter = |amp: f64| rng.as_mut().map_or(0.0, |r| r.gen_range(-amp..amp));
    let l = word.len();
    let thetas: Vec<f64> = word.letters.iter().map(|k| k.arc_midpoint_theta() + jitter(0.25)).collect();
    let heights: Vec<f64> = (0..l).map(|_| 0.6 + jitter(0.25)).collect();
    let at = |phi: f64, theta: f64| ShapePoint { phi, theta }.to_unit();
    let mut control = Vec::new();
    for i in 0..l {
        let j = (i + 1) % l;
        // After a Plus crossing the loop is in the lower hemisphere.
        let side = if signs[i] == Sign::Plus { -1.0 } else { 1.0 };
        let mut d = (thetas[j] - thetas[i]).rem_euclid(TAU);
        if d > PI {
            d -= TAU;
        }
        control.push(at(-side * 0.05, thetas[i]));
        control.push(at(side * 0.05, thetas[i]));
        control.push(at(side * heights[i], thetas[i] + 0.5 * d));
    }
    let segs = control.len();
    let per_seg = (n_per_letter * l).div_ceil(segs).max(1);
    let mut units = Vec::with_capacity(per_seg * segs);
    for s in 0..segs {
        let (a, b) = (control[s], control[(s + 1) % segs]);
        for t in 0..per_seg {
            units.push(slerp(a, b, t as f64 / per_seg as f64));
        }
    }
    let lp = DiscreteLoop::from_units(&units, word.clone());
    let found = loop_word(&lp);
    if !found.same_cycle(&reduce_stutters(word)) {
        return Err(Error::HomotopyEscape { expected: word.to_string(), found: found.to_string() });
    }
    Ok(lp)
}

/// Outcome of plain curve shortening.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortenReport {
    pub units: Vec<Vec3>,
    pub lengths: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn flat_dot(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| vec3::dot(*x, *y)).sum()
}

fn grad_norm(g: &[Vec3]) -> f64 {
    flat_dot(g, g).sqrt()
}

/// L-BFGS on the midpoint-rule length. Steps that change the class or come
/// within `exclusion` of a collision are rejected by backtracking, so the
/// accepted lengths never increase.
pub fn curve_shorten(units: &[Vec3], target: &SignedWord, m: &MassTriple, opts: &ShortenOptions) -> Result<ShortenReport> {
    let target = reduce_stutters(target);
    if !same_class(units, &target) {
        return Err(Error::HomotopyEscape { expected: target.to_string(), found: reduce_stutters(&polygon_word(units)).to_string() });
    }
    let n = units.len();
    let mut x: Vec<Vec3> = units.iter().map(|&u| vec3::normalize(u)).collect();
    let mut g = vec![[0.0; 3]; n];
    let mut f = discrete_length_grad(&x, m, &mut g)?;
    let mut lengths = vec![f];
    // Vertices slide along the curve almost for free; capping the edge
    // length keeps them from bunching up.
    let max_edge = (3.0 * longest_edge(&x)).min(0.5);
    let mem = 12;
    let mut s_hist: Vec<Vec<Vec3>> = Vec::new();
    let mut y_hist: Vec<Vec<Vec3>> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut stalls = 0;
    let mut g_new = vec![[0.0; 3]; n];
    while iterations < opts.max_iter {
        let gn = grad_norm(&g);
        if gn < opts.tol {
            converged = true;
            break;
        }
        // Two-loop recursion.
        let mut q = g.clone();
        let k = s_hist.len();
        let mut alphas = vec![0.0; k];
        for i in (0..k).rev() {
            let rho = 1.0 / flat_dot(&y_hist[i], &s_hist[i]);
            alphas[i] = rho * flat_dot(&s_hist[i], &q);
            for (qv, yv) in q.iter_mut().zip(&y_hist[i]) {
                *qv = vec3::axpy(-alphas[i], *yv, *qv);
            }
        }
        let gamma = if k > 0 {
            flat_dot(&s_hist[k - 1], &y_hist[k - 1]) / flat_dot(&y_hist[k - 1], &y_hist[k - 1])
        } else {
            1e-3 / gn.max(1e-300)
        };
        for qv in q.iter_mut() {
            *qv = vec3::scale(*qv, gamma);
        }
        for i in 0..k {
            let rho = 1.0 / flat_dot(&y_hist[i], &s_hist[i]);
            let beta = rho * flat_dot(&y_hist[i], &q);
            for (qv, sv) in q.iter_mut().zip(&s_hist[i]) {
                *qv = vec3::axpy(alphas[i] - beta, *sv, *qv);
            }
        }
        let mut dir: Vec<Vec3> = x.iter().zip(&q).map(|(xi, qi)| vec3::scale(vec3::tangent_part(*xi, *qi), -1.0)).collect();
        let mut slope = flat_dot(&dir, &g);
        if !(slope < 0.0) {
            s_hist.clear();
            y_hist.clear();
            dir = g.iter().map(|v| vec3::scale(*v, -1e-3 / gn)).collect();
            slope = flat_dot(&dir, &g);
        }
        // Keep individual vertex moves small.
        let max_move = dir.iter().map(|d| vec3::norm(*d)).fold(0.0, f64::max);
        let mut step = if max_move > 0.05 { 0.05 / max_move } else { 1.0 };
        let mut accepted = None;
        for _ in 0..40 {
            let trial: Vec<Vec3> = x.iter().zip(&dir).map(|(xi, di)| vec3::normalize(vec3::axpy(step, *di, *xi))).collect();
            if longest_edge(&trial) <= max_edge && clear_of_collisions(&trial, opts.exclusion) && same_class(&trial, &target) {
                if let Ok(ft) = discrete_length_grad(&trial, m, &mut g_new) {
                    if ft <= f + 1e-4 * step * slope {
                        accepted = Some((trial, ft));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((trial, ft)) = accepted else {
            if s_hist.is_empty() {
                break;
            }
            s_hist.clear();
            y_hist.clear();
            continue;
        };
        let s_vec: Vec<Vec3> = trial.iter().zip(&x).map(|(a, b)| vec3::sub(*a, *b)).collect();
        let y_vec: Vec<Vec3> = g_new.iter().zip(&g).map(|(a, b)| vec3::sub(*a, *b)).collect();
        if flat_dot(&s_vec, &y_vec) > 1e-18 {
            s_hist.push(s_vec);
            y_hist.push(y_vec);
            if s_hist.len() > mem {
                s_hist.remove(0);
                y_hist.remove(0);
            }
        }
        if f - ft < 1e-15 * f {
            stalls += 1;
        } else {
            stalls = 0;
        }
        x = trial;
        f = ft;
        std::mem::swap(&mut g, &mut g_new);
        lengths.push(f);
        if stalls >= 20 {
            break;
        }
    }
    Ok(ShortenReport { gradient_norm: grad_norm(&g), units: x, lengths, iterations, converged })
}

/// One crossing of the equator: longitude and the direction angle measured
/// from the direction of increasing `theta` toward the hemisphere entered.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Node {
    theta: f64,
    alpha: f64,
}

fn node_frame(theta: f64, sign: Sign) -> (Vec3, Vec3, Vec3) {
    let p = [theta.cos(), theta.sin(), 0.0];
    let east = [-theta.sin(), theta.cos(), 0.0];
    let cross = if sign == Sign::Plus { [0.0, 0.0, -1.0] } else { [0.0, 0.0, 1.0] };
    (p, east, cross)
}

struct Segment {
    theta: f64,
    alpha: f64,
    letter: Letter,
    sign: Sign,
    length: f64,
}

fn shoot(node: Node, sign: Sign, m: &MassTriple, tol: f64) -> Result<Segment> {
    let (p, east, cross) = node_frame(node.theta, sign);
    let dir = vec3::axpy(node.alpha.sin(), cross, vec3::scale(east, node.alpha.cos()));
    let v = unit_speed(p, dir, m)?;
    let opts = FlowOptions { tol, max_events: Some(1), record_samples: false, ..Default::default() };
    let tr = integrate_embedded(p, v, 0.0, m, 40.0, &opts)?;
    let ev = tr.events.first().ok_or(Error::NoConvergence { iterations: 0, residual: f64::INFINITY })?;
    let (_, e2, c2) = node_frame(ev.theta_at, ev.sign);
    let alpha = vec3::dot(ev.velocity, c2).atan2(vec3::dot(ev.velocity, e2));
    Ok(Segment { theta: ev.theta_at, alpha, letter: ev.letter, sign: ev.sign, length: ev.s_at })
}

fn wrap(a: f64) -> f64 {
    let mut d = a.rem_euclid(TAU);
    if d > PI {
        d -= TAU;
    }
    d
}

/// Shooting residual for all nodes; `None` if some segment lands on the
/// wrong arc or with the wrong sign.
fn shooting_residual(nodes: &[Node], word: &SignedWord, m: &MassTriple, tol: f64) -> Result<Option<(Vec<f64>, f64)>> {
    let l = nodes.len();
    let signs = word.signs().expect("signed");
    let mut r = vec![0.0; 2 * l];
    let mut total = 0.0;
    for i in 0..l {
        let j = (i + 1) % l;
        let seg = match shoot(nodes[i], signs[i], m, tol) {
            Ok(s) => s,
            Err(_) => return Ok(None),
        };
        if seg.letter != word.letters[j] || seg.sign != signs[j] {
            return Ok(None);
        }
        r[2 * i] = wrap(seg.theta - nodes[j].theta);
        r[2 * i + 1] = seg.alpha - nodes[j].alpha;
        total += seg.length;
    }
    Ok(Some((r, total)))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton's method with a finite-difference Jacobian on the shooting nodes.
/// Returns the nodes, residual norm, iterations and loop length.
fn polish(mut nodes: Vec<Node>, word: &SignedWord, m: &MassTriple, tol: f64, flow_tol: f64, max_iter: usize) -> Result<(Vec<Node>, f64, usize, f64)> {
    let l = nodes.len();
    let signs = word.signs().expect("signed");
    let Some((mut r, mut length)) = shooting_residual(&nodes, word, m, flow_tol)? else {
        return Err(Error::HomotopyEscape { expected: word.to_string(), found: "a different word on first shot".into() });
    };
    let mut rn = norm(&r);
    let mut it = 0;
    while rn > tol && it < max_iter {
        it += 1;
        let dim = 2 * l;
        let mut jac = vec![0.0; dim * dim];
        let eps = 1e-7;
        // Segment i depends on node i (start) and node i+1 (target).
        for i in 0..l {
            let j = (i + 1) % l;
            let base = shoot(nodes[i], signs[i], m, flow_tol)?;
            for c in 0..2 {
                let mut pert = nodes[i];
                if c == 0 {
                    pert.theta += eps;
                } else {
                    pert.alpha += eps;
                }
                let s = shoot(pert, signs[i], m, flow_tol)?;
                jac[(2 * i) * dim + 2 * i + c] = wrap(s.theta - base.theta) / eps;
                jac[(2 * i + 1) * dim + 2 * i + c] = (s.alpha - base.alpha) / eps;
            }
            jac[(2 * i) * dim + 2 * j] -= 1.0;
            jac[(2 * i + 1) * dim + 2 * j + 1] -= 1.0;
        }
        let mut delta: Vec<f64> = r.iter().map(|x| -x).collect();
        solve_dense(&mut jac, &mut delta)?;
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<Node> = nodes
                .iter()
                .enumerate()
                .map(|(i, nd)| Node { theta: nd.theta + t * delta[2 * i], alpha: nd.alpha + t * delta[2 * i + 1] })
                .collect();
            if let Some((rt, lt)) = shooting_residual(&trial, word, m, flow_tol)? {
                let rtn = norm(&rt);
                if rtn < (1.0 - 1e-4 * t) * rn || rtn < tol {
                    nodes = trial;
                    r = rt;
                    rn = rtn;
                    length = lt;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((nodes, rn, it, length))
}

/// Shooting nodes read off a polygon: one per crossing, aligned so that the
/// first node carries the first letter of the (rotated) target word.
fn nodes_from_polygon(units: &[Vec3], word: &SignedWord) -> Option<(Vec<Node>, SignedWord)> {
    let cr = polygon_crossings(units);
    if cr.len() != word.len() {
        return None;
    }
    let n = units.len();
    let nodes: Vec<Node> = cr
        .iter()
        .map(|&(i, x, sign)| {
            let prev = units[(i + n - 1) % n];
            let a = units[i];
            let b = units[(i + 1) % n];
            let next = units[(i + 2) % n];
            // Centered tangents at both ends of the edge, blended by where
            // the crossing falls on it.
            let t = vec3::angle(a, x) / vec3::angle(a, b).max(1e-300);
            let ta = vec3::normalize(vec3::sub(b, prev));
            let tb = vec3::normalize(vec3::sub(next, a));
            let dir = vec3::normalize(vec3::tangent_part(x, vec3::axpy(t, vec3::sub(tb, ta), ta)));
            let theta = x[1].atan2(x[0]).rem_euclid(TAU);
            let (_, east, cross) = node_frame(theta, sign);
            Node { theta, alpha: vec3::dot(dir, cross).atan2(vec3::dot(dir, east)) }
        })
        .collect();
    let found = SignedWord {
        letters: cr.iter().map(|c| longest_side(c.1)).collect(),
        phase: cr.first().map(|c| c.2),
        periodic: true,
    };
    found.same_cycle(word).then_some((nodes, found))
}

/// Dense samples of the closed geodesic launched at a node.
fn sample_closed(node: Node, sign: Sign, length: f64, m: &MassTriple, spacing: f64, tol: f64) -> Result<(Vec<Vec3>, (Vec3, Vec3))> {
    let (p, east, cross) = node_frame(node.theta, sign);
    let dir = vec3::axpy(node.alpha.sin(), cross, vec3::scale(east, node.alpha.cos()));
    let v = unit_speed(p, dir, m)?;
    let count = (length / spacing).ceil().max(8.0) as usize;
    let ds = length / count as f64;
    let opts = FlowOptions { tol, record_samples: false, ..Default::default() };
    let mut pts = vec![p];
    let (mut n, mut w) = (p, v);
    for _ in 1..count {
        let tr = integrate_embedded(n, w, 0.0, m, ds, &opts)?;
        n = tr.final_position;
        w = tr.final_velocity;
        pts.push(n);
    }
    Ok((pts, (p, v)))
}

const REFINEMENTS: usize = 4;

fn subdivide(units: &[Vec3]) -> Vec<Vec3> {
    let n = units.len();
    let mut out = Vec::with_capacity(2 * n);
    for i in 0..n {
        out.push(units[i]);
        out.push(vec3::normalize(vec3::add(units[i], units[(i + 1) % n])));
    }
    out
}

/// Shortens `lp` to the closed geodesic in its class.
pub fn shorten(lp: &DiscreteLoop, m: &MassTriple, tol: f64, max_iter: usize) -> Result<RealizationResult> {
    shorten_with(lp, m, &ShortenOptions { tol, max_iter, ..Default::default() })
}

pub fn shorten_with(lp: &DiscreteLoop, m: &MassTriple, opts: &ShortenOptions) -> Result<RealizationResult> {
    let target = reduce_stutters(&lp.target_word);
    let units = lp.units();
    if !same_class(&units, &target) {
        return Err(Error::HomotopyEscape { expected: target.to_string(), found: loop_word(lp).to_string() });
    }
    if opts.polygon_only || !is_tied(&target) {
        let rep = curve_shorten(&units, &target, m, opts)?;
        let out = DiscreteLoop::from_units(&rep.units, lp.target_word.clone());
        if !rep.converged {
            return Err(Error::NoConvergence { iterations: rep.iterations, residual: rep.gradient_norm });
        }
        return Ok(RealizationResult {
            jm_length: jm_length(&out, m)?,
            loop_: out,
            converged: true,
            gradient_norm: rep.gradient_norm,
            iterations: rep.iterations,
            length_history: rep.lengths,
            launch: None,
        });
    }

    // Input that is already close to a geodesic goes straight to the polish.
    let direct = nodes_from_polygon(&units, &target)
        .map(|(nodes, word)| polish(nodes, &word, m, opts.tol, opts.flow_tol, 2).map(|r| (r, word)));
    let mut history = Vec::new();
    let (nodes, rn, iterations, length, word) = match direct {
        Some(Ok(((nodes, rn, it, len), word))) if rn < opts.tol => (nodes, rn, it, len, word),
        _ => {
            // Shorten, then polish; if the polygon is too coarse for the
            // shots to land on the right arcs, subdivide and try again.
            let mut poly = units.clone();
            let mut outcome = None;
            for _ in 0..REFINEMENTS {
                let rep = curve_shorten(&poly, &target, m, opts)?;
                history.extend_from_slice(&rep.lengths);
                if let Some((nodes, word)) = nodes_from_polygon(&rep.units, &target) {
                    match polish(nodes, &word, m, opts.tol, opts.flow_tol, 50) {
                        Ok((nodes, rn, it, len)) => {
                            outcome = Some((nodes, rn, it, len, word));
                            break;
                        }
                        Err(Error::HomotopyEscape { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                poly = subdivide(&rep.units);
            }
            outcome.ok_or_else(|| Error::HomotopyEscape {
                expected: target.to_string(),
                found: "no consistent shooting nodes".into(),
            })?
        }
    };
    if rn >= opts.tol {
        return Err(Error::NoConvergence { iterations, residual: rn });
    }
    let sign0 = word.phase.expect("signed");
    let (pts, launch) = sample_closed(nodes[0], sign0, length, m, opts.sample_spacing, opts.flow_tol)?;
    Ok(RealizationResult {
        loop_: DiscreteLoop::from_units(&pts, lp.target_word.clone()),
        jm_length: length,
        converged: true,
        gradient_norm: rn,
        iterations,
        length_history: history,
        launch: Some(launch),
    })
}

/// Seeds and realizes `word` once per seed.
pub fn realize(word: &SignedWord, m: &MassTriple, seed: u64, n_per_letter: usize, opts: &ShortenOptions) -> Result<RealizationResult> {
    let lp = seed_loop_jittered(word, m, n_per_letter, Some(seed))?;
    shorten_with(&lp, m, opts)
}

/// Distance from `p` to the minor arc from `a` to `b` on the unit sphere.
fn point_to_arc(p: Vec3, a: Vec3, b: Vec3) -> f64 {
    let normal = vec3::cross(a, b);
    let nn = vec3::norm(normal);
    let mut d = vec3::angle(p, a).min(vec3::angle(p, b));
    if nn > 1e-15 {
        let nu = vec3::scale(normal, 1.0 / nn);
        let proj = vec3::tangent_part(nu, p);
        let pl = vec3::norm(proj);
        if pl > 1e-15 {
            let q = vec3::scale(proj, 1.0 / pl);
            // q lies on the arc when it is between a and b.
            if vec3::dot(vec3::cross(a, q), nu) >= 0.0 && vec3::dot(vec3::cross(q, b), nu) >= 0.0 {
                d = d.min(vec3::angle(p, q));
            }
        }
    }
    d
}

/// Distance from `p` to the closed polyline, or some value below `stop` as
/// soon as one is found.
fn point_to_polyline(p: Vec3, poly: &[Vec3], stop: f64) -> f64 {
    let n = poly.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        // Cheap lower bound from the chord to the nearer end.
        let reach = 2.0 * (0.5 * vec3::norm(vec3::sub(a, b))).min(1.0).asin();
        let near = 2.0 * (0.5 * vec3::norm(vec3::sub(p, a))).min(1.0).asin();
        if near - reach >= best {
            continue;
        }
        best = best.min(point_to_arc(p, a, b));
        if best < stop {
            break;
        }
    }
    best
}

/// Directed distance, abandoned once it exceeds `give_up`.
fn directed(a: &[Vec3], b: &[Vec3], give_up: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for &p in a {
        worst = worst.max(point_to_polyline(p, b, worst));
        if worst > give_up {
            break;
        }
    }
    worst
}

/// Hausdorff distance between two closed polylines, along great-circle
/// arcs, in the metric of the radius-one-half shape sphere.
pub fn hausdorff(a: &[Vec3], b: &[Vec3]) -> f64 {
    0.5 * directed(a, b, f64::INFINITY).max(directed(b, a, f64::INFINITY))
}

/// Hausdorff distance minimized over the twelve-element symmetry group.
pub fn symmetric_hausdorff(a: &[Vec3], b: &[Vec3]) -> (f64, Symmetry) {
    let mut best = (f64::INFINITY, Symmetry::IDENTITY);
    for g in Symmetry::all() {
        let ga: Vec<Vec3> = a.iter().map(|&p| g.apply(p)).collect();
        let limit = 2.0 * best.0;
        let ab = directed(&ga, b, limit);
        if ab > limit {
            continue;
        }
        let d = 0.5 * ab.max(directed(b, &ga, limit));
        if d < best.0 {
            best = (d, g);
        }
    }
    best
}

/// One row of the untied-class comparison table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UntiedRow {
    pub ell: f64,
    /// Radial segment in, `N` circuits at fixed `ell`, radial segment out.
    pub total_length: f64,
    /// Length of the `N` circuits alone.
    pub anklet_length: f64,
    /// `2 pi N cyl_radius`.
    pub lower_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UntiedReport {
    pub end: Letter,
    pub windings: usize,
    pub rows: Vec<UntiedRow>,
    /// Aitken extrapolation of the last three anklet lengths.
    pub extrapolated_infimum: Option<f64>,
    pub anklets_decreasing: bool,
    pub above_bound: bool,
}

/// Vertices per circuit used for anklet polygons.
pub const ANKLET_VERTICES: usize = 4096;

/// Closed polygon around end `k` on the round circle through the point at
/// end coordinate `ell` on the ray `chi = 0`.
///
/// The level sets of `ell` itself are not orthogonal to the rays (the end
/// coordinate is integrated along rays from a fixed reference circle), so
/// their length keeps a cross-term and does not tend to the cylinder
/// circumference. Round circles have JM length exactly the integral of the
/// circumferential factor.
pub fn anklet(m: &MassTriple, k: Letter, ell: f64, vertices: usize) -> Result<Vec<Vec3>> {
    let rho = end_rho_for_ell(m, k, ell, 0.0)?;
    Ok((0..vertices).map(|i| end_point_unit(k, rho, TAU * i as f64 / vertices as f64)).collect())
}

/// The comparison curves for an untied word: for each `ell*`, go straight in
/// at `chi = 0`, wind `N` times around the end at constant `ell*`, and come
/// straight back out.
pub fn untied_demo(word: &SignedWord, m: &MassTriple, ell_values: &[f64]) -> Result<UntiedReport> {
    let red = reduce_stutters(word);
    if is_tied(word) {
        return Err(Error::TiedWord(word.to_string()));
    }
    let set = red.letter_set();
    if set.len() != 2 || !word.periodic {
        return Err(Error::Invalid(format!("expected a periodic two-letter alternation, got {word}")));
    }
    let end = Letter::ALL.into_iter().find(|k| !set.contains(k)).expect("two letters");
    let windings = red.len() / 2;
    let bound = TAU * windings as f64 * m.cyl_radius(end);
    let mut rows = Vec::with_capacity(ell_values.len());
    for &ell in ell_values {
        let ring = anklet(m, end, ell, ANKLET_VERTICES)?;
        let one = polyline_length(&ring, true, m)?;
        let anklet_length = one * windings as f64;
        // The radial legs have JM length |ell| each by construction of ell.
        rows.push(UntiedRow { ell, total_length: anklet_length + 2.0 * ell.abs(), anklet_length, lower_bound: bound });
    }
    let anklets_decreasing = rows.windows(2).all(|w| w[1].anklet_length < w[0].anklet_length);
    let above_bound = rows.iter().all(|r| r.anklet_length > r.lower_bound);
    let extrapolated_infimum = if rows.len() >= 3 {
        let k = rows.len();
        Some(aitken(rows[k - 3].anklet_length, rows[k - 2].anklet_length, rows[k - 1].anklet_length))
    } else {
        None
    };
    Ok(UntiedReport { end, windings, rows, extrapolated_infimum, anklets_decreasing, above_bound })
}

/// Samples of the distance function between two geodesics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub t: Vec<f64>,
    /// Signed JM distance from `c(t)` to the first geodesic.
    pub h: Vec<f64>,
    /// `cos A(t)` from the angle between `c'` and the perpendicular.
    pub cos_a: Vec<f64>,
    /// Largest `|dh/dt - cos A|` over interior samples, with `dh/dt` by
    /// centered differences.
    pub first_variation_error: f64,
    /// Smallest `sign(h) d^2h/dt^2` over interior samples.
    pub min_convexity: f64,
}

/// A geodesic sampled densely enough to be re-entered anywhere cheaply.
struct GeodesicTrack {
    states: Vec<(f64, Vec3, Vec3)>,
    tol: f64,
}

impl GeodesicTrack {
    fn new(n: Vec3, v: Vec3, s_min: f64, s_max: f64, m: &MassTriple, tol: f64) -> Result<Self> {
        let opts = FlowOptions { tol, ..Default::default() };
        let mut states = Vec::new();
        if s_min < 0.0 {
            let back = integrate_embedded(n, v, 0.0, m, s_min, &opts)?;
            for st in back.samples.iter().rev() {
                let (nn, vv) = st.to_embedded();
                states.push((st.s, nn, vv));
            }
            states.pop();
        }
        let fwd = integrate_embedded(n, v, 0.0, m, s_max, &opts)?;
        for st in &fwd.samples {
            let (nn, vv) = st.to_embedded();
            states.push((st.s, nn, vv));
        }
        Ok(GeodesicTrack { states, tol })
    }

    fn at(&self, u: f64, m: &MassTriple) -> Result<(Vec3, Vec3)> {
        let idx = self.states.partition_point(|s| s.0 <= u).saturating_sub(1);
        let (s0, n0, v0) = self.states[idx];
        if u == s0 {
            return Ok((n0, v0));
        }
        let tr = integrate_embedded(n0, v0, s0, m, u - s0, &FlowOptions { tol: self.tol, record_samples: false, ..Default::default() })?;
        Ok((tr.final_position, tr.final_velocity))
    }
}

/// Unit JM normal to the velocity `v` at `n`.
fn jm_normal(n: Vec3, v: Vec3) -> Vec3 {
    vec3::cross(n, v)
}

fn exp_map(n: Vec3, v: Vec3, h: f64, m: &MassTriple, tol: f64) -> Result<(Vec3, Vec3)> {
    if h == 0.0 {
        return Ok((n, v));
    }
    let tr = integrate_embedded(n, v, 0.0, m, h, &FlowOptions { tol, record_samples: false, ..Default::default() })?;
    Ok((tr.final_position, tr.final_velocity))
}

/// Measures `h(t) = dist(g1, c(t))` for `c = g2` over `t in [0, t_max]`,
/// checking the first-variation formula and convexity.
pub fn convexity_probe(
    g1: (Vec3, Vec3),
    g2: (Vec3, Vec3),
    m: &MassTriple,
    t_max: f64,
    samples: usize,
    patch_radius: f64,
) -> Result<ProbeReport> {
    let tol = 1e-12;
    if samples < 5 {
        return Err(Error::Invalid("need at least five probe samples".into()));
    }
    let v1 = unit_speed(g1.0, g1.1, m)?;
    let v2 = unit_speed(g2.0, g2.1, m)?;
    let margin = t_max + 0.5;
    let track1 = GeodesicTrack::new(g1.0, v1, -margin, margin, m, tol)?;
    let track2 = GeodesicTrack::new(g2.0, v2, 0.0, t_max, m, tol)?;
    let limit = 2.0 * patch_radius.sin().powi(2);
    for tr in [&track1, &track2] {
        if tr.states.iter().any(|s| SideTriple::from_unit(s.1).min_side().1 < limit) {
            return Err(Error::PatchViolation("a geodesic comes too close to a collision".into()));
        }
    }
    let dt = t_max / (samples - 1) as f64;
    let mut ts = Vec::with_capacity(samples);
    let mut hs = Vec::with_capacity(samples);
    let mut cos_a = Vec::with_capacity(samples);
    let (mut u, mut h) = (0.0, 0.0);
    // Initial guess: closest recorded point of g1 to c(0).
    let c0 = g2.0;
    let mut best = f64::INFINITY;
    for s in &track1.states {
        let d = vec3::angle(s.1, c0);
        if d < best {
            best = d;
            u = s.0;
        }
    }
    for i in 0..samples {
        let t = i as f64 * dt;
        let (ct, cv) = track2.at(t, m)?;
        let e1 = vec3::any_orthonormal(ct);
        let e2 = vec3::cross(ct, e1);
        let resid = |u: f64, h: f64| -> Result<([f64; 2], Vec3)> {
            let (gn, gv) = track1.at(u, m)?;
            let nrm = jm_normal(gn, gv);
            let (end, vel) = exp_map(gn, nrm, h, m, tol)?;
            let d = vec3::sub(end, ct);
            Ok(([vec3::dot(d, e1), vec3::dot(d, e2)], vel))
        };
        let mut converged = false;
        for _ in 0..50 {
            let (r, _) = resid(u, h)?;
            if (r[0] * r[0] + r[1] * r[1]).sqrt() < 1e-13 {
                converged = true;
                break;
            }
            let eps = 1e-6;
            let (ru, _) = resid(u + eps, h)?;
            let (rh, _) = resid(u, h + eps)?;
            let j = [[(ru[0] - r[0]) / eps, (rh[0] - r[0]) / eps], [(ru[1] - r[1]) / eps, (rh[1] - r[1]) / eps]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let du = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
            let dh = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            u += du;
            h += dh;
            if du.abs() < 1e-15 && dh.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { iterations: 50, residual: f64::NAN });
        }
        let (_, vel) = resid(u, h)?;
        let f = conformal_factor_unit(ct, m)?;
        // JM inner product of two unit vectors in the embedding.
        let dot = 0.25 * f * vec3::dot(vel, cv);
        ts.push(t);
        hs.push(h);
        cos_a.push(dot);
    }
    let mut fv: f64 = 0.0;
    let mut conv = f64::INFINITY;
    for i in 1..samples - 1 {
        let d1 = (hs[i + 1] - hs[i - 1]) / (2.0 * dt);
        fv = fv.max((d1 - cos_a[i]).abs());
        let d2 = (hs[i + 1] - 2.0 * hs[i] + hs[i - 1]) / (dt * dt);
        let s = if hs[i] < 0.0 { -1.0 } else { 1.0 };
        conv = conv.min(s * d2);
    }
    Ok(ProbeReport { t: ts, h: hs, cos_a, first_variation_error: fv, min_convexity: conv })
}
