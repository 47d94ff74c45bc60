//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shape_pants::collision_lab::{self, StopReason};
use shape_pants::commands::end_table;
use shape_pants::geodesic_flow::{self, Fate, FlowOptions, GeodesicState};
use shape_pants::jm_metric::{self, ScanOptions, ScanRegion, Verdict};
use shape_pants::realizer::{self, ShortenOptions};
use shape_pants::shape_geometry::{collision_distance, Letter, MassTriple, ShapePoint};
use shape_pants::syzygy::{self, SignedWord};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn curvature_sign() -> Outcome {
    let t = Instant::now();
    let opts = ScanOptions { resolution: 1000, exclusion: 0.05, flat_threshold: 1e-6, ..Default::default() };
    let rep = jm_metric::curvature_scan(&MassTriple::equal(), &opts).expect("scan");
    let secs = t.elapsed().as_secs_f64();
    let gap = rep.flat_max_pole_gap.unwrap_or(0.0);
    let pass = rep.max_curvature <= 1e-9 && gap <= 1e-2 && rep.verdict == Verdict::AllNonpositive && secs < 60.0;
    outcome(
        pass,
        format!("max K {:.2e}, near-flat points within {gap:.2e} of the poles, {} points, {secs:.1} s", rep.max_curvature, rep.evaluated),
    )
}

fn euler_point() -> Outcome {
    let m = MassTriple::equal();
    let p = ShapePoint::new(0.0, PI);
    let k = jm_metric::curvature_closed_form(p, &m).expect("closed form");
    let fd = jm_metric::curvature_fd_oracle(p, &m, 1e-4).expect("fd");
    // Richardson-extrapolated differences as an independent value.
    let fine = jm_metric::curvature_fd_oracle(p, &m, 1e-3).expect("fd");
    let coarse = jm_metric::curvature_fd_oracle(p, &m, 2e-3).expect("fd");
    let rich = (4.0 * fine - coarse) / 3.0;
    let target = -20.0 / 27.0;
    let pass = (k - target).abs() < 1e-12 && (fd - k).abs() < 1e-5 && (rich - target).abs() < 1e-8;
    outcome(pass, format!("closed form {k:.15}, differences {fd:.9}, extrapolated {rich:.12}, -20/27 = {target:.15}"))
}

fn random_point(rng: &mut ChaCha8Rng, margin: f64) -> ShapePoint {
    loop {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let p = ShapePoint::new(z.asin(), rng.gen_range(0.0..TAU));
        if Letter::ALL.iter().all(|&k| collision_distance(p, k) > margin) {
            return p;
        }
    }
}

fn potential_lemmas() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_lap: f64 = 0.0;
    let mut worst_grad: f64 = 0.0;
    for _ in 0..5 {
        let m = MassTriple::new(rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0), rng.gen_range(0.2..5.0)).unwrap();
        for _ in 0..1000 {
            let p = random_point(&mut rng, 0.1);
            let lap = jm_metric::laplacian_u_closed(p, &m).unwrap();
            let lap_fd = jm_metric::laplacian_u_oracle(p, &m, 1e-4).unwrap();
            let g = jm_metric::gradsq_u_closed(p, &m).unwrap();
            let g_fd = jm_metric::gradsq_u_oracle(p, &m, 1e-4).unwrap();
            worst_lap = worst_lap.max((lap - lap_fd).abs() / lap.abs());
            // The gradient vanishes at critical points; measure against the scale of U^2.
            let scale = g.abs().max(shape_pants::shape_geometry::potential(p, &m).unwrap().powi(2) * 1e-3);
            worst_grad = worst_grad.max((g - g_fd).abs() / scale);
        }
    }
    outcome(worst_lap < 1e-5 && worst_grad < 1e-5, format!("worst relative error: Laplacian {worst_lap:.2e}, squared gradient {worst_grad:.2e}"))
}

fn cylinder_ends() -> Outcome {
    let m = MassTriple::equal();
    let k = Letter::Three;
    let ells: Vec<f64> = (1..=24).map(|i| 0.25 * i as f64).collect();
    let rows = end_table(&m, k, &ells, 32).expect("table");
    let threshold = rows
        .iter()
        .position(|r| (r.min_f - FRAC_1_SQRT_2).abs().max((r.max_f - FRAC_1_SQRT_2).abs()) < 1e-4)
        .map(|i| ells[i]);
    let Some(t) = threshold else {
        return outcome(false, "never within 1e-4 of 1/sqrt 2".into());
    };
    // Monotone decrease, ray by ray, from the threshold to where the gap
    // reaches the quadrature tolerance.
    let mut monotone = true;
    let mut checked = 0;
    for j in 0..32 {
        let chi = TAU * j as f64 / 32.0;
        let mut prev = f64::INFINITY;
        for &ell in ells.iter().filter(|&&e| e >= t && e <= 5.0) {
            let rho = jm_metric::end_rho_for_ell(&m, k, ell, chi).unwrap();
            let f = jm_metric::end_circumferential_factor(&m, k, rho, chi).unwrap();
            monotone &= f < prev && f > FRAC_1_SQRT_2;
            prev = f;
            checked += 1;
        }
    }
    let last = rows.last().unwrap();
    let tail_gap = (last.max_f - FRAC_1_SQRT_2).abs().max((last.min_f - FRAC_1_SQRT_2).abs());
    outcome(
        monotone && tail_gap < 1e-4,
        format!("within 1e-4 from ell = {t}; gap at ell = {} is {tail_gap:.1e}; {checked} ray samples decreasing: {monotone}", last.ell),
    )
}

fn sign_change() -> Outcome {
    let m = MassTriple::from_products([1.0, 1.0, 2.0]).unwrap();
    let (dk, degenerate) = jm_metric::dkappa_lagrange(&m);
    let exact = dk.iter().zip([5.0, 5.0, 4.0]).all(|(a, b)| (a - b).abs() < 1e-12);
    let opts = ScanOptions {
        resolution: 200,
        region: ScanRegion::Ball { center: ShapePoint::NORTH_LAGRANGE, radius: 1e-2 },
        ..Default::default()
    };
    let rep = jm_metric::curvature_scan(&m, &opts).unwrap();
    let pass = exact && !degenerate && rep.verdict == Verdict::MixedSign && rep.positive > 0 && rep.negative > 0;
    outcome(pass, format!("dkappa = {dk:?}, ball scan: {} positive, {} negative", rep.positive, rep.negative))
}

fn invariant_subspaces() -> Outcome {
    let m = MassTriple::equal();
    // Both submanifolds run into a collision end; the check covers the run up
    // to arclength 20 or the end, whichever comes first.
    let opts = FlowOptions { tol: 1e-10, ..Default::default() };
    let eq = GeodesicState::launch(ShapePoint::new(0.0, 2.5), 0.0, &m).unwrap();
    let (n, v) = eq.to_embedded();
    let tr_eq = geodesic_flow::integrate_embedded(n, v, 0.0, &m, 20.0, &opts).unwrap();
    let lat = geodesic_flow::max_latitude(&tr_eq);
    // Isosceles meridian through the Euler point opposite C1.
    let mer = GeodesicState::launch(ShapePoint::new(0.0, PI), FRAC_PI_2, &m).unwrap();
    let (n, v) = mer.to_embedded();
    let tr_mer = geodesic_flow::integrate_embedded(n, v, 0.0, &m, 20.0, &opts).unwrap();
    let dev = geodesic_flow::max_meridian_deviation(&tr_mer, PI);
    // A generic run for the speed contract.
    let gen = GeodesicState::launch(ShapePoint::new(0.3, 1.0), -1.0, &m).unwrap();
    let tr_gen = geodesic_flow::integrate(&gen, &m, 20.0, 1e-10).unwrap();
    let drift = tr_eq.drift_rate().max(tr_mer.drift_rate()).max(tr_gen.drift_rate());
    let covered = |tr: &geodesic_flow::Trajectory| tr.arclength() >= 20.0 - 1e-9 || matches!(tr.fate, Fate::EnteredEnd(_));
    outcome(
        lat < 1e-9 && dev < 1e-9 && drift < 1e-8 && covered(&tr_eq) && covered(&tr_mer),
        format!(
            "equator: |phi| <= {lat:.1e} over arclength {:.2} ({:?}); meridian: deviation {dev:.1e} over {:.2} ({:?}); speed drift {drift:.1e} per unit length",
            tr_eq.arclength(),
            tr_eq.fate,
            tr_mer.arclength(),
            tr_mer.fate
        ),
    )
}

fn uniqueness() -> Outcome {
    let t = Instant::now();
    let m = MassTriple::equal();
    let word: SignedWord = "1+2-3+1-2+3-".parse().unwrap();
    let opts = ShortenOptions::default();
    let runs: Vec<_> = (0..5u64).map(|seed| realizer::realize(&word, &m, 100 + seed, 20, &opts)).collect();
    let good: Vec<_> = runs.iter().filter_map(|r| r.as_ref().ok()).filter(|r| r.converged).collect();
    if good.len() != 5 {
        return outcome(false, format!("{} of 5 restarts converged", good.len()));
    }
    let lengths: Vec<f64> = good.iter().map(|r| r.jm_length).collect();
    let lo = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lengths.iter().cloned().fold(0.0, f64::max);
    let mut haus: f64 = 0.0;
    for i in 0..5 {
        for j in i + 1..5 {
            haus = haus.max(realizer::symmetric_hausdorff(&good[i].loop_.units(), &good[j].loop_.units()).0);
        }
    }
    let spread = (hi - lo) / lo;
    let secs = t.elapsed().as_secs_f64();
    outcome(
        haus < 1e-4 && spread < 1e-6 && secs < 300.0,
        format!("length {lo:.10}, relative spread {spread:.1e}, max Hausdorff {haus:.1e}, {secs:.1} s"),
    )
}

fn untied() -> Outcome {
    let m = MassTriple::equal();
    let word: SignedWord = "1+2-".parse().unwrap();
    let rep = realizer::untied_demo(&word, &m, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let bound = TAU * FRAC_1_SQRT_2;
    let inf = rep.extrapolated_infimum.unwrap_or(f64::NAN);
    let lengths: Vec<String> = rep.rows.iter().map(|r| format!("{:.6}", r.anklet_length)).collect();
    outcome(
        rep.anklets_decreasing && rep.above_bound && (inf - bound).abs() < 1e-3,
        format!("circuit lengths [{}], extrapolated {inf:.7} vs 2 pi/sqrt 2 = {bound:.7}", lengths.join(", ")),
    )
}

fn collision_open_set() -> Outcome {
    let m = MassTriple::equal();
    let kstar = collision_lab::calibrate_kstar(&m, 0.1, 100, 9).unwrap();
    let start = collision_lab::collinear_start(&m, 0.05).unwrap();
    let base = match collision_lab::collision_bound_experiment(&start, &m, 1.0, kstar) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("base run: {e}")),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut passed = 0;
    let mut worst_lj = base.max_lagrange_jacobi_residual;
    let mut worst_defect = base.max_inertia_defect;
    for _ in 0..100 {
        let p = collision_lab::perturb(&start, &m, 1e-4, &mut rng).unwrap();
        if let Ok(r) = collision_lab::collision_bound_experiment(&p, &m, 1.0, kstar) {
            if r.open_condition && r.collided_within_bound {
                passed += 1;
            }
            worst_lj = worst_lj.max(r.max_lagrange_jacobi_residual);
            worst_defect = worst_defect.max(r.max_inertia_defect);
        }
    }
    let tl = collision_lab::integrate_full(&start, &m, base.bound_time, 1e-12).unwrap();
    let pass = base.open_condition
        && base.collided_within_bound
        && tl.stop == StopReason::Collision
        && passed == 100
        && worst_lj < 1e-6
        && worst_defect < 1e-6;
    outcome(
        pass,
        format!(
            "K* = {kstar:.4}; collision at t = {:.4e} < {:.4e}; {passed}/100 perturbed starts collide in time; |I'' - 4H| <= {worst_lj:.1e} (r >= {}), integrated inertia defect {worst_defect:.1e}",
            base.collision_time.unwrap_or(f64::NAN),
            base.bound_time,
            collision_lab::POINTWISE_CHECK_RADIUS
        ),
    )
}

/// All irreducible words reachable by deleting adjacent equal pairs in
/// every possible order. Periodic words delete across the join too.
fn all_normal_forms(w: &[u8], periodic: bool) -> std::collections::BTreeSet<Vec<u8>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut forms = std::collections::BTreeSet::new();
    let mut stack = vec![w.to_vec()];
    while let Some(cur) = stack.pop() {
        if !seen.insert(cur.clone()) {
            continue;
        }
        let n = cur.len();
        let mut moves = Vec::new();
        if periodic && n == 1 {
            moves.push(Vec::new());
        }
        let pairs = if periodic && n >= 2 { n } else { n.saturating_sub(1) };
        for i in 0..pairs {
            let j = (i + 1) % n;
            if cur[i] == cur[j] {
                moves.push(cur.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, &c)| c).collect());
            }
        }
        if moves.is_empty() {
            forms.insert(cur);
        } else {
            stack.extend(moves);
        }
    }
    forms
}

fn canonical_rotation(w: &[u8]) -> Vec<u8> {
    (0..w.len().max(1)).map(|r| w.iter().cycle().skip(r).take(w.len()).copied().collect::<Vec<u8>>()).min().unwrap_or_default()
}

fn syzygy_exhaustive() -> Outcome {
    let mut words = 0;
    let mut failures = Vec::new();
    for len in 0..=8u32 {
        for code in 0..3usize.pow(len) {
            let digits: Vec<u8> = (0..len).map(|i| (code / 3usize.pow(i) % 3) as u8 + 1).collect();
            let text: String = digits.iter().map(|d| char::from(b'0' + d)).collect();
            for periodic in [false, true] {
                words += 1;
                let forms = all_normal_forms(&digits, periodic);
                let forms: std::collections::BTreeSet<Vec<u8>> =
                    if periodic { forms.iter().map(|f| canonical_rotation(f)).collect() } else { forms };
                let w = SignedWord::parse(&text, periodic).unwrap();
                let reduced: Vec<u8> = syzygy::reduce_stutters(&w).letters.iter().map(|l| l.digit()).collect();
                let reduced = if periodic { canonical_rotation(&reduced) } else { reduced };
                let class = syzygy::classify(&w);
                let distinct: std::collections::BTreeSet<u8> = reduced.iter().copied().collect();
                let stutter_free = all_normal_forms(&digits, periodic).contains(&digits);
                let ok = forms.len() == 1
                    && forms.contains(&reduced)
                    && class.tied == (distinct.len() == 3)
                    && class.stutter_free == stutter_free
                    && (!stutter_free || !periodic || class.tied == (digits.iter().collect::<std::collections::BTreeSet<_>>().len() == 3));
                if !ok && failures.len() < 5 {
                    failures.push(format!("{text}{}", if periodic { " (periodic)" } else { "" }));
                }
            }
        }
    }
    outcome(failures.is_empty(), format!("{words} words checked; failures: {failures:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("curvature is nonpositive, flat only at the Lagrange points", curvature_sign),
        ("Euler-point curvature", euler_point),
        ("Laplacian and squared-gradient identities", potential_lemmas),
        ("cylindrical ends approach 1/sqrt 2 monotonically", cylinder_ends),
        ("sign change for unequal products", sign_change),
        ("equator and isosceles meridian are invariant", invariant_subspaces),
        ("word 1+2-3+1-2+3- realizes uniquely", uniqueness),
        ("untied word has no shortest representative", untied),
        ("binary collisions form an open set", collision_open_set),
        ("syzygy reduction is confluent", syzygy_exhaustive),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!("[{}] criterion {:>2}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
