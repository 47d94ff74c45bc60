use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shape_pants::collision_lab::{self, FullState, StopReason};
use shape_pants::geodesic_flow::{self, Fate, FlowOptions, GeodesicState};
use shape_pants::jm_metric;
use shape_pants::shape_geometry::{self, collision_distance, gamma, Letter, MassTriple, ShapePoint, Symmetry};
use shape_pants::syzygy::{self, Sign, SignedWord};
use shape_pants::vec3;

fn point() -> impl Strategy<Value = ShapePoint> {
    (-1.0f64..1.0, 0.0..TAU).prop_map(|(z, theta)| ShapePoint::new(z.asin(), theta))
}

fn away_from_collisions(margin: f64) -> impl Strategy<Value = ShapePoint> {
    point().prop_filter("near a collision", move |&p| Letter::ALL.iter().all(|&k| collision_distance(p, k) > margin))
}

fn masses() -> impl Strategy<Value = MassTriple> {
    (0.2f64..5.0, 0.2f64..5.0, 0.2f64..5.0).prop_map(|(a, b, c)| MassTriple::new(a, b, c).unwrap())
}

fn letters(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0usize..3).prop_map(Letter::from_index), 0..=max)
}

proptest! {
    #[test]
    fn equilateral_frame(theta in -10.0f64..10.0) {
        for i in Letter::ALL {
            let (g, gp) = gamma(i, theta);
            prop_assert!((g * g + gp * gp - 1.0).abs() < 1e-12);
            for j in Letter::ALL.into_iter().filter(|&j| j != i) {
                let (h, hp) = gamma(j, theta);
                prop_assert!((g * h + gp * hp + 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sides_sum_and_reflections(p in point()) {
        let s = p.sides().s;
        prop_assert!((s.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        let down = ShapePoint::new(-p.phi, p.theta).sides().s;
        let back = ShapePoint::new(p.phi, -p.theta).sides().s;
        for k in 0..3 {
            prop_assert!((down[k] - s[k]).abs() < 1e-12);
        }
        prop_assert!((back[0] - s[0]).abs() < 1e-12);
        prop_assert!((back[1] - s[2]).abs() < 1e-12);
        prop_assert!((back[2] - s[1]).abs() < 1e-12);
    }

    #[test]
    fn collision_distance_is_great_circle(p in point()) {
        // Chord length on the radius-one-half sphere, converted to arc length.
        for k in Letter::ALL {
            let chord = 0.5 * vec3::norm(vec3::sub(p.to_unit(), k.collision_vector()));
            let arc = 0.5 * 2.0 * (chord).asin();
            prop_assert!((collision_distance(p, k) - arc).abs() < 1e-10);
        }
    }

    #[test]
    fn curvature_sign_is_opposite_kappa(p in away_from_collisions(1e-3), m in masses()) {
        let k = jm_metric::curvature_closed_form(p, &m).unwrap();
        let kap = jm_metric::kappa(p, &m).unwrap();
        let tiny = 1e-13 * (1.0 + kap.abs());
        prop_assert!(k * kap <= 0.0 || (k.abs() < tiny && kap.abs() < tiny), "K = {k}, kappa = {kap}");
        prop_assert_eq!(k == 0.0, kap == 0.0);
    }

    #[test]
    fn closed_form_matches_differences(p in away_from_collisions(0.1), m in masses()) {
        let k = jm_metric::curvature_closed_form(p, &m).unwrap();
        let fd = jm_metric::curvature_fd_oracle(p, &m, 1e-4).unwrap();
        let u = shape_geometry::potential(p, &m).unwrap();
        // Relative to the curvature, or to the scale 1/U where it vanishes.
        prop_assert!((k - fd).abs() <= 1e-5 * k.abs().max(1.0 / u), "K = {k}, fd = {fd}");
    }
}

/// Deletes one randomly chosen adjacent equal pair (cyclically for periodic
/// words) until none is left.
fn random_reduction(mut w: Vec<Letter>, periodic: bool, rng: &mut ChaCha8Rng) -> Vec<Letter> {
    loop {
        let n = w.len();
        if periodic && n == 1 {
            return Vec::new();
        }
        let pairs = if periodic && n >= 2 { n } else { n.saturating_sub(1) };
        let sites: Vec<usize> = (0..pairs).filter(|&i| w[i] == w[(i + 1) % n]).collect();
        if sites.is_empty() {
            return w;
        }
        let i = sites[rng.gen_range(0..sites.len())];
        let j = (i + 1) % n;
        let (a, b) = (i.max(j), i.min(j));
        w.remove(a);
        w.remove(b);
    }
}

fn same_up_to_rotation(a: &[Letter], b: &[Letter]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..a.len()).any(|r| a.iter().cycle().skip(r).take(a.len()).eq(b.iter())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reduction_is_confluent(w in letters(20), periodic in any::<bool>(), seed in any::<u64>()) {
        let word = SignedWord::unsigned(w.clone(), periodic);
        let normal = syzygy::reduce_stutters(&word);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = random_reduction(w, periodic, &mut rng);
        if periodic {
            prop_assert!(same_up_to_rotation(&normal.letters, &other));
        } else {
            prop_assert_eq!(&normal.letters, &other);
        }
    }
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_keeps_the_class(w in letters(20), periodic in any::<bool>(), plus in any::<bool>()) {
        let word = if periodic && w.len() % 2 == 1 {
            SignedWord::unsigned(w, periodic)
        } else {
            SignedWord::signed(w, if plus { Sign::Plus } else { Sign::Minus }, periodic).unwrap()
        };
        let once = syzygy::reduce_stutters(&word);
        prop_assert_eq!(&syzygy::reduce_stutters(&once), &once);
        prop_assert!(once.is_stutter_free());
        prop_assert_eq!(syzygy::classify(&once).tied, syzygy::classify(&word).tied);
        // A stutter-free word only changes by whole letters, so any surviving
        // sign pattern still alternates.
        if let Some(signs) = once.signs() {
            prop_assert!(signs.windows(2).all(|s| s[0] != s[1]));
        }
    }
}

#[test]
fn untied_means_at_most_two_letters() {
    for len in 0..=8u32 {
        for code in 0..3usize.pow(len) {
            let w: Vec<Letter> = (0..len).map(|i| Letter::from_index(code / 3usize.pow(i) % 3)).collect();
            let word = SignedWord::unsigned(w.clone(), true);
            if !word.is_stutter_free() {
                continue;
            }
            let set: BTreeSet<Letter> = w.into_iter().collect();
            assert_eq!(!syzygy::is_tied(&word), set.len() <= 2, "{}", word.digits());
        }
    }
}

fn launch() -> impl Strategy<Value = (ShapePoint, f64)> {
    (away_from_collisions(0.3), 0.0..TAU)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn geodesics_reverse(start in launch()) {
        let m = MassTriple::equal();
        let st = GeodesicState::launch(start.0, start.1, &m).unwrap();
        let fwd = geodesic_flow::integrate(&st, &m, 3.0, 1e-12).unwrap();
        prop_assume!(fwd.fate == Fate::Running);
        let back = geodesic_flow::integrate(&fwd.final_state().reversed(), &m, 3.0, 1e-12).unwrap();
        prop_assert!(vec3::norm(vec3::sub(back.final_position, st.point.to_unit())) < 1e-6);
        prop_assert!(fwd.drift_rate() < 1e-8);
    }

    #[test]
    fn geodesics_commute_with_symmetries(start in launch(), g in 0usize..12) {
        let m = MassTriple::equal();
        let g = Symmetry::all()[g];
        let st = GeodesicState::launch(start.0, start.1, &m).unwrap();
        let opts = FlowOptions { tol: 1e-12, ..Default::default() };
        let (n, v) = st.to_embedded();
        let a = geodesic_flow::integrate_embedded(n, v, 0.0, &m, 3.0, &opts).unwrap();
        prop_assume!(a.fate == Fate::Running);
        let b = geodesic_flow::integrate_embedded(g.apply(n), g.apply(v), 0.0, &m, 3.0, &opts).unwrap();
        prop_assert!(vec3::norm(vec3::sub(g.apply(a.final_position), b.final_position)) < 1e-8);
        // Reflections in phi swap the hemispheres, so crossing signs flip.
        prop_assert_eq!(a.events.len(), b.events.len());
    }

    #[test]
    fn crossings_alternate_and_visit_the_core(start in launch()) {
        let m = MassTriple::equal();
        let st = GeodesicState::launch(start.0, start.1, &m).unwrap();
        let tr = geodesic_flow::integrate(&st, &m, 30.0, 1e-10).unwrap();
        prop_assert!(tr.events.windows(2).all(|w| w[0].sign != w[1].sign));
        let letters: BTreeSet<Letter> = tr.events.iter().map(|e| e.letter).collect();
        if tr.fate == Fate::Running && letters.len() == 3 {
            prop_assert!(geodesic_flow::passes_through_region(&tr, 0.3));
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> FullState {
    let mut v = |a: f64| [rng.gen_range(-a..a), rng.gen_range(-a..a)];
    FullState { zeta1: v(3.0), zeta2: v(3.0), zdot1: v(1.0), zdot2: v(1.0) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn full_problem_conserves_energy_and_momentum(seed in any::<u64>(), m in masses()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_state(&mut rng);
        let (x, _) = s.to_cartesian(&m);
        let min_sep = (0..3).map(|i| {
            let (a, b) = (x[i], x[(i + 1) % 3]);
            (a[0] - b[0]).hypot(a[1] - b[1])
        }).fold(f64::INFINITY, f64::min);
        prop_assume!(min_sep > 1.0);
        // Runs that fall into a close encounter are out of scope here.
        let tl = collision_lab::integrate_full(&s, &m, 0.5, 1e-12);
        prop_assume!(matches!(&tl, Ok(t) if t.stop == StopReason::TimeUp));
        let tl = tl.unwrap();
        let h0 = tl.initial_energy;
        let scale = h0.abs().max(collision_lab::kinetic(&s, &m));
        let j_scale = tl.initial_angular_momentum.abs().max(collision_lab::inertia(&s, &m));
        let t = tl.rows.last().unwrap().t;
        for r in &tl.rows {
            prop_assert!((r.energy - h0).abs() / scale < 1e-8 * t.max(1.0));
        }
        prop_assert!(tl.max_angular_momentum_drift / j_scale < 1e-8 * t.max(1.0));
        prop_assert!(tl.max_lagrange_jacobi_residual < 1e-6);
    }
}

#[test]
fn lagrange_points_are_the_only_flat_spots_for_equal_masses() {
    let m = MassTriple::equal();
    for p in [ShapePoint::NORTH_LAGRANGE, ShapePoint::SOUTH_LAGRANGE] {
        assert!(jm_metric::curvature_closed_form(p, &m).unwrap().abs() < 1e-14);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let phi = rng.gen_range(-1.0..1.0) * (0.5 * PI - 0.05);
        let p = ShapePoint::new(phi, rng.gen_range(0.0..TAU));
        if Letter::ALL.iter().all(|&k| collision_distance(p, k) > 1e-3) {
            assert!(jm_metric::curvature_closed_form(p, &m).unwrap() < -1e-6);
        }
    }
}
