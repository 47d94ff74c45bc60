//! A zero-energy, zero-angular-momentum solution with constant inertia,
//! projected to the shape sphere, follows the JM geodesic through the same
//! shape and direction, clocked by Newtonian time.

use shape_pants::collision_lab::{self, FullState, StopReason};
use shape_pants::geodesic_flow::{self, Fate, FlowOptions};
use shape_pants::shape_geometry::{MassTriple, ShapePoint};
use shape_pants::vec3::{self, Vec3};

type Vec2 = [f64; 2];

/// Triangle of the given shape with the centre of mass at the origin and
/// unit moment of inertia.
fn triangle(n: Vec3, m: &MassTriple) -> [Vec2; 3] {
    let p = ShapePoint::from_unit(n);
    let hat = p.sides().s;
    let pr = m.products();
    let c = m.total() / (0..3).map(|k| pr[k] * hat[k]).sum::<f64>();
    let (r23, r13, r12) = ((c * hat[0]).sqrt(), (c * hat[1]).sqrt(), (c * hat[2]).sqrt());
    let a = (r13 * r13 - r23 * r23 + r12 * r12) / (2.0 * r12);
    let b = (r13 * r13 - a * a).max(0.0).sqrt();
    let mut x = [[0.0, 0.0], [r12, 0.0], [a, b]];
    if collision_lab::shape_of_triangle(&x)[2] * n[2] < 0.0 {
        x[2][1] = -b;
    }
    let w = m.masses();
    let com = [0, 1].map(|d| (0..3).map(|i| w[i] * x[i][d]).sum::<f64>() / m.total());
    x.map(|p| [p[0] - com[0], p[1] - com[1]])
}

/// Full state at shape `n` moving toward `dir` with no rotation, no change
/// of size, and zero energy.
fn pure_shape_state(n: Vec3, dir: Vec3, m: &MassTriple) -> FullState {
    let h = 1e-6;
    let fwd = triangle(vec3::great_circle(n, dir, h), m);
    let back = triangle(vec3::great_circle(n, dir, -h), m);
    let x = triangle(n, m);
    let mut v: [Vec2; 3] = std::array::from_fn(|i| [(fwd[i][0] - back[i][0]) / (2.0 * h), (fwd[i][1] - back[i][1]) / (2.0 * h)]);
    let w = m.masses();
    let j: f64 = (0..3).map(|i| w[i] * (x[i][0] * v[i][1] - x[i][1] * v[i][0])).sum();
    let inertia: f64 = (0..3).map(|i| w[i] * (x[i][0] * x[i][0] + x[i][1] * x[i][1])).sum();
    let omega = j / inertia;
    for i in 0..3 {
        v[i] = [v[i][0] + omega * x[i][1], v[i][1] - omega * x[i][0]];
    }
    let s = FullState::from_cartesian(&x, &v, m);
    let scale = (collision_lab::potential(&s, m).unwrap() / collision_lab::kinetic(&s, m)).sqrt();
    FullState { zdot1: scaled(s.zdot1, scale), zdot2: scaled(s.zdot2, scale), ..s }
}

fn scaled(v: Vec2, k: f64) -> Vec2 {
    [k * v[0], k * v[1]]
}

fn compare(m: MassTriple, start: ShapePoint, heading: Vec3) {
    let n0 = start.to_unit();
    let dir = vec3::normalize(vec3::tangent_part(n0, heading));
    let state = pure_shape_state(n0, dir, &m);
    assert!((collision_lab::inertia(&state, &m) - 1.0).abs() < 1e-12);
    assert!(collision_lab::inertia_dot(&state, &m).abs() < 1e-8);
    assert!(collision_lab::angular_momentum(&state, &m).abs() < 1e-12);
    assert!(collision_lab::energy(&state, &m).unwrap().abs() < 1e-10);

    // Launch the geodesic from the projected shape and shape velocity.
    let n = collision_lab::shape_of(&state, &m);
    assert!(vec3::norm(vec3::sub(n, n0)) < 1e-12);
    let v = geodesic_flow::unit_speed(n, collision_lab::shape_velocity(&state, &m), &m).unwrap();
    let traj = geodesic_flow::integrate_embedded(n, v, 0.0, &m, 2.5, &FlowOptions { tol: 1e-12, ..Default::default() }).unwrap();
    assert_eq!(traj.fate, Fate::Running);

    let mut full = state;
    let mut t_prev = 0.0;
    let mut worst: f64 = 0.0;
    for (sample, &t) in traj.samples.iter().zip(&traj.newton_time).skip(1) {
        let run = collision_lab::integrate_full(&full, &m, t - t_prev, 1e-12).unwrap();
        assert_eq!(run.stop, StopReason::TimeUp);
        full = run.final_state;
        t_prev = t;
        let d = vec3::angle(collision_lab::shape_of(&full, &m), sample.point.to_unit());
        worst = worst.max(0.5 * d);
    }
    assert!(traj.samples.len() > 10);
    assert!(worst < 1e-4, "{worst:e}");
    assert!((collision_lab::inertia(&full, &m) - 1.0).abs() < 1e-8);
}

#[test]
fn equal_masses_follow_the_geodesic() {
    compare(MassTriple::equal(), ShapePoint::new(0.4, 1.0), [0.3, -0.2, -0.9]);
}

#[test]
fn unequal_masses_follow_the_geodesic() {
    compare(MassTriple::new(1.0, 2.0, 3.0).unwrap(), ShapePoint::new(-0.5, 2.2), [0.6, 0.1, 0.5]);
}
