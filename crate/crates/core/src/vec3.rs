//! Minimal 3-vector arithmetic for the unit-sphere embedding.

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn axpy(s: f64, x: Vec3, y: Vec3) -> Vec3 {
    [s * x[0] + y[0], s * x[1] + y[1], s * x[2] + y[2]]
}

#[inline]
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// Component of `v` tangent to the unit sphere at `n`.
#[inline]
pub fn tangent_part(n: Vec3, v: Vec3) -> Vec3 {
    axpy(-dot(n, v), n, v)
}

/// Angle between two unit vectors, accurate for nearly parallel and
/// nearly antipodal inputs.
#[inline]
pub fn angle(a: Vec3, b: Vec3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Point at angle `t` along the great circle through `n` with unit tangent `e`.
#[inline]
pub fn great_circle(n: Vec3, e: Vec3, t: f64) -> Vec3 {
    let (s, c) = t.sin_cos();
    [c * n[0] + s * e[0], c * n[1] + s * e[1], c * n[2] + s * e[2]]
}

/// Some unit vector orthogonal to the unit vector `n`.
pub fn any_orthonormal(n: Vec3) -> Vec3 {
    let pick = if n[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    normalize(tangent_part(n, pick))
}
