//! Dormand-Prince 5(4) with mixed absolute/relative error control.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub atol: f64,
    pub rtol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions { atol: tol, rtol: tol, ..Default::default() }
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { atol: 1e-10, rtol: 1e-10, h_init: 1e-3, h_min: 1e-14, h_max: 0.5, max_steps: 2_000_000 }
    }
}

/// What the step observer asks the driver to do next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Outcome of [`integrate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeEnd<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    pub stopped: bool,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step of size `h`: the fifth-order solution and the
/// embedded error estimate.
pub fn dp5_step<const N: usize, F>(f: &mut F, t: f64, y: &[f64; N], h: f64) -> Result<([f64; N], [f64; N])>
where
    F: ?Sized + FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let mut k = [[0.0; N]; 7];
    for stage in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[stage] = f(t + C[stage] * h, &ys)?;
    }
    let mut y5 = *y;
    let mut err = [0.0; N];
    for stage in 0..7 {
        for i in 0..N {
            y5[i] += h * B5[stage] * k[stage][i];
            err[i] += h * (B5[stage] - B4[stage]) * k[stage][i];
        }
    }
    Ok((y5, err))
}

fn error_norm<const N: usize>(y: &[f64; N], y_new: &[f64; N], err: &[f64; N], opts: &OdeOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    (acc / N as f64).sqrt()
}

/// Adaptive integration from `t0` to `t_end` (either direction). After each
/// accepted step `observe(t_prev, y_prev, t, y)` may modify `y` (for
/// projections) and may stop the run. Errors from the right-hand side inside
/// a trial step are treated as a rejection; the step size shrinks until it
/// falls below `h_min`, where the error is returned.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<OdeEnd<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], f64, &mut [f64; N]) -> Result<Control>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h_init.min(opts.h_max).min((t_end - t0).abs());
    let mut steps = 0;
    let mut rejected = 0;
    while (t_end - t) * dir > 0.0 {
        if steps >= opts.max_steps {
            return Err(Error::StepFailure { t, h });
        }
        let remaining = (t_end - t).abs();
        let last = h >= remaining;
        let hh = if last { remaining } else { h };
        match dp5_step(&mut f, t, &y, dir * hh) {
            Ok((mut y_new, err)) => {
                let e = error_norm(&y, &y_new, &err, opts);
                if e <= 1.0 && y_new.iter().all(|v| v.is_finite()) {
                    let t_new = if last { t_end } else { t + dir * hh };
                    steps += 1;
                    let ctl = observe(t, &y, t_new, &mut y_new)?;
                    t = t_new;
                    y = y_new;
                    if ctl == Control::Stop {
                        return Ok(OdeEnd { t, y, steps, rejected, stopped: true });
                    }
                    let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                    h = (hh * fac).min(opts.h_max);
                } else {
                    rejected += 1;
                    let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).clamp(0.1, 0.5) } else { 0.1 };
                    h = hh * fac;
                    if h < opts.h_min {
                        return Err(Error::StepFailure { t, h });
                    }
                }
            }
            Err(e) => {
                rejected += 1;
                if hh < opts.h_min {
                    return Err(e);
                }
                h = hh * 0.25;
            }
        }
    }
    Ok(OdeEnd { t, y, steps, rejected, stopped: false })
}

/// Root of `g(h)` on `[0, h_hi]` for a sign change, by the Illinois variant of
/// regula falsi; `g(0)` and `g(h_hi)` must have opposite signs.
pub fn illinois<G: FnMut(f64) -> Result<f64>>(mut g: G, h_hi: f64, g0: f64, g1: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (0.0, h_hi);
    let (mut fa, mut fb) = (g0, g1);
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = g(c)?;
        if fc.abs() < tol || (b - a).abs() < 1e-15 * h_hi.abs().max(1e-300) {
            return Ok(c);
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    Err(Error::NoConvergence { iterations: 200, residual: fb })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let opts = OdeOptions::with_tol(1e-12);
        let end = integrate(|_, y: &[f64; 1]| Ok([-y[0]]), 0.0, [1.0], 3.0, &opts, |_, _, _, _| Ok(Control::Continue)).unwrap();
        assert!((end.y[0] - (-3.0f64).exp()).abs() < 1e-11);
        assert_eq!(end.t, 3.0);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let opts = OdeOptions::with_tol(1e-12);
        let f = |_, y: &[f64; 2]| Ok([y[1], -y[0]]);
        let end = integrate(f, 0.0, [0.0, 1.0], -2.0, &opts, |_, _, _, _| Ok(Control::Continue)).unwrap();
        assert!((end.y[0] - (-2.0f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn observer_can_stop_and_project() {
        let opts = OdeOptions::default();
        let end = integrate(
            |_, y: &[f64; 1]| Ok([1.0 + 0.0 * y[0]]),
            0.0,
            [0.0],
            10.0,
            &opts,
            |_, _, _, y| Ok(if y[0] > 1.0 { Control::Stop } else { Control::Continue }),
        )
        .unwrap();
        assert!(end.stopped && end.t > 1.0 && end.t < 10.0);
    }

    #[test]
    fn fifth_order_convergence() {
        let mut f = |_: f64, y: &[f64; 1]| Ok([y[0]]);
        let err = |h: f64, f: &mut dyn FnMut(f64, &[f64; 1]) -> Result<[f64; 1]>| {
            let mut y = [1.0];
            let n = (1.0 / h).round() as usize;
            for i in 0..n {
                y = dp5_step(f, i as f64 * h, &y, h).unwrap().0;
            }
            (y[0] - std::f64::consts::E).abs()
        };
        let e1 = err(0.1, &mut f);
        let e2 = err(0.05, &mut f);
        let order = (e1 / e2).log2();
        assert!(order > 4.7, "order {order}");
    }

    #[test]
    fn illinois_finds_root() {
        let r = illinois(|x| Ok(x * x - 2.0), 2.0, -2.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
