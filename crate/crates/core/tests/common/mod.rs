//! Independent reference computations shared by the test targets.
#![allow(dead_code)]

use num_complex::Complex64 as C64;
use omband::meanfield::DriveParams;

/// Adaptive Simpson on [a, b].
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            left + right + diff / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

pub fn ramp(g0: f64, t_q: f64) -> impl Fn(f64) -> f64 {
    move |t| g0 * (1.0 - 2.0 * t / t_q)
}

pub fn theta_quadrature(g0: f64, d: f64, t_q: f64, t: f64) -> C64 {
    let g = ramp(g0, t_q);
    let re = simpson(&|s| -g(s) * (2.0 * d * s).cos(), 0.0, t, 1e-14);
    let im = simpson(&|s| -g(s) * (2.0 * d * s).sin(), 0.0, t, 1e-14);
    C64::new(re, im)
}

pub fn phi_quadrature(g0: f64, d: f64, t_q: f64, t: f64) -> f64 {
    let g = ramp(g0, t_q);
    let outer = |t1: f64| {
        let inner = simpson(&|t2| g(t2) * (2.0 * d * (t1 - t2)).sin(), 0.0, t1, 1e-13);
        g(t1) * inner
    };
    simpson(&outer, 0.0, t, 1e-12)
}

/// Bisection on the scalar equation for y = |α|²:
/// y · |D_c + G² c y|² = Ω_d²,  c = 2 Re(1/D_m).
pub fn meanfield_by_bisection(d: &DriveParams) -> (C64, C64) {
    let dc = d.optical_denominator();
    let dm = d.mechanical_denominator();
    let a = d.g_vacuum * d.g_vacuum * 2.0 * (1.0 / dm).re;
    let f = |y: f64| y * (dc + a * y).norm_sqr() - d.rabi * d.rabi;
    let (mut lo, mut hi) = (0.0, d.rabi * d.rabi / (dc.im * dc.im));
    assert!(f(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let alpha = d.rabi / (dc + a * y);
    let beta = d.g_vacuum * y / dm;
    (alpha, beta)
}
