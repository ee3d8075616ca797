//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls the closed forms under test: profiles are integrated
//! numerically and kernels are differentiated by finite differences.

#![allow(dead_code)]

use num_complex::Complex64;
use upml::PmlParams;

/// Composite Simpson rule on `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// The profile from its defining formula.
pub fn sigma_oracle(p: &PmlParams, axis: usize, x: f64) -> f64 {
    let half = p.l[axis] / 2.0;
    let t = ((x.abs() - half) / p.d).clamp(0.0, 1.0);
    p.sigma0 * t.powf(p.m as f64)
}

/// `x~ = int_0^x (1 + sigma / s1)`, by piecewise Simpson quadrature split at the kinks.
pub fn stretch_oracle(p: &PmlParams, axis: usize, x: f64) -> f64 {
    let half = p.l[axis] / 2.0;
    let a = x.abs();
    let f = |t: f64| 1.0 + sigma_oracle(p, axis, t) / p.s1;
    let mut knots = vec![0.0];
    for k in [half, half + p.d] {
        if k < a {
            knots.push(k);
        }
    }
    knots.push(a);
    let total: f64 = knots.windows(2).map(|w| simpson(f, w[0], w[1], 400)).sum();
    total.copysign(x)
}

/// `exp(-kappa s r) / (4 pi r)` with the stretch taken from the quadrature oracle.
pub fn phi_oracle(p: &PmlParams, x: [f64; 3], y: [f64; 3], s: Complex64) -> Complex64 {
    let xt = [0, 1, 2].map(|j| stretch_oracle(p, j, x[j]));
    let r = ((xt[0] - y[0]).powi(2) + (xt[1] - y[1]).powi(2) + (xt[2] - y[2]).powi(2)).sqrt();
    let k = (p.eps * p.mu).sqrt();
    (-k * s * r).exp() / (4.0 * std::f64::consts::PI * r)
}

/// Central-difference gradient in `y` of a complex scalar.
pub fn fd_grad<F: Fn([f64; 3]) -> Complex64>(f: F, y: [f64; 3], step: f64) -> [Complex64; 3] {
    [0, 1, 2].map(|j| {
        let mut a = y;
        let mut b = y;
        a[j] += step;
        b[j] -= step;
        (f(a) - f(b)) / (2.0 * step)
    })
}

/// Second-order central-difference Hessian in `y` of a complex scalar.
pub fn fd_hessian<F: Fn([f64; 3]) -> Complex64>(f: F, y: [f64; 3], step: f64) -> [[Complex64; 3]; 3] {
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let at = |di: f64, dj: f64| {
                let mut q = y;
                q[i] += di;
                q[j] += dj;
                f(q)
            };
            out[i][j] = if i == j {
                (at(step, 0.0) - 2.0 * f(y) + at(-step, 0.0)) / (step * step)
            } else {
                (at(step, step) - at(step, -step) - at(-step, step) + at(-step, -step)) / (4.0 * step * step)
            };
        }
    }
    out
}

/// Seven-point Laplacian in `y`.
pub fn fd_laplacian<F: Fn([f64; 3]) -> Complex64>(f: F, y: [f64; 3], step: f64) -> Complex64 {
    let mut s = -6.0 * f(y);
    for j in 0..3 {
        let mut a = y;
        let mut b = y;
        a[j] += step;
        b[j] -= step;
        s += f(a) + f(b);
    }
    s / (step * step)
}

pub fn max_abs_matrix(m: &[[Complex64; 3]; 3]) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}
