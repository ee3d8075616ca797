//! Sampled property suites run by `check-kernels`.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::kernels::{DecayBoundReport, LaplaceFrequency, StretchedKernels, DECAY_TOLERANCE};
use crate::profiles::PmlParams;

/// One sampled property and how often it failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// Largest observed defect, in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, samples: 0, violations: 0, worst: 0.0, tolerance }
    }

    fn record(&mut self, defect: f64) {
        self.samples += 1;
        if !(defect <= self.tolerance) {
            self.violations += 1;
        }
        if defect > self.worst || defect.is_nan() {
            self.worst = defect;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn line(&self) -> String {
        format!(
            "{:<24} {:>6} samples  {:>4} violations  worst {:.3e} (tol {:.1e})",
            self.name, self.samples, self.violations, self.worst, self.tolerance
        )
    }
}

const SLOPE_STEP: f64 = 1e-6;
const SLOPE_TOL: f64 = 1e-6;
const QUADRATURE_TOL: f64 = 1e-10;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Composite Simpson rule on `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Sign, symmetry, slope and tensor-bound properties of the profile.
pub fn profile_suite<R: Rng>(params: &PmlParams, n: usize, rng: &mut R) -> Vec<CheckOutcome> {
    let mut alpha = CheckOutcome::new("alpha >= 1", 0.0);
    let mut even = CheckOutcome::new("sigma even", 0.0);
    let mut odd = CheckOutcome::new("stretch odd", 1e-14);
    let mut slope = CheckOutcome::new("d(x~)/dx = alpha", SLOPE_TOL);
    let mut bounds = CheckOutcome::new("BA and (BA)^-1 bounds", 0.0);
    let (ba_lo, ba_hi) = params.ba_bounds();
    let (inv_lo, inv_hi) = params.ba_inv_bounds();
    for _ in 0..n {
        let axis = rng.random_range(0..3);
        let half = 0.5 * params.l[axis];
        let reach = half + 2.0 * params.d;
        let x = rng.random_range(-reach..=reach);
        alpha.record(1.0 - params.alpha(axis, x));
        even.record((params.sigma(axis, x) - params.sigma(axis, -x)).abs());
        let xt = params.stretched_coordinate(axis, x);
        odd.record((xt + params.stretched_coordinate(axis, -x)).abs() / xt.abs().max(1.0));
        let near_kink = [half, half + params.d].iter().any(|k| (x.abs() - k).abs() < 10.0 * SLOPE_STEP);
        if !near_kink {
            let fd = (params.stretched_coordinate(axis, x + SLOPE_STEP)
                - params.stretched_coordinate(axis, x - SLOPE_STEP))
                / (2.0 * SLOPE_STEP);
            slope.record(rel(fd, params.alpha(axis, x)));
        }
        let p = [0, 1, 2].map(|_| rng.random_range(-reach..=reach));
        let t = params.stretch_tensors(p);
        for j in 0..3 {
            let out = (ba_lo - t.ba[j]).max(t.ba[j] - ba_hi).max(0.0)
                + (inv_lo - t.ba_inv[j]).max(t.ba_inv[j] - inv_hi).max(0.0);
            bounds.record(out / ba_hi.max(inv_hi));
        }
    }
    let mut integral = CheckOutcome::new("sigma integral", QUADRATURE_TOL);
    for axis in 0..3 {
        let half = 0.5 * params.l[axis];
        let q = simpson(|x| params.sigma(axis, x), half, half + params.d, 2000);
        let want = params.sigma_integral(axis);
        integral.record(if want == 0.0 { q.abs() } else { rel(q, want) });
    }
    vec![alpha, even, odd, slope, bounds, integral]
}

const FD_STEP: f64 = 1e-4;
const HELMHOLTZ_TOL: f64 = 1e-4;
const HESSIAN_TOL: f64 = 1e-6;

/// Decay inequalities plus finite-difference checks of the kernel derivatives.
pub fn kernel_suite<R: Rng>(
    kernels: &StretchedKernels,
    n_decay: usize,
    n_oracle: usize,
    rng: &mut R,
) -> Result<(Vec<CheckOutcome>, DecayBoundReport)> {
    let p = *kernels.params();
    let report = kernels.decay_bound_check(n_decay, rng)?;
    let mut re = CheckOutcome::new("Re rho >= sigma0 d/(m+1)", DECAY_TOLERANCE);
    let mut abs = CheckOutcome::new("|rho/s| >= d", DECAY_TOLERANCE);
    let mut phi = CheckOutcome::new("|Phi~| <= bound", DECAY_TOLERANCE);
    re.samples = report.samples;
    abs.samples = report.samples;
    phi.samples = report.samples;
    re.worst = report.re_bound - report.min_re_rho;
    abs.worst = p.d - report.min_abs_rho_over_s;
    phi.worst = report.max_phi_abs - report.phi_bound;
    for v in &report.violations {
        if v.re_rho < report.re_bound - DECAY_TOLERANCE {
            re.violations += 1;
        }
        if v.abs_rho_over_s < p.d - DECAY_TOLERANCE {
            abs.violations += 1;
        }
        if v.phi_abs > report.phi_bound + DECAY_TOLERANCE {
            phi.violations += 1;
        }
    }

    let mut helm = CheckOutcome::new("Helmholtz residual", HELMHOLTZ_TOL);
    let mut hess = CheckOutcome::new("Hessian vs differences", HESSIAN_TOL);
    let mut sym = CheckOutcome::new("G~ symmetric", 0.0);
    let k2 = p.eps * p.mu;
    for _ in 0..n_oracle {
        let normal = rng.random_range(0..3);
        let x = [0, 1, 2].map(|j| {
            let half = 0.5 * p.l[j];
            let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            if j == normal {
                side * rng.random_range(half + 0.25 * p.d..=half + p.d)
            } else {
                rng.random_range(-half - p.d..=half + p.d)
            }
        });
        let y = [0, 1, 2].map(|j| rng.random_range(-0.5 * p.l[j]..=0.5 * p.l[j]));
        let s = LaplaceFrequency::new(p.s1, rng.random_range(-10.0 * p.s1..=10.0 * p.s1));
        let sv = s.value();
        let at = |dy: [f64; 3]| kernels.stretched_phi(x, [y[0] + dy[0], y[1] + dy[1], y[2] + dy[2]], s);
        let centre = at([0.0; 3])?;
        let mut lap = Complex64::new(-6.0, 0.0) * centre;
        for j in 0..3 {
            let mut e = [0.0; 3];
            e[j] = FD_STEP;
            lap += at(e)?;
            e[j] = -FD_STEP;
            lap += at(e)?;
        }
        lap /= FD_STEP * FD_STEP;
        let target = k2 * sv * sv * centre;
        helm.record((lap - target).norm() / target.norm().max(centre.norm()));

        let h = kernels.hessian_phi(x, y, s)?;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for j in 0..3 {
            let mut yp = y;
            let mut ym = y;
            yp[j] += FD_STEP;
            ym[j] -= FD_STEP;
            let gp = kernels.grad_phi(x, yp, s)?;
            let gm = kernels.grad_phi(x, ym, s)?;
            for i in 0..3 {
                let fd = (gp[i] - gm[i]) / (2.0 * FD_STEP);
                num = num.max((fd - h[i][j]).norm());
                den = den.max(h[i][j].norm());
            }
        }
        hess.record(num / den);

        let g = kernels.dyadic_green(x, y, s)?;
        let mut asym = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                asym = asym.max((g[i][j] - g[j][i]).norm());
            }
        }
        sym.record(asym);
    }
    Ok((vec![re, abs, phi, helm, hess, sym], report))
}
