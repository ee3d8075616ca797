//! Laplace-domain kernels under real coordinate stretching.
//!
//! With `r~ = |x~ - y|` and `kappa = sqrt(eps mu)` the stretched fundamental
//! solution is the radial function `g(r~) = exp(-kappa s r~) / (4 pi r~)`, and
//! all derivatives with respect to the source point `y` follow from
//!
//! ```text
//! g'  = -(kappa s + 1/r) g
//! g'' = (kappa^2 s^2 + 2 kappa s / r + 2 / r^2) g
//! grad_y g      = -g' e,                     e = (x~ - y) / r~
//! grad_y grad_y = g'' e e^T + (g' / r)(I - e e^T)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::profiles::PmlParams;

pub type CVec3 = [Complex64; 3];
pub type CMat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A point `s = s1 + i s2` of the right half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceFrequency {
    pub s1: f64,
    pub s2: f64,
}

impl LaplaceFrequency {
    pub fn new(s1: f64, s2: f64) -> Self {
        Self { s1, s2 }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.s1, self.s2)
    }
}

/// Kernel evaluations with their arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample<V> {
    pub value: V,
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub s: LaplaceFrequency,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Radial data shared by every kernel at one `(x, y, s)`.
struct Radial {
    r: f64,
    e: [f64; 3],
    s: Complex64,
    g: Complex64,
    dg: Complex64,
    d2g: Complex64,
}

/// Stretched kernels bound to one parameter set.
#[derive(Debug, Clone, Copy)]
pub struct StretchedKernels {
    params: PmlParams,
}

impl StretchedKernels {
    pub fn new(params: PmlParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> &PmlParams {
        &self.params
    }

    fn check_abscissa(&self, s: LaplaceFrequency) -> Result<()> {
        let expected = self.params.s1;
        if (s.s1 - expected).abs() > 1e-12 * expected.abs().max(1.0) {
            return Err(Error::Abscissa { got: s.s1, expected });
        }
        Ok(())
    }

    /// `|x~ - y|`, erroring below `1e-12 d`.
    pub fn stretched_distance(&self, x: [f64; 3], y: [f64; 3]) -> Result<f64> {
        let r = norm(sub(self.params.stretch_point(x), y));
        let threshold = 1e-12 * self.params.d;
        if !(r >= threshold) {
            return Err(Error::DegenerateDistance { distance: r, threshold });
        }
        Ok(r)
    }

    fn radial(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<Radial> {
        self.check_abscissa(s)?;
        let diff = sub(self.params.stretch_point(x), y);
        let r = self.stretched_distance(x, y)?;
        let e = [diff[0] / r, diff[1] / r, diff[2] / r];
        let sv = s.value();
        let ks = self.params.sqrt_eps_mu() * sv;
        let g = (-ks * r).exp() / (4.0 * PI * r);
        let dg = -(ks + 1.0 / r) * g;
        let d2g = (ks * ks + 2.0 * ks / r + 2.0 / (r * r)) * g;
        Ok(Radial { r, e, s: sv, g, dg, d2g })
    }

    /// `rho_s = s |x~ - y|`.
    pub fn complex_distance(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<Complex64> {
        self.check_abscissa(s)?;
        Ok(s.value() * self.stretched_distance(x, y)?)
    }

    pub fn stretched_phi(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<Complex64> {
        Ok(self.radial(x, y, s)?.g)
    }

    /// `grad_y Phi~`.
    pub fn grad_phi(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<CVec3> {
        let rad = self.radial(x, y, s)?;
        Ok(rad.e.map(|ej| -rad.dg * ej))
    }

    /// `grad_y grad_y Phi~` from the radial decomposition.
    pub fn hessian_phi(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<CMat3> {
        let rad = self.radial(x, y, s)?;
        Ok(hessian_from(&rad))
    }

    /// `G~ = Phi~ I + k^{-2} grad_y grad_y Phi~`, `k = i sqrt(eps mu) s`.
    pub fn dyadic_green(&self, x: [f64; 3], y: [f64; 3], s: LaplaceFrequency) -> Result<CMat3> {
        let rad = self.radial(x, y, s)?;
        let hess = hessian_from(&rad);
        let k = Complex64::new(0.0, self.params.sqrt_eps_mu()) * rad.s;
        let inv_k2 = 1.0 / (k * k);
        let mut out = [[ZERO; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = hess[i][j] * inv_k2;
            }
            out[i][i] += rad.g;
        }
        Ok(out)
    }

    fn check_off_surface(&self, panels: &SurfacePanels, x: [f64; 3]) -> Result<()> {
        let dist = panels.distance_to_surface(x);
        let threshold = 2.0 * panels.panel_size();
        if dist < threshold {
            return Err(Error::NearSurface { distance: dist, threshold });
        }
        Ok(())
    }

    /// Midpoint quadrature of `int_{Gamma1} G~^T q dgamma`.
    pub fn single_layer(
        &self,
        panels: &SurfacePanels,
        q: &[CVec3],
        x: [f64; 3],
        s: LaplaceFrequency,
    ) -> Result<CVec3> {
        check_density_len(panels, q)?;
        self.check_off_surface(panels, x)?;
        let mut acc = [ZERO; 3];
        for (panel, qp) in panels.panels().iter().zip(q) {
            let g = self.dyadic_green(x, panel.center, s)?;
            for i in 0..3 {
                // G~ is symmetric, so row i of G~^T is row i of G~.
                let v = g[0][i] * qp[0] + g[1][i] * qp[1] + g[2][i] * qp[2];
                acc[i] += v * panel.area;
            }
        }
        Ok(acc)
    }

    /// Midpoint quadrature of `int_{Gamma1} (curl_y G~)^T p dgamma`.
    ///
    /// Only `Phi~ I` contributes to the curl; the Hessian part is a gradient
    /// columnwise. The integrand reduces to `grad_y Phi~ x p`.
    pub fn double_layer(
        &self,
        panels: &SurfacePanels,
        p: &[CVec3],
        x: [f64; 3],
        s: LaplaceFrequency,
    ) -> Result<CVec3> {
        check_density_len(panels, p)?;
        self.check_off_surface(panels, x)?;
        let mut acc = [ZERO; 3];
        for (panel, pp) in panels.panels().iter().zip(p) {
            let grad = self.grad_phi(x, panel.center, s)?;
            let c = cross(grad, *pp);
            for i in 0..3 {
                acc[i] += c[i] * panel.area;
            }
        }
        Ok(acc)
    }

    /// `E(p, q)(x) = -SL(q)(x) - DL(p)(x)`.
    pub fn pml_extension(
        &self,
        panels: &SurfacePanels,
        p: &[CVec3],
        q: &[CVec3],
        x: [f64; 3],
        s: LaplaceFrequency,
    ) -> Result<CVec3> {
        let sl = self.single_layer(panels, q, x, s)?;
        let dl = self.double_layer(panels, p, x, s)?;
        Ok([-sl[0] - dl[0], -sl[1] - dl[1], -sl[2] - dl[2]])
    }

    /// `exp(-sqrt(eps mu) sigma0 d / (m+1)) / (4 pi d)`.
    pub fn phi_bound(&self) -> f64 {
        let p = &self.params;
        (-p.sqrt_eps_mu() * p.sigma_integral(0)).exp() / (4.0 * PI * p.d)
    }

    /// Samples `x` on `Gamma2`, `y` on `Gamma1` and `s2` in `[-10 s1, 10 s1]`
    /// and checks `|rho_s / s| >= d`, `Re rho_s >= sigma0 d / (m+1)` and the
    /// induced bound on `|Phi~_s|`.
    pub fn decay_bound_check<R: Rng>(&self, n_samples: usize, rng: &mut R) -> Result<DecayBoundReport> {
        let p = self.params;
        let re_bound = p.sigma_integral(0);
        let phi_bound = self.phi_bound();
        let outer = BoxSurface::new(p.l.map(|l| l + 2.0 * p.d));
        let inner = BoxSurface::new(p.l);
        let mut report = DecayBoundReport::new(p, re_bound, phi_bound);
        for _ in 0..n_samples {
            let x = outer.sample(rng);
            let y = inner.sample(rng);
            let s2 = rng.random_range(-10.0 * p.s1..=10.0 * p.s1);
            let s = LaplaceFrequency::new(p.s1, s2);
            let rho = self.complex_distance(x, y, s)?;
            let phi = self.stretched_phi(x, y, s)?;
            report.push(x, y, s2, rho, s.value(), phi.norm());
        }
        Ok(report)
    }
}

fn hessian_from(rad: &Radial) -> CMat3 {
    let mut out = [[ZERO; 3]; 3];
    let t = rad.dg / rad.r;
    for i in 0..3 {
        for j in 0..3 {
            let ee = rad.e[i] * rad.e[j];
            let delta = if i == j { 1.0 } else { 0.0 };
            out[i][j] = rad.d2g * ee + t * (delta - ee);
        }
    }
    out
}

fn cross(a: CVec3, b: CVec3) -> CVec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn check_density_len(panels: &SurfacePanels, v: &[CVec3]) -> Result<()> {
    if v.len() != panels.len() {
        return Err(Error::Shape(format!(
            "density has {} samples for {} panels",
            v.len(),
            panels.len()
        )));
    }
    Ok(())
}

/// Surface of the centred box with the given edge lengths.
#[derive(Debug, Clone, Copy)]
pub struct BoxSurface {
    edges: [f64; 3],
}

impl BoxSurface {
    pub fn new(edges: [f64; 3]) -> Self {
        Self { edges }
    }

    pub fn area(&self) -> f64 {
        let [a, b, c] = self.edges;
        2.0 * (a * b + b * c + a * c)
    }

    /// Uniform (area-weighted) point on the surface.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> [f64; 3] {
        let [a, b, c] = self.edges;
        let face_areas = [b * c, a * c, a * b];
        let total: f64 = face_areas.iter().sum();
        let mut pick = rng.random_range(0.0..total);
        let mut axis = 2;
        for (j, fa) in face_areas.iter().enumerate() {
            if pick < *fa {
                axis = j;
                break;
            }
            pick -= fa;
        }
        let mut x = [0.0; 3];
        for j in 0..3 {
            x[j] = if j == axis {
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                sign * 0.5 * self.edges[j]
            } else {
                rng.random_range(-0.5 * self.edges[j]..=0.5 * self.edges[j])
            };
        }
        x
    }
}

/// Flat panel on `Gamma1` used by the midpoint rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePanel {
    pub center: [f64; 3],
    pub normal: [f64; 3],
    pub area: f64,
}

/// Uniform rectangular panelization of the boundary of `B1`.
#[derive(Debug, Clone)]
pub struct SurfacePanels {
    half: [f64; 3],
    size: f64,
    panels: Vec<SurfacePanel>,
}

impl SurfacePanels {
    /// Splits each face into `n x n` rectangles.
    pub fn uniform(l: [f64; 3], n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("panel resolution must be >= 1".into()));
        }
        let half = l.map(|v| 0.5 * v);
        let mut panels = Vec::with_capacity(6 * n * n);
        let mut size: f64 = 0.0;
        for axis in 0..3 {
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            let (du, dv) = (l[u] / n as f64, l[v] / n as f64);
            size = size.max(du).max(dv);
            for sign in [-1.0, 1.0] {
                for a in 0..n {
                    for b in 0..n {
                        let mut center = [0.0; 3];
                        center[axis] = sign * half[axis];
                        center[u] = -half[u] + (a as f64 + 0.5) * du;
                        center[v] = -half[v] + (b as f64 + 0.5) * dv;
                        let mut normal = [0.0; 3];
                        normal[axis] = sign;
                        panels.push(SurfacePanel { center, normal, area: du * dv });
                    }
                }
            }
        }
        Ok(Self { half, size, panels })
    }

    pub fn panels(&self) -> &[SurfacePanel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Longest panel edge.
    pub fn panel_size(&self) -> f64 {
        self.size
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    /// Samples a density at the panel centres.
    pub fn sample_density<F>(&self, f: F) -> Vec<CVec3>
    where
        F: Fn(&SurfacePanel) -> CVec3,
    {
        self.panels.iter().map(f).collect()
    }

    /// Euclidean distance from `x` to the box boundary.
    pub fn distance_to_surface(&self, x: [f64; 3]) -> f64 {
        let q: Vec<f64> = (0..3).map(|j| x[j].abs() - self.half[j]).collect();
        let outside = q.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
        let inside = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max).min(0.0);
        outside + inside.abs()
    }
}

/// One violated inequality from [`StretchedKernels::decay_bound_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub s2: f64,
    pub abs_rho_over_s: f64,
    pub re_rho: f64,
    pub phi_abs: f64,
}

/// Per-bin minima over the `s2` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayBin {
    pub s2: f64,
    pub count: usize,
    pub min_re_rho: f64,
    pub min_abs_rho_over_s: f64,
    pub max_phi_abs: f64,
}

pub const DECAY_BINS: usize = 20;
pub const DECAY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayBoundReport {
    pub params: PmlParams,
    pub samples: usize,
    pub re_bound: f64,
    pub phi_bound: f64,
    pub min_re_rho: f64,
    pub min_abs_rho_over_s: f64,
    pub max_phi_abs: f64,
    pub violations: Vec<Violation>,
    pub bins: Vec<DecayBin>,
}

impl DecayBoundReport {
    fn new(params: PmlParams, re_bound: f64, phi_bound: f64) -> Self {
        let width = 20.0 * params.s1 / DECAY_BINS as f64;
        let bins = (0..DECAY_BINS)
            .map(|b| DecayBin {
                s2: -10.0 * params.s1 + (b as f64 + 0.5) * width,
                count: 0,
                min_re_rho: f64::INFINITY,
                min_abs_rho_over_s: f64::INFINITY,
                max_phi_abs: 0.0,
            })
            .collect();
        Self {
            params,
            samples: 0,
            re_bound,
            phi_bound,
            min_re_rho: f64::INFINITY,
            min_abs_rho_over_s: f64::INFINITY,
            max_phi_abs: 0.0,
            violations: Vec::new(),
            bins,
        }
    }

    fn push(&mut self, x: [f64; 3], y: [f64; 3], s2: f64, rho: Complex64, s: Complex64, phi_abs: f64) {
        let d = self.params.d;
        let abs_ratio = (rho / s).norm();
        let re = rho.re;
        self.samples += 1;
        self.min_re_rho = self.min_re_rho.min(re);
        self.min_abs_rho_over_s = self.min_abs_rho_over_s.min(abs_ratio);
        self.max_phi_abs = self.max_phi_abs.max(phi_abs);
        let s1 = self.params.s1;
        let width = 20.0 * s1 / DECAY_BINS as f64;
        let b = (((s2 + 10.0 * s1) / width) as usize).min(DECAY_BINS - 1);
        let bin = &mut self.bins[b];
        bin.count += 1;
        bin.min_re_rho = bin.min_re_rho.min(re);
        bin.min_abs_rho_over_s = bin.min_abs_rho_over_s.min(abs_ratio);
        bin.max_phi_abs = bin.max_phi_abs.max(phi_abs);
        let tol = DECAY_TOLERANCE;
        if abs_ratio < d - tol || re < self.re_bound - tol || phi_abs > self.phi_bound + tol * self.phi_bound {
            self.violations.push(Violation {
                x,
                y,
                s2,
                abs_rho_over_s: abs_ratio,
                re_rho: re,
                phi_abs,
            });
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Rows `(sigma0, d, m, s2, min_re_rho, min_abs_rho_over_s, max_phi_abs, bound_value)`,
    /// one per non-empty `s2` bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma0,d,m,s2,min_re_rho,min_abs_rho_over_s,max_phi_abs,bound_value\n");
        let p = &self.params;
        for bin in self.bins.iter().filter(|b| b.count > 0) {
            out.push_str(&format!(
                "{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
                p.sigma0, p.d, p.m, bin.s2, bin.min_re_rho, bin.min_abs_rho_over_s, bin.max_phi_abs, self.phi_bound
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn params() -> PmlParams {
        PmlParams::new(1.0, 1.0, [2.0; 3], 1.0, 4.0, 1.0)
    }

    #[test]
    fn complex_distance_examples() {
        let k = StretchedKernels::new(params());
        let rho = k
            .complex_distance([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], LaplaceFrequency::new(1.0, 0.0))
            .unwrap();
        assert_relative_eq!(rho.re, 3.0, max_relative = 1e-15);
        assert_eq!(rho.im, 0.0);
        let rho = k
            .complex_distance([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], LaplaceFrequency::new(1.0, 2.0))
            .unwrap();
        assert_relative_eq!(rho.re, 3.0, max_relative = 1e-15);
        assert_relative_eq!(rho.im, 6.0, max_relative = 1e-15);

        let flat = StretchedKernels::new(params().with_sigma0(0.0));
        let rho = flat
            .complex_distance([2.0, 0.5, 0.0], [1.0, 0.0, 0.0], LaplaceFrequency::new(1.0, 0.0))
            .unwrap();
        assert_relative_eq!(rho.re, 1.25f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn degenerate_and_abscissa_errors() {
        let k = StretchedKernels::new(params());
        let s = LaplaceFrequency::new(1.0, 0.0);
        assert!(matches!(
            k.stretched_phi([0.5; 3], [0.5; 3], s),
            Err(Error::DegenerateDistance { .. })
        ));
        assert!(matches!(
            k.stretched_phi([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], LaplaceFrequency::new(2.0, 0.0)),
            Err(Error::Abscissa { .. })
        ));
    }

    #[test]
    fn phi_examples() {
        let k = StretchedKernels::new(params());
        let s = LaplaceFrequency::new(1.0, 0.0);
        let phi = k.stretched_phi([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], s).unwrap();
        assert_relative_eq!(phi.re, 1.320_643_005_466_615e-3, max_relative = 1e-13);
        let flat = StretchedKernels::new(params().with_sigma0(0.0));
        let phi = flat.stretched_phi([2.0, 0.0, 0.0], [1.0, 0.0, 0.0], s).unwrap();
        assert_relative_eq!(phi.re, (-1.0f64).exp() / (4.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(k.phi_bound(), 1.076_963_965_092_431_5e-2, max_relative = 1e-13);
    }

    #[test]
    fn green_real_for_unstretched_real_s() {
        let flat = StretchedKernels::new(params().with_sigma0(0.0));
        let g = flat
            .dyadic_green([2.0, 0.3, -0.4], [1.0, 0.1, 0.2], LaplaceFrequency::new(1.0, 0.0))
            .unwrap();
        for row in g {
            for v in row {
                assert_eq!(v.im, 0.0);
                assert!(v.re.is_finite());
            }
        }
    }

    #[test]
    fn panels_cover_the_surface() {
        let panels = SurfacePanels::uniform([2.0, 1.0, 3.0], 5).unwrap();
        assert_eq!(panels.len(), 150);
        assert_relative_eq!(panels.total_area(), 2.0 * (2.0 + 3.0 + 6.0), max_relative = 1e-12);
        let half = [1.0, 0.5, 1.5];
        for p in panels.panels() {
            let on_face = (0..3).any(|j| (p.center[j].abs() - half[j]).abs() < 1e-12);
            assert!(on_face);
            let axis = (0..3).find(|&j| p.normal[j] != 0.0).unwrap();
            assert_eq!(p.normal[axis].signum(), p.center[axis].signum());
        }
        assert!(SurfacePanels::uniform([2.0; 3], 0).is_err());
    }

    #[test]
    fn layer_potentials_zero_density_and_near_surface() {
        let k = StretchedKernels::new(params());
        let panels = SurfacePanels::uniform([2.0; 3], 4).unwrap();
        let zero = vec![[ZERO; 3]; panels.len()];
        let s = LaplaceFrequency::new(1.0, 0.5);
        let x = [2.0, 0.1, 0.2];
        assert_eq!(k.single_layer(&panels, &zero, x, s).unwrap(), [ZERO; 3]);
        assert_eq!(k.double_layer(&panels, &zero, x, s).unwrap(), [ZERO; 3]);
        assert_eq!(k.pml_extension(&panels, &zero, &zero, x, s).unwrap(), [ZERO; 3]);
        assert!(matches!(
            k.single_layer(&panels, &zero, [1.2, 0.0, 0.0], s),
            Err(Error::NearSurface { .. })
        ));
        assert!(matches!(
            k.single_layer(&panels, &zero[1..], x, s),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn decay_check_small_cases() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let k = StretchedKernels::new(params());
        let empty = k.decay_bound_check(0, &mut rng).unwrap();
        assert!(empty.passed());
        assert_eq!(empty.samples, 0);

        let flat = StretchedKernels::new(params().with_sigma0(0.0));
        let r = flat.decay_bound_check(2000, &mut rng).unwrap();
        assert!(r.passed());
        assert!(r.min_re_rho >= 1.0 - 1e-12);
    }

    #[test]
    fn surface_distance() {
        let panels = SurfacePanels::uniform([2.0; 3], 2).unwrap();
        assert_relative_eq!(panels.distance_to_surface([2.0, 0.0, 0.0]), 1.0);
        assert_relative_eq!(panels.distance_to_surface([0.0, 0.0, 0.0]), 1.0);
        assert_relative_eq!(panels.distance_to_surface([2.0, 2.0, 0.0]), 2f64.sqrt());
    }
}
