//! Absorption profiles, real coordinate stretching and the diagonal
//! material tensors of the uniaxial layer.
//!
//! The layer surrounds the box `B1 = prod [-L_j/2, L_j/2]` with a shell of
//! thickness `d` on every axis. Inside the shell the absorption grows
//! polynomially from zero to `sigma0`; the stretching factor along an axis
//! is the real number `alpha = 1 + sigma / s1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical and layer parameters shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmlParams {
    pub eps: f64,
    pub mu: f64,
    /// Edge lengths of the inner box `B1`.
    pub l: [f64; 3],
    /// Layer thickness, equal on all axes.
    pub d: f64,
    pub sigma0: f64,
    /// Polynomial order of the profile.
    pub m: u32,
    /// Real Laplace abscissa used by the stretching.
    pub s1: f64,
    /// Final time.
    pub t_final: f64,
}

/// Non-fatal observations made while validating [`PmlParams`].
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// `max(L) / d` exceeds the configured thickness ratio.
    ThinLayer { ratio: f64, limit: f64 },
    /// `d < 1`; the analysis assumes a unit-or-thicker layer.
    SubUnitThickness { d: f64 },
    /// `s1` differs from `1 / T`.
    AbscissaOverride { s1: f64, inv_t: f64 },
}

pub const DEFAULT_THICKNESS_RATIO: f64 = 10.0;

impl PmlParams {
    /// Parameters with `m = 1` and `s1 = 1 / T`.
    pub fn new(eps: f64, mu: f64, l: [f64; 3], d: f64, sigma0: f64, t_final: f64) -> Self {
        Self {
            eps,
            mu,
            l,
            d,
            sigma0,
            m: 1,
            s1: 1.0 / t_final,
            t_final,
        }
    }

    pub fn with_order(mut self, m: u32) -> Self {
        self.m = m;
        self
    }

    pub fn with_s1(mut self, s1: f64) -> Self {
        self.s1 = s1;
        self
    }

    pub fn with_sigma0(mut self, sigma0: f64) -> Self {
        self.sigma0 = sigma0;
        self
    }

    /// Hard invariants. `sigma0 = 0` is accepted: it is the identity
    /// medium used as the bare-truncation anchor of a sweep.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("eps", self.eps),
            ("mu", self.mu),
            ("d", self.d),
            ("s1", self.s1),
            ("T", self.t_final),
            ("L1", self.l[0]),
            ("L2", self.l[1]),
            ("L3", self.l[2]),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be a positive finite number, got {v}")));
            }
        }
        if !(self.sigma0.is_finite() && self.sigma0 >= 0.0) {
            return Err(Error::Config(format!(
                "sigma0 must be > 0 (or exactly 0 for the unstretched anchor), got {}",
                self.sigma0
            )));
        }
        if self.m < 1 {
            return Err(Error::Config("profile order m must be >= 1".into()));
        }
        Ok(())
    }

    /// Soft checks: thickness ratio, unit thickness, and `s1 = 1/T`.
    pub fn warnings(&self, thickness_ratio: f64) -> Vec<ParamWarning> {
        let mut out = Vec::new();
        let ratio = self.l_max() / self.d;
        if ratio > thickness_ratio {
            out.push(ParamWarning::ThinLayer { ratio, limit: thickness_ratio });
        }
        if self.d < 1.0 {
            out.push(ParamWarning::SubUnitThickness { d: self.d });
        }
        let inv_t = 1.0 / self.t_final;
        if (self.s1 - inv_t).abs() > 1e-12 * inv_t {
            out.push(ParamWarning::AbscissaOverride { s1: self.s1, inv_t });
        }
        out
    }

    pub fn l_max(&self) -> f64 {
        self.l[0].max(self.l[1]).max(self.l[2])
    }

    pub fn sqrt_eps_mu(&self) -> f64 {
        (self.eps * self.mu).sqrt()
    }

    /// Largest stretching factor, reached beyond the layer.
    pub fn alpha_max(&self) -> f64 {
        1.0 + self.sigma0 / self.s1
    }

    /// Absorption profile along `axis` (0-based).
    pub fn sigma(&self, axis: usize, x: f64) -> f64 {
        let half = 0.5 * self.l[axis];
        let ax = x.abs();
        if ax <= half {
            0.0
        } else if ax <= half + self.d {
            self.sigma0 * ((ax - half) / self.d).powi(self.m as i32)
        } else {
            self.sigma0
        }
    }

    pub fn alpha(&self, axis: usize, x: f64) -> f64 {
        1.0 + self.sigma(axis, x) / self.s1
    }

    /// Antiderivative of `alpha` from the origin, in closed form per branch.
    pub fn stretched_coordinate(&self, axis: usize, x: f64) -> f64 {
        let half = 0.5 * self.l[axis];
        let ax = x.abs();
        let mp1 = f64::from(self.m + 1);
        let gain = self.sigma0 * self.d / (self.s1 * mp1);
        let mag = if ax <= half {
            ax
        } else if ax <= half + self.d {
            ax + gain * ((ax - half) / self.d).powi(self.m as i32 + 1)
        } else {
            half + self.d + gain + self.alpha_max() * (ax - half - self.d)
        };
        mag.copysign(x)
    }

    /// `x -> x~` componentwise.
    pub fn stretch_point(&self, x: [f64; 3]) -> [f64; 3] {
        [
            self.stretched_coordinate(0, x[0]),
            self.stretched_coordinate(1, x[1]),
            self.stretched_coordinate(2, x[2]),
        ]
    }

    /// `int_0^{L/2+d} sigma(t) dt`, which is `sigma0 d / (m+1)` for every axis.
    pub fn sigma_integral(&self, _axis: usize) -> f64 {
        self.sigma0 * self.d / f64::from(self.m + 1)
    }

    pub fn stretch_tensors(&self, x: [f64; 3]) -> StretchDiagonal {
        let a = [self.alpha(0, x[0]), self.alpha(1, x[1]), self.alpha(2, x[2])];
        StretchDiagonal::from_alphas(a)
    }

    /// Lower and upper bounds on the entries of `BA` in the layer.
    pub fn ba_bounds(&self) -> (f64, f64) {
        let k = self.alpha_max();
        (1.0 / (k * k), k)
    }

    /// Lower and upper bounds on the entries of `(BA)^{-1}` in the layer.
    pub fn ba_inv_bounds(&self) -> (f64, f64) {
        let k = self.alpha_max();
        (1.0 / k, k * k)
    }
}

/// Diagonal entries of `A`, `B`, `BA` and `(BA)^{-1}` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchDiagonal {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub ba: [f64; 3],
    pub ba_inv: [f64; 3],
}

impl StretchDiagonal {
    pub fn from_alphas(alpha: [f64; 3]) -> Self {
        let [a1, a2, a3] = alpha;
        let a = [1.0 / (a2 * a3), 1.0 / (a1 * a3), 1.0 / (a1 * a2)];
        let b = alpha;
        let ba = [b[0] * a[0], b[1] * a[1], b[2] * a[2]];
        let ba_inv = [1.0 / ba[0], 1.0 / ba[1], 1.0 / ba[2]];
        Self { a, b, ba, ba_inv }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params() -> PmlParams {
        PmlParams::new(1.0, 1.0, [2.0; 3], 1.0, 4.0, 1.0)
    }

    #[test]
    fn sigma_branches() {
        let p = params();
        assert_eq!(p.sigma(0, 0.5), 0.0);
        assert_relative_eq!(p.sigma(0, 1.5), 2.0);
        assert_relative_eq!(p.sigma(0, 2.0), 4.0);
        assert_eq!(p.sigma(0, 7.0), 4.0);
        assert_eq!(p.sigma(0, -1.5), p.sigma(0, 1.5));
    }

    #[test]
    fn alpha_values() {
        let p = params();
        assert_eq!(p.alpha(0, 0.0), 1.0);
        assert_relative_eq!(p.alpha(0, 1.5), 3.0);
        assert_relative_eq!(p.alpha(0, 2.0), 5.0);
    }

    #[test]
    fn stretched_coordinate_closed_form() {
        let p = params();
        assert_eq!(p.stretched_coordinate(0, 0.5), 0.5);
        assert_relative_eq!(p.stretched_coordinate(0, 1.5), 2.0, max_relative = 1e-15);
        assert_relative_eq!(p.stretched_coordinate(0, 2.0), 4.0, max_relative = 1e-15);
        // affine continuation beyond the layer with slope alpha_max
        assert_relative_eq!(p.stretched_coordinate(0, 3.0), 9.0, max_relative = 1e-15);
        assert_relative_eq!(p.stretched_coordinate(0, -1.5), -2.0, max_relative = 1e-15);
    }

    #[test]
    fn sigma_integral_values() {
        let p = params();
        assert_relative_eq!(p.sigma_integral(0), 2.0);
        assert_relative_eq!(p.with_order(2).sigma_integral(1), 4.0 / 3.0);
        assert_eq!(p.with_sigma0(0.0).sigma_integral(2), 0.0);
    }

    #[test]
    fn tensors_face_and_corner() {
        let p = params();
        let t = p.stretch_tensors([1.75, 0.0, 0.0]);
        assert_relative_eq!(p.sigma(0, 1.75), 3.0);
        assert_eq!(t.b, [4.0, 1.0, 1.0]);
        assert_relative_eq!(t.ba[0], 4.0);
        assert_relative_eq!(t.ba[1], 0.25);
        assert_relative_eq!(t.ba[2], 0.25);

        assert_eq!(p.stretch_tensors([0.0; 3]).ba, [1.0; 3]);

        let c = p.stretch_tensors([2.0, 2.0, 0.0]);
        assert_relative_eq!(c.ba[0], 1.0);
        assert_relative_eq!(c.ba[1], 1.0);
        assert_relative_eq!(c.ba[2], 0.04, max_relative = 1e-15);
        let (lo, hi) = p.ba_bounds();
        assert_relative_eq!(lo, 0.04);
        assert_eq!(hi, 5.0);
    }

    #[test]
    fn validation() {
        assert!(params().validate().is_ok());
        assert!(params().with_sigma0(-1.0).validate().is_err());
        assert!(params().with_order(0).validate().is_err());
        let w = PmlParams::new(1.0, 1.0, [2.0; 3], 0.5, 4.0, 6.0).warnings(DEFAULT_THICKNESS_RATIO);
        assert_eq!(w, vec![ParamWarning::SubUnitThickness { d: 0.5 }]);
        let w = params().with_s1(2.0).warnings(3.0);
        assert!(matches!(w[0], ParamWarning::AbscissaOverride { .. }));
    }
}
