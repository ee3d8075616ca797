//! Explicit leapfrog for the truncated layer system
//!
//! ```text
//! d_t H = -mu^{-1}  BA curl E
//! d_t E =  eps^{-1} BA (curl H - J)
//! ```
//!
//! on the staggered lattice of [`GridSpec`], with PEC walls on the outer
//! boundary and on an optional cuboid scatterer. `BA` is diagonal and
//! separable per axis, so every coefficient is a product of three 1-D
//! factors sampled at the component's own position.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Component, GridSpec};
use crate::history::{FieldHistory, RegionIndex, Snapshot, DEFAULT_STORAGE_BUDGET};
use crate::profiles::PmlParams;

pub const DEFAULT_CFL: f64 = 0.9;
/// Steps between full finiteness scans.
pub const DEFAULT_FINITE_CHECK_INTERVAL: u64 = 64;

/// Dense 3-D array, `k` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3 {
    pub dims: [usize; 3],
    pub data: Vec<f64>,
}

impl Field3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Self { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.dims[1] * self.dims[2],
            1 => self.dims[2],
            _ => 1,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Staggered fields at one instant: `E` at `t_n`, `H` at `t_{n-1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EMState {
    pub e: [Field3; 3],
    pub h: [Field3; 3],
    pub step_index: u64,
    pub dt: f64,
}

impl EMState {
    pub fn zeros(n: [usize; 3], dt: f64) -> Self {
        Self {
            e: [0, 1, 2].map(|a| Field3::zeros(Component::electric(a).dims(n))),
            h: [0, 1, 2].map(|a| Field3::zeros(Component::magnetic(a).dims(n))),
            step_index: 0,
            dt,
        }
    }

    pub fn field(&self, c: Component) -> &Field3 {
        if c.is_electric() {
            &self.e[c.axis()]
        } else {
            &self.h[c.axis()]
        }
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    pub fn check_finite(&self) -> Result<()> {
        for c in Component::ALL {
            let f = self.field(c);
            if let Some(p) = f.data.iter().position(|v| !v.is_finite()) {
                let k = p % f.dims[2];
                let j = (p / f.dims[2]) % f.dims[1];
                let i = p / (f.dims[1] * f.dims[2]);
                return Err(Error::NonFinite { field: c.name(), step: self.step_index, i, j, k });
            }
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        Component::ALL
            .iter()
            .flat_map(|&c| self.field(c).data.iter())
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Soft point-dipole current `J(t) = amplitude exp(-(t - t0)^2 / tau^2)` on one edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub location: [f64; 3],
    /// Polarization axis, 0-based.
    pub polarization: usize,
    pub amplitude: f64,
    pub t0: f64,
    pub tau: f64,
}

impl SourceSpec {
    pub fn waveform(&self, t: f64) -> f64 {
        let u = (t - self.t0) / self.tau;
        self.amplitude * (-u * u).exp()
    }

    pub fn waveform_derivative(&self, t: f64) -> f64 {
        let u = (t - self.t0) / self.tau;
        -2.0 * u / self.tau * self.amplitude * (-u * u).exp()
    }

    /// Support strictly inside `B1` (at least one cell from `Gamma1`) and a
    /// pulse centre late enough that the waveform starts from rest.
    pub fn validate(&self, params: &PmlParams, h: f64) -> Result<()> {
        if self.polarization > 2 {
            return Err(Error::Config(format!("polarization must be 1..3, got {}", self.polarization + 1)));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Config("source width tau must be positive".into()));
        }
        for j in 0..3 {
            if self.location[j].abs() + h > 0.5 * params.l[j] {
                return Err(Error::Config(format!(
                    "source support must lie in B1 (compactly supported source): |x{}| = {} with h = {h} \
                     reaches Gamma1 at {}",
                    j + 1,
                    self.location[j].abs(),
                    0.5 * params.l[j]
                )));
            }
        }
        if self.t0 < 6.0 * self.tau {
            return Err(Error::Config(format!(
                "source must start from rest (vanishing time derivatives at t = 0): need t0 >= 6 tau, \
                 got t0 = {}, tau = {}",
                self.t0, self.tau
            )));
        }
        Ok(())
    }
}

/// Axis-aligned PEC cuboid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScattererSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl ScattererSpec {
    fn index_box(&self, grid: &GridSpec, params_l: [f64; 3]) -> Result<([usize; 3], [usize; 3])> {
        let mut lo = [0; 3];
        let mut hi = [0; 3];
        for j in 0..3 {
            let a = grid.node_index(j, self.lo[j]);
            let b = grid.node_index(j, self.hi[j]);
            let (a, b) = match (a, b) {
                (Some(a), Some(b)) if a < b => (a, b),
                _ => return Err(Error::Config("scatterer faces must lie on grid nodes with lo < hi".into())),
            };
            let half = 0.5 * params_l[j];
            let margin = 2.0 * grid.h - 1e-9 * grid.h;
            if self.lo[j] < -half + margin || self.hi[j] > half - margin {
                return Err(Error::Config(
                    "scatterer must lie strictly inside B1 with a two-cell margin".into(),
                ));
            }
            lo[j] = a;
            hi[j] = b;
        }
        Ok((lo, hi))
    }
}

/// `dt = cfl h / (c_max sqrt 3)` with `c_max = (1 + sigma0/s1) / sqrt(eps mu)`.
pub fn cfl_timestep(grid: &GridSpec, params: &PmlParams, cfl: f64) -> Result<f64> {
    timestep_for(grid.h, params.alpha_max(), params.sqrt_eps_mu(), cfl)
}

pub fn timestep_for(h: f64, alpha_max: f64, sqrt_eps_mu: f64, cfl: f64) -> Result<f64> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("cfl factor must be in (0, 1], got {cfl}")));
    }
    let c_max = alpha_max / sqrt_eps_mu;
    Ok(cfl * h / (c_max * 3f64.sqrt()))
}

/// Per-axis factors of one component's coefficient.
#[derive(Debug, Clone, PartialEq)]
struct AxisFactors {
    f: [Vec<f64>; 3],
    /// Reciprocals of `f`, for the `(BA)^-1` energy weights.
    inv: [Vec<f64>; 3],
}

/// Update coefficients for all six components.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// `dt / (eps h)` and `dt / (mu h)`.
    base_e: f64,
    base_h: f64,
    factors: [AxisFactors; 6],
}

impl Coefficients {
    /// `alpha(axis, x)` gives the stretching factor; `|_, _, _| 1.0` is vacuum.
    fn new(grid: &GridSpec, eps: f64, mu: f64, dt: f64, alpha: impl Fn(usize, f64) -> f64) -> Self {
        let node: [Vec<f64>; 3] = [0, 1, 2].map(|a| (0..=grid.n[a]).map(|i| alpha(a, grid.node(a, i))).collect());
        let half: [Vec<f64>; 3] = [0, 1, 2].map(|a| (0..grid.n[a]).map(|i| alpha(a, grid.half(a, i))).collect());
        let inv = |v: &Vec<f64>| v.iter().map(|x| 1.0 / x).collect::<Vec<f64>>();
        let factors = Component::ALL.map(|c| {
            let a = c.axis();
            let f = [0, 1, 2].map(|j| {
                match (c.is_electric(), j == a) {
                    // E_a: alpha_a at the half point, 1/alpha at nodes.
                    (true, true) => half[j].clone(),
                    (true, false) => inv(&node[j]),
                    // H_a: alpha_a at the node, 1/alpha at half points.
                    (false, true) => node[j].clone(),
                    (false, false) => inv(&half[j]),
                }
            });
            let inv = f.clone().map(|v| inv(&v));
            AxisFactors { f, inv }
        });
        Self { base_e: dt / (eps * grid.h), base_h: dt / (mu * grid.h), factors }
    }

    /// `(BA)_aa` at the sample `(i, j, k)` of component `c`.
    pub fn ba(&self, c: Component, i: usize, j: usize, k: usize) -> f64 {
        let f = &self.factors[c as usize].f;
        f[0][i] * f[1][j] * f[2][k]
    }

    /// `dt (BA)_aa / eps` (or `/ mu`) at a sample.
    pub fn coefficient(&self, c: Component, i: usize, j: usize, k: usize, h: f64) -> f64 {
        let base = if c.is_electric() { self.base_e } else { self.base_h };
        base * h * self.ba(c, i, j, k)
    }

    fn is_uniform(&self) -> bool {
        self.factors.iter().all(|af| af.f.iter().all(|v| v.iter().all(|&x| x == 1.0)))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct SourceIndex {
    spec: SourceSpec,
    /// Edges carrying the current, with quadrature weights.
    edges: Vec<([usize; 3], f64)>,
}

/// Built simulation: grid, coefficients, PEC boxes and state.
#[derive(Debug, Clone)]
pub struct Simulation {
    grid: GridSpec,
    eps: f64,
    mu: f64,
    dt: f64,
    coef: Coefficients,
    source: Option<SourceIndex>,
    pec: Option<([usize; 3], [usize; 3])>,
    state: EMState,
    finite_check_interval: u64,
    storage_budget: u64,
}

/// Builder-style inputs for [`Simulation::new`].
#[derive(Debug, Clone, Copy)]
pub struct Medium<'a> {
    pub eps: f64,
    pub mu: f64,
    /// `None` is the identity medium.
    pub pml: Option<&'a PmlParams>,
}

impl<'a> Medium<'a> {
    pub fn vacuum(eps: f64, mu: f64) -> Self {
        Self { eps, mu, pml: None }
    }

    pub fn pml(params: &'a PmlParams) -> Self {
        Self { eps: params.eps, mu: params.mu, pml: Some(params) }
    }
}

impl Simulation {
    /// Builds coefficient arrays and PEC masks at timestep `dt`.
    ///
    /// `b1` is the inner box used to validate source and scatterer support.
    pub fn new(
        grid: GridSpec,
        medium: Medium<'_>,
        dt: f64,
        b1: &PmlParams,
        source: Option<SourceSpec>,
        scatterer: Option<ScattererSpec>,
    ) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("timestep must be positive, got {dt}")));
        }
        for j in 0..3 {
            if grid.node_index(j, 0.5 * b1.l[j]).is_none() || grid.node_index(j, -0.5 * b1.l[j]).is_none() {
                return Err(Error::Config(format!("Gamma1 is not on a grid face along axis {}", j + 1)));
            }
        }
        let coef = match medium.pml {
            Some(p) => {
                p.validate()?;
                // Gamma2 must be the outer wall of this grid.
                for j in 0..3 {
                    let span = grid.n[j] as f64 * grid.h;
                    if (span - (p.l[j] + 2.0 * p.d)).abs() > 1e-9 * span {
                        return Err(Error::Config(format!(
                            "grid span {span} along axis {} does not match L + 2d = {}",
                            j + 1,
                            p.l[j] + 2.0 * p.d
                        )));
                    }
                }
                Coefficients::new(&grid, medium.eps, medium.mu, dt, |a, x| p.alpha(a, x))
            }
            None => Coefficients::new(&grid, medium.eps, medium.mu, dt, |_, _| 1.0),
        };
        let source = match source {
            Some(spec) => {
                spec.validate(b1, grid.h)?;
                let a = spec.polarization;
                let mut idx = [0; 3];
                for j in 0..3 {
                    let off = if j == a { 0.5 } else { 0.0 };
                    let q = ((spec.location[j] - grid.origin[j]) / grid.h - off).round();
                    idx[j] = q as usize;
                }
                Some(SourceIndex { spec, edges: vec![(idx, 1.0)] })
            }
            None => None,
        };
        let pec = scatterer.map(|s| s.index_box(&grid, b1.l)).transpose()?;
        Ok(Self {
            grid,
            eps: medium.eps,
            mu: medium.mu,
            dt,
            coef,
            source,
            pec,
            state: EMState::zeros(grid.n, dt),
            finite_check_interval: DEFAULT_FINITE_CHECK_INTERVAL,
            storage_budget: DEFAULT_STORAGE_BUDGET,
        })
    }

    /// PML simulation on `B2` at the CFL timestep.
    pub fn build(
        grid: GridSpec,
        params: &PmlParams,
        source: Option<SourceSpec>,
        scatterer: Option<ScattererSpec>,
        cfl: f64,
    ) -> Result<Self> {
        let dt = cfl_timestep(&grid, params, cfl)?;
        Self::new(grid, Medium::pml(params), dt, params, source, scatterer)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn state(&self) -> &EMState {
        &self.state
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coef
    }

    /// Spreads the source over every edge of this grid that lies in the
    /// dual cell of the source edge on a grid `ratio` times coarser (same
    /// origin), with trapezoid weights on the cell faces. Both grids then
    /// carry the same current density over the same volume, which is what a
    /// self-convergence comparison needs. `ratio` must be even.
    pub fn refine_source(&mut self, ratio: usize) -> Result<()> {
        if ratio == 0 || ratio % 2 != 0 {
            return Err(Error::Config(format!("source refinement ratio must be even, got {ratio}")));
        }
        let Some(src) = self.source.as_mut() else { return Ok(()) };
        let a = src.spec.polarization;
        let coarse_h = self.grid.h * ratio as f64;
        let half = ratio / 2;
        let mut ranges: [Vec<(usize, f64)>; 3] = Default::default();
        for j in 0..3 {
            let off = if j == a { 0.5 } else { 0.0 };
            let q = ((src.spec.location[j] - self.grid.origin[j]) / coarse_h - off).round() as usize;
            ranges[j] = if j == a {
                (q * ratio..(q + 1) * ratio).map(|i| (i, 1.0)).collect()
            } else {
                let lo = (q * ratio)
                    .checked_sub(half)
                    .ok_or_else(|| Error::Config("refined source leaves the grid".into()))?;
                let hi = q * ratio + half;
                (lo..=hi).map(|i| (i, if i == lo || i == hi { 0.5 } else { 1.0 })).collect()
            };
        }
        let dims = Component::electric(a).dims(self.grid.n);
        let mut edges = Vec::new();
        for &(i, wi) in &ranges[0] {
            for &(j, wj) in &ranges[1] {
                for &(k, wk) in &ranges[2] {
                    if i >= dims[0] || j >= dims[1] || k >= dims[2] {
                        return Err(Error::Config("refined source leaves the grid".into()));
                    }
                    edges.push(([i, j, k], wi * wj * wk));
                }
            }
        }
        src.edges = edges;
        Ok(())
    }

    pub fn source(&self) -> Option<&SourceSpec> {
        self.source.as_ref().map(|s| &s.spec)
    }

    pub fn time(&self) -> f64 {
        self.state.time()
    }

    pub fn is_vacuum(&self) -> bool {
        self.coef.is_uniform()
    }

    pub fn set_finite_check_interval(&mut self, every: u64) {
        self.finite_check_interval = every.max(1);
    }

    pub fn set_storage_budget(&mut self, bytes: u64) {
        self.storage_budget = bytes;
    }

    /// One leapfrog step: `H^{n-1/2} -> H^{n+1/2}`, then `E^n -> E^{n+1}`.
    pub fn step(&mut self) -> Result<()> {
        update_h(&self.coef, &self.state.e, &mut self.state.h);
        update_e(&self.coef, &self.state.h, &mut self.state.e);
        if let Some(src) = &self.source {
            let t_half = (self.state.step_index as f64 + 0.5) * self.dt;
            let a = src.spec.polarization;
            let w = src.spec.waveform(t_half);
            for &([i, j, k], weight) in &src.edges {
                let c = self.coef.base_e * self.coef.ba(Component::electric(a), i, j, k);
                let f = &mut self.state.e[a];
                let p = f.idx(i, j, k);
                f.data[p] -= c * self.grid.h * w * weight;
            }
        }
        if let Some((lo, hi)) = self.pec {
            zero_pec_box(&mut self.state.e, lo, hi);
        }
        self.state.step_index += 1;
        if self.state.step_index % self.finite_check_interval == 0 {
            self.state.check_finite()?;
        }
        Ok(())
    }

    pub fn run(&mut self, steps: u64) -> Result<()> {
        for _ in 0..steps {
            self.step()?;
        }
        self.state.check_finite()
    }

    /// Runs `steps` steps and records `region` every `cadence` steps,
    /// including the initial state.
    pub fn run_recorded(&mut self, steps: u64, region: &RegionIndex, cadence: u64) -> Result<FieldHistory> {
        let cadence = cadence.max(1);
        let mut hist = FieldHistory::new(region.cells(), self.grid.h, self.dt, cadence).with_budget(self.storage_budget);
        if region.is_empty() {
            self.run(steps)?;
            return Ok(hist);
        }
        hist.reserve_checked(1 + steps / cadence)?;
        hist.push(self.time(), self.snapshot(region));
        for n in 1..=steps {
            self.step()?;
            if n % cadence == 0 {
                hist.push(self.time(), self.snapshot(region));
            }
        }
        self.state.check_finite()?;
        Ok(hist)
    }

    /// Runs `steps` steps and calls `observe` on the initial state and after
    /// every `cadence` steps.
    pub fn run_observed<F: FnMut(&Simulation)>(&mut self, steps: u64, cadence: u64, mut observe: F) -> Result<()> {
        let cadence = cadence.max(1);
        observe(self);
        for n in 1..=steps {
            self.step()?;
            if n % cadence == 0 {
                observe(self);
            }
        }
        self.state.check_finite()
    }

    /// Fields and curls restricted to `region`.
    pub fn snapshot(&self, region: &RegionIndex) -> Snapshot {
        Snapshot::extract(&self.state, region, self.grid.h)
    }

    /// Discrete energy `1/2 h^3 sum [eps (BA)^{-1} E^n.E^n + mu (BA)^{-1} H^{n-1/2}.H^{n+1/2}]`.
    ///
    /// The mixed-time magnetic term makes this the quantity the leapfrog
    /// conserves exactly in the absence of sources.
    pub fn energy(&self) -> f64 {
        let mut h_next = self.state.h.clone();
        update_h(&self.coef, &self.state.e, &mut h_next);
        let h3 = self.grid.h.powi(3);
        let mut total = 0.0;
        for a in 0..3 {
            let ce = Component::electric(a);
            let f = &self.state.e[a];
            total += self.eps * weighted_sum(&self.coef, ce, f, f);
            let ch = Component::magnetic(a);
            total += self.mu * weighted_sum(&self.coef, ch, &self.state.h[a], &h_next[a]);
        }
        0.5 * h3 * total
    }

    /// Discrete `L2(Omega2)` norms of the curls of the current `E` and `H`,
    /// over the same samples as a full-interior [`Snapshot`].
    pub fn curl_norms(&self) -> (f64, f64) {
        let h = self.grid.h;
        let region = RegionIndex::full_interior(&self.grid);
        let cells = region.cells();
        let o = region.lo;
        let (e, hf) = (&self.state.e, &self.state.h);
        let (mut ce, mut ch) = (0.0, 0.0);
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            // curl E at H_a, forward differences.
            let (fc, fb) = (&e[c], &e[b]);
            let (sc, sb) = (fc.stride(b), fb.stride(c));
            let [n0, n1, n2] = Component::magnetic(a).dims(cells);
            for i in 0..n0 {
                for j in 0..n1 {
                    let pc = fc.idx(o[0] + i, o[1] + j, o[2]);
                    let pb = fb.idx(o[0] + i, o[1] + j, o[2]);
                    for k in 0..n2 {
                        let v = ((fc.data[pc + k + sc] - fc.data[pc + k]) - (fb.data[pb + k + sb] - fb.data[pb + k])) / h;
                        ce += v * v;
                    }
                }
            }
        }
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            // curl H at E_a, backward differences.
            let (fc, fb) = (&hf[c], &hf[b]);
            let (sc, sb) = (fc.stride(b), fb.stride(c));
            let [n0, n1, n2] = Component::electric(a).dims(cells);
            for i in 0..n0 {
                for j in 0..n1 {
                    let pc = fc.idx(o[0] + i, o[1] + j, o[2]);
                    let pb = fb.idx(o[0] + i, o[1] + j, o[2]);
                    for k in 0..n2 {
                        let v = ((fc.data[pc + k] - fc.data[pc + k - sc]) - (fb.data[pb + k] - fb.data[pb + k - sb])) / h;
                        ch += v * v;
                    }
                }
            }
        }
        let h3 = h.powi(3);
        ((ce * h3).sqrt(), (ch * h3).sqrt())
    }

    pub fn eps_mu(&self) -> (f64, f64) {
        (self.eps, self.mu)
    }

    /// Values of all six components at the nearest staggered samples to `x`.
    pub fn probe(&self, x: [f64; 3]) -> [f64; 6] {
        let g = &self.grid;
        Component::ALL.map(|c| {
            let f = self.state.field(c);
            let st = c.staggered();
            let mut idx = [0; 3];
            for j in 0..3 {
                let off = if st[j] { 0.5 } else { 0.0 };
                let q = ((x[j] - g.origin[j]) / g.h - off).round().max(0.0) as usize;
                idx[j] = q.min(f.dims[j] - 1);
            }
            f.at(idx[0], idx[1], idx[2])
        })
    }
}

fn weighted_sum(coef: &Coefficients, c: Component, a: &Field3, b: &Field3) -> f64 {
    let g = &coef.factors[c as usize].inv;
    let [n0, n1, n2] = a.dims;
    let mut s = 0.0;
    for i in 0..n0 {
        for j in 0..n1 {
            let gij = g[0][i] * g[1][j];
            let p = a.idx(i, j, 0);
            let (ra, rb, gz) = (&a.data[p..p + n2], &b.data[p..p + n2], &g[2][..n2]);
            let row: f64 = (0..n2).map(|k| ra[k] * rb[k] * gz[k]).sum();
            s += gij * row;
        }
    }
    s
}

/// `H_a -= c (D_b E_c - D_c E_b)` over every magnetic sample.
fn update_h(coef: &Coefficients, e: &[Field3; 3], h: &mut [Field3; 3]) {
    for (a, ha) in h.iter_mut().enumerate() {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let ec = &e[c];
        let eb = &e[b];
        let oc = ec.stride(b);
        let ob = eb.stride(c);
        let f = &coef.factors[3 + a].f;
        let [n0, n1, n2] = ha.dims;
        for i in 0..n0 {
            for j in 0..n1 {
                let fij = coef.base_h * f[0][i] * f[1][j];
                let ph = ha.idx(i, j, 0);
                let pc = ec.idx(i, j, 0);
                let pb = eb.idx(i, j, 0);
                let out = &mut ha.data[ph..ph + n2];
                let c0 = &ec.data[pc..pc + n2];
                let c1 = &ec.data[pc + oc..pc + oc + n2];
                let b0 = &eb.data[pb..pb + n2];
                let b1 = &eb.data[pb + ob..pb + ob + n2];
                let fz = &f[2][..n2];
                for k in 0..n2 {
                    out[k] -= fij * fz[k] * ((c1[k] - c0[k]) - (b1[k] - b0[k]));
                }
            }
        }
    }
}

/// `E_a += c (D_b^- H_c - D_c^- H_b)` over interior samples; tangential
/// samples on the outer wall are never written and stay zero.
fn update_e(coef: &Coefficients, h: &[Field3; 3], e: &mut [Field3; 3]) {
    for (a, ea) in e.iter_mut().enumerate() {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        let hc = &h[c];
        let hb = &h[b];
        let oc = hc.stride(b);
        let ob = hb.stride(c);
        let f = &coef.factors[a].f;
        let [n0, n1, n2] = ea.dims;
        let range = |axis: usize, n: usize| if axis == a { 0..n } else { 1..n - 1 };
        let (ri, rj, rk) = (range(0, n0), range(1, n1), range(2, n2));
        let (k0, k1) = (rk.start, rk.end);
        for i in ri {
            for j in rj.clone() {
                let fij = coef.base_e * f[0][i] * f[1][j];
                let pe = ea.idx(i, j, 0);
                let pc = hc.idx(i, j, 0);
                let pb = hb.idx(i, j, 0);
                let out = &mut ea.data[pe + k0..pe + k1];
                let c1 = &hc.data[pc + k0..pc + k1];
                let c0 = &hc.data[pc + k0 - oc..pc + k1 - oc];
                let b1 = &hb.data[pb + k0..pb + k1];
                let b0 = &hb.data[pb + k0 - ob..pb + k1 - ob];
                let fz = &f[2][k0..k1];
                for k in 0..out.len() {
                    out[k] += fij * fz[k] * ((c1[k] - c0[k]) - (b1[k] - b0[k]));
                }
            }
        }
    }
}

fn zero_pec_box(e: &mut [Field3; 3], lo: [usize; 3], hi: [usize; 3]) {
    for (a, ea) in e.iter_mut().enumerate() {
        let r = |j: usize| if j == a { lo[j]..hi[j] } else { lo[j]..hi[j] + 1 };
        for i in r(0) {
            for j in r(1) {
                for k in r(2) {
                    let p = ea.idx(i, j, k);
                    ea.data[p] = 0.0;
                }
            }
        }
    }
}

/// `(t, Ex, Ey, Ez, Hx, Hy, Hz)` rows at a fixed point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProbeSeries {
    pub rows: Vec<(f64, [f64; 6])>,
}

impl ProbeSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,Ex,Ey,Ez,Hx,Hy,Hz\n");
        for (t, v) in &self.rows {
            out.push_str(&format!("{t:.17e}"));
            for x in v {
                out.push_str(&format!(",{x:.17e}"));
            }
            out.push('\n');
        }
        out
    }
}
