//! Reference runs, truncation-error norms, parameter sweeps and decay fits.
//!
//! The reference solution is the plain vacuum solver on a box so large that
//! nothing reflected by its outer wall can reach `B1` before `T`. It shares
//! grid spacing, timestep and recording cadence with the layer runs, so the
//! measured difference isolates the truncation error of the layer.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::history::{FieldHistory, RegionIndex, Snapshot, DEFAULT_STORAGE_BUDGET};
use crate::profiles::PmlParams;
use crate::yee::{timestep_for, Field3, Medium, ScattererSpec, Simulation, SourceSpec, DEFAULT_CFL};

/// Points within this factor of the floor are excluded from fits.
pub const FLOOR_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// `eps`, `mu`, `L`, `m`, `s1` and `T`; `sigma0` and `d` come from the lists.
    pub base: PmlParams,
    pub sigma0: Vec<f64>,
    pub d: Vec<f64>,
    pub h: f64,
    /// Distance from `Gamma1` to the outer wall of the reference box.
    pub reference_margin: f64,
    pub source: SourceSpec,
    pub scatterer: Option<ScattererSpec>,
    pub cfl: f64,
    /// Simulated time between recorded snapshots.
    pub record_interval: f64,
    pub storage_budget: u64,
}

impl SweepConfig {
    pub fn new(base: PmlParams, sigma0: Vec<f64>, d: Vec<f64>, h: f64, source: SourceSpec) -> Self {
        let c = 1.0 / base.sqrt_eps_mu();
        Self {
            base,
            sigma0,
            d,
            h,
            reference_margin: 0.5 * c * base.t_final + 1.0,
            source,
            scatterer: None,
            cfl: DEFAULT_CFL,
            record_interval: 0.1,
            storage_budget: DEFAULT_STORAGE_BUDGET,
        }
    }

    pub fn wave_speed(&self) -> f64 {
        1.0 / self.base.sqrt_eps_mu()
    }

    /// Parameters of the `(sigma0, d)` layer run.
    pub fn params_for(&self, sigma0: f64, d: f64) -> PmlParams {
        PmlParams { sigma0, d, ..self.base }
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.d.iter().flat_map(|&d| self.sigma0.iter().map(move |&s| (s, d))).collect();
        pts.sort_by(|a, b| (a.0 * a.1).total_cmp(&(b.0 * b.1)).then(a.0.total_cmp(&b.0)).then(a.1.total_cmp(&b.1)));
        pts
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.sigma0.is_empty() || self.d.is_empty() {
            return Err(Error::Config("sweep needs at least one sigma0 and one d".into()));
        }
        for &s in &self.sigma0 {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Config(format!("sweep sigma0 values must be >= 0, got {s}")));
            }
        }
        for &d in &self.d {
            let p = self.params_for(self.sigma0[0], d);
            p.validate()?;
            GridSpec::for_params(&p, self.h)?;
            self.source.validate(&p, self.h)?;
        }
        self.check_enlargement()?;
        if !(self.record_interval > 0.0) {
            return Err(Error::Config("record_interval must be positive".into()));
        }
        Ok(())
    }

    /// Outgoing waves reflected by the reference wall travel at least twice
    /// the margin before re-entering `B1`, so the margin must exceed `c T / 2`.
    pub fn check_enlargement(&self) -> Result<()> {
        let need = 0.5 * self.wave_speed() * self.base.t_final;
        if !(self.reference_margin > need) {
            return Err(Error::Config(format!(
                "reference margin {} must exceed c T / 2 = {need} so the reference wall stays causally \
                 invisible in B1 over (0, T)",
                self.reference_margin
            )));
        }
        Ok(())
    }

    /// Largest stretching factor over the sweep.
    pub fn alpha_max(&self) -> f64 {
        self.sigma0
            .iter()
            .map(|&s| self.params_for(s, self.d[0]).alpha_max())
            .fold(1.0, f64::max)
    }

    /// Shared time discretization: the CFL step of the stiffest run, shrunk
    /// so that snapshots land exactly on multiples of `record_interval` and
    /// the last one on `T`.
    pub fn time_grid(&self) -> Result<TimeGrid> {
        let dt_cfl = timestep_for(self.h, self.alpha_max(), self.base.sqrt_eps_mu(), self.cfl)?;
        TimeGrid::new(self.base.t_final, dt_cfl, self.record_interval)
    }
}

/// Timestep, step count and recording cadence shared by a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub dt: f64,
    pub steps: u64,
    pub cadence: u64,
}

impl TimeGrid {
    pub fn new(t_final: f64, dt_max: f64, record_interval: f64) -> Result<Self> {
        if !(dt_max > 0.0 && t_final > 0.0) {
            return Err(Error::Config("time grid needs positive T and dt".into()));
        }
        let records = (t_final / record_interval).round().max(1.0) as u64;
        let cadence = (t_final / (records as f64 * dt_max)).ceil().max(1.0) as u64;
        let steps = records * cadence;
        Ok(Self { dt: t_final / steps as f64, steps, cadence })
    }
}

/// Vacuum run on the enlarged box, recorded on `B1`.
pub fn reference_run(cfg: &SweepConfig, time: &TimeGrid) -> Result<FieldHistory> {
    cfg.check_enlargement()?;
    reference_run_with_margin(cfg, time, cfg.reference_margin)
}

pub fn reference_run_with_margin(cfg: &SweepConfig, time: &TimeGrid, margin: f64) -> Result<FieldHistory> {
    let grid = GridSpec::centred(cfg.base.l, margin, cfg.h)?;
    let medium = Medium::vacuum(cfg.base.eps, cfg.base.mu);
    let b1 = cfg.params_for(cfg.base.sigma0, cfg.d[0]);
    let mut sim = Simulation::new(grid, medium, time.dt, &b1, Some(cfg.source), cfg.scatterer)?;
    sim.set_storage_budget(cfg.storage_budget);
    let region = RegionIndex::inner_box(&grid, cfg.base.l)?;
    sim.run_recorded(time.steps, &region, time.cadence)
}

/// Layer run on `B2` for one `(sigma0, d)`, recorded on `B1`.
pub fn pml_run(cfg: &SweepConfig, time: &TimeGrid, sigma0: f64, d: f64) -> Result<FieldHistory> {
    let params = cfg.params_for(sigma0, d);
    let grid = GridSpec::for_params(&params, cfg.h)?;
    let mut sim = Simulation::new(grid, Medium::pml(&params), time.dt, &params, Some(cfg.source), cfg.scatterer)?;
    sim.set_storage_budget(cfg.storage_budget);
    let region = RegionIndex::inner_box(&grid, cfg.base.l)?;
    sim.run_recorded(time.steps, &region, time.cadence)
}

/// `L2(0,T; H(curl))` and `L-infinity(0,T; H(curl))` norms of `E - E^p` and `H - H^p`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l2_hcurl_e: f64,
    pub l2_hcurl_h: f64,
    pub linf_hcurl_e: f64,
    pub linf_hcurl_h: f64,
}

impl ErrorNorms {
    pub fn l2_sum(&self) -> f64 {
        self.l2_hcurl_e + self.l2_hcurl_h
    }

    pub fn linf_sum(&self) -> f64 {
        self.linf_hcurl_e + self.linf_hcurl_h
    }
}

/// Spatial quadrature weight: trapezoidal along node directions, midpoint
/// along staggered ones, so that constants integrate exactly over the box.
fn weighted_sq_diff(a: &Field3, b: &Field3, staggered: [bool; 3]) -> f64 {
    let [n0, n1, n2] = a.dims;
    let w = |axis: usize, i: usize, n: usize| -> f64 {
        if !staggered[axis] && (i == 0 || i + 1 == n) {
            0.5
        } else {
            1.0
        }
    };
    let mut s = 0.0;
    for i in 0..n0 {
        let wi = w(0, i, n0);
        for j in 0..n1 {
            let wij = wi * w(1, j, n1);
            let p = a.idx(i, j, 0);
            for k in 0..n2 {
                let d = a.data[p + k] - b.data[p + k];
                s += wij * w(2, k, n2) * d * d;
            }
        }
    }
    s
}

/// `||U||^2 + ||curl U||^2` for the electric and magnetic parts of one snapshot pair.
fn hcurl_sq(a: &Snapshot, b: &Snapshot, h: f64) -> (f64, f64) {
    use crate::grid::Component;
    let h3 = h.powi(3);
    let mut e = 0.0;
    let mut m = 0.0;
    for ax in 0..3 {
        let se = Component::electric(ax).staggered();
        let sm = Component::magnetic(ax).staggered();
        e += weighted_sq_diff(&a.e[ax], &b.e[ax], se) + weighted_sq_diff(&a.curl_e[ax], &b.curl_e[ax], sm);
        m += weighted_sq_diff(&a.h[ax], &b.h[ax], sm) + weighted_sq_diff(&a.curl_h[ax], &b.curl_h[ax], se);
    }
    (e * h3, m * h3)
}

/// Error norms between a reference and a layer history, trapezoidal in time.
pub fn error_norms(reference: &FieldHistory, pml: &FieldHistory) -> Result<ErrorNorms> {
    reference.check_compatible(pml)?;
    let n = reference.len();
    let mut out = ErrorNorms::default();
    if n == 0 {
        return Ok(out);
    }
    let per: Vec<(f64, f64)> = reference
        .snapshots
        .iter()
        .zip(&pml.snapshots)
        .map(|(a, b)| hcurl_sq(a, b, reference.h))
        .collect();
    let (mut ie, mut ih) = (0.0, 0.0);
    for w in 1..n {
        let dt = reference.times[w] - reference.times[w - 1];
        ie += 0.5 * dt * (per[w].0 + per[w - 1].0);
        ih += 0.5 * dt * (per[w].1 + per[w - 1].1);
    }
    out.l2_hcurl_e = ie.sqrt();
    out.l2_hcurl_h = ih.sqrt();
    out.linf_hcurl_e = per.iter().map(|p| p.0).fold(0.0, f64::max).sqrt();
    out.linf_hcurl_h = per.iter().map(|p| p.1).fold(0.0, f64::max).sqrt();
    Ok(out)
}

/// Truncation error of one `(sigma0, d)` run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub sigma0: f64,
    pub d: f64,
    pub l2_hcurl_e: f64,
    pub l2_hcurl_h: f64,
    pub linf_hcurl_e: f64,
    pub linf_hcurl_h: f64,
    /// `sigma0 d sqrt(eps mu) / 2`.
    pub theory_exponent: f64,
    pub floor_estimate: f64,
    pub floor_estimate_linf: f64,
}

impl ErrorReport {
    pub fn sigma0_d(&self) -> f64 {
        self.sigma0 * self.d
    }

    pub fn l2_sum(&self) -> f64 {
        self.l2_hcurl_e + self.l2_hcurl_h
    }

    pub fn linf_sum(&self) -> f64 {
        self.linf_hcurl_e + self.linf_hcurl_h
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "sigma0,d,sigma0_d,theory_exponent,l2_hcurl_E,l2_hcurl_H,linf_hcurl_E,linf_hcurl_H,floor_estimate";

pub fn sweep_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            r.sigma0,
            r.d,
            r.sigma0_d(),
            r.theory_exponent,
            r.l2_hcurl_e,
            r.l2_hcurl_h,
            r.linf_hcurl_e,
            r.linf_hcurl_h,
            r.floor_estimate
        ));
    }
    out
}

/// Runs every `(sigma0, d)` against one shared reference.
pub fn sweep(cfg: &SweepConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let time = cfg.time_grid()?;
    log::info!("sweep: dt = {:.6e}, {} steps, cadence {}", time.dt, time.steps, time.cadence);
    let reference = reference_run(cfg, &time)?;
    let points = cfg.points();
    let norms: Vec<Result<ErrorNorms>> = points
        .par_iter()
        .map(|&(s, d)| {
            let hist = pml_run(cfg, &time, s, d)?;
            error_norms(&reference, &hist)
        })
        .collect();
    let mut runs = Vec::with_capacity(points.len());
    for ((s, d), n) in points.into_iter().zip(norms) {
        runs.push((s, d, n?));
    }
    let mut floors = Vec::new();
    for &d in &cfg.d {
        floors.push((d, floor_estimate(cfg, &time, d)?));
    }
    let reports = attach_floor(cfg, &runs, &floors);
    Ok(SweepOutcome { time, reports })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub time: TimeGrid,
    pub reports: Vec<ErrorReport>,
}

fn attach_floor(cfg: &SweepConfig, runs: &[(f64, f64, ErrorNorms)], floors: &[(f64, ErrorNorms)]) -> Vec<ErrorReport> {
    runs.iter()
        .map(|&(sigma0, d, n)| {
            let floor = floors.iter().find(|f| f.0 == d).map(|f| f.1).unwrap_or_default();
            ErrorReport {
                sigma0,
                d,
                l2_hcurl_e: n.l2_hcurl_e,
                l2_hcurl_h: n.l2_hcurl_h,
                linf_hcurl_e: n.linf_hcurl_e,
                linf_hcurl_h: n.linf_hcurl_h,
                theory_exponent: 0.5 * sigma0 * d * cfg.base.sqrt_eps_mu(),
                floor_estimate: floor.l2_sum(),
                floor_estimate_linf: floor.linf_sum(),
            }
        })
        .collect()
}

/// Discretization-error scale for layer width `d`.
///
/// The quantity refined from `h` to `h/2` is the layer response, the
/// strongest-layer run minus the unstretched (`sigma0 = 0`) run. The
/// near field of the one-cell source is grid dependent but identical in
/// both runs, so it cancels here just as it cancels in the truncation
/// error against the reference. A raw `h` vs `h/2` difference would be
/// dominated by it.
pub fn floor_estimate(cfg: &SweepConfig, time: &TimeGrid, d: f64) -> Result<ErrorNorms> {
    let sigma0 = cfg.sigma0.iter().copied().fold(0.0, f64::max);
    let mut coarse = pml_run(cfg, time, sigma0, d)?;
    coarse.subtract(&pml_run(cfg, time, 0.0, d)?)?;
    let mut fine = fine_restricted_run(cfg, sigma0, d)?;
    fine.subtract(&fine_restricted_run(cfg, 0.0, d)?)?;
    error_norms(&coarse, &fine)
}

/// Layer run at `h/2` recorded at the same times as the `h` runs and
/// restricted onto the `h` lattice of `B1`.
pub fn fine_restricted_run(cfg: &SweepConfig, sigma0: f64, d: f64) -> Result<FieldHistory> {
    let params = cfg.params_for(sigma0, d);
    let hf = 0.5 * cfg.h;
    let grid = GridSpec::for_params(&params, hf)?;
    let dt_cfl = timestep_for(hf, cfg.alpha_max(), cfg.base.sqrt_eps_mu(), cfg.cfl)?;
    let time = TimeGrid::new(cfg.base.t_final, dt_cfl, cfg.record_interval)?;
    let mut sim = Simulation::new(grid, Medium::pml(&params), time.dt, &params, Some(cfg.source), cfg.scatterer)?;
    sim.refine_source(2)?;
    let region = RegionIndex::inner_box(&grid, cfg.base.l)?;
    let coarse_cells = region.cells().map(|c| c / 2);
    let mut hist = FieldHistory::new(coarse_cells, cfg.h, time.dt * 2.0, time.cadence).with_budget(cfg.storage_budget);
    hist.reserve_checked(1 + time.steps / time.cadence)?;
    sim.run_observed(time.steps, time.cadence, |s| {
        hist.push(s.time(), restrict(&s.snapshot(&region)));
    })?;
    Ok(hist)
}

/// Restriction from a `h/2` snapshot onto the `h` lattice: injection along
/// node axes, two-point average along staggered axes.
pub fn restrict(fine: &Snapshot) -> Snapshot {
    use crate::grid::Component;
    let cells = [0, 1, 2].map(|j| fine.e[j].dims[j] / 2);
    let mut out = Snapshot::zeros(cells);
    for a in 0..3 {
        let se = Component::electric(a).staggered();
        let sm = Component::magnetic(a).staggered();
        restrict_field(&fine.e[a], &mut out.e[a], se);
        restrict_field(&fine.curl_h[a], &mut out.curl_h[a], se);
        restrict_field(&fine.h[a], &mut out.h[a], sm);
        restrict_field(&fine.curl_e[a], &mut out.curl_e[a], sm);
    }
    out
}

fn restrict_field(fine: &Field3, coarse: &mut Field3, staggered: [bool; 3]) {
    let [n0, n1, n2] = coarse.dims;
    let taps = |ax: usize| if staggered[ax] { 2 } else { 1 };
    let weight = 1.0 / (taps(0) * taps(1) * taps(2)) as f64;
    for i in 0..n0 {
        for j in 0..n1 {
            for k in 0..n2 {
                let mut s = 0.0;
                for di in 0..taps(0) {
                    for dj in 0..taps(1) {
                        for dk in 0..taps(2) {
                            s += fine.at(2 * i + di, 2 * j + dj, 2 * k + dk);
                        }
                    }
                }
                let q = coarse.idx(i, j, k);
                coarse.data[q] = s * weight;
            }
        }
    }
}

/// Outcome of a stability probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub sigma0: f64,
    pub t_final: f64,
    pub steps: u64,
    /// `max_t ||dE/dt|| + ||curl E|| + ||dH/dt|| + ||curl H||` over `Omega2`.
    pub max_norm_sum: f64,
    pub t_at_max: f64,
    /// `||J||_{H1(0,T; L2)}` of the discrete source.
    pub source_h1_norm: f64,
    /// `(1 + sigma0 T)^3`.
    pub bound_factor: f64,
    pub ratio: f64,
}

pub const STABILITY_CSV_HEADER: &str = "sigma0,T,steps,max_norm_sum,t_at_max,source_h1_norm,bound_factor,ratio";

impl StabilityReport {
    pub fn to_csv(&self) -> String {
        format!(
            "{STABILITY_CSV_HEADER}\n{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}\n",
            self.sigma0,
            self.t_final,
            self.steps,
            self.max_norm_sum,
            self.t_at_max,
            self.source_h1_norm,
            self.bound_factor,
            self.ratio
        )
    }
}

/// Number of trapezoid panels per unit time for the source norm.
const SOURCE_QUADRATURE_DENSITY: f64 = 4096.0;

/// `||J||_{H1(0,T)}` for a point source spread over one cell of volume `h^3`.
pub fn source_h1_norm(source: &SourceSpec, t_final: f64, h: f64) -> f64 {
    let n = ((t_final * SOURCE_QUADRATURE_DENSITY).ceil() as usize).max(16);
    let dt = t_final / n as f64;
    let f = |t: f64| source.waveform(t).powi(2) + source.waveform_derivative(t).powi(2);
    let mut s = 0.5 * (f(0.0) + f(t_final));
    for i in 1..n {
        s += f(i as f64 * dt);
    }
    (s * dt * h.powi(3)).sqrt()
}

/// Runs the layer problem over `(0, T]` and compares the largest field
/// norm with the stability bound `(1 + sigma0 T)^3 ||J||_{H1}`.
pub fn stability_probe(
    params: &PmlParams,
    h: f64,
    source: Option<SourceSpec>,
    scatterer: Option<ScattererSpec>,
    cfl: f64,
) -> Result<StabilityReport> {
    let grid = GridSpec::for_params(params, h)?;
    let mut sim = Simulation::build(grid, params, source, scatterer, cfl)?;
    probe_simulation(&mut sim, params, 0, |_| {})
}

/// Stability probe on an already constructed simulation; `observe` sees the
/// initial state and every `every`-th step (never when `every` is 0).
///
/// Time derivatives are differences of successive leapfrog levels, which
/// are centred at the half steps.
pub fn probe_simulation<F: FnMut(&Simulation)>(
    sim: &mut Simulation,
    params: &PmlParams,
    every: u64,
    mut observe: F,
) -> Result<StabilityReport> {
    let dt = sim.dt();
    let h = sim.grid().h;
    let steps = (params.t_final / dt - 1e-9).ceil() as u64;
    let h3 = h.powi(3);
    let l2_diff = |a: &[Field3; 3], b: &[Field3; 3]| -> f64 {
        let s: f64 = a
            .iter()
            .zip(b)
            .flat_map(|(x, y)| x.data.iter().zip(&y.data))
            .map(|(u, v)| (u - v) * (u - v))
            .sum();
        (s * h3).sqrt() / dt
    };
    if every > 0 {
        observe(sim);
    }
    let mut best = (0.0, 0.0);
    let mut e_prev = sim.state().e.clone();
    let mut h_prev = sim.state().h.clone();
    for n in 1..=steps {
        for (dst, src) in e_prev.iter_mut().zip(&sim.state().e).chain(h_prev.iter_mut().zip(&sim.state().h)) {
            dst.data.copy_from_slice(&src.data);
        }
        sim.step()?;
        let st = sim.state();
        let (ce, ch) = sim.curl_norms();
        let total = l2_diff(&st.e, &e_prev) + l2_diff(&st.h, &h_prev) + ce + ch;
        if !total.is_finite() {
            st.check_finite()?;
        }
        if total > best.0 {
            best = (total, sim.time());
        }
        if every > 0 && n % every == 0 {
            observe(sim);
        }
    }
    sim.state().check_finite()?;
    let j = sim.source().map(|s| source_h1_norm(s, params.t_final, h)).unwrap_or(0.0);
    let bound_factor = (1.0 + params.sigma0 * params.t_final).powi(3);
    let ratio = if best.0 == 0.0 { 0.0 } else { best.0 / (bound_factor * j) };
    Ok(StabilityReport {
        sigma0: params.sigma0,
        t_final: params.t_final,
        steps,
        max_norm_sum: best.0,
        t_at_max: best.1,
        source_h1_norm: j,
        bound_factor,
        ratio,
    })
}

/// Parses a sweep CSV written by [`sweep_csv`]. The file carries only the
/// L2 floor, which is reused for the L-infinity floor.
pub fn parse_sweep_csv(text: &str) -> Result<Vec<ErrorReport>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    match lines.next() {
        Some(h) if h.trim() == SWEEP_CSV_HEADER => {}
        other => return Err(Error::Shape(format!("unexpected sweep CSV header {other:?}"))),
    }
    let mut out = Vec::new();
    for (n, line) in lines.enumerate() {
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Shape(format!("sweep CSV row {}: {e}", n + 1)))?;
        if v.len() != 9 {
            return Err(Error::Shape(format!("sweep CSV row {} has {} columns, want 9", n + 1, v.len())));
        }
        out.push(ErrorReport {
            sigma0: v[0],
            d: v[1],
            theory_exponent: v[3],
            l2_hcurl_e: v[4],
            l2_hcurl_h: v[5],
            linf_hcurl_e: v[6],
            linf_hcurl_h: v[7],
            floor_estimate: v[8],
            floor_estimate_linf: v[8],
        });
    }
    Ok(out)
}

/// Least-squares fit of `-log(error)` against the theory exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points_used: usize,
}

pub const FIT_CSV_HEADER: &str = "rate,intercept,r_squared,n_points_used";

impl DecayFit {
    pub fn to_csv(&self) -> String {
        format!(
            "{FIT_CSV_HEADER}\n{:.17e},{:.17e},{:.17e},{}\n",
            self.rate, self.intercept, self.r_squared, self.n_points_used
        )
    }
}

/// Which error norm a fit uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    Linf,
}

impl NormKind {
    pub fn value(self, r: &ErrorReport) -> f64 {
        match self {
            NormKind::L2 => r.l2_sum(),
            NormKind::Linf => r.linf_sum(),
        }
    }

    pub fn floor(self, r: &ErrorReport) -> f64 {
        match self {
            NormKind::L2 => r.floor_estimate,
            NormKind::Linf => r.floor_estimate_linf,
        }
    }
}

/// Reports whose error is above `FLOOR_FACTOR x floor`, in sweep order.
pub fn pre_floor(reports: &[ErrorReport], kind: NormKind) -> Vec<ErrorReport> {
    reports
        .iter()
        .filter(|r| kind.value(r) > FLOOR_FACTOR * kind.floor(r))
        .copied()
        .collect()
}

/// True when each error above `FLOOR_FACTOR x floor` is strictly larger
/// than the next one in sweep order; checking stops at the first point
/// that has reached the floor.
pub fn decreasing_until_floor(reports: &[ErrorReport], kind: NormKind) -> bool {
    for pair in reports.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if kind.value(a) <= FLOOR_FACTOR * kind.floor(a) {
            break;
        }
        if !(kind.value(b) < kind.value(a)) {
            return false;
        }
    }
    true
}

pub fn fit_decay(reports: &[ErrorReport]) -> Result<DecayFit> {
    fit_decay_with(reports, NormKind::L2)
}

/// Fits `log(error) = intercept - rate * x` with `x = sigma0 d sqrt(eps mu) / 2`
/// on the pre-floor points.
pub fn fit_decay_with(reports: &[ErrorReport], kind: NormKind) -> Result<DecayFit> {
    let used = pre_floor(reports, kind);
    if used.len() < 3 {
        let floor = reports.first().map(|r| kind.floor(r)).unwrap_or(0.0);
        return Err(Error::InsufficientPoints { floor: FLOOR_FACTOR * floor, found: used.len() });
    }
    let xs: Vec<f64> = used.iter().map(|r| r.theory_exponent).collect();
    let ys: Vec<f64> = used.iter().map(|r| kind.value(r).ln()).collect();
    let (slope, intercept, r2) = linear_fit(&xs, &ys);
    Ok(DecayFit { rate: -slope, intercept, r_squared: r2, n_points_used: used.len() })
}

/// Ordinary least squares `y = intercept + slope x`, returning `(slope, intercept, r^2)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let r2 = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_history(cells: [usize; 3], h: f64, times: &[f64], value: f64) -> FieldHistory {
        let mut hist = FieldHistory::new(cells, h, times[1] - times[0], 1);
        for &t in times {
            let mut s = Snapshot::zeros(cells);
            for f in s.e.iter_mut().chain(s.h.iter_mut()).chain(s.curl_e.iter_mut()).chain(s.curl_h.iter_mut()) {
                f.data.iter_mut().for_each(|v| *v = value);
            }
            hist.push(t, s);
        }
        hist
    }

    fn wavy_history(cells: [usize; 3], h: f64, times: &[f64], seed: f64) -> FieldHistory {
        let mut hist = constant_history(cells, h, times, 0.0);
        for (n, s) in hist.snapshots.iter_mut().enumerate() {
            for (m, f) in s.e.iter_mut().chain(s.h.iter_mut()).chain(s.curl_e.iter_mut()).chain(s.curl_h.iter_mut()).enumerate() {
                for (i, v) in f.data.iter_mut().enumerate() {
                    *v = (seed * (i + 7 * m + 13 * n) as f64).sin();
                }
            }
        }
        hist
    }

    #[test]
    fn identical_histories_have_zero_error() {
        let times = [0.0, 0.5, 1.0];
        let a = wavy_history([3, 4, 2], 0.25, &times, 0.7);
        let n = error_norms(&a, &a.clone()).unwrap();
        assert_eq!(n, ErrorNorms::default());
    }

    #[test]
    fn constant_offset_integrates_exactly() {
        // Box of 4 x 2 x 2 cells at h = 0.5: volume 2, duration 3.
        let times = [0.0, 1.0, 2.0, 3.0];
        let h = 0.5;
        let zero = constant_history([4, 2, 2], h, &times, 0.0);
        let delta = 0.125;
        let off = constant_history([4, 2, 2], h, &times, delta);
        let n = error_norms(&zero, &off).unwrap();
        // ||U||^2 + ||curl U||^2 = 2 * 3 components * delta^2 * |Omega|
        let spatial = (6.0 * delta * delta * 2.0f64).sqrt();
        assert!((n.l2_hcurl_e - spatial * 3.0f64.sqrt()).abs() < 1e-14);
        assert!((n.l2_hcurl_h - spatial * 3.0f64.sqrt()).abs() < 1e-14);
        assert!((n.linf_hcurl_e - spatial).abs() < 1e-14);
        assert!((n.linf_hcurl_h - spatial).abs() < 1e-14);
    }

    #[test]
    fn norms_are_homogeneous_and_subadditive() {
        let times = [0.0, 0.25, 0.5, 0.75];
        let cells = [3, 3, 2];
        let zero = constant_history(cells, 0.5, &times, 0.0);
        let a = wavy_history(cells, 0.5, &times, 0.31);
        let b = wavy_history(cells, 0.5, &times, 1.7);
        let mut a2 = a.clone();
        let mut ab = a.clone();
        for ((s2, sab), sb) in a2.snapshots.iter_mut().zip(ab.snapshots.iter_mut()).zip(&b.snapshots) {
            let f2 = s2.e.iter_mut().chain(s2.h.iter_mut()).chain(s2.curl_e.iter_mut()).chain(s2.curl_h.iter_mut());
            f2.for_each(|f| f.data.iter_mut().for_each(|v| *v *= 2.0));
            let fab = sab.e.iter_mut().chain(sab.h.iter_mut()).chain(sab.curl_e.iter_mut()).chain(sab.curl_h.iter_mut());
            let fb = sb.e.iter().chain(&sb.h).chain(&sb.curl_e).chain(&sb.curl_h);
            for (x, y) in fab.zip(fb) {
                x.data.iter_mut().zip(&y.data).for_each(|(u, v)| *u += v);
            }
        }
        let na = error_norms(&zero, &a).unwrap();
        let n2 = error_norms(&zero, &a2).unwrap();
        let nb = error_norms(&zero, &b).unwrap();
        let nab = error_norms(&zero, &ab).unwrap();
        assert!((n2.l2_hcurl_e - 2.0 * na.l2_hcurl_e).abs() < 1e-12 * na.l2_hcurl_e);
        assert!((n2.linf_hcurl_h - 2.0 * na.linf_hcurl_h).abs() < 1e-12 * na.linf_hcurl_h);
        assert!(nab.l2_hcurl_e <= na.l2_hcurl_e + nb.l2_hcurl_e + 1e-12);
        assert!(nab.linf_hcurl_h <= na.linf_hcurl_h + nb.linf_hcurl_h + 1e-12);
    }

    #[test]
    fn mismatched_histories_rejected() {
        let a = constant_history([2, 2, 2], 0.5, &[0.0, 1.0], 0.0);
        let b = constant_history([2, 2, 3], 0.5, &[0.0, 1.0], 0.0);
        assert!(matches!(error_norms(&a, &b), Err(Error::Shape(_))));
    }

    fn synthetic(errors: impl Fn(f64) -> f64) -> Vec<ErrorReport> {
        (0..6)
            .map(|x| {
                let x = x as f64;
                ErrorReport {
                    sigma0: 4.0 * x,
                    d: 0.5,
                    l2_hcurl_e: 0.5 * errors(x),
                    l2_hcurl_h: 0.5 * errors(x),
                    linf_hcurl_e: errors(x),
                    linf_hcurl_h: 0.0,
                    theory_exponent: x,
                    floor_estimate: 0.0,
                    floor_estimate_linf: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn planted_rates_recovered() {
        let fit = fit_decay(&synthetic(|x| (-x).exp())).unwrap();
        assert!((fit.rate - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_points_used, 6);
        for c in [1e-3, 1.0, 42.0] {
            let fit = fit_decay_with(&synthetic(|x| c * (-2.0 * x).exp()), NormKind::Linf).unwrap();
            assert!((fit.rate - 2.0).abs() < 1e-12);
            assert!((fit.intercept - c.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn floor_excludes_points() {
        let mut r = synthetic(|x| (-x).exp());
        r.iter_mut().for_each(|p| p.floor_estimate = 0.02);
        // e^-x > 0.06 keeps x = 0, 1, 2
        assert_eq!(pre_floor(&r, NormKind::L2).len(), 3);
        r.iter_mut().for_each(|p| p.floor_estimate = 0.1);
        match fit_decay(&r) {
            Err(Error::InsufficientPoints { floor, found }) => {
                assert_eq!(found, 2);
                assert!((floor - 0.3).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn monotone_check_stops_at_floor() {
        let mut r = synthetic(|x| (-x).exp());
        assert!(decreasing_until_floor(&r, NormKind::L2));
        r[1] = r[0];
        assert!(!decreasing_until_floor(&r, NormKind::L2));
        // A rise after the floor has been reached is allowed.
        let mut r = synthetic(|x| (-x).exp());
        r.iter_mut().for_each(|p| p.floor_estimate = 0.05);
        r[5].l2_hcurl_e = 10.0;
        assert!(decreasing_until_floor(&r, NormKind::L2));
    }

    #[test]
    fn sweep_csv_round_trips() {
        let r = synthetic(|x| (-x).exp());
        let back = parse_sweep_csv(&sweep_csv(&r)).unwrap();
        assert_eq!(back.len(), r.len());
        for (a, b) in r.iter().zip(&back) {
            assert_eq!(a.l2_hcurl_e.to_bits(), b.l2_hcurl_e.to_bits());
            assert_eq!(a.theory_exponent, b.theory_exponent);
        }
        assert!(parse_sweep_csv("a,b\n").is_err());
    }

    #[test]
    fn time_grid_lands_on_record_times() {
        let g = TimeGrid::new(6.0, 2.7e-4, 0.1).unwrap();
        assert_eq!(g.steps % g.cadence, 0);
        assert_eq!(g.steps / g.cadence, 60);
        assert!(g.dt <= 2.7e-4);
        assert!((g.dt * g.steps as f64 - 6.0).abs() < 1e-12);
    }

    fn small_config(amplitude: f64) -> SweepConfig {
        let base = PmlParams::new(1.0, 1.0, [1.0; 3], 0.25, 0.0, 0.5);
        let src = SourceSpec { location: [0.0; 3], polarization: 2, amplitude, t0: 0.35, tau: 0.05 };
        let mut cfg = SweepConfig::new(base, vec![0.0, 8.0], vec![0.25], 0.125, src);
        cfg.reference_margin = 0.5;
        cfg.record_interval = 0.05;
        cfg
    }

    #[test]
    fn enlargement_check() {
        let mut cfg = small_config(1.0);
        cfg.reference_margin = 0.25;
        assert!(cfg.check_enlargement().unwrap_err().to_string().contains("c T / 2"));
    }

    #[test]
    fn zero_source_reference_is_zero() {
        let cfg = small_config(0.0);
        let time = cfg.time_grid().unwrap();
        let hist = reference_run(&cfg, &time).unwrap();
        assert_eq!(hist.len() as u64, 1 + time.steps / time.cadence);
        let zero = constant_history(hist.cells, hist.h, &hist.times, 0.0);
        assert_eq!(hist.sup_difference(&zero).unwrap(), 0.0);
    }

    #[test]
    fn restriction_preserves_constants() {
        let mut fine = Snapshot::zeros([4, 4, 2]);
        for f in fine.e.iter_mut().chain(fine.h.iter_mut()).chain(fine.curl_e.iter_mut()).chain(fine.curl_h.iter_mut()) {
            f.data.iter_mut().for_each(|v| *v = 3.0);
        }
        let c = restrict(&fine);
        assert_eq!(c.e[0].dims, [2, 3, 2]);
        assert_eq!(c.h[0].dims, [3, 2, 1]);
        assert!(c.curl_h[2].data.iter().all(|&v| v == 3.0));
    }

    #[test]
    fn stability_probe_zero_source() {
        let p = PmlParams::new(1.0, 1.0, [1.0; 3], 0.25, 2.0, 0.2);
        let r = stability_probe(&p, 0.125, None, None, DEFAULT_CFL).unwrap();
        assert_eq!(r.max_norm_sum, 0.0);
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn source_norm_quadrature() {
        // The Gaussian and its derivative have closed-form L2 norms on R.
        let s = SourceSpec { location: [0.0; 3], polarization: 0, amplitude: 2.0, t0: 3.0, tau: 0.5 };
        let tau: f64 = 0.5;
        let pi_half = (std::f64::consts::PI / 2.0).sqrt();
        let want = 4.0 * (pi_half * tau + pi_half / tau);
        let got = source_h1_norm(&s, 6.0, 1.0).powi(2);
        assert!((got - want).abs() < 1e-10 * want, "{got} vs {want}");
    }
}
