//! Recorded field histories on a grid-aligned sub-box.

use crate::error::{Error, Result};
use crate::grid::{Component, GridSpec};
use crate::yee::{EMState, Field3};

/// Default upper bound on the bytes a single history may hold.
pub const DEFAULT_STORAGE_BUDGET: u64 = 4 << 30;

/// Node-index box `[lo, hi]` on a particular grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionIndex {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl RegionIndex {
    /// Box with physical corners `lo`, `hi` on `grid`. The box must be
    /// grid-aligned and strictly inside the outer wall.
    pub fn physical(grid: &GridSpec, lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        let mut out = RegionIndex { lo: [0; 3], hi: [0; 3] };
        for j in 0..3 {
            let a = grid.node_index(j, lo[j]);
            let b = grid.node_index(j, hi[j]);
            match (a, b) {
                (Some(a), Some(b)) if a <= b && a >= 1 && b < grid.n[j] => {
                    out.lo[j] = a;
                    out.hi[j] = b;
                }
                _ => {
                    return Err(Error::Config(format!(
                        "record region [{}, {}] on axis {} is not grid-aligned and interior",
                        lo[j],
                        hi[j],
                        j + 1
                    )))
                }
            }
        }
        Ok(out)
    }

    /// The inner box `B1 = prod [-L_j/2, L_j/2]`.
    pub fn inner_box(grid: &GridSpec, l: [f64; 3]) -> Result<Self> {
        Self::physical(grid, l.map(|v| -0.5 * v), l.map(|v| 0.5 * v))
    }

    /// Everything except the outer wall layer of nodes.
    pub fn full_interior(grid: &GridSpec) -> Self {
        RegionIndex { lo: [1; 3], hi: grid.n.map(|n| n - 1) }
    }

    pub fn cells(&self) -> [usize; 3] {
        [0, 1, 2].map(|j| self.hi[j] - self.lo[j])
    }

    pub fn is_empty(&self) -> bool {
        self.cells().iter().any(|&c| c == 0)
    }
}

/// Fields and their discrete curls restricted to a region.
///
/// `curl_e[a]` lives at the `H_a` samples and `curl_h[a]` at the `E_a`
/// samples of the region.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub e: [Field3; 3],
    pub h: [Field3; 3],
    pub curl_e: [Field3; 3],
    pub curl_h: [Field3; 3],
}

impl Snapshot {
    pub fn zeros(cells: [usize; 3]) -> Self {
        let e = |a| Field3::zeros(Component::electric(a).dims(cells));
        let h = |a| Field3::zeros(Component::magnetic(a).dims(cells));
        Self { e: [0, 1, 2].map(e), h: [0, 1, 2].map(h), curl_e: [0, 1, 2].map(h), curl_h: [0, 1, 2].map(e) }
    }

    pub fn extract(state: &EMState, region: &RegionIndex, h: f64) -> Self {
        let cells = region.cells();
        let mut snap = Self::zeros(cells);
        let o = region.lo;
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            copy_region(&state.e[a], &mut snap.e[a], o);
            copy_region(&state.h[a], &mut snap.h[a], o);
            // curl E at H_a: D_b E_c - D_c E_b (forward)
            {
                let ec = &state.e[c];
                let eb = &state.e[b];
                let out = &mut snap.curl_e[a];
                let [n0, n1, n2] = out.dims;
                for i in 0..n0 {
                    for j in 0..n1 {
                        for k in 0..n2 {
                            let g = [o[0] + i, o[1] + j, o[2] + k];
                            let pc = ec.idx(g[0], g[1], g[2]);
                            let pb = eb.idx(g[0], g[1], g[2]);
                            let v = (ec.data[pc + ec.stride(b)] - ec.data[pc])
                                - (eb.data[pb + eb.stride(c)] - eb.data[pb]);
                            let q = out.idx(i, j, k);
                            out.data[q] = v / h;
                        }
                    }
                }
            }
            // curl H at E_a: D_b H_c - D_c H_b (backward)
            {
                let hc = &state.h[c];
                let hb = &state.h[b];
                let out = &mut snap.curl_h[a];
                let [n0, n1, n2] = out.dims;
                for i in 0..n0 {
                    for j in 0..n1 {
                        for k in 0..n2 {
                            let g = [o[0] + i, o[1] + j, o[2] + k];
                            let pc = hc.idx(g[0], g[1], g[2]);
                            let pb = hb.idx(g[0], g[1], g[2]);
                            let v = (hc.data[pc] - hc.data[pc - hc.stride(b)])
                                - (hb.data[pb] - hb.data[pb - hb.stride(c)]);
                            let q = out.idx(i, j, k);
                            out.data[q] = v / h;
                        }
                    }
                }
            }
        }
        snap
    }

    pub fn bytes(&self) -> u64 {
        let n: usize = self
            .e
            .iter()
            .chain(&self.h)
            .chain(&self.curl_e)
            .chain(&self.curl_h)
            .map(|f| f.len())
            .sum();
        8 * n as u64
    }
}

fn copy_region(src: &Field3, dst: &mut Field3, o: [usize; 3]) {
    let [n0, n1, n2] = dst.dims;
    for i in 0..n0 {
        for j in 0..n1 {
            let ps = src.idx(o[0] + i, o[1] + j, o[2]);
            let pd = dst.idx(i, j, 0);
            dst.data[pd..pd + n2].copy_from_slice(&src.data[ps..ps + n2]);
        }
    }
}

/// Time-ordered snapshots on one region.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldHistory {
    pub cells: [usize; 3],
    pub h: f64,
    pub dt: f64,
    pub cadence: u64,
    pub times: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub budget: u64,
}

impl FieldHistory {
    pub fn new(cells: [usize; 3], h: f64, dt: f64, cadence: u64) -> Self {
        Self {
            cells,
            h,
            dt,
            cadence,
            times: Vec::new(),
            snapshots: Vec::new(),
            budget: DEFAULT_STORAGE_BUDGET,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Bytes needed for `count` snapshots of this region.
    pub fn required_bytes(&self, count: u64) -> u64 {
        Snapshot::zeros(self.cells).bytes() * count
    }

    pub fn reserve_checked(&mut self, count: u64) -> Result<()> {
        let required = self.required_bytes(count);
        if required > self.budget {
            return Err(Error::StorageBudget { required, budget: self.budget });
        }
        self.snapshots.reserve(count as usize);
        self.times.reserve(count as usize);
        Ok(())
    }

    pub fn push(&mut self, t: f64, snap: Snapshot) {
        self.times.push(t);
        self.snapshots.push(snap);
    }

    /// In-place `self - other`, snapshot by snapshot.
    pub fn subtract(&mut self, other: &FieldHistory) -> Result<()> {
        self.check_compatible(other)?;
        for (a, b) in self.snapshots.iter_mut().zip(&other.snapshots) {
            let fa = a.e.iter_mut().chain(&mut a.h).chain(&mut a.curl_e).chain(&mut a.curl_h);
            let fb = b.e.iter().chain(&b.h).chain(&b.curl_e).chain(&b.curl_h);
            for (x, y) in fa.zip(fb) {
                x.data.iter_mut().zip(&y.data).for_each(|(u, v)| *u -= v);
            }
        }
        Ok(())
    }

    /// Largest absolute difference of any stored value.
    pub fn sup_difference(&self, other: &FieldHistory) -> Result<f64> {
        self.check_compatible(other)?;
        let mut m: f64 = 0.0;
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            let fa = a.e.iter().chain(&a.h).chain(&a.curl_e).chain(&a.curl_h);
            let fb = b.e.iter().chain(&b.h).chain(&b.curl_e).chain(&b.curl_h);
            for (x, y) in fa.zip(fb) {
                for (u, v) in x.data.iter().zip(&y.data) {
                    m = m.max((u - v).abs());
                }
            }
        }
        Ok(m)
    }

    pub fn check_compatible(&self, other: &FieldHistory) -> Result<()> {
        if self.cells != other.cells {
            return Err(Error::Shape(format!("regions differ: {:?} vs {:?}", self.cells, other.cells)));
        }
        if self.len() != other.len() {
            return Err(Error::Shape(format!("snapshot counts differ: {} vs {}", self.len(), other.len())));
        }
        if (self.h - other.h).abs() > 1e-12 * self.h {
            return Err(Error::Shape("grid spacings differ".into()));
        }
        for (a, b) in self.times.iter().zip(&other.times) {
            if (a - b).abs() > 1e-9 * self.dt.max(1e-300) {
                return Err(Error::Shape(format!("snapshot times differ: {a} vs {b}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::PmlParams;
    use crate::yee::{Simulation, SourceSpec, DEFAULT_CFL};

    #[test]
    fn cadence_snapshot_count_and_empty_region() {
        let p = PmlParams::new(1.0, 1.0, [2.0; 3], 0.5, 4.0, 6.0);
        let g = GridSpec::for_params(&p, 0.125).unwrap();
        let src = SourceSpec { location: [0.0; 3], polarization: 2, amplitude: 1.0, t0: 0.9, tau: 0.15 };
        let mut sim = Simulation::build(g, &p, Some(src), None, DEFAULT_CFL).unwrap();
        let region = RegionIndex::inner_box(&g, p.l).unwrap();
        let hist = sim.run_recorded(10, &region, 1).unwrap();
        assert_eq!(hist.len(), 11);

        let empty = RegionIndex::physical(&g, [0.0; 3], [0.0, 0.5, 0.5]).unwrap();
        assert!(empty.is_empty());
        let hist = sim.run_recorded(5, &empty, 1).unwrap();
        assert!(hist.is_empty());
    }

    #[test]
    fn subtracting_a_history_from_itself_leaves_zeros() {
        let p = PmlParams::new(1.0, 1.0, [2.0; 3], 0.5, 4.0, 6.0);
        let g = GridSpec::for_params(&p, 0.125).unwrap();
        let src = SourceSpec { location: [0.0; 3], polarization: 1, amplitude: 1.0, t0: 0.9, tau: 0.15 };
        let mut sim = Simulation::build(g, &p, Some(src), None, DEFAULT_CFL).unwrap();
        let region = RegionIndex::inner_box(&g, p.l).unwrap();
        let hist = sim.run_recorded(60, &region, 20).unwrap();
        let mut diff = hist.clone();
        diff.subtract(&hist).unwrap();
        let mut zero = FieldHistory::new(hist.cells, hist.h, hist.dt, hist.cadence);
        hist.times.iter().for_each(|&t| zero.push(t, Snapshot::zeros(hist.cells)));
        assert_eq!(diff.sup_difference(&zero).unwrap(), 0.0);
        assert!(hist.sup_difference(&zero).unwrap() > 0.0);
        assert!(diff.subtract(&FieldHistory::new(hist.cells, hist.h, hist.dt, hist.cadence)).is_err());
    }

    #[test]
    fn recorded_curls_match_recomputation() {
        let p = PmlParams::new(1.0, 1.0, [2.0; 3], 0.5, 4.0, 6.0);
        let g = GridSpec::for_params(&p, 0.125).unwrap();
        let src = SourceSpec { location: [0.0; 3], polarization: 0, amplitude: 1.0, t0: 0.9, tau: 0.15 };
        let mut sim = Simulation::build(g, &p, Some(src), None, DEFAULT_CFL).unwrap();
        sim.run(400).unwrap();
        let region = RegionIndex::inner_box(&g, p.l).unwrap();
        let snap = sim.snapshot(&region);
        let st = sim.state();
        let o = region.lo;
        // Hz sample (i+1/2, j+1/2, k): curl E_z = (Ey(i+1) - Ey(i) - Ex(j+1) + Ex(j)) / h
        let (i, j, k) = (3, 5, 2);
        let (gi, gj, gk) = (o[0] + i, o[1] + j, o[2] + k);
        let want = (st.e[1].at(gi + 1, gj, gk) - st.e[1].at(gi, gj, gk) - st.e[0].at(gi, gj + 1, gk)
            + st.e[0].at(gi, gj, gk))
            / g.h;
        let got = snap.curl_e[2].at(i, j, k);
        assert!((got - want).abs() <= 1e-14 * want.abs(), "{got} vs {want}");
        assert!(snap.curl_e.iter().any(|f| f.data.iter().any(|v| *v != 0.0)));
        assert_eq!(snap.e[0].at(i, j, k), st.e[0].at(gi, gj, gk));
    }

    #[test]
    fn storage_budget_enforced() {
        let p = PmlParams::new(1.0, 1.0, [2.0; 3], 0.5, 4.0, 6.0);
        let g = GridSpec::for_params(&p, 0.125).unwrap();
        let region = RegionIndex::inner_box(&g, p.l).unwrap();
        let mut hist = FieldHistory::new(region.cells(), g.h, 0.01, 1).with_budget(1000);
        let err = hist.reserve_checked(10).unwrap_err();
        match err {
            Error::StorageBudget { required, budget } => {
                assert_eq!(budget, 1000);
                assert!(required > 1000);
            }
            other => panic!("unexpected {other}"),
        }
    }
}
