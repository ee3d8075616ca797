//! Uniform staggered lattice on a centred box.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::PmlParams;

const ALIGN_TOL: f64 = 1e-9;

/// Cell counts, spacing and lower corner of the computational box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: [usize; 3],
    pub h: f64,
    pub origin: [f64; 3],
}

/// Number of whole cells in `len` at spacing `h`, if `len` is a multiple of `h`.
pub fn cells_in(len: f64, h: f64) -> Option<usize> {
    let q = len / h;
    let r = q.round();
    if r >= 0.0 && (q - r).abs() <= ALIGN_TOL * q.abs().max(1.0) {
        Some(r as usize)
    } else {
        None
    }
}

impl GridSpec {
    /// Grid on `B2 = prod [-L_j/2 - d, L_j/2 + d]`; both interfaces must lie on
    /// cell faces.
    pub fn for_params(params: &PmlParams, h: f64) -> Result<Self> {
        Self::centred(params.l, params.d, h)
    }

    /// Centred grid with half-width `L_j/2 + pad` per axis.
    pub fn centred(l: [f64; 3], pad: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {h}")));
        }
        let pad_cells = cells_in(pad, h).ok_or_else(|| {
            Error::Config(format!("layer/pad width {pad} is not a multiple of h = {h}"))
        })?;
        let mut n = [0; 3];
        let mut origin = [0.0; 3];
        for j in 0..3 {
            let half = cells_in(0.5 * l[j], h).ok_or_else(|| {
                Error::Config(format!(
                    "L{}/2 = {} is not a multiple of h = {h}; Gamma1 must lie on cell faces",
                    j + 1,
                    0.5 * l[j]
                ))
            })?;
            n[j] = 2 * (half + pad_cells);
            if n[j] < 8 {
                return Err(Error::Config(format!("axis {} has {} cells, need >= 8", j + 1, n[j])));
            }
            origin[j] = -((half + pad_cells) as f64) * h;
        }
        Ok(Self { n, h, origin })
    }

    pub fn node(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + i as f64 * self.h
    }

    pub fn half(&self, axis: usize, i: usize) -> f64 {
        self.origin[axis] + (i as f64 + 0.5) * self.h
    }

    pub fn cells(&self) -> usize {
        self.n.iter().product()
    }

    /// Node index of the physical coordinate `x` (must be grid-aligned).
    pub fn node_index(&self, axis: usize, x: f64) -> Option<usize> {
        cells_in(x - self.origin[axis], self.h)
    }
}

/// Staggered field component. `Ex` lives at `(i+1/2, j, k)`, `Hx` at
/// `(i, j+1/2, k+1/2)` and so on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    Ex,
    Ey,
    Ez,
    Hx,
    Hy,
    Hz,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Ex,
        Component::Ey,
        Component::Ez,
        Component::Hx,
        Component::Hy,
        Component::Hz,
    ];

    pub fn id(self) -> u32 {
        self as u32
    }

    pub fn from_id(id: u32) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn axis(self) -> usize {
        (self as usize) % 3
    }

    pub fn is_electric(self) -> bool {
        (self as usize) < 3
    }

    pub fn name(self) -> &'static str {
        ["Ex", "Ey", "Ez", "Hx", "Hy", "Hz"][self as usize]
    }

    /// Which axes carry a half-index offset.
    pub fn staggered(self) -> [bool; 3] {
        let a = self.axis();
        let mut out = [false; 3];
        if self.is_electric() {
            out[a] = true;
        } else {
            out = [true; 3];
            out[a] = false;
        }
        out
    }

    /// Array shape for a box of `n` cells.
    pub fn dims(self, n: [usize; 3]) -> [usize; 3] {
        let st = self.staggered();
        [0, 1, 2].map(|j| if st[j] { n[j] } else { n[j] + 1 })
    }

    pub fn electric(axis: usize) -> Self {
        Self::ALL[axis]
    }

    pub fn magnetic(axis: usize) -> Self {
        Self::ALL[3 + axis]
    }
}
