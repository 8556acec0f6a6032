//! Upper/lower boundaries of discretized sets and moduli of continuity,
//! in both the boundary-pair and the translate-inclusion formulation.

use crate::error::FracflowError;
use crate::grid::{IndicatorGrid, Tail};
use crate::Result;
use std::sync::Arc;

/// How horizontal distances are measured across the window edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seam {
    /// Wraparound distance with the given period.
    Periodic { period: f64 },
    /// Plain Euclidean distance; the set continues by its tail descriptor.
    Flat,
}

impl Seam {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        let d = (x - y).abs();
        match self {
            Seam::Periodic { period } => d.min(period - d).max(0.0),
            Seam::Flat => d,
        }
    }
}

/// Column-sampled upper and lower boundaries of a set.
///
/// `ubar[i]` is the top face of the highest occupied cell in column `i`;
/// `ulow[i]` the bottom face of the lowest unoccupied cell. For a strict
/// subgraph the two coincide exactly.
#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub x0: f64,
    pub dx: f64,
    pub ubar: Vec<f64>,
    pub ulow: Vec<f64>,
    pub seam: Seam,
}

impl BoundaryPair {
    pub fn len(&self) -> usize {
        self.ubar.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ubar.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    /// Largest column-wise `ubar - ulow`; zero means graphical.
    pub fn gap(&self) -> f64 {
        self.ubar
            .iter()
            .zip(&self.ulow)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Discrete Lipschitz constant of the upper boundary.
    pub fn upper_lipschitz(&self) -> f64 {
        discrete_lipschitz(&self.ubar, self.dx, matches!(self.seam, Seam::Periodic { .. }))
    }
}

/// Max slope between adjacent samples; wraps around when `periodic`.
pub fn discrete_lipschitz(values: &[f64], dx: f64, periodic: bool) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for i in 0..n - 1 {
        worst = worst.max((values[i + 1] - values[i]).abs() / dx);
    }
    if periodic {
        worst = worst.max((values[0] - values[n - 1]).abs() / dx);
    }
    worst
}

/// A modulus of continuity: continuous, nondecreasing, `omega(0) >= 0`
/// allowed strictly positive. Carries its declared Lipschitz bound (used for
/// discrete slack) and the radius past which it is exactly affine (used for
/// closed-form tail completions).
#[derive(Clone)]
pub struct Modulus {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Declared Lipschitz bound of `omega`.
    pub lipschitz: f64,
    /// For `r >= affine_from`, `omega(r) = omega(affine_from) + tail_slope (r - affine_from)`.
    pub affine_from: f64,
    pub tail_slope: f64,
}

impl std::fmt::Debug for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Modulus")
            .field("omega(0)", &self.eval(0.0))
            .field("lipschitz", &self.lipschitz)
            .field("affine_from", &self.affine_from)
            .field("tail_slope", &self.tail_slope)
            .finish()
    }
}

impl Modulus {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz: f64,
        affine_from: f64,
        tail_slope: f64,
    ) -> Self {
        Modulus {
            eval: Arc::new(eval),
            lipschitz,
            affine_from,
            tail_slope,
        }
    }

    pub fn constant(c: f64) -> Self {
        Modulus::new(move |_| c, 0.0, 0.0, 0.0)
    }

    pub fn affine(offset: f64, slope: f64) -> Self {
        Modulus::new(move |r| offset + slope * r, slope, 0.0, slope)
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }
}

/// Outcome of a modulus check, with the worst pair as a witness.
#[derive(Debug, Clone, Copy)]
pub struct ModulusVerdict {
    pub ok: bool,
    /// `(i, j, excess)` maximizing `ubar(x_i) - ulow(x_j) - omega(|x_i - x_j|)`.
    pub witness: (usize, usize, f64),
}

/// Extract the boundary pair of a grid; every column must contain both an
/// occupied and an unoccupied cell.
pub fn extract_boundaries(grid: &IndicatorGrid) -> Result<BoundaryPair> {
    let nx = grid.nx();
    let nz = grid.nz();
    let h = grid.h();
    let z_off = 0.5 * grid.height();
    let mut ubar = Vec::with_capacity(nx);
    let mut ulow = Vec::with_capacity(nx);
    for i in 0..nx {
        let mut top: Option<usize> = None;
        let mut bottom_free: Option<usize> = None;
        for j in 0..nz {
            if grid.occupied(i, j) {
                top = Some(j);
            } else if bottom_free.is_none() {
                bottom_free = Some(j);
            }
        }
        let top = top.ok_or_else(|| {
            FracflowError::structure(format!("column {i} is entirely unoccupied"))
        })?;
        let bottom_free = bottom_free.ok_or_else(|| {
            FracflowError::structure(format!("column {i} is entirely occupied"))
        })?;
        ubar.push((top as f64 + 1.0) * h - z_off);
        ulow.push(bottom_free as f64 * h - z_off);
    }
    let seam = match grid.tail() {
        Tail::Periodic => Seam::Periodic {
            period: grid.width(),
        },
        _ => Seam::Flat,
    };
    Ok(BoundaryPair {
        x0: grid.column_x(0),
        dx: h,
        ubar,
        ulow,
        seam,
    })
}

/// Check `ubar(x) - ulow(y) <= omega(|x - y|) + slack` over all ordered
/// column pairs, with `slack = (1 + lipschitz(omega)) * dx`.
pub fn has_modulus_boundary(bp: &BoundaryPair, omega: &Modulus) -> ModulusVerdict {
    let slack = (1.0 + omega.lipschitz) * bp.dx;
    let n = bp.len();
    let mut worst = (0usize, 0usize, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let r = bp.seam.distance(bp.x(i), bp.x(j));
            let excess = bp.ubar[i] - bp.ulow[j] - omega.eval(r);
            if excess > worst.2 {
                worst = (i, j, excess);
            }
        }
    }
    ModulusVerdict {
        ok: worst.2 <= slack,
        witness: worst,
    }
}

/// Translate-inclusion form of the modulus check: for each sampled lattice
/// vector `(k, m)` (meaning `Z = (k h, m h)` with `m h >= omega(|k h|)`),
/// verify `E - Z` is contained in `E` cell-wise, using the tail descriptor
/// outside the window.
pub fn has_modulus_set(grid: &IndicatorGrid, omega: &Modulus, samples: &[(i64, i64)]) -> Result<bool> {
    let h = grid.h();
    for &(k, m) in samples {
        let z = (k as f64 * h).abs();
        if (m as f64) * h < omega.eval(z) - 1e-12 {
            return Err(FracflowError::domain(format!(
                "translate ({k}, {m}) lies below the modulus curve"
            )));
        }
        for j in 0..grid.nz() {
            for i in 0..grid.nx() {
                if !grid.occupied(i, j) {
                    continue;
                }
                let ci = i as i64 - k;
                let cj = j as i64 - m;
                if grid.signed_at_cell(ci, cj) < 0.0 {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The binding translate samples for `has_modulus_set`: for every horizontal
/// lattice offset within half the window, the smallest admissible vertical
/// shift (with the discrete slack folded in) plus a short stencil above it.
pub fn default_translate_samples(grid: &IndicatorGrid, omega: &Modulus) -> Vec<(i64, i64)> {
    let h = grid.h();
    let half = (grid.nx() / 2) as i64;
    let slack = (1.0 + omega.lipschitz) * h;
    let mut samples = Vec::new();
    for k in -half..=half {
        let r = (k as f64 * h).abs();
        let m = ((omega.eval(r) + slack) / h).ceil() as i64;
        samples.push((k, m));
        samples.push((k, m + 2));
    }
    samples
}

/// Build the affine modulus `omega(r) = R + L r` guaranteed by a sandwich of
/// width `R` around an `L`-Lipschitz graph. Errors when the sampled graph is
/// steeper than the declared bound.
pub fn sandwich_to_modulus(u0: &[f64], dx: f64, gap: f64, slope: f64) -> Result<Modulus> {
    if !(gap >= 0.0) {
        return Err(FracflowError::domain(format!("gap must be >= 0, got {gap}")));
    }
    let lip = discrete_lipschitz(u0, dx, false);
    if lip > slope + 1e-9 {
        return Err(FracflowError::domain(format!(
            "sampled Lipschitz constant {lip} exceeds declared bound {slope}"
        )));
    }
    Ok(Modulus::affine(gap, slope))
}

/// Reconstruct a Lipschitz graph from a lower boundary via inf-convolution:
/// `u(x) = gap/2 + inf_y (ulow(y) + L |x - y|)`.
pub fn modulus_to_sandwich(bp: &BoundaryPair, gap: f64, slope: f64) -> Vec<f64> {
    let n = bp.len();
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        let mut best = f64::INFINITY;
        for j in 0..n {
            let r = bp.seam.distance(bp.x(i), bp.x(j));
            best = best.min(bp.ulow[j] + slope * r);
        }
        u.push(0.5 * gap + best);
    }
    u
}
