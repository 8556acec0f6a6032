//! Fractional mean curvature and fractional perimeter of discretized sets.

use crate::boundary::extract_boundaries;
use crate::error::FracflowError;
use crate::grid::{IndicatorGrid, Tail};
use crate::kernel::{half_plane_exterior_integral, radial_tail_integral, LambdaTable};
use crate::params::{FlowParams, QuadratureConfig};
use crate::Result;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// A curvature evaluation at one boundary point.
#[derive(Debug, Clone, Copy)]
pub struct CurvatureSample {
    /// Physical location of the evaluation point.
    pub point: (f64, f64),
    /// The curvature value, `1 / length^s`; positive on convex sets.
    pub value: f64,
    /// Quadrature settings the value was computed with.
    pub quadrature: QuadratureConfig,
}

/// A boundary evaluation site: column `i`, horizontal face index `face`
/// (faces run `0..=nz`, face `f` at height `f h - nz h / 2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryPoint {
    pub column: usize,
    pub face: usize,
}

/// The face at the top of the highest occupied cell of a column.
pub fn upper_boundary_point(grid: &IndicatorGrid, column: usize) -> Result<BoundaryPoint> {
    let mut top = None;
    for j in 0..grid.nz() {
        if grid.occupied(column, j) {
            top = Some(j);
        }
    }
    match top {
        Some(j) => Ok(BoundaryPoint {
            column,
            face: j + 1,
        }),
        None => Err(FracflowError::structure(format!(
            "column {column} is entirely unoccupied"
        ))),
    }
}

fn face_z(grid: &IndicatorGrid, face: usize) -> f64 {
    face as f64 * grid.h() - 0.5 * grid.height()
}

fn is_transition(grid: &IndicatorGrid, p: BoundaryPoint) -> bool {
    let below = grid.signed_at_cell(p.column as i64, p.face as i64 - 1);
    let above = grid.signed_at_cell(p.column as i64, p.face as i64);
    below != above
}

/// Sum of `(h/m)^2 |Zc + delta|^{-p}` over an `m x m` subcell grid: the
/// refined midpoint weight of one cell at center offset `(dx, dz)`.
fn refined_cell_weight(dx: f64, dz: f64, h: f64, m: u32, p: f64) -> f64 {
    let m = m as usize;
    let sub = h / m as f64;
    let mut total = 0.0;
    for a in 0..m {
        for b in 0..m {
            let ox = dx + (a as f64 + 0.5) * sub - 0.5 * h;
            let oz = dz + (b as f64 + 0.5) * sub - 0.5 * h;
            let r2 = ox * ox + oz * oz;
            total += sub * sub * r2.powf(-0.5 * p);
        }
    }
    total
}

/// Kernel weights (cell measure included) for face-centered evaluation,
/// indexed by the integer `q = 4 dx^2 + (2 dz_half)^2` radius classes, with
/// refined entries near the singularity.
struct FaceWeights {
    plain: Vec<f64>,
    refined: HashMap<(i64, i64), f64>,
    qmax: i64,
}

impl FaceWeights {
    /// `k` in cells, `m` such that the vertical offset is `(m + 0.5) h`.
    fn build(h: f64, rmax: f64, p: f64, q: &QuadratureConfig) -> FaceWeights {
        let scale = (0.5 * h).powf(-p) * h * h;
        let qmax = {
            let v = 2.0 * rmax / h;
            (v * v).ceil() as i64 + 4
        };
        let mut plain = vec![0.0; (qmax + 1) as usize];
        for (qi, w) in plain.iter_mut().enumerate().skip(1) {
            *w = scale * (qi as f64).powf(-0.5 * p);
        }
        // Cells meeting |Z| < 4 eps get subdivided.
        let refine_r = 4.0 * q.pv_cutoff + h;
        let kmax = (refine_r / h).ceil() as i64;
        let mut refined = HashMap::new();
        if q.inner_refinement > 1 {
            for k in 0..=kmax {
                for m in 0..=kmax {
                    let dx = k as f64 * h;
                    let dz = (m as f64 + 0.5) * h;
                    if (dx * dx + dz * dz).sqrt() - h < 4.0 * q.pv_cutoff {
                        refined.insert(
                            (k, m),
                            refined_cell_weight(dx, dz, h, q.inner_refinement, p),
                        );
                    }
                }
            }
        }
        FaceWeights {
            plain,
            refined,
            qmax,
        }
    }

    /// Weight for horizontal offset `k` cells and vertical offset
    /// `(m + 0.5) h`; `None` when outside the truncation radius.
    fn get(&self, k: i64, m: i64) -> Option<f64> {
        let half = 2 * m + 1;
        let qi = 4 * k * k + half * half;
        if qi > self.qmax {
            return None;
        }
        let ka = k.abs();
        let ma = (half.abs() - 1) / 2;
        if let Some(w) = self.refined.get(&(ka, ma)) {
            Some(*w)
        } else {
            Some(self.plain[qi as usize])
        }
    }
}

/// Mean set level of a periodic grid, used as the far-field line: the height
/// below which the column occupancy mass would sit if compacted.
fn mean_level(grid: &IndicatorGrid) -> f64 {
    let filled = grid.occupancy().iter().filter(|&&o| o).count() as f64;
    let frac = filled / (grid.nx() * grid.nz()) as f64;
    -0.5 * grid.height() + frac * grid.height()
}

/// Far-field completion of the signed kernel sum beyond the truncation
/// radius, according to the grid's tail descriptor.
fn tail_completion(grid: &IndicatorGrid, x: f64, z: f64, params: &FlowParams, rmax: f64) -> Result<f64> {
    match grid.tail() {
        Tail::Empty => Ok(-radial_tail_integral(rmax, params.d(), params.s())?),
        Tail::Affine { a, b } => {
            // Signed distance of the evaluation point below the tail line,
            // scaled to the line's normal direction.
            let w = (a * x + b - z) / (1.0 + a * a).sqrt();
            half_plane_exterior_integral(w, rmax, params.s())
        }
        Tail::Periodic => {
            let w = mean_level(grid) - z;
            half_plane_exterior_integral(w, rmax, params.s())
        }
    }
}

/// The s-fractional mean curvature of `E` at a boundary face midpoint:
/// `-s(1-s)` times the principal-value signed kernel sum, positive on convex
/// sets. Antipodal cells are accumulated in pairs so symmetric
/// configurations cancel exactly; the far field is completed in closed form.
pub fn fractional_mean_curvature(
    grid: &IndicatorGrid,
    point: BoundaryPoint,
    params: &FlowParams,
    quad: &QuadratureConfig,
) -> Result<CurvatureSample> {
    if params.d() != 2 {
        return Err(FracflowError::Unsupported(
            "grid curvature is implemented for ambient dimension 2".into(),
        ));
    }
    if point.column >= grid.nx() || point.face > grid.nz() {
        return Err(FracflowError::domain(format!(
            "boundary point ({}, {}) outside the window",
            point.column, point.face
        )));
    }
    if !is_transition(grid, point) {
        return Err(FracflowError::domain(format!(
            "face ({}, {}) is not an occupancy transition",
            point.column, point.face
        )));
    }
    let h = grid.h();
    let rmax = quad.truncation_radius;
    let weights = FaceWeights::build(h, rmax, params.kernel_exponent(), quad);
    let kmax = (rmax / h).ceil() as i64;
    let ic = point.column as i64;
    let fc = point.face as i64;

    let mut total = 0.0;
    // Pair (k, m) with (-k, -1-m): exact cancellation of symmetric data.
    let sig = |k: i64, m: i64| grid.signed_at_cell(ic + k, fc + m);
    for m in 0..=kmax {
        if let Some(w) = weights.get(0, m) {
            total += w * (sig(0, m) + sig(0, -1 - m));
        }
    }
    for k in 1..=kmax {
        for m in -kmax - 1..=kmax {
            if let Some(w) = weights.get(k, m) {
                total += w * (sig(k, m) + sig(-k, -1 - m));
            }
        }
    }
    if quad.tail_correction {
        let x = grid.column_x(point.column);
        let z = face_z(grid, point.face);
        total += tail_completion(grid, x, z, params, rmax)?;
    }
    Ok(CurvatureSample {
        point: (grid.column_x(point.column), face_z(grid, point.face)),
        value: -params.normalization() * total,
        quadrature: *quad,
    })
}

/// How a sampled periodic graph continues past its window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GraphExtension {
    /// Wraps with the sampled period.
    Periodic,
    /// Continues affinely with slope `a` from the window edges.
    Affine { a: f64 },
}

/// A sampled graph living on a uniform 1d lattice.
#[derive(Debug, Clone)]
pub struct GraphSamples<'a> {
    pub values: &'a [f64],
    pub dx: f64,
    pub extension: GraphExtension,
}

impl GraphSamples<'_> {
    pub fn period(&self) -> f64 {
        self.values.len() as f64 * self.dx
    }

    /// Value at signed lattice index, continued by the extension rule.
    pub fn at(&self, i: i64) -> f64 {
        let n = self.values.len() as i64;
        match self.extension {
            GraphExtension::Periodic => self.values[i.rem_euclid(n) as usize],
            GraphExtension::Affine { a } => {
                if i < 0 {
                    self.values[0] + a * (i as f64) * self.dx
                } else if i >= n {
                    self.values[(n - 1) as usize] + a * ((i - n + 1) as f64) * self.dx
                } else {
                    self.values[i as usize]
                }
            }
        }
    }

    fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Right-hand side of the graph flow at node `x`:
/// `s(1-s) sqrt(1+|grad u|^2) \int [u(x+z)-u(x)] |z|^{-(d+s)}
///  Lambda((u(x+z)-u(x))/|z|) dz`.
///
/// Inside the cutoff the integrand is replaced by its symmetric
/// second-difference model, which integrates in closed form: pairing
/// `+z/-z` and expanding to second order gives
/// `u'' (Lambda(|a|) + |a| Lambda'(|a|)) z^{-s}` with `a` the local slope,
/// and `Lambda(L) + L Lambda'(L) = 2 (1 + L^2)^{-(d+s)/2}` exactly.
/// Beyond the truncation radius: zero for affine extensions (antisymmetry),
/// mean-level relaxation for periodic graphs.
pub fn graph_curvature_rhs(
    u: &GraphSamples,
    x: usize,
    params: &FlowParams,
    quad: &QuadratureConfig,
    lambda: &LambdaTable,
) -> Result<f64> {
    if x >= u.values.len() {
        return Err(FracflowError::domain(format!(
            "node {x} outside the sampled graph"
        )));
    }
    let dx = u.dx;
    let s = params.s();
    let exponent = 2.0 + s; // kernel power in the 1d integral
    let ux = u.values[x];
    let xi = x as i64;
    let kmax = (quad.truncation_radius / dx).floor() as i64;
    let k0 = (quad.pv_cutoff / dx).ceil().max(1.0) as i64;
    let mut total = 0.0;
    for k in k0..=kmax {
        let z = k as f64 * dx;
        let w = dx * z.powf(-exponent);
        let dp = u.at(xi + k) - ux;
        let dm = u.at(xi - k) - ux;
        total += w * (dp * lambda.eval(dp / z) + dm * lambda.eval(dm / z));
    }
    // Analytic near field on |z| <= z0 from the local quadratic model.
    let z0 = (k0 as f64 - 0.5) * dx;
    let a = (u.at(xi + 1) - u.at(xi - 1)) / (2.0 * dx);
    let d2 = (u.at(xi + 1) + u.at(xi - 1) - 2.0 * ux) / (dx * dx);
    total += 2.0 * d2 * (1.0 + a * a).powf(-0.5 * params.kernel_exponent())
        * z0.powf(1.0 - s)
        / (1.0 - s);
    if quad.tail_correction {
        if let GraphExtension::Periodic = u.extension {
            let rmax = (kmax as f64 + 0.5) * dx;
            let diff = u.mean() - ux;
            let tail_mass = 2.0 * rmax.powf(-(1.0 + s)) / (1.0 + s);
            total += diff * lambda.eval(diff / rmax) * tail_mass;
        }
        // Affine tails cancel exactly under z -> -z.
    }
    Ok(params.normalization() * (1.0 + a * a).sqrt() * total)
}

/// Fractional perimeter of a bounded set: the double sum of
/// `2 s(1-s) |X - Y|^{-(d+s)}` over occupied `X` and unoccupied `Y` in the
/// window. Requires an empty tail.
pub fn fractional_perimeter(grid: &IndicatorGrid, params: &FlowParams) -> Result<f64> {
    if grid.tail() != Tail::Empty {
        return Err(FracflowError::Unsupported(
            "fractional perimeter needs a bounded set (empty tail)".into(),
        ));
    }
    if params.d() != 2 {
        return Err(FracflowError::Unsupported(
            "fractional perimeter is implemented for ambient dimension 2".into(),
        ));
    }
    let nx = grid.nx();
    let nz = grid.nz();
    let h = grid.h();
    let p = params.kernel_exponent();
    let mut occupied = Vec::new();
    let mut empty = Vec::new();
    for j in 0..nz {
        for i in 0..nx {
            if grid.occupied(i, j) {
                occupied.push((i as i64, j as i64));
            } else {
                empty.push((i as i64, j as i64));
            }
        }
    }
    // Radius-class weight table: pair distance^2 = h^2 (di^2 + dj^2).
    let qmax = ((nx * nx + nz * nz) + 2) as usize;
    let scale = h.powf(-p) * h.powf(4.0);
    let mut table = vec![0.0; qmax];
    for (qi, w) in table.iter_mut().enumerate().skip(1) {
        *w = scale * (qi as f64).powf(-0.5 * p);
    }
    // Near pairs get subcell refinement: the kernel varies too fast across
    // adjacent cells for the midpoint rule.
    let refine_q = 18i64; // pairs with di^2 + dj^2 <= 18 (distance <= ~4.2 h)
    let m_ref = 6u32;
    let mut near: HashMap<(i64, i64), f64> = HashMap::new();
    for di in 0..=4i64 {
        for dj in 0..=4i64 {
            if di * di + dj * dj <= refine_q && (di, dj) != (0, 0) {
                near.insert((di, dj), pair_refined_weight(di, dj, h, m_ref, p));
            }
        }
    }
    let mut total = 0.0;
    for &(ix, iz) in &occupied {
        for &(jx, jz) in &empty {
            let di = (ix - jx).abs();
            let dj = (iz - jz).abs();
            let q = di * di + dj * dj;
            if q <= refine_q {
                total += near[&(di, dj)];
            } else {
                total += table[q as usize];
            }
        }
    }
    Ok(2.0 * params.normalization() * total)
}

/// Refined cell-pair interaction: both cells subdivided `m x m`.
fn pair_refined_weight(di: i64, dj: i64, h: f64, m: u32, p: f64) -> f64 {
    let m = m as usize;
    let sub = h / m as f64;
    let mut total = 0.0;
    for a1 in 0..m {
        for b1 in 0..m {
            for a2 in 0..m {
                for b2 in 0..m {
                    let dx = di as f64 * h + (a2 as f64 - a1 as f64) * sub;
                    let dz = dj as f64 * h + (b2 as f64 - b1 as f64) * sub;
                    let r2 = dx * dx + dz * dz;
                    total += sub.powi(4) * r2.powf(-0.5 * p);
                }
            }
        }
    }
    total
}

/// High-accuracy `H_s` of the unit ball at a boundary point, cached per
/// `(d, s)`. Computed by adaptive radial quadrature of the signed angular
/// measure: in dimension 2,
/// `H_s = s(1-s) [ 4 \int_0^2 asin(rho/2) rho^{-(1+s)} drho + 2 pi 2^{-s}/s ]`,
/// and in dimension 3 the angular measure is linear in `rho`, giving
/// `4 pi 2^{-s}` exactly.
pub fn ball_curvature_constant(params: &FlowParams) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (params.d(), params.s().to_bits());
    if let Some(&v) = cache.lock().unwrap().get(&key) {
        return Ok(v);
    }
    let s = params.s();
    let value = match params.d() {
        2 => {
            // Split off [0, rho0] analytically: asin(rho/2) ~ rho/2 + rho^3/48.
            let rho0: f64 = 1e-4;
            let head = rho0.powf(1.0 - s) / (2.0 * (1.0 - s))
                + rho0.powf(3.0 - s) / (48.0 * (3.0 - s));
            let f = |rho: f64| (0.5 * rho).asin() * rho.powf(-(1.0 + s));
            let body = crate::quad::adaptive_simpson(&f, rho0, 2.0, 1e-12);
            params.normalization() * (4.0 * (head + body) + 2.0 * PI * 2f64.powf(-s) / s)
        }
        3 => {
            let radial = 2.0 * PI * 2f64.powf(1.0 - s) / (1.0 - s);
            let tail = 4.0 * PI * 2f64.powf(-s) / s;
            params.normalization() * (radial + tail)
        }
        d => {
            return Err(FracflowError::Unsupported(format!(
                "ball curvature constant implemented for d in {{2, 3}}, got {d}"
            )))
        }
    };
    cache.lock().unwrap().insert(key, value);
    Ok(value)
}

/// Curvature sweep along the upper boundary of every column.
pub fn curvature_sweep(
    grid: &IndicatorGrid,
    params: &FlowParams,
    quad: &QuadratureConfig,
) -> Result<Vec<CurvatureSample>> {
    let _ = extract_boundaries(grid)?; // every column must be mixed
    let mut out = Vec::with_capacity(grid.nx());
    for i in 0..grid.nx() {
        let p = upper_boundary_point(grid, i)?;
        out.push(fractional_mean_curvature(grid, p, params, quad)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::lambda_nonlinearity;
    use approx::assert_relative_eq;

    fn params(s: f64) -> FlowParams {
        FlowParams::new(2, s, 0.0).unwrap()
    }

    fn lambda_table(p: &FlowParams) -> LambdaTable {
        LambdaTable::new(*p, 4.0, 1025).unwrap()
    }

    #[test]
    fn ball_constant_matches_gamma_closed_form() {
        // Independent route: H_s(B_1^2) = 2^{1-s} (1-s) B((1-s)/2, 1/2).
        use statrs::function::gamma::gamma;
        for &s in &[0.2, 0.5, 0.8] {
            let closed = 2f64.powf(1.0 - s) * (1.0 - s) * gamma((1.0 - s) / 2.0)
                * gamma(0.5)
                / gamma(1.0 - s / 2.0 + 0.0_f64);
            let quadted = ball_curvature_constant(&params(s)).unwrap();
            assert_relative_eq!(quadted, closed, max_relative = 1e-9);
            assert!(quadted > 0.0);
        }
        // Frozen value for the workhorse case.
        assert_relative_eq!(
            ball_curvature_constant(&params(0.5)).unwrap(),
            3.708149354602744,
            max_relative = 1e-10
        );
    }

    #[test]
    fn ball_constant_d3_closed_form() {
        let p = FlowParams::new(3, 0.5, 0.0).unwrap();
        let v = ball_curvature_constant(&p).unwrap();
        assert_relative_eq!(v, 4.0 * PI * 2f64.powf(-0.5), max_relative = 1e-12);
    }

    #[test]
    fn half_space_curvature_is_flat() {
        let g = IndicatorGrid::half_space(64, 64, 0.0625, 0.0).unwrap();
        let quad = QuadratureConfig::for_grid(g.h(), g.width());
        let p = params(0.5);
        let point = upper_boundary_point(&g, 10).unwrap();
        let sample = fractional_mean_curvature(&g, point, &p, &quad).unwrap();
        let scale = ball_curvature_constant(&p).unwrap();
        assert!(
            sample.value.abs() <= 1e-3 * scale,
            "half-space curvature {} not flat",
            sample.value
        );
    }

    #[test]
    fn off_boundary_point_is_rejected() {
        let g = IndicatorGrid::half_space(8, 8, 0.5, 0.0).unwrap();
        let p = params(0.5);
        let quad = QuadratureConfig::for_grid(g.h(), g.width());
        let err = fractional_mean_curvature(&g, BoundaryPoint { column: 1, face: 1 }, &p, &quad);
        assert!(err.is_err());
    }

    fn disk_curvature(r: f64, h: f64, s: f64) -> f64 {
        let half = (2.2 * r / h).ceil() as usize;
        let n = 2 * half;
        let g = IndicatorGrid::disk(n, n, h, r, 0.0, 0.0).unwrap();
        let p = params(s);
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * h,
            truncation_radius: 2.0 * r + 1.0,
            inner_refinement: 4,
            tail_correction: true,
        };
        let column = n / 2; // x = +h/2, near the top of the disk
        let point = upper_boundary_point(&g, column).unwrap();
        fractional_mean_curvature(&g, point, &p, &quad).unwrap().value
    }

    #[test]
    fn unit_ball_curvature_matches_refinement_oracle() {
        // h -> h/2 refinement until the change is below 0.5%, then compare
        // with the radial-quadrature constant.
        let s = 0.5;
        let coarse = disk_curvature(1.0, 0.04, s);
        let fine = disk_curvature(1.0, 0.02, s);
        let rel_change = ((fine - coarse) / fine).abs();
        assert!(rel_change < 0.005, "not converged: {rel_change}");
        let reference = ball_curvature_constant(&params(s)).unwrap();
        assert_relative_eq!(fine, reference, max_relative = 0.02);
    }

    #[test]
    fn curvature_scaling_law() {
        let s = 0.5;
        let base = ball_curvature_constant(&params(s)).unwrap();
        for &r in &[0.5, 1.0, 2.0] {
            let v = disk_curvature(r, 0.02, s);
            assert_relative_eq!(v * r.powf(s), base, max_relative = 0.02);
        }
    }

    #[test]
    fn monotone_under_inclusion() {
        // Ball inside half-space sharing the top boundary point.
        let h = 0.03125;
        let n = 128;
        let g_ball = IndicatorGrid::disk(n, n, h, 1.0, 0.0, -1.0).unwrap();
        let g_half = IndicatorGrid::from_fn(n, n, h, Tail::Affine { a: 0.0, b: 0.0 }, |_, z| {
            z < 0.0
        })
        .unwrap();
        let p = params(0.5);
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * h,
            truncation_radius: 3.0,
            inner_refinement: 4,
            tail_correction: true,
        };
        let col = n / 2;
        let bp_ball = upper_boundary_point(&g_ball, col).unwrap();
        let bp_half = upper_boundary_point(&g_half, col).unwrap();
        assert_eq!(bp_ball.face, bp_half.face);
        let hv = fractional_mean_curvature(&g_half, bp_half, &p, &quad)
            .unwrap()
            .value;
        let bv = fractional_mean_curvature(&g_ball, bp_ball, &p, &quad)
            .unwrap()
            .value;
        assert!(hv <= bv + 1e-9, "H(half-space) = {hv} > H(ball) = {bv}");
    }

    #[test]
    fn translation_invariance_on_lattice() {
        let h = 0.125;
        let n = 32;
        let g0 = IndicatorGrid::disk(n, n, h, 1.0, 0.0, 0.0).unwrap();
        let g1 = IndicatorGrid::disk(n, n, h, 1.0, 0.0, -3.0 * h).unwrap();
        let p = params(0.5);
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * h,
            truncation_radius: 1.8,
            inner_refinement: 2,
            tail_correction: true,
        };
        let col = n / 2;
        let p0 = upper_boundary_point(&g0, col).unwrap();
        let p1 = upper_boundary_point(&g1, col).unwrap();
        assert_eq!(p1.face + 3, p0.face);
        let v0 = fractional_mean_curvature(&g0, p0, &p, &quad).unwrap().value;
        let v1 = fractional_mean_curvature(&g1, p1, &p, &quad).unwrap().value;
        assert_eq!(v0, v1);
    }

    #[test]
    fn symmetry_under_reflection() {
        // H_s(0, -E) = H_s(0, E): reflect a lattice-symmetric asymmetric-ish
        // set through the evaluation point.
        let h = 0.125;
        let n = 32;
        let g = IndicatorGrid::from_fn(n, n, h, Tail::Empty, |x, z| {
            x * x + z * z < 1.0 && (x < 0.4 || z < 0.0)
        })
        .unwrap();
        let refl = IndicatorGrid::from_fn(n, n, h, Tail::Empty, |x, z| {
            let (rx, rz) = (-x, -z);
            rx * rx + rz * rz < 1.0 && (rx < 0.4 || rz < 0.0)
        })
        .unwrap();
        let p = params(0.5);
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * h,
            truncation_radius: 1.8,
            inner_refinement: 2,
            tail_correction: true,
        };
        // Evaluation at the origin face: column n/2 has x = +h/2; its mirror
        // column is n/2 - 1 at x = -h/2. The face through z = 0 is face n/2.
        let a = fractional_mean_curvature(
            &g,
            BoundaryPoint {
                column: n / 2,
                face: n / 2,
            },
            &p,
            &quad,
        );
        let b = fractional_mean_curvature(
            &refl,
            BoundaryPoint {
                column: n / 2 - 1,
                face: n / 2,
            },
            &p,
            &quad,
        );
        match (a, b) {
            (Ok(a), Ok(b)) => {
                // Mirror lattice offsets are in bijection, so agreement is
                // tight even at coarse resolution.
                assert_relative_eq!(a.value, b.value, max_relative = 1e-6);
            }
            _ => panic!("boundary points not transitions"),
        }
    }

    #[test]
    fn graph_rhs_constant_is_zero() {
        let p = params(0.5);
        let lt = lambda_table(&p);
        let values = vec![5.0; 64];
        let u = GraphSamples {
            values: &values,
            dx: 0.1,
            extension: GraphExtension::Periodic,
        };
        let quad = QuadratureConfig::for_grid(0.1, 6.4);
        for x in [0usize, 17, 63] {
            assert_eq!(graph_curvature_rhs(&u, x, &p, &quad, &lt).unwrap(), 0.0);
        }
    }

    #[test]
    fn graph_rhs_affine_is_zero() {
        let p = params(0.5);
        let lt = lambda_table(&p);
        let dx = 0.1;
        let a = 0.7;
        let values: Vec<f64> = (0..64).map(|i| a * (i as f64 * dx)).collect();
        let u = GraphSamples {
            values: &values,
            dx,
            extension: GraphExtension::Affine { a },
        };
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * dx,
            truncation_radius: 20.0,
            inner_refinement: 4,
            tail_correction: true,
        };
        let v = graph_curvature_rhs(&u, 32, &p, &quad, &lt).unwrap();
        assert!(v.abs() < 1e-12, "affine graph moved: {v}");
    }

    #[test]
    fn graph_rhs_cosine_crest_moves_down() {
        let p = params(0.5);
        let lt = lambda_table(&p);
        let n = 128;
        let dx = 2.0 * PI / n as f64;
        let values: Vec<f64> = (0..n).map(|i| (i as f64 * dx).cos()).collect();
        let u = GraphSamples {
            values: &values,
            dx,
            extension: GraphExtension::Periodic,
        };
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * dx,
            truncation_radius: 8.0 * PI,
            inner_refinement: 4,
            tail_correction: true,
        };
        let crest = graph_curvature_rhs(&u, 0, &p, &quad, &lt).unwrap();
        assert!(crest < 0.0, "concave crest must move down, got {crest}");

        // Refinement oracle for the magnitude: doubling the resolution moves
        // the value by little, and the coarse value is consistent.
        let n2 = 256;
        let dx2 = 2.0 * PI / n2 as f64;
        let values2: Vec<f64> = (0..n2).map(|i| (i as f64 * dx2).cos()).collect();
        let u2 = GraphSamples {
            values: &values2,
            dx: dx2,
            extension: GraphExtension::Periodic,
        };
        let quad2 = QuadratureConfig {
            pv_cutoff: 2.0 * dx2,
            truncation_radius: 8.0 * PI,
            inner_refinement: 4,
            tail_correction: true,
        };
        let crest2 = graph_curvature_rhs(&u2, 0, &p, &quad2, &lt).unwrap();
        assert_relative_eq!(crest, crest2, max_relative = 0.02);
    }

    #[test]
    fn graph_and_set_curvature_agree() {
        // For a smooth graph, the graph RHS equals
        // -sqrt(1 + |grad u|^2) H_s at the matching boundary point.
        let s = 0.5;
        let p = params(s);
        let lt = lambda_table(&p);
        let n = 256;
        let period = 2.0 * PI;
        let dx = period / n as f64;
        let amp = 0.5;
        let values: Vec<f64> = (0..n)
            .map(|i| amp * ((i as f64 + 0.5) * dx - period / 2.0).cos())
            .collect();
        let u = GraphSamples {
            values: &values,
            dx,
            extension: GraphExtension::Periodic,
        };
        let quad = QuadratureConfig {
            pv_cutoff: 2.0 * dx,
            truncation_radius: 4.0 * period,
            inner_refinement: 4,
            tail_correction: true,
        };
        // Set version: subgraph on a matching periodic window.
        let nz = 256;
        let g = IndicatorGrid::from_fn(n, nz, dx, Tail::Periodic, |x, z| {
            z < amp * x.cos()
        })
        .unwrap();
        let gq = QuadratureConfig {
            pv_cutoff: 2.0 * dx,
            truncation_radius: 0.5 * period,
            inner_refinement: 4,
            tail_correction: true,
        };
        // Compare at the crest column x ~ 0 <-> graph node at x = 0.
        let col = n / 2;
        let x_col = g.column_x(col);
        let node = ((x_col + period / 2.0) / dx - 0.5).round() as usize;
        let set_sample =
            fractional_mean_curvature(&g, upper_boundary_point(&g, col).unwrap(), &p, &gq)
                .unwrap();
        let graph_rhs = graph_curvature_rhs(&u, node, &p, &quad, &lt).unwrap();
        let grad = (u.at(node as i64 + 1) - u.at(node as i64 - 1)) / (2.0 * dx);
        let expected = -(1.0 + grad * grad).sqrt() * set_sample.value;
        assert_relative_eq!(graph_rhs, expected, max_relative = 0.02);
    }

    #[test]
    fn perimeter_empty_set_is_zero() {
        let g = IndicatorGrid::new(16, 16, 0.25, Tail::Empty).unwrap();
        let p = params(0.5);
        assert_eq!(fractional_perimeter(&g, &p).unwrap(), 0.0);
    }

    #[test]
    fn perimeter_rejects_unbounded_sets() {
        let g = IndicatorGrid::half_space(8, 8, 0.5, 0.0).unwrap();
        let p = params(0.5);
        assert!(fractional_perimeter(&g, &p).is_err());
    }

    #[test]
    fn perimeter_scaling_law() {
        // P_s(2E) = 2^{d-s} P_s(E) on a disk, within 1%.
        let s = 0.5;
        let p = params(s);
        let h = 0.04;
        let g1 = IndicatorGrid::disk(100, 100, h, 0.6, 0.0, 0.0).unwrap();
        let g2 = IndicatorGrid::disk(200, 200, h, 1.2, 0.0, 0.0).unwrap();
        let p1 = fractional_perimeter(&g1, &p).unwrap();
        let p2 = fractional_perimeter(&g2, &p).unwrap();
        let ratio = p2 / p1;
        let expect = 2f64.powf(2.0 - s);
        assert_relative_eq!(ratio, expect, max_relative = 0.01);
    }

    #[test]
    fn perimeter_shape_ratio_tends_to_one_as_s_grows() {
        // Disk vs square of equal classical perimeter: the fractional
        // perimeters approach each other as s -> 1.
        let h = 0.05;
        // Disk radius 1 (perimeter 2 pi) vs square of side pi/2.
        let disk = IndicatorGrid::disk(56, 56, h, 1.0, 0.0, 0.0).unwrap();
        let side = PI / 4.0;
        let square = IndicatorGrid::from_fn(56, 56, h, Tail::Empty, |x, z| {
            x.abs() < side && z.abs() < side
        })
        .unwrap();
        let mut ratios = Vec::new();
        for &s in &[0.7, 0.8, 0.9] {
            let p = params(s);
            let r = fractional_perimeter(&disk, &p).unwrap()
                / fractional_perimeter(&square, &p).unwrap();
            ratios.push(r);
        }
        // The trend moves monotonically toward 1.
        assert!((ratios[1] - 1.0).abs() <= (ratios[0] - 1.0).abs() + 1e-9);
        assert!((ratios[2] - 1.0).abs() <= (ratios[1] - 1.0).abs() + 1e-9);
    }

    #[test]
    fn lambda_bounds_hold_in_graph_rhs_regime() {
        let p = params(0.5);
        let lmin = lambda_nonlinearity(10.0, &p).unwrap();
        for k in 0..=100 {
            let v = lambda_nonlinearity(0.1 * k as f64, &p).unwrap();
            assert!(v >= lmin && v <= 2.0);
        }
    }
}
