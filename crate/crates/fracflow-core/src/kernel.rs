//! Singular kernel weights, the graph-flow nonlinearity, principal-value
//! summation, and closed-form far-field completions.

use crate::error::FracflowError;
use crate::params::FlowParams;
use crate::quad::{adaptive_simpson, adaptive_with_power_tail};
use crate::Result;
use std::collections::HashMap;
use std::f64::consts::PI;

/// `r^(-p)` for `r > 0`. The singularity at `r = 0` is the caller's problem:
/// principal-value logic must never reach this function with `r <= 0`.
pub fn kernel_weight(r: f64, p: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(FracflowError::domain(format!(
            "kernel_weight needs r > 0, got r = {r}"
        )));
    }
    Ok(r.powf(-p))
}

/// Surface measure of the unit sphere in `R^n`.
pub fn unit_sphere_measure(n: usize) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(0.5 * nf) / statrs::function::gamma::gamma(0.5 * nf)
}

/// Exact kernel mass outside a ball: `\int_{|z|>R, z in R^n} |z|^{-(n+s)} dz`.
pub fn radial_tail_integral(rmax: f64, n: usize, s: f64) -> Result<f64> {
    if !(rmax > 0.0) {
        return Err(FracflowError::domain(format!(
            "radial_tail_integral needs R > 0, got {rmax}"
        )));
    }
    Ok(unit_sphere_measure(n) * rmax.powf(-s) / s)
}

/// `Lambda` for an explicit kernel exponent `d + s`.
pub fn lambda_for_exponent(slope: f64, kernel_exponent: f64) -> Result<f64> {
    if !(slope >= 0.0) {
        return Err(FracflowError::domain(format!(
            "lambda needs slope >= 0, got {slope}"
        )));
    }
    if slope == 0.0 {
        return Ok(2.0);
    }
    let p = 0.5 * kernel_exponent;
    let f = |t: f64| (1.0 + t * t).powf(-p);
    Ok(2.0 / slope * adaptive_simpson(&f, 0.0, slope, 1e-12 * slope.max(1.0)))
}

/// The graph-flow nonlinearity
/// `Lambda(L) = (1/L) \int_{-L}^{L} (1 + t^2)^{-(d+s)/2} dt`,
/// continuous at 0 with value 2, nonincreasing, bounded in `(0, 2]`.
pub fn lambda_nonlinearity(slope: f64, params: &FlowParams) -> Result<f64> {
    lambda_for_exponent(slope, params.kernel_exponent())
}

/// Read-only interpolation table for `Lambda`, built once per `(d, s)` before
/// any parallel region. Linear interpolation on a uniform slope grid; exact
/// fallback past the table end.
#[derive(Debug, Clone)]
pub struct LambdaTable {
    params: FlowParams,
    max_slope: f64,
    step: f64,
    values: Vec<f64>,
}

impl LambdaTable {
    pub fn new(params: FlowParams, max_slope: f64, n: usize) -> Result<Self> {
        let max_slope = max_slope.max(1.0);
        let step = max_slope / (n - 1) as f64;
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            values.push(lambda_nonlinearity(i as f64 * step, &params)?);
        }
        Ok(LambdaTable {
            params,
            max_slope,
            step,
            values,
        })
    }

    pub fn eval(&self, slope: f64) -> f64 {
        let a = slope.abs();
        if a >= self.max_slope {
            return lambda_nonlinearity(a, &self.params).unwrap_or(0.0);
        }
        let u = a / self.step;
        let i = u as usize;
        let frac = u - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// One weighted signed sample of a kernel sum: an offset from the evaluation
/// point and the full term it contributes (sign, quadrature weight, and
/// kernel already folded in).
#[derive(Debug, Clone, Copy)]
pub struct PvSample {
    pub offset: [f64; 2],
    pub term: f64,
}

/// Principal-value accumulation of signed kernel samples.
///
/// Antipodal partners are combined before being added to the accumulator, so
/// any configuration that is symmetric under `Z -> -Z` sums to exactly `0.0`.
/// Samples inside the cutoff `eps` must come in antipodal pairs (that is how
/// the principal value is defined away from exact arithmetic); unpaired
/// samples outside the cutoff are added plainly.
pub fn pv_sum(samples: &[PvSample], eps: f64) -> Result<f64> {
    // +0.0 and -0.0 must land on the same key for antipode matching.
    let norm = |v: f64| if v == 0.0 { 0.0f64 } else { v };
    let key = |z: [f64; 2]| (norm(z[0]).to_bits(), norm(z[1]).to_bits());
    let mut by_offset: HashMap<(u64, u64), usize> = HashMap::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        if by_offset.insert(key(s.offset), i).is_some() {
            return Err(FracflowError::Contract(format!(
                "duplicate pv_sum offset ({}, {})",
                s.offset[0], s.offset[1]
            )));
        }
    }
    let mut total = 0.0;
    let mut seen = vec![false; samples.len()];
    for (i, s) in samples.iter().enumerate() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let r2 = s.offset[0] * s.offset[0] + s.offset[1] * s.offset[1];
        if r2 == 0.0 {
            return Err(FracflowError::Contract(
                "pv_sum received a sample at the singularity".into(),
            ));
        }
        let anti = key([-s.offset[0], -s.offset[1]]);
        match by_offset.get(&anti) {
            Some(&j) if !seen[j] => {
                seen[j] = true;
                total += s.term + samples[j].term;
            }
            _ => {
                if r2 < eps * eps {
                    return Err(FracflowError::Contract(format!(
                        "sample at ({}, {}) inside pv cutoff {eps} has no antipodal partner",
                        s.offset[0], s.offset[1]
                    )));
                }
                total += s.term;
            }
        }
    }
    Ok(total)
}

/// Signed kernel integral of a half-plane over the exterior of a ball
/// (ambient dimension 2).
///
/// For the set `{Z . n < w}` seen from the origin, with `+1` inside and `-1`
/// outside, this is
/// `sign(w) * 4 \int_R^inf asin(min(|w|/rho, 1)) rho^{-(1+s)} drho`.
/// It vanishes when the line passes through the origin and completes
/// truncated sums against affine tail descriptors.
pub fn half_plane_exterior_integral(w: f64, rmax: f64, s: f64) -> Result<f64> {
    if !(rmax > 0.0) {
        return Err(FracflowError::domain(format!(
            "half_plane_exterior_integral needs R > 0, got {rmax}"
        )));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let a = w.abs();
    let f = |rho: f64| 4.0 * (a / rho).min(1.0).asin() * rho.powf(-(1.0 + s));
    let cut = (8.0 * a).max(4.0 * rmax);
    let v = adaptive_with_power_tail(&f, rmax, cut, 2.0 + s, 1e-11);
    Ok(v.copysign(w))
}

/// Kernel mass of the full exterior, reduced by the sampled window mass:
/// the building block for completing sums over a finite window against a
/// spatially constant far field.
pub fn uniform_exterior_mass(rmax: f64, n: usize, s: f64, sampled_mass: f64) -> Result<f64> {
    Ok(radial_tail_integral(rmax, n, s)? - sampled_mass)
}
