use crate::error::FracflowError;
use crate::Result;

/// Scale-free parameters of the flow: ambient dimension, fractional order,
/// and the Lipschitz bound of the reference subgraph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    d: usize,
    s: f64,
    lipschitz: f64,
}

impl FlowParams {
    pub fn new(d: usize, s: f64, lipschitz: f64) -> Result<Self> {
        if d < 2 {
            return Err(FracflowError::config("d", "ambient dimension must be >= 2"));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(FracflowError::config(
                "s",
                format!("fractional order must lie in (0, 1), got {s}"),
            ));
        }
        if !(lipschitz >= 0.0) {
            return Err(FracflowError::config(
                "L",
                format!("Lipschitz bound must be >= 0, got {lipschitz}"),
            ));
        }
        Ok(FlowParams { d, s, lipschitz })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Kernel exponent `d + s`; derived, never stored.
    pub fn kernel_exponent(&self) -> f64 {
        self.d as f64 + self.s
    }

    /// Curvature normalization `s(1-s)`; derived, never stored.
    pub fn normalization(&self) -> f64 {
        self.s * (1.0 - self.s)
    }
}

/// Discretization controls for the principal-value kernel sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Antipodal-pairing cutoff around the singularity.
    pub pv_cutoff: f64,
    /// Samples stop at this radius; beyond it the tail model takes over.
    pub truncation_radius: f64,
    /// Subdivision factor for cells meeting `|Z| < 4 * pv_cutoff`.
    pub inner_refinement: u32,
    /// Replace the far field by its closed-form completion instead of
    /// dropping it.
    pub tail_correction: bool,
}

impl QuadratureConfig {
    pub fn new(
        pv_cutoff: f64,
        truncation_radius: f64,
        inner_refinement: u32,
        tail_correction: bool,
    ) -> Result<Self> {
        if !(pv_cutoff > 0.0) {
            return Err(FracflowError::config("pv_cutoff", "must be > 0"));
        }
        if !(truncation_radius > pv_cutoff) {
            return Err(FracflowError::config(
                "truncation_radius",
                format!("must exceed pv_cutoff = {pv_cutoff}"),
            ));
        }
        if inner_refinement < 1 {
            return Err(FracflowError::config("inner_refinement", "must be >= 1"));
        }
        Ok(QuadratureConfig {
            pv_cutoff,
            truncation_radius,
            inner_refinement,
            tail_correction,
        })
    }

    /// Defaults tied to a grid: cutoff `2h`, truncation at half the periodic
    /// width, 4-fold inner subdivision, tail completion on.
    pub fn for_grid(h: f64, periodic_width: f64) -> Self {
        QuadratureConfig {
            pv_cutoff: 2.0 * h,
            truncation_radius: 0.5 * periodic_width,
            inner_refinement: 4,
            tail_correction: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_params() {
        assert!(FlowParams::new(1, 0.5, 0.0).is_err());
        assert!(FlowParams::new(2, 0.0, 0.0).is_err());
        assert!(FlowParams::new(2, 1.0, 0.0).is_err());
        assert!(FlowParams::new(2, 1.2, 0.0).is_err());
        assert!(FlowParams::new(2, 0.5, -1.0).is_err());
        assert!(FlowParams::new(2, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn derived_exponents() {
        let p = FlowParams::new(2, 0.5, 1.0).unwrap();
        assert_eq!(p.kernel_exponent(), 2.5);
        assert_eq!(p.normalization(), 0.25);
    }

    #[test]
    fn quadrature_invariants() {
        assert!(QuadratureConfig::new(0.1, 0.05, 1, true).is_err());
        assert!(QuadratureConfig::new(0.0, 1.0, 1, true).is_err());
        assert!(QuadratureConfig::new(0.1, 1.0, 0, true).is_err());
        let q = QuadratureConfig::for_grid(0.05, 4.0);
        assert_eq!(q.pv_cutoff, 0.1);
        assert_eq!(q.truncation_radius, 2.0);
    }
}
