//! Every numerical slack used by the checkers, in one place.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TolerancePolicy {
    /// Relative slack on inequalities that hold exactly in real arithmetic.
    pub proved: f64,
    /// Relative slack on the flux and stress bounds.
    pub pointwise: f64,
    /// Slack on the differential inequality, as a fraction of the largest term.
    pub diff_inequality: f64,
    /// ln(1 + tol) slack on the decay estimate.
    pub decay: f64,
    /// Relative slack on r-monotonicity of the measure.
    pub monotonicity: f64,
    /// Back-substitution residual of ε(λ).
    pub epsilon_residual: f64,
    /// Relative residual allowed on the weighted energy identity at the
    /// reference resolution.
    pub energy_identity: f64,
    /// Reference spacing as a fraction of the bar length; coarser grids get
    /// slack scaled by (h/h_ref)².
    pub reference_fraction: f64,
    /// Floor below which ln E is treated as −∞.
    pub log_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            proved: 1e-10,
            pointwise: 1e-12,
            diff_inequality: 5e-3,
            decay: 5e-3,
            monotonicity: 1e-12,
            epsilon_residual: 1e-12,
            energy_identity: 1e-3,
            reference_fraction: 1.0 / 400.0,
            log_floor: 1e-300,
        }
    }
}

/// Scale applied to discretization slack for a grid of spacing `h` on a
/// body of length `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolution {
    pub factor: f64,
    pub limited: bool,
}

impl TolerancePolicy {
    pub fn resolution(&self, h: f64, length: f64) -> Resolution {
        let h_ref = self.reference_fraction * length;
        let ratio = h / h_ref;
        // Small allowance so a grid built to exactly h_ref is not flagged.
        let limited = ratio > 1.0 + 1e-9;
        Resolution {
            factor: if limited { ratio * ratio } else { 1.0 },
            limited,
        }
    }

    pub fn diff_inequality_slack(&self, resolution: Resolution) -> f64 {
        self.diff_inequality * resolution.factor
    }

    pub fn decay_slack(&self, resolution: Resolution) -> f64 {
        self.decay * resolution.factor
    }

    pub fn energy_identity_slack(&self, resolution: Resolution) -> f64 {
        self.energy_identity * resolution.factor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid_not_limited() {
        let p = TolerancePolicy::default();
        let r = p.resolution(1.0 / 400.0, 1.0);
        assert!(!r.limited);
        assert_eq!(r.factor, 1.0);
        let r = p.resolution(1.0 / 100.0, 1.0);
        assert!(r.limited);
        assert!((r.factor - 16.0).abs() < 1e-12);
        assert!((p.diff_inequality_slack(r) - 0.08).abs() < 1e-12);
    }
}
