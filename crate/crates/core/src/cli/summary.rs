//! Serialized report shapes. Field order is fixed, so identical runs give
//! identical bytes.

use crate::material::{DecayParameters, Spectrum};
use crate::measures::Float;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub mu_min: Float,
    pub mu_max: Float,
    pub k_min: Float,
    pub k_max: Float,
    pub coupling: Float,
}

impl From<&Spectrum> for SpectrumSummary {
    fn from(s: &Spectrum) -> Self {
        Self {
            mu_min: Float(s.mu_min),
            mu_max: Float(s.mu_max),
            k_min: Float(s.k_min),
            k_max: Float(s.k_max),
            coupling: Float(s.coupling),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecaySummary {
    pub lambda: Float,
    pub epsilon: Float,
    pub zeta: Float,
    pub eps1: Float,
    pub eps2: Float,
    pub decay_rate: Float,
    pub epsilon_residual: Float,
}

impl DecaySummary {
    pub fn new(d: &DecayParameters, residual: f64) -> Self {
        Self {
            lambda: Float(d.lambda),
            epsilon: Float(d.epsilon),
            zeta: Float(d.zeta),
            eps1: Float(d.eps1),
            eps2: Float(d.eps2),
            decay_rate: Float(d.decay_rate),
            epsilon_residual: Float(residual),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaterialSummary {
    pub admissible: bool,
    pub dim: usize,
    pub violations: Vec<String>,
    pub spectrum: Option<SpectrumSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumTable {
    pub spectrum: SpectrumSummary,
    pub rows: Vec<DecaySummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelSummary {
    pub level: u32,
    pub nodes: Vec<usize>,
    pub dt: Float,
    pub steps: u64,
    pub frames: usize,
    pub thermal_growth_factor: Float,
    pub energy_initial: Float,
    pub energy_final: Float,
    /// Max nodal error against the manufactured solution, if any.
    pub max_error: Option<Float>,
    /// Error ratio against the previous level.
    pub error_ratio: Option<Float>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub levels: Vec<LevelSummary>,
    pub trajectory_file: Option<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowSummary {
    pub length: Float,
    pub horizon: Float,
    pub t0: Float,
    pub r0: Float,
    pub t0_min: Float,
    pub t0_max: Float,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionSummary {
    pub h: Float,
    pub h_reference: Float,
    pub slack_factor: Float,
    pub resolution_limited: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub relative_residual: Float,
    pub tolerance: Float,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiffSummary {
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: Float,
    pub scale: Float,
    pub tolerance: Float,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCheckSummary {
    pub samples: usize,
    pub floored: usize,
    pub violations: usize,
    pub fitted_slope: Option<Float>,
    pub predicted_slope: Float,
    pub tolerance: Float,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicitySummary {
    pub checked: usize,
    pub violations: usize,
    pub tolerance: Float,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub spectrum: SpectrumSummary,
    pub decay: DecaySummary,
    pub window: WindowSummary,
    pub resolution: ResolutionSummary,
    pub steps: u64,
    pub identity: IdentitySummary,
    pub diff_inequality: DiffSummary,
    pub decay_estimate: DecayCheckSummary,
    pub monotonicity: MonotonicitySummary,
    pub warnings: Vec<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub spectrum: SpectrumSummary,
    pub length: Option<Float>,
    pub horizon: Option<Float>,
    pub rows: Vec<SweepRowSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRowSummary {
    pub lambda: Float,
    pub epsilon: Float,
    pub zeta: Float,
    pub lambda_over_zeta: Float,
    pub zeta_over_sqrt_lambda: Float,
    pub feasible: Option<bool>,
    pub slope: Option<Float>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestSummary {
    pub seed: u64,
    pub rayleigh: Vec<RayleighSummary>,
    pub closed_forms: Vec<ClosedForm>,
    pub inequalities: Vec<InequalitySummary>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosedForm {
    pub name: String,
    pub expected: [Float; 2],
    pub computed: [Float; 2],
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RayleighSummary {
    pub dim: usize,
    pub mu_min: Float,
    pub mu_max: Float,
    pub quotient_min: Float,
    pub quotient_max: Float,
    pub samples: usize,
    pub violations: usize,
}

impl From<&crate::suite::RayleighCheck> for RayleighSummary {
    fn from(c: &crate::suite::RayleighCheck) -> Self {
        Self {
            dim: c.dim,
            mu_min: Float(c.mu_min),
            mu_max: Float(c.mu_max),
            quotient_min: Float(c.quotient_min),
            quotient_max: Float(c.quotient_max),
            samples: c.samples,
            violations: c.violations,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalitySummary {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    pub worst: Float,
}

impl From<&crate::suite::InequalityCheck> for InequalitySummary {
    fn from(c: &crate::suite::InequalityCheck) -> Self {
        Self {
            name: c.name.clone(),
            samples: c.samples,
            violations: c.violations,
            worst: Float(c.worst),
        }
    }
}
