//! Constants of the Saint-Venant decay estimate as functions of the time
//! weight λ.

use super::{Material, Spectrum};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DecayError {
    #[error("time weight must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("window infeasible: zeta*T = {zeta_t} is smaller than L = {length}")]
    Infeasible { zeta_t: f64, length: f64 },
    #[error("no lambda in the grid satisfies L <= zeta*t0 + r0 <= zeta*T")]
    NoFeasibleLambda,
    #[error("lambda grid is empty")]
    EmptyGrid,
}

/// Everything the decay estimate needs for one λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParameters {
    pub lambda: f64,
    /// Nonnegative root ε.
    pub epsilon: f64,
    /// Spatial speed ζ(λ).
    pub zeta: f64,
    /// ε₁ = 1/ζ
    pub eps1: f64,
    /// ε₂ = 2aζ/(λk_M)
    pub eps2: f64,
    /// λ/ζ
    pub decay_rate: f64,
}

/// (p, q) with p = M²/(aμ_M) and q = λρk_M/(2θ₀aμ_M); ε solves
/// ε² + (1 − p − q)ε − p = 0.
fn root_coefficients(spectrum: &Spectrum, material: &Material, lambda: f64) -> (f64, f64) {
    let a = material.heat_capacity;
    let p = spectrum.coupling / (a * spectrum.mu_max);
    let q = lambda * material.density * spectrum.k_max
        / (2.0 * material.reference_temperature * a * spectrum.mu_max);
    (p, q)
}

/// Nonnegative root ε(λ) from the closed form, evaluated without
/// cancellation.
pub fn epsilon_of_lambda(spectrum: &Spectrum, material: &Material, lambda: f64) -> f64 {
    let (p, q) = root_coefficients(spectrum, material, lambda);
    let b = 1.0 - p - q;
    let disc = (b * b + 4.0 * p).sqrt();
    if b <= 0.0 {
        0.5 * (disc - b)
    } else {
        2.0 * p / (b + disc)
    }
}

/// Residual of the quadratic at ε, divided by max(1, ε²).
pub fn epsilon_residual(spectrum: &Spectrum, material: &Material, lambda: f64, epsilon: f64) -> f64 {
    let (p, q) = root_coefficients(spectrum, material, lambda);
    let r = epsilon * epsilon + (1.0 - p - q) * epsilon - p;
    r.abs() / (epsilon * epsilon).max(1.0)
}

pub fn zeta_of_lambda(
    spectrum: &Spectrum,
    material: &Material,
    lambda: f64,
) -> Result<DecayParameters, DecayError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DecayError::BadLambda(lambda));
    }
    let epsilon = epsilon_of_lambda(spectrum, material, lambda);
    let zeta = (spectrum.mu_max * (1.0 + epsilon) / material.density).sqrt();
    Ok(DecayParameters {
        lambda,
        epsilon,
        zeta,
        eps1: 1.0 / zeta,
        eps2: 2.0 * material.heat_capacity * zeta / (lambda * spectrum.k_max),
        decay_rate: lambda / zeta,
    })
}

/// The admissible set L ≤ ζt₀ + r₀ ≤ ζT with t₀ ∈ [0, T], r₀ ∈ [0, L].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityWindow {
    pub zeta: f64,
    pub length: f64,
    pub horizon: f64,
}

impl FeasibilityWindow {
    /// Closed interval of admissible t₀ for a given r₀, if any.
    pub fn t0_range(&self, r0: f64) -> Option<(f64, f64)> {
        if !(0.0..=self.length).contains(&r0) {
            return None;
        }
        let lo = ((self.length - r0) / self.zeta).max(0.0);
        let hi = (self.horizon - r0 / self.zeta).min(self.horizon);
        (lo <= hi).then_some((lo, hi))
    }

    /// The ζt₀ + r₀ comparisons allow a few ulps, so that the endpoints
    /// returned by [`Self::t0_range`] are always contained.
    pub fn contains(&self, t0: f64, r0: f64) -> bool {
        let s = self.zeta * t0 + r0;
        let ulps = 8.0 * f64::EPSILON;
        (0.0..=self.horizon).contains(&t0)
            && (0.0..=self.length).contains(&r0)
            && self.length * (1.0 - ulps) <= s
            && s <= self.zeta * self.horizon * (1.0 + ulps)
    }

    /// Default choice: the latest admissible t₀ for the given r₀.
    pub fn latest(&self, r0: f64) -> Option<(f64, f64)> {
        self.t0_range(r0).map(|(_, hi)| (hi, r0))
    }
}

pub fn feasibility_window(zeta: f64, length: f64, horizon: f64) -> Result<FeasibilityWindow, DecayError> {
    if zeta * horizon < length {
        return Err(DecayError::Infeasible {
            zeta_t: zeta * horizon,
            length,
        });
    }
    Ok(FeasibilityWindow {
        zeta,
        length,
        horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaChoice {
    pub decay: DecayParameters,
    pub window: FeasibilityWindow,
}

/// Grid point maximizing λ/ζ(λ) among those whose window admits some t₀
/// for the given r₀. Ties go to the smallest λ.
pub fn optimize_lambda(
    spectrum: &Spectrum,
    material: &Material,
    length: f64,
    horizon: f64,
    r0: f64,
    grid: &[f64],
) -> Result<LambdaChoice, DecayError> {
    if grid.is_empty() {
        return Err(DecayError::EmptyGrid);
    }
    let mut best: Option<LambdaChoice> = None;
    for &lambda in grid {
        let decay = zeta_of_lambda(spectrum, material, lambda)?;
        let Ok(window) = feasibility_window(decay.zeta, length, horizon) else {
            continue;
        };
        if window.t0_range(r0).is_none() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                decay.decay_rate > b.decay.decay_rate
                    || (decay.decay_rate == b.decay.decay_rate && lambda < b.decay.lambda)
            }
        };
        if better {
            best = Some(LambdaChoice { decay, window });
        }
    }
    best.ok_or(DecayError::NoFeasibleLambda)
}
