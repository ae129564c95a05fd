//! Pointwise inequalities, returned as (lhs, rhs) pairs. Whether a pair
//! passes is decided by the caller via [`Bound::holds`] and the tolerance
//! policy.

use super::{bilinear_form, energy_w, hat_response, response, KinematicVector, PointState};
use crate::linalg::{ddot, dot, mat3_vec, Mat3, Vec3};
use crate::material::{DecayParameters, Material, Spectrum};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConstitutiveError {
    #[error("free parameter must be positive, got {0}")]
    NonPositiveEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Bound {
    pub lhs: f64,
    pub rhs: f64,
}

impl Bound {
    /// lhs ≤ rhs·(1 + rel)
    pub fn holds(&self, rel: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel)
    }

    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// F(E,Ē)² against Ŵ(E)Ŵ(Ē).
pub fn check_cauchy_schwarz(e: &KinematicVector, f: &KinematicVector, material: &Material) -> Bound {
    let b = bilinear_form(e, f, material);
    Bound {
        lhs: b * b,
        rhs: energy_w(e, material) * energy_w(f, material),
    }
}

/// Ŝ:Ŝ + ĥ·ĥ/χ + Ĝ² against 2μ_M Ŵ(E).
pub fn check_hat_bound(e: &KinematicVector, material: &Material, spectrum: &Spectrum) -> Bound {
    let d = material.dim;
    let r = hat_response(e, material);
    Bound {
        lhs: ddot(&r.stress, &r.stress, d) + dot(&r.h, &r.h, d) / material.inertia + r.g * r.g,
        rhs: 2.0 * spectrum.mu_max * energy_w(e, material),
    }
}

/// q·q against k_M Kκ·κ.
pub fn check_flux_bound(kappa: &Vec3, material: &Material, spectrum: &Spectrum) -> Bound {
    let d = material.dim;
    let q = mat3_vec(&material.conductivity, kappa, d);
    Bound {
        lhs: dot(&q, &q, d),
        rhs: spectrum.k_max * dot(&q, kappa, d),
    }
}

/// (L+F):(L+F) against (1+ϵ)L:L + (1+1/ϵ)F:F.
pub fn check_tensor_inequality(l: &Mat3, f: &Mat3, dim: usize, epsilon: f64) -> Result<Bound, ConstitutiveError> {
    if !(epsilon > 0.0) {
        return Err(ConstitutiveError::NonPositiveEpsilon(epsilon));
    }
    let mut s = *l;
    for i in 0..3 {
        for j in 0..3 {
            s[i][j] += f[i][j];
        }
    }
    Ok(Bound {
        lhs: ddot(&s, &s, dim),
        rhs: (1.0 + epsilon) * ddot(l, l, dim) + (1.0 + 1.0 / epsilon) * ddot(f, f, dim),
    })
}

/// (1 + 1/ϵ)M², read as 0 when M² = 0 regardless of ϵ.
fn coupling_term(coupling: f64, epsilon: f64) -> f64 {
    if coupling == 0.0 {
        0.0
    } else {
        (1.0 + 1.0 / epsilon) * coupling
    }
}

/// S:S + h·h/χ against (1+ϵ)2μ_M W* + (1+1/ϵ)M²θ².
pub fn check_stress_bound(
    state: &PointState,
    material: &Material,
    spectrum: &Spectrum,
    epsilon: f64,
) -> Result<Bound, ConstitutiveError> {
    if !(epsilon > 0.0) {
        return Err(ConstitutiveError::NonPositiveEpsilon(epsilon));
    }
    let d = material.dim;
    let r = response(state, material);
    let w = energy_w(&state.kinematic(), material);
    Ok(Bound {
        lhs: ddot(&r.stress, &r.stress, d) + dot(&r.h, &r.h, d) / material.inertia,
        rhs: (1.0 + epsilon) * 2.0 * spectrum.mu_max * w
            + coupling_term(spectrum.coupling, epsilon) * state.theta * state.theta,
    })
}

/// |S_ji n_j u̇_i + h_j n_j φ̇ − θ q_j n_j/θ₀| against the Young-inequality
/// bound with ε₁ = 1/ζ, ε₂ = 2aζ/(λk_M) and the free parameter set to ε(λ).
/// `normal` must be a unit vector.
pub fn check_surface_power_bound(
    state: &PointState,
    velocity: &Vec3,
    normal: &Vec3,
    material: &Material,
    spectrum: &Spectrum,
    decay: &DecayParameters,
) -> Bound {
    let d = material.dim;
    let r = response(state, material);
    let sn = mat3_vec(&transpose(&r.stress), normal, d);
    let power = dot(&sn, velocity, d) + dot(&r.h, normal, d) * state.phidot
        - state.theta * dot(&r.q, normal, d) / material.reference_temperature;

    let lambda = decay.lambda;
    let (eps, eps1, eps2) = (decay.epsilon, decay.eps1, decay.eps2);
    let rho = material.density;
    let a = material.heat_capacity;
    let theta0 = material.reference_temperature;
    let w = energy_w(&state.kinematic(), material);
    let kinetic = 0.5 * lambda * (rho * dot(velocity, velocity, d) + rho * material.inertia * state.phidot.powi(2))
        + material.memory * state.phidot.powi(2);
    let thermal_coef = eps1 * coupling_term(spectrum.coupling, eps) / (lambda * rho * a) + 1.0 / (lambda * theta0 * eps2);
    let kkk = dot(&mat3_vec(&material.conductivity, &state.kappa, d), &state.kappa, d);
    let rhs = kinetic / (lambda * eps1)
        + eps1 * (1.0 + eps) * spectrum.mu_max / (lambda * rho) * (lambda * w)
        + thermal_coef * (0.5 * lambda * a * state.theta * state.theta)
        + eps2 * spectrum.k_max / (2.0 * a) * (kkk / theta0);
    Bound {
        lhs: power.abs(),
        rhs,
    }
}

fn transpose(m: &Mat3) -> Mat3 {
    let mut t = *m;
    for i in 0..3 {
        for j in 0..3 {
            t[i][j] = m[j][i];
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ZERO3, ZERO33};
    use crate::material::{spectrum, zeta_of_lambda};

    #[test]
    fn flux_bound_values() {
        let mut m = Material::isotropic(2, 1.0, 1.0);
        m.conductivity = [[2.0, 0.0, 0.0], [0.0, 4.0, 0.0], [0.0; 3]];
        let s = spectrum(&m).unwrap();
        assert_eq!(check_flux_bound(&ZERO3, &m, &s), Bound { lhs: 0.0, rhs: 0.0 });
        assert_eq!(check_flux_bound(&[1.0, 0.0, 0.0], &m, &s), Bound { lhs: 4.0, rhs: 8.0 });
        m.conductivity = [[3.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0; 3]];
        let s = spectrum(&m).unwrap();
        let b = check_flux_bound(&[0.5, -1.75, 0.0], &m, &s);
        assert_eq!(b.lhs, b.rhs);
    }

    #[test]
    fn stress_bound_zero_and_bad_epsilon() {
        let m = Material::isotropic(3, 1.0, 1.0);
        let s = spectrum(&m).unwrap();
        let z = PointState::zero(3);
        assert_eq!(check_stress_bound(&z, &m, &s, 1.0).unwrap(), Bound { lhs: 0.0, rhs: 0.0 });
        assert_eq!(
            check_stress_bound(&z, &m, &s, 0.0),
            Err(ConstitutiveError::NonPositiveEpsilon(0.0))
        );
        assert!(check_tensor_inequality(&ZERO33, &ZERO33, 3, -1.0).is_err());
    }

    #[test]
    fn tensor_inequality_equality_case() {
        // F = ϵL gives equality.
        let l = [[1.0, 2.0, 0.0], [0.5, -1.0, 0.0], [0.0; 3]];
        let mut f = l;
        for row in &mut f {
            for v in row {
                *v *= 0.5;
            }
        }
        let b = check_tensor_inequality(&l, &f, 2, 0.5).unwrap();
        assert!((b.lhs - b.rhs).abs() <= 1e-14 * b.rhs);
    }

    #[test]
    fn surface_power_zero_and_velocity_only() {
        let mut m = Material::isotropic(1, 1.0, 1.0);
        m.conductivity[0][0] = 0.1;
        let s = spectrum(&m).unwrap();
        let d = zeta_of_lambda(&s, &m, 2.0).unwrap();
        let z = PointState::zero(1);
        let n = [1.0, 0.0, 0.0];
        assert_eq!(check_surface_power_bound(&z, &ZERO3, &n, &m, &s, &d), Bound { lhs: 0.0, rhs: 0.0 });
        let b = check_surface_power_bound(&z, &[1.5, 0.0, 0.0], &n, &m, &s, &d);
        assert_eq!(b.lhs, 0.0);
        assert!(b.rhs > 0.0);
    }

    #[test]
    fn hat_bound_on_coupled_block() {
        let mut m = Material::zeroed(1);
        m.elastic[0][0][0][0] = 2.0;
        m.void_stiffness = 2.0;
        m.strain_void[0][0] = 1.0;
        m.gradient_stiffness[0][0] = 1.0;
        m.conductivity[0][0] = 1.0;
        let s = spectrum(&m).unwrap();
        // Eigenvector of μ_M = 3: equality.
        let e = KinematicVector::new(1, [[1.0, 0.0, 0.0], [0.0; 3], [0.0; 3]], ZERO3, 1.0);
        let b = check_hat_bound(&e, &m, &s);
        assert!((b.lhs - 18.0).abs() < 1e-12 && (b.rhs - 18.0).abs() < 1e-12);
    }
}
