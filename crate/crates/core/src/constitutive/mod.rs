//! Pointwise constitutive maps: the generalized response Ŝ, the bilinear form
//! F and its quadratic form Ŵ, and the full stress/entropy/flux response.

mod checks;

pub use checks::{
    check_cauchy_schwarz, check_flux_bound, check_hat_bound, check_stress_bound,
    check_surface_power_bound, check_tensor_inequality, Bound, ConstitutiveError,
};

use crate::linalg::{ddot, dot, mat3_vec, Mat3, Vec3, ZERO3, ZERO33};
use crate::material::{scaled_coordinates, Material};

/// Sign convention of the time-dependent terms.
///
/// `Reversed` is the forward problem obtained from the backward-in-time
/// problem by reflecting time: g = +τφ̇ + G and −ρθ₀η̇ = div q + ρr.
/// `Dissipative` is the usual forward system: g = −τφ̇ + G and
/// ρθ₀η̇ = div q + ρr.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    #[default]
    Reversed,
    Dissipative,
}

impl TimeDirection {
    /// +1 for the reversed problem, −1 for the dissipative one.
    pub fn sign(self) -> f64 {
        match self {
            TimeDirection::Reversed => 1.0,
            TimeDirection::Dissipative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            TimeDirection::Reversed => TimeDirection::Dissipative,
            TimeDirection::Dissipative => TimeDirection::Reversed,
        }
    }
}

/// Element {E, √χ π, ψ} of the kinematic space. The √χ factor is a material
/// property and is applied when coordinates are formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinematicVector {
    pub dim: usize,
    pub strain: Mat3,
    pub pi: Vec3,
    pub psi: f64,
}

impl KinematicVector {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            strain: ZERO33,
            pi: ZERO3,
            psi: 0.0,
        }
    }

    /// Symmetrizes `strain`.
    pub fn new(dim: usize, strain: Mat3, pi: Vec3, psi: f64) -> Self {
        let mut e = ZERO33;
        for i in 0..dim {
            for j in 0..dim {
                e[i][j] = 0.5 * (strain[i][j] + strain[j][i]);
            }
        }
        let mut p = ZERO3;
        p[..dim].copy_from_slice(&pi[..dim]);
        Self {
            dim,
            strain: e,
            pi: p,
            psi,
        }
    }

    pub fn coordinates(&self, inertia: f64) -> Vec<f64> {
        scaled_coordinates(self.dim, inertia, &self.strain, &self.pi, self.psi)
    }

    /// E_ijE_ij + χπ_iπ_i + ψ²
    pub fn norm_sq(&self, inertia: f64) -> f64 {
        ddot(&self.strain, &self.strain, self.dim) + inertia * dot(&self.pi, &self.pi, self.dim) + self.psi * self.psi
    }

    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..3 {
            for j in 0..3 {
                out.strain[i][j] = alpha * self.strain[i][j] + beta * other.strain[i][j];
            }
            out.pi[i] = alpha * self.pi[i] + beta * other.pi[i];
        }
        out.psi = alpha * self.psi + beta * other.psi;
        out
    }
}

/// {Ŝ, ĥ, Ĝ}
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedStress {
    pub stress: Mat3,
    pub h: Vec3,
    pub g: f64,
}

impl GeneralizedStress {
    /// The element {Ŝ, √χ(ĥ/χ), −Ĝ} of the kinematic space.
    pub fn as_kinematic(&self, dim: usize, inertia: f64) -> KinematicVector {
        let mut pi = ZERO3;
        for i in 0..dim {
            pi[i] = self.h[i] / inertia;
        }
        KinematicVector::new(dim, self.stress, pi, -self.g)
    }
}

/// Stress part, equilibrated-stress part and body-force part of the linear
/// map Ŝ at (E, π, ψ). Shared by [`hat_response`] and [`response`].
fn linear_response(material: &Material, e: &Mat3, pi: &Vec3, psi: f64) -> GeneralizedStress {
    let d = material.dim;
    let mut stress = ZERO33;
    let mut h = ZERO3;
    for i in 0..d {
        for j in 0..d {
            let mut s = material.strain_void[i][j] * psi;
            for r in 0..d {
                for q in 0..d {
                    s += material.elastic[i][j][r][q] * e[r][q];
                }
                s += material.strain_gradient[i][j][r] * pi[r];
            }
            stress[i][j] = s;
        }
        let mut hi = material.gradient_void[i] * psi;
        for r in 0..d {
            for q in 0..d {
                hi += material.strain_gradient[r][q][i] * e[r][q];
            }
            hi += material.gradient_stiffness[i][r] * pi[r];
        }
        h[i] = hi;
    }
    let g = -ddot(&material.strain_void, e, d) - dot(&material.gradient_void, pi, d) - material.void_stiffness * psi;
    GeneralizedStress { stress, h, g }
}

pub fn hat_response(e: &KinematicVector, material: &Material) -> GeneralizedStress {
    linear_response(material, &e.strain, &e.pi, e.psi)
}

/// F(E, Ē), summed coefficient by coefficient.
pub fn bilinear_form(e: &KinematicVector, f: &KinematicVector, material: &Material) -> f64 {
    let d = material.dim;
    let mut two_f = material.void_stiffness * e.psi * f.psi;
    for i in 0..d {
        for j in 0..d {
            for r in 0..d {
                for s in 0..d {
                    two_f += material.elastic[i][j][r][s] * e.strain[i][j] * f.strain[r][s];
                }
                two_f += material.strain_gradient[i][j][r] * (e.strain[i][j] * f.pi[r] + f.strain[i][j] * e.pi[r]);
            }
            two_f += material.gradient_stiffness[i][j] * e.pi[i] * f.pi[j];
            two_f += material.strain_void[i][j] * (e.strain[i][j] * f.psi + f.strain[i][j] * e.psi);
        }
        two_f += material.gradient_void[i] * (e.psi * f.pi[i] + f.psi * e.pi[i]);
    }
    0.5 * two_f
}

/// ½[Ŝ(E):Ē + ĥ(E)·π̄ − Ĝ(E)ψ̄], the same form through the response map.
pub fn bilinear_form_via_response(e: &KinematicVector, f: &KinematicVector, material: &Material) -> f64 {
    let d = material.dim;
    let r = hat_response(e, material);
    0.5 * (ddot(&r.stress, &f.strain, d) + dot(&r.h, &f.pi, d) - r.g * f.psi)
}

/// Ŵ(E) = F(E, E). With E = {e, √χ γ, φ} this is the stored energy W*.
pub fn energy_w(e: &KinematicVector, material: &Material) -> f64 {
    bilinear_form(e, e, material)
}

/// Kinematic fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointState {
    pub dim: usize,
    /// e_ij
    pub strain: Mat3,
    /// γ_i = φ_,i
    pub gamma: Vec3,
    /// κ_i = θ_,i
    pub kappa: Vec3,
    pub phi: f64,
    pub phidot: f64,
    pub theta: f64,
}

impl PointState {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            strain: ZERO33,
            gamma: ZERO3,
            kappa: ZERO3,
            phi: 0.0,
            phidot: 0.0,
            theta: 0.0,
        }
    }

    /// {e, √χ γ, φ}
    pub fn kinematic(&self) -> KinematicVector {
        KinematicVector {
            dim: self.dim,
            strain: self.strain,
            pi: self.gamma,
            psi: self.phi,
        }
    }

    pub fn is_finite(&self) -> bool {
        let d = self.dim;
        let mut ok = self.phi.is_finite() && self.phidot.is_finite() && self.theta.is_finite();
        for i in 0..d {
            ok &= self.gamma[i].is_finite() && self.kappa[i].is_finite();
            for j in 0..d {
                ok &= self.strain[i][j].is_finite();
            }
        }
        ok
    }
}

/// Stress, equilibrated stress, intrinsic body force, entropy and heat flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseState {
    /// S_ij
    pub stress: Mat3,
    /// h_i
    pub h: Vec3,
    /// g
    pub g: f64,
    /// G, the rate-free part of g.
    pub g_static: f64,
    /// ρη
    pub rho_eta: f64,
    /// q_i
    pub q: Vec3,
}

/// Full constitutive response for the reversed (P*) sign convention.
pub fn response(state: &PointState, material: &Material) -> ResponseState {
    response_with(state, material, TimeDirection::Reversed)
}

pub fn response_with(state: &PointState, material: &Material, direction: TimeDirection) -> ResponseState {
    let d = material.dim;
    let lin = linear_response(material, &state.strain, &state.gamma, state.phi);
    let theta = state.theta;
    let mut stress = lin.stress;
    let mut h = lin.h;
    for i in 0..d {
        for j in 0..d {
            stress[i][j] -= material.thermal_stress[i][j] * theta;
        }
        h[i] -= material.thermal_gradient[i] * theta;
    }
    let g_static = lin.g + material.thermal_void * theta;
    let g = direction.sign() * material.memory * state.phidot + g_static;
    let rho_eta = ddot(&material.thermal_stress, &state.strain, d)
        + dot(&material.thermal_gradient, &state.gamma, d)
        + material.thermal_void * state.phi
        + material.heat_capacity * theta;
    let q = mat3_vec(&material.conductivity, &state.kappa, d);
    ResponseState {
        stress,
        h,
        g,
        g_static,
        rho_eta,
        q,
    }
}

/// Rate of the stored energy along a path, S̃:ė + h̃·γ̇ − G̃φ̇, where the
/// tilde quantities are the temperature-free parts of the response.
pub fn stored_energy_rate(state: &PointState, rates: &PointState, material: &Material) -> f64 {
    let d = material.dim;
    let lin = linear_response(material, &state.strain, &state.gamma, state.phi);
    ddot(&lin.stress, &rates.strain, d) + dot(&lin.h, &rates.gamma, d) - lin.g * rates.phi
}
