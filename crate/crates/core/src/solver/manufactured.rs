//! Manufactured solutions built from products of spatial and temporal
//! trigonometric modes, with analytic jets up to second order.

use crate::constitutive::{response_with, PointState, ResponseState, TimeDirection};
use crate::linalg::{dot, Mat3, Vec3, ZERO3, ZERO33};
use crate::material::Material;
use serde::{Deserialize, Serialize};

/// amplitude·sin(k·x + phase)·cos(ωt + time_phase)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigMode {
    pub amplitude: f64,
    pub wavevector: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub omega: f64,
    #[serde(default)]
    pub time_phase: f64,
}

/// Value and derivatives of a scalar field at one (x, t).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub grad: Vec3,
    pub hess: Mat3,
    pub dt: f64,
    pub dtt: f64,
    pub dt_grad: Vec3,
}

impl Jet {
    fn add(&mut self, m: &TrigMode, x: &Vec3, t: f64) {
        let mut k = ZERO3;
        for (ki, w) in k.iter_mut().zip(&m.wavevector) {
            *ki = *w;
        }
        let arg = dot(&k, x, 3) + m.phase;
        let (s, c) = arg.sin_cos();
        let targ = m.omega * t + m.time_phase;
        let (ts, tc) = targ.sin_cos();
        let a = m.amplitude;
        let tt = tc;
        let tdot = -m.omega * ts;
        let tddot = -m.omega * m.omega * tc;
        self.value += a * s * tt;
        self.dt += a * s * tdot;
        self.dtt += a * s * tddot;
        for j in 0..3 {
            self.grad[j] += a * k[j] * c * tt;
            self.dt_grad[j] += a * k[j] * c * tdot;
            for l in 0..3 {
                self.hess[j][l] -= a * k[j] * k[l] * s * tt;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigProfile {
    /// Modes per displacement component; missing components are zero.
    #[serde(default)]
    pub u: Vec<Vec<TrigMode>>,
    #[serde(default)]
    pub phi: Vec<TrigMode>,
    #[serde(default)]
    pub theta: Vec<TrigMode>,
}

/// Everything the solver and the checkers need at one (x, t).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactPoint {
    pub u: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub state: PointState,
    /// θ̇
    pub theta_rate: f64,
    pub response: ResponseState,
    /// ρf
    pub force: Vec3,
    /// ρℓ
    pub void_source: f64,
    /// ρr
    pub heat_source: f64,
}

fn jet(modes: &[TrigMode], x: &Vec3, t: f64) -> Jet {
    let mut j = Jet::default();
    for m in modes {
        j.add(m, x, t);
    }
    j
}

impl TrigProfile {
    pub fn is_zero(&self) -> bool {
        let all_zero = |ms: &[TrigMode]| ms.iter().all(|m| m.amplitude == 0.0);
        self.u.iter().all(|c| all_zero(c)) && all_zero(&self.phi) && all_zero(&self.theta)
    }

    pub fn check(&self, dim: usize) -> Result<(), String> {
        if self.u.len() > dim {
            return Err(format!("manufactured u has {} components in dimension {dim}", self.u.len()));
        }
        let modes = self.u.iter().flatten().chain(&self.phi).chain(&self.theta);
        for m in modes {
            if m.wavevector.len() != dim {
                return Err(format!("wavevector needs {dim} entries, got {}", m.wavevector.len()));
            }
        }
        Ok(())
    }

    fn jets(&self, x: &Vec3, t: f64) -> ([Jet; 3], Jet, Jet) {
        let mut u = [Jet::default(); 3];
        for (c, modes) in self.u.iter().enumerate() {
            u[c] = jet(modes, x, t);
        }
        (u, jet(&self.phi, x, t), jet(&self.theta, x, t))
    }

    pub fn evaluate(&self, x: &Vec3, t: f64, material: &Material, direction: TimeDirection) -> ExactPoint {
        let d = material.dim;
        let (u, phi, theta) = self.jets(x, t);
        let mut strain = ZERO33;
        let mut strain_rate = ZERO33;
        for i in 0..d {
            for j in 0..d {
                strain[i][j] = 0.5 * (u[i].grad[j] + u[j].grad[i]);
                strain_rate[i][j] = 0.5 * (u[i].dt_grad[j] + u[j].dt_grad[i]);
            }
        }
        let state = PointState {
            dim: d,
            strain,
            gamma: phi.grad,
            kappa: theta.grad,
            phi: phi.value,
            phidot: phi.dt,
            theta: theta.value,
        };
        let resp = response_with(&state, material, direction);

        // Divergences from the responses to the spatial derivatives of the
        // state; the response is linear in the state.
        let mut div_s = ZERO3;
        let mut div_h = 0.0;
        let mut div_q = 0.0;
        for j in 0..d {
            let mut e_j = ZERO33;
            let mut g_j = ZERO3;
            let mut k_j = ZERO3;
            for r in 0..d {
                for s in 0..d {
                    e_j[r][s] = 0.5 * (u[r].hess[s][j] + u[s].hess[r][j]);
                }
                g_j[r] = phi.hess[r][j];
                k_j[r] = theta.hess[r][j];
            }
            let sj = PointState {
                dim: d,
                strain: e_j,
                gamma: g_j,
                kappa: k_j,
                phi: phi.grad[j],
                phidot: phi.dt_grad[j],
                theta: theta.grad[j],
            };
            let rj = response_with(&sj, material, direction);
            for i in 0..d {
                div_s[i] += rj.stress[j][i];
            }
            div_h += rj.h[j];
            div_q += rj.q[j];
        }

        let rho = material.density;
        let mut velocity = ZERO3;
        let mut acceleration = ZERO3;
        let mut force = ZERO3;
        let mut uu = ZERO3;
        for i in 0..d {
            uu[i] = u[i].value;
            velocity[i] = u[i].dt;
            acceleration[i] = u[i].dtt;
            force[i] = rho * u[i].dtt - div_s[i];
        }
        let void_source = rho * material.inertia * phi.dtt - div_h - resp.g;
        let mut coupling = material.thermal_void * phi.dt;
        for i in 0..d {
            coupling += material.thermal_gradient[i] * phi.dt_grad[i];
            for j in 0..d {
                coupling += material.thermal_stress[i][j] * strain_rate[i][j];
            }
        }
        let sigma = direction.sign();
        let heat_source =
            -sigma * material.reference_temperature * (material.heat_capacity * theta.dt + coupling) - div_q;
        ExactPoint {
            u: uu,
            velocity,
            acceleration,
            state,
            theta_rate: theta.dt,
            response: resp,
            force,
            void_source,
            heat_source,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(a: f64, k: f64, w: f64) -> TrigMode {
        TrigMode {
            amplitude: a,
            wavevector: vec![k],
            phase: 0.0,
            omega: w,
            time_phase: 0.0,
        }
    }

    #[test]
    fn zero_profile_zero_sources() {
        let m = Material::isotropic(1, 1.0, 1.0);
        let p = TrigProfile::default();
        let e = p.evaluate(&[0.3, 0.0, 0.0], 0.7, &m, TimeDirection::Reversed);
        assert_eq!(e.force, ZERO3);
        assert_eq!((e.void_source, e.heat_source), (0.0, 0.0));
        assert!(p.is_zero());
    }

    #[test]
    fn wave_operator_source() {
        // u = sin(πx)cos(ωt), C = c, ρ: ρf = (cπ² − ρω²) u.
        let mut m = Material::zeroed(1);
        m.elastic[0][0][0][0] = 2.0;
        m.density = 1.5;
        let w = 3.0;
        let p = TrigProfile {
            u: vec![vec![mode(1.0, std::f64::consts::PI, w)]],
            ..Default::default()
        };
        let (x, t) = (0.37, 0.21);
        let e = p.evaluate(&[x, 0.0, 0.0], t, &m, TimeDirection::Reversed);
        let u = (std::f64::consts::PI * x).sin() * (w * t).cos();
        let expect = (2.0 * std::f64::consts::PI.powi(2) - 1.5 * w * w) * u;
        assert!((e.force[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn static_profile_force_balances_stress() {
        let m = Material::isotropic(1, 1.0, 1.0);
        let p = TrigProfile {
            u: vec![vec![mode(0.5, 2.0, 0.0)]],
            ..Default::default()
        };
        let e = p.evaluate(&[0.2, 0.0, 0.0], 0.0, &m, TimeDirection::Reversed);
        assert_eq!(e.velocity, ZERO3);
        // C = λ + 2μ = 3; −div S = 3·4·0.5 sin(0.4)
        assert!((e.force[0] - 6.0 * (0.4f64).sin()).abs() < 1e-14);
    }

    #[test]
    fn jets_match_finite_differences() {
        let p = TrigProfile {
            phi: vec![TrigMode { amplitude: 0.7, wavevector: vec![1.3, -0.4], phase: 0.2, omega: 2.0, time_phase: 0.1 }],
            ..Default::default()
        };
        let x = [0.3, 0.8, 0.0];
        let t = 0.4;
        let (_, j, _) = p.jets(&x, t);
        let h = 1e-6;
        let (_, jp, _) = p.jets(&[x[0] + h, x[1], 0.0], t);
        let (_, jm, _) = p.jets(&[x[0] - h, x[1], 0.0], t);
        assert!((j.grad[0] - (jp.value - jm.value) / (2.0 * h)).abs() < 1e-8);
        assert!((j.hess[1][0] - (jp.grad[1] - jm.grad[1]) / (2.0 * h)).abs() < 1e-8);
        assert!((j.dt_grad[0] - (jp.dt - jm.dt) / (2.0 * h)).abs() < 1e-8);
        let (_, tp, _) = p.jets(&x, t + h);
        let (_, tm, _) = p.jets(&x, t - h);
        assert!((j.dtt - (tp.dt - tm.dt) / (2.0 * h)).abs() < 1e-8);
    }
}
