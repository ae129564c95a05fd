//! Explicit time stepping: velocity Verlet for u and φ, explicit midpoint
//! for conduction in θ, midpoint-flux divergences with Neumann data as the
//! outer half-cell flux, and injected Dirichlet values.

use super::grid::{Face, Side};
use super::scenario::{Scenario, ScenarioError};
use super::signal::{ConditionKind, Group};
use crate::constitutive::{energy_w, response_with, KinematicVector, PointState, ResponseState, TimeDirection};
use crate::linalg::{Mat3, Vec3, ZERO3, ZERO33};
use crate::linalg::mat3_eigenvalues;
use crate::material::assemble_quadratic_form;

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("time step {dt:e} exceeds the wave stability limit {dt_max:e}")]
    CflViolation { dt: f64, dt_max: f64 },
    #[error("time step {dt:e} exceeds the explicit diffusion limit {dt_max:e}")]
    DiffusionLimit { dt: f64, dt_max: f64 },
    #[error("thermal growth factor {factor:e} exceeds the budget {limit:e}")]
    BudgetExceeded { factor: f64, limit: f64 },
    #[error("non-finite {field} at node {node} (x = {x:?}), t = {time}")]
    NonFiniteField { field: &'static str, node: usize, x: Vec3, time: f64 },
}

/// Nodal fields at one step. Time is `step·dt`, so reflection t ↦ T − t is
/// exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub step: u64,
    pub dt: f64,
    pub u: Vec<Vec3>,
    /// u̇
    pub v: Vec<Vec3>,
    pub phi: Vec<f64>,
    /// φ̇
    pub w: Vec<f64>,
    pub theta: Vec<f64>,
}

impl SimState {
    pub fn zeros(n: usize, dt: f64) -> Self {
        Self {
            step: 0,
            dt,
            u: vec![ZERO3; n],
            v: vec![ZERO3; n],
            phi: vec![0.0; n],
            w: vec![0.0; n],
            theta: vec![0.0; n],
        }
    }

    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn initial(scenario: &Scenario) -> Self {
        let g = &scenario.grid;
        let mut s = Self::zeros(g.len(), scenario.dt);
        for idx in 0..g.len() {
            let (u, v, phi, w, theta) = scenario.initial_at(&g.position(idx));
            s.u[idx] = u;
            s.v[idx] = v;
            s.phi[idx] = phi;
            s.w[idx] = w;
            s.theta[idx] = theta;
        }
        s
    }

    /// Strains and gradients by the grid derivative operator.
    pub fn point_states(&self, scenario: &Scenario) -> Vec<PointState> {
        point_states(scenario, &self.u, &self.phi, &self.w, &self.theta)
    }

    fn check_finite(&self, scenario: &Scenario) -> Result<(), SolverError> {
        let d = scenario.grid.dim;
        let fields: [(&'static str, Box<dyn Fn(usize) -> bool + '_>); 5] = [
            ("u", Box::new(|i| self.u[i][..d].iter().all(|x| x.is_finite()))),
            ("udot", Box::new(|i| self.v[i][..d].iter().all(|x| x.is_finite()))),
            ("phi", Box::new(|i| self.phi[i].is_finite())),
            ("phidot", Box::new(|i| self.w[i].is_finite())),
            ("theta", Box::new(|i| self.theta[i].is_finite())),
        ];
        for (field, ok) in fields.iter() {
            if let Some(node) = (0..self.phi.len()).find(|&i| !ok(i)) {
                return Err(SolverError::NonFiniteField {
                    field,
                    node,
                    x: scenario.grid.position(node),
                    time: self.time(),
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn point_states(scenario: &Scenario, u: &[Vec3], phi: &[f64], w: &[f64], theta: &[f64]) -> Vec<PointState> {
    point_states_with(scenario, u, phi, w, theta, false)
}

pub(crate) fn point_states_with(
    scenario: &Scenario,
    u: &[Vec3],
    phi: &[f64],
    w: &[f64],
    theta: &[f64],
    accurate: bool,
) -> Vec<PointState> {
    let g = &scenario.grid;
    let deriv = |f: &[f64], axis: usize, out: &mut [f64]| {
        if accurate {
            g.derivative_accurate(f, axis, out)
        } else {
            g.derivative(f, axis, out)
        }
    };
    let gradient = |f: &[f64]| {
        let mut out = vec![ZERO3; f.len()];
        let mut tmp = vec![0.0; f.len()];
        for axis in 0..g.dim {
            deriv(f, axis, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                o[axis] = *t;
            }
        }
        out
    };
    let d = g.dim;
    let n = g.len();
    let mut du = vec![ZERO33; n];
    let mut col = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for i in 0..d {
        for (c, ui) in col.iter_mut().zip(u) {
            *c = ui[i];
        }
        for j in 0..d {
            deriv(&col, j, &mut tmp);
            for (k, t) in tmp.iter().enumerate() {
                du[k][i][j] = *t;
            }
        }
    }
    let gamma = gradient(phi);
    let kappa = gradient(theta);
    (0..n)
        .map(|k| {
            let mut e = ZERO33;
            for i in 0..d {
                for j in 0..d {
                    e[i][j] = 0.5 * (du[k][i][j] + du[k][j][i]);
                }
            }
            PointState {
                dim: d,
                strain: e,
                gamma: gamma[k],
                kappa: kappa[k],
                phi: phi[k],
                phidot: w[k],
                theta: theta[k],
            }
        })
        .collect()
}

pub(crate) fn responses(scenario: &Scenario, states: &[PointState]) -> Vec<ResponseState> {
    states
        .iter()
        .map(|s| response_with(s, &scenario.material, scenario.direction))
        .collect()
}

/// Nodal ∂_b u_a (as `[a][b]`) and ∂_b φ by the grid derivative.
fn nodal_gradients(g: &super::Grid, u: &[Vec3], phi: &[f64]) -> (Vec<Mat3>, Vec<Vec3>) {
    let n = g.len();
    let mut du = vec![ZERO33; n];
    let mut col = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    for b in 0..g.dim {
        for a in 0..g.dim {
            for (c, x) in col.iter_mut().zip(u) {
                *c = x[a];
            }
            g.derivative(&col, b, &mut tmp);
            for (k, v) in tmp.iter().enumerate() {
                du[k][a][b] = *v;
            }
        }
    }
    (du, g.gradient(phi))
}

/// Kinematic vector carrying only the ∂_j parts of a displacement gradient
/// and a void gradient.
fn axis_part(dim: usize, grad_u: &Mat3, grad_phi: &Vec3, j: usize) -> KinematicVector {
    let mut gu = ZERO33;
    let mut gp = ZERO3;
    for a in 0..dim {
        gu[a][j] = grad_u[a][j];
    }
    gp[j] = grad_phi[j];
    KinematicVector::new(dim, gu, gp, 0.0)
}

/// ∫W* in the form the scheme conserves: products of two derivatives along
/// the same axis sit at the midpoints between nodes (two-point
/// differences), all other terms at the nodes with trapezoid weights.
pub fn discrete_stored_energy(scenario: &Scenario, u: &[Vec3], phi: &[f64]) -> f64 {
    let g = &scenario.grid;
    stored_energy_in_box(scenario, u, phi, [0; 3], [g.nodes[0] - 1, g.nodes[1] - 1, g.nodes[2] - 1])
}

/// [`discrete_stored_energy`] over the node box `lo..=hi`, with trapezoid
/// weights of the box itself.
pub(crate) fn stored_energy_in_box(scenario: &Scenario, u: &[Vec3], phi: &[f64], lo: [usize; 3], hi: [usize; 3]) -> f64 {
    let g = &scenario.grid;
    let m = &scenario.material;
    let d = g.dim;
    let inside = |ijk: [usize; 3]| (0..3).all(|a| lo[a] <= ijk[a] && ijk[a] <= hi[a]);
    let axis_w = |a: usize, i: usize| {
        if a >= d {
            1.0
        } else if i == lo[a] || i == hi[a] {
            0.5 * g.h[a]
        } else {
            g.h[a]
        }
    };
    let (du, dphi) = nodal_gradients(g, u, phi);
    let mut total = 0.0;
    for k in 0..g.len() {
        let ijk = g.ijk(k);
        if !inside(ijk) {
            continue;
        }
        let full = KinematicVector::new(d, du[k], dphi[k], phi[k]);
        let mut w = energy_w(&full, m);
        for j in 0..d {
            w -= energy_w(&axis_part(d, &du[k], &dphi[k], j), m);
        }
        total += (0..3).map(|a| axis_w(a, ijk[a])).product::<f64>() * w;
    }
    for j in 0..d {
        let s = g.stride(j);
        let h = g.h[j];
        for k in 0..g.len() {
            let ijk = g.ijk(k);
            if !inside(ijk) || ijk[j] >= hi[j] {
                continue;
            }
            let mut gu = ZERO33;
            let mut gp = ZERO3;
            for a in 0..d {
                gu[a][j] = (u[k + s][a] - u[k][a]) / h;
            }
            gp[j] = (phi[k + s] - phi[k]) / h;
            let w = energy_w(&KinematicVector::new(d, gu, gp, 0.0), m);
            let transverse: f64 = (0..3).filter(|&a| a != j).map(|a| axis_w(a, ijk[a])).product();
            total += h * transverse * w;
        }
    }
    total
}

/// Wave and thermal limits for a scenario.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StabilityBudget {
    /// 0.5·h_min/v_max
    pub dt_max_wave: f64,
    /// Worst-case amplification of the anti-diffusive temperature modes
    /// over the horizon; 1 for dissipative runs.
    pub growth_factor_thermal: f64,
    /// Explicit midpoint limit for the diffusive temperature modes.
    pub dt_max_diffusion: f64,
}

pub const CFL_NUMBER: f64 = 0.5;
pub const THERMAL_BUDGET: f64 = 1e3;

/// Computes the budget; fails with `BudgetExceeded` when the thermal growth
/// factor is above [`THERMAL_BUDGET`].
pub fn stability_budget(scenario: &Scenario) -> Result<StabilityBudget, SolverError> {
    let b = stability_limits(scenario)?;
    if b.growth_factor_thermal > THERMAL_BUDGET {
        return Err(SolverError::BudgetExceeded {
            factor: b.growth_factor_thermal,
            limit: THERMAL_BUDGET,
        });
    }
    Ok(b)
}

/// The budget numbers without the acceptance decision.
pub fn stability_limits(scenario: &Scenario) -> Result<StabilityBudget, SolverError> {
    let m = &scenario.material;
    // Extreme eigenvalues only; admissibility is checked elsewhere, and
    // a budget with K = 0 is meaningful.
    let mu_max = assemble_quadratic_form(m).eigenvalues().last().copied().unwrap_or(0.0);
    let k_max = mat3_eigenvalues(&m.conductivity, m.dim)[m.dim.clamp(1, 3) - 1];
    let h = scenario.grid.h_min();
    let d = scenario.grid.dim as f64;
    let v_max = (mu_max * (1.0 / m.density).max(1.0 / (m.density * m.inertia))).sqrt();
    let diffusivity = k_max / (m.reference_temperature * m.heat_capacity);
    let exponent = diffusivity * d * (std::f64::consts::PI / h).powi(2) * scenario.horizon;
    let growth = if scenario.direction == TimeDirection::Reversed { exponent.exp() } else { 1.0 };
    // Midpoint is stable on [−2, 0]; the grid operator's spectrum is
    // bounded by 4d/h² times the diffusivity.
    let dt_max_diffusion = if diffusivity > 0.0 {
        2.0 * h * h / (4.0 * d * diffusivity)
    } else {
        f64::INFINITY
    };
    Ok(StabilityBudget {
        dt_max_wave: CFL_NUMBER * h / v_max,
        growth_factor_thermal: growth,
        dt_max_diffusion,
    })
}

/// Discrete divergences at one time level, boundary data included.
struct Divergences {
    div_s: Vec<Vec3>,
    div_h: Vec<f64>,
    div_q: Vec<f64>,
}

pub struct Stepper<'a> {
    scenario: &'a Scenario,
    positions: Vec<Vec3>,
    /// Dirichlet owner face per node, per group.
    owners: [Vec<Option<Face>>; 3],
}

const GROUPS: [Group; 3] = [Group::Displacement, Group::Void, Group::Thermal];

fn group_index(g: Group) -> usize {
    match g {
        Group::Displacement => 0,
        Group::Void => 1,
        Group::Thermal => 2,
    }
}

impl<'a> Stepper<'a> {
    pub fn new(scenario: &'a Scenario) -> Self {
        let g = &scenario.grid;
        let positions = (0..g.len()).map(|i| g.position(i)).collect();
        let owners = GROUPS.map(|grp| scenario.boundary.dirichlet_owner(g, grp));
        Self {
            scenario,
            positions,
            owners,
        }
    }

    /// Divergences of S, h and q from fluxes at the midpoints between
    /// neighbouring nodes. Along the flux axis the midpoint derivative is
    /// the two-point difference (a narrow stencil with no odd-even null
    /// mode); transverse derivatives are averaged nodal ones. At a face
    /// node the outer half-cell flux is the prescribed Neumann datum, or
    /// the nodal flux on Dirichlet faces (whose values are injected).
    fn divergences(&self, u: &[Vec3], phi: &[f64], w: &[f64], theta: &[f64], t: f64, thermal_only: bool) -> Divergences {
        let sc = self.scenario;
        let g = &sc.grid;
        let m = &sc.material;
        let d = g.dim;
        let n = g.len();
        let zero = vec![0.0; n];
        let zero3 = vec![ZERO3; n];
        let (u, phi, w) = if thermal_only { (&zero3[..], &zero[..], &zero[..]) } else { (u, phi, w) };

        let (du, dphi) = if thermal_only {
            (vec![ZERO33; n], vec![ZERO3; n])
        } else {
            nodal_gradients(g, u, phi)
        };
        let dtheta = g.gradient(theta);

        // Flux along +e_j: (S_j·, h_j, q_j).
        let flux = |st: &PointState, j: usize| -> (Vec3, f64, f64) {
            let r = response_with(st, m, sc.direction);
            (r.stress[j], r.h[j], r.q[j])
        };
        let state_from = |grad_u: &crate::linalg::Mat3, gp: Vec3, gt: Vec3, p: f64, pd: f64, th: f64| {
            let mut e = ZERO33;
            for a in 0..d {
                for b in 0..d {
                    e[a][b] = 0.5 * (grad_u[a][b] + grad_u[b][a]);
                }
            }
            PointState {
                dim: d,
                strain: e,
                gamma: gp,
                kappa: gt,
                phi: p,
                phidot: pd,
                theta: th,
            }
        };
        let nodal: Vec<PointState> = (0..n)
            .map(|k| state_from(&du[k], dphi[k], dtheta[k], phi[k], w[k], theta[k]))
            .collect();

        let mut out = Divergences {
            div_s: vec![ZERO3; n],
            div_h: vec![0.0; n],
            div_q: vec![0.0; n],
        };
        for j in 0..d {
            let s = g.stride(j);
            let nj = g.nodes[j];
            let h = g.h[j];
            // Midpoint fluxes indexed by the lower node.
            let mut mid: Vec<(Vec3, f64, f64)> = vec![(ZERO3, 0.0, 0.0); n];
            for k in 0..n {
                if g.ijk(k)[j] + 1 >= nj {
                    continue;
                }
                let k1 = k + s;
                let mut gu = ZERO33;
                let mut gp = ZERO3;
                let mut gt = ZERO3;
                for b in 0..d {
                    for a in 0..d {
                        gu[a][b] = if b == j { (u[k1][a] - u[k][a]) / h } else { 0.5 * (du[k][a][b] + du[k1][a][b]) };
                    }
                    gp[b] = if b == j { (phi[k1] - phi[k]) / h } else { 0.5 * (dphi[k][b] + dphi[k1][b]) };
                    gt[b] = if b == j { (theta[k1] - theta[k]) / h } else { 0.5 * (dtheta[k][b] + dtheta[k1][b]) };
                }
                let st = state_from(
                    &gu,
                    gp,
                    gt,
                    0.5 * (phi[k] + phi[k1]),
                    0.5 * (w[k] + w[k1]),
                    0.5 * (theta[k] + theta[k1]),
                );
                mid[k] = flux(&st, j);
            }
            for k in 0..n {
                let i = g.ijk(k)[j];
                let (plus, minus, width) = if i == 0 {
                    (mid[k], self.face_flux(Face { axis: j, side: Side::Low }, k, &nodal[k], t, &flux), 0.5 * h)
                } else if i == nj - 1 {
                    (self.face_flux(Face { axis: j, side: Side::High }, k, &nodal[k], t, &flux), mid[k - s], 0.5 * h)
                } else {
                    (mid[k], mid[k - s], h)
                };
                for a in 0..d {
                    out.div_s[k][a] += (plus.0[a] - minus.0[a]) / width;
                }
                out.div_h[k] += (plus.1 - minus.1) / width;
                out.div_q[k] += (plus.2 - minus.2) / width;
            }
        }
        out
    }

    /// Flux along +e_axis at a face node: n_axis times the prescribed
    /// normal datum on Neumann faces, the nodal flux otherwise.
    fn face_flux(
        &self,
        face: Face,
        k: usize,
        nodal: &PointState,
        t: f64,
        flux: &dyn Fn(&PointState, usize) -> (Vec3, f64, f64),
    ) -> (Vec3, f64, f64) {
        let sc = self.scenario;
        let j = face.axis;
        let mut f = flux(nodal, j);
        let sign = face.normal()[j];
        let x = &self.positions[k];
        let kind = |grp| sc.boundary.condition(face, grp).kind == ConditionKind::Neumann;
        if kind(Group::Displacement) {
            let s = sc.neumann_at(face, Group::Displacement, x, t);
            for a in 0..3 {
                f.0[a] = sign * s[a];
            }
        }
        if kind(Group::Void) {
            f.1 = sign * sc.neumann_at(face, Group::Void, x, t)[0];
        }
        if kind(Group::Thermal) {
            f.2 = sign * sc.neumann_at(face, Group::Thermal, x, t)[0];
        }
        f
    }

    fn g_static(&self, u: &[Vec3], phi: &[f64], w: &[f64], theta: &[f64]) -> Vec<f64> {
        let sc = self.scenario;
        point_states(sc, u, phi, w, theta)
            .iter()
            .map(|p| response_with(p, &sc.material, sc.direction).g_static)
            .collect()
    }

    /// −σ(div q + ρr)/θ₀, the conductive part of a·θ̇.
    fn heat_rate(&self, theta: &[f64], t: f64) -> Vec<f64> {
        let sc = self.scenario;
        let div_q = self.divergences(&[], &[], &[], theta, t, true).div_q;
        let sigma = sc.direction.sign();
        let theta0 = sc.material.reference_temperature;
        (0..div_q.len())
            .map(|k| -sigma * (div_q[k] + sc.source_at(&self.positions[k], t).heat) / theta0)
            .collect()
    }

    /// M:Δe + a·Δγ + mΔφ for the increments (Δu, Δφ) over a step. Taking
    /// the coupling from increments of the kinematic fields, rather than
    /// from the velocities, ties θ to u and φ exactly as ρη is: the
    /// staggered Verlet velocities carry an O(Δt²) offset that an injected
    /// boundary value would turn into an O(h) gradient. Boundary rows are
    /// second order since this acts pointwise on θ.
    fn coupling_increment(&self, du: &[Vec3], dphi: &[f64]) -> Vec<f64> {
        let sc = self.scenario;
        let m = &sc.material;
        let d = sc.grid.dim;
        let zero = vec![0.0; dphi.len()];
        let inc = point_states_with(sc, du, dphi, &zero, &zero, true);
        inc.iter()
            .map(|r| {
                let mut c = m.thermal_void * r.phi;
                for i in 0..d {
                    c += m.thermal_gradient[i] * r.gamma[i];
                    for j in 0..d {
                        c += m.thermal_stress[i][j] * r.strain[i][j];
                    }
                }
                c
            })
            .collect()
    }

    fn inject_vector(&self, group: Group, target: &mut [Vec3], t: f64, rate: bool) {
        for (k, owner) in self.owners[group_index(group)].iter().enumerate() {
            if let Some(face) = owner {
                let (v, r) = self.scenario.dirichlet_at(*face, group, &self.positions[k], t);
                target[k] = if rate { r } else { v };
            }
        }
    }

    fn inject_scalar(&self, group: Group, target: &mut [f64], t: f64, rate: bool) {
        for (k, owner) in self.owners[group_index(group)].iter().enumerate() {
            if let Some(face) = owner {
                let (v, r) = self.scenario.dirichlet_at(*face, group, &self.positions[k], t);
                target[k] = if rate { r[0] } else { v[0] };
            }
        }
    }

    /// Fields with Dirichlet values imposed at the state's time.
    pub fn impose(&self, state: &mut SimState) {
        let t = state.time();
        self.inject_vector(Group::Displacement, &mut state.u, t, false);
        self.inject_vector(Group::Displacement, &mut state.v, t, true);
        self.inject_scalar(Group::Void, &mut state.phi, t, false);
        self.inject_scalar(Group::Void, &mut state.w, t, true);
        self.inject_scalar(Group::Thermal, &mut state.theta, t, false);
    }

    /// Advances one step in place.
    pub fn step(&self, state: &mut SimState) -> Result<(), SolverError> {
        let sc = self.scenario;
        let m = &sc.material;
        let d = sc.grid.dim;
        let n = sc.grid.len();
        let dt = state.dt;
        let t0 = state.time();
        let th = t0 + 0.5 * dt;
        let t1 = (state.step + 1) as f64 * dt;
        let rho = m.density;
        let rho_chi = m.density * m.inertia;
        let sigma_tau = sc.direction.sign() * m.memory;

        let g0 = self.g_static(&state.u, &state.phi, &state.w, &state.theta);
        let f0 = self.divergences(&state.u, &state.phi, &state.w, &state.theta, t0, false);

        // Half kick.
        let mut v_half = state.v.clone();
        let mut w_half = state.w.clone();
        for k in 0..n {
            let src = sc.source_at(&self.positions[k], t0);
            for i in 0..d {
                v_half[k][i] += 0.5 * dt / rho * (f0.div_s[k][i] + src.force[i]);
            }
            w_half[k] += 0.5 * dt / rho_chi * (f0.div_h[k] + sigma_tau * state.w[k] + g0[k] + src.void);
        }
        self.inject_vector(Group::Displacement, &mut v_half, th, true);
        self.inject_scalar(Group::Void, &mut w_half, th, true);

        // Drift.
        let (u0, phi0) = (state.u.clone(), state.phi.clone());
        for k in 0..n {
            for i in 0..d {
                state.u[k][i] += dt * v_half[k][i];
            }
            state.phi[k] += dt * w_half[k];
        }
        state.step += 1;
        self.inject_vector(Group::Displacement, &mut state.u, t1, false);
        self.inject_scalar(Group::Void, &mut state.phi, t1, false);

        // Temperature: explicit midpoint for conduction, exact increments
        // for the coupling.
        let a = m.heat_capacity;
        let du: Vec<Vec3> = (0..n)
            .map(|k| [state.u[k][0] - u0[k][0], state.u[k][1] - u0[k][1], state.u[k][2] - u0[k][2]])
            .collect();
        let dphi: Vec<f64> = (0..n).map(|k| state.phi[k] - phi0[k]).collect();
        let c = self.coupling_increment(&du, &dphi);
        let r0 = self.heat_rate(&state.theta, t0);
        let mut theta_mid: Vec<f64> = (0..n)
            .map(|k| state.theta[k] + (0.5 * dt * r0[k] - 0.5 * c[k]) / a)
            .collect();
        self.inject_scalar(Group::Thermal, &mut theta_mid, th, false);
        let rh = self.heat_rate(&theta_mid, th);
        for k in 0..n {
            state.theta[k] += (dt * rh[k] - c[k]) / a;
        }
        self.inject_scalar(Group::Thermal, &mut state.theta, t1, false);

        // Second half kick; the rate term of g is taken at the new level.
        let g1 = self.g_static(&state.u, &state.phi, &w_half, &state.theta);
        let f1 = self.divergences(&state.u, &state.phi, &w_half, &state.theta, t1, false);
        let denom = 1.0 - 0.5 * dt * sigma_tau / rho_chi;
        for k in 0..n {
            let src = sc.source_at(&self.positions[k], t1);
            for i in 0..d {
                state.v[k][i] = v_half[k][i] + 0.5 * dt / rho * (f1.div_s[k][i] + src.force[i]);
            }
            state.w[k] = (w_half[k] + 0.5 * dt / rho_chi * (f1.div_h[k] + g1[k] + src.void)) / denom;
        }
        self.inject_vector(Group::Displacement, &mut state.v, t1, true);
        self.inject_scalar(Group::Void, &mut state.w, t1, true);
        state.check_finite(sc)
    }
}

/// H-weighted energy totals at one step.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergySample {
    pub step: u64,
    /// ∫ ½(ρu̇·u̇ + ρχφ̇²)
    pub kinetic: f64,
    /// ∫ W*, see [`discrete_stored_energy`]
    pub stored: f64,
    /// ∫ ½aθ²
    pub thermal: f64,
}

impl EnergySample {
    pub fn of(scenario: &Scenario, state: &SimState) -> Self {
        let g = &scenario.grid;
        let m = &scenario.material;
        let d = g.dim;
        let (mut kin, mut th) = (0.0, 0.0);
        for k in 0..g.len() {
            let wgt = g.weight(k);
            let vv: f64 = state.v[k][..d].iter().map(|x| x * x).sum();
            kin += wgt * 0.5 * (m.density * vv + m.density * m.inertia * state.w[k] * state.w[k]);
            th += wgt * 0.5 * m.heat_capacity * state.theta[k] * state.theta[k];
        }
        Self {
            step: state.step,
            kinetic: kin,
            stored: discrete_stored_energy(scenario, &state.u, &state.phi),
            thermal: th,
        }
    }

    pub fn total(&self) -> f64 {
        self.kinetic + self.stored + self.thermal
    }
}

/// Sampled states of one run, with the scenario that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub scenario: Scenario,
    pub frames: Vec<SimState>,
    pub energy: Vec<EnergySample>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.time()).collect()
    }
}

/// Validates, checks the stability budget and integrates to the horizon.
pub fn run(scenario: &Scenario) -> Result<Trajectory, SolverError> {
    let warnings = scenario.validate()?;
    let budget = stability_budget(scenario)?;
    if scenario.steps() > 0 {
        if scenario.dt > budget.dt_max_wave {
            return Err(SolverError::CflViolation {
                dt: scenario.dt,
                dt_max: budget.dt_max_wave,
            });
        }
        if scenario.dt > budget.dt_max_diffusion {
            return Err(SolverError::DiffusionLimit {
                dt: scenario.dt,
                dt_max: budget.dt_max_diffusion,
            });
        }
    }
    run_unchecked(scenario, warnings)
}

/// Integrates without the stability checks (used to demonstrate blow-up).
pub fn run_unchecked(scenario: &Scenario, warnings: Vec<String>) -> Result<Trajectory, SolverError> {
    let stepper = Stepper::new(scenario);
    let mut state = SimState::initial(scenario);
    stepper.impose(&mut state);
    let total = scenario.steps();
    let stride = scenario.output.sample_stride as u64;
    let mut frames = vec![state.clone()];
    let mut energy = vec![EnergySample::of(scenario, &state)];
    while state.step < total {
        stepper.step(&mut state)?;
        if state.step % stride == 0 || state.step == total {
            energy.push(EnergySample::of(scenario, &state));
            frames.push(state.clone());
        }
    }
    Ok(Trajectory {
        scenario: scenario.clone(),
        frames,
        energy,
        warnings,
    })
}

/// Reflects a trajectory in time: s ↦ w(T − s). Odd time derivatives flip
/// sign and the system switches between the dissipative and the reversed
/// form. Applying it twice gives back the input exactly.
pub fn reverse_time(trajectory: &Trajectory) -> Trajectory {
    let mut scenario = trajectory.scenario.clone();
    scenario.direction = scenario.direction.flipped();
    scenario.reflected = !scenario.reflected;
    let total = scenario.steps();
    let frames = trajectory
        .frames
        .iter()
        .rev()
        .map(|f| SimState {
            step: total - f.step,
            dt: f.dt,
            u: f.u.clone(),
            v: f.v.iter().map(|x| [-x[0], -x[1], -x[2]]).collect(),
            phi: f.phi.clone(),
            w: f.w.iter().map(|x| -x).collect(),
            theta: f.theta.clone(),
        })
        .collect();
    let energy = trajectory
        .energy
        .iter()
        .rev()
        .map(|e| EnergySample { step: total - e.step, ..*e })
        .collect();
    Trajectory {
        scenario,
        frames,
        energy,
        warnings: trajectory.warnings.clone(),
    }
}
