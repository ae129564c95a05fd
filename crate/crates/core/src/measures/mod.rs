//! The time-weighted energy measure E(r, t) on slab geometries, its
//! derivatives, and the certificates built on them.

mod checks;
mod identity;
mod report;

pub use checks::{
    check_decay, check_diff_inequality, check_monotonicity, DecayReport, DecaySample, DiffInequalityReport,
    DiffViolation, MeasureError, MonotonicityReport,
};
pub use identity::{check_energy_identity, EnergyIdentityReport, Region, Weight};
pub use report::{fmt_float, json_number, write_series_csv, Float};

use crate::constitutive::{energy_w, PointState};
use crate::linalg::{dot, mat3_vec, Vec3};
use crate::material::{spectrum, zeta_of_lambda, Material};
use crate::solver::{point_states, responses, Trajectory};

/// (λ/2)[ρu̇·u̇ + ρχφ̇² + aθ² + 2W*] + τφ̇² + Kκ·κ/θ₀ at one node.
pub fn energy_density(state: &PointState, velocity: &Vec3, material: &Material, lambda: f64) -> f64 {
    let d = material.dim;
    let m = material;
    let w = energy_w(&state.kinematic(), m);
    let kk = dot(&mat3_vec(&m.conductivity, &state.kappa, d), &state.kappa, d);
    0.5 * lambda
        * (m.density * dot(velocity, velocity, d)
            + m.density * m.inertia * state.phidot * state.phidot
            + m.heat_capacity * state.theta * state.theta
            + 2.0 * w)
        + m.memory * state.phidot * state.phidot
        + kk / m.reference_temperature
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportGeometry {
    pub x0: f64,
    /// Remaining length L = X₁ − x₀.
    pub length: f64,
    pub r_samples: Vec<f64>,
    /// x₁ node index of each plane S_r.
    pub r_index: Vec<usize>,
}

impl SupportGeometry {
    /// Grid-aligned samples r = x_k − x₀ for every `stride`-th node from x₀
    /// up to, but excluding, the far face.
    pub fn slab(grid: &crate::solver::Grid, x0: f64, stride: usize) -> Result<Self, MeasureError> {
        let h = grid.h[0];
        let n = grid.nodes[0];
        let k0f = x0 / h;
        let k0 = k0f.round();
        if !(x0 >= 0.0) || (k0f - k0).abs() > 1e-9 * k0f.max(1.0) || k0 as usize + 1 >= n {
            return Err(MeasureError::Geometry(format!(
                "x0 = {x0} must be a grid node with at least one node beyond it (h = {h}, nodes = {n})"
            )));
        }
        let k0 = k0 as usize;
        let r_index: Vec<usize> = (k0..n - 1).step_by(stride.max(1)).collect();
        Ok(Self {
            x0,
            length: grid.extent[0] - x0,
            r_samples: r_index.iter().map(|&k| (k - k0) as f64 * h).collect(),
            r_index,
        })
    }
}

/// E, its derivatives and I = e^{λr/ζ}E on (r × t) samples, indexed
/// `[r][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSeries {
    pub lambda: f64,
    pub zeta: f64,
    pub r: Vec<f64>,
    pub t: Vec<f64>,
    pub e: Vec<Vec<f64>>,
    pub de_dr: Vec<Vec<f64>>,
    pub de_dt: Vec<Vec<f64>>,
    pub i: Vec<Vec<f64>>,
}

impl MeasureSeries {
    pub fn zeros(lambda: f64, zeta: f64, r: Vec<f64>, t: Vec<f64>) -> Self {
        let z = vec![vec![0.0; t.len()]; r.len()];
        Self {
            lambda,
            zeta,
            r,
            t,
            e: z.clone(),
            de_dr: z.clone(),
            de_dt: z.clone(),
            i: z,
        }
    }
}

/// Nodal energy density of every frame.
fn densities(trajectory: &Trajectory, lambda: f64) -> Vec<Vec<f64>> {
    let sc = &trajectory.scenario;
    let m = &sc.material;
    trajectory
        .frames
        .iter()
        .map(|f| {
            let ps = f.point_states(sc);
            ps.iter().zip(&f.v).map(|(p, v)| energy_density(p, v, m, lambda)).collect()
        })
        .collect()
}

/// Plane integrals c_i = ∫_{x₁ = x_i} g da for every x₁ index.
fn plane_integrals(grid: &crate::solver::Grid, g: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; grid.nodes[0]];
    for (k, v) in g.iter().enumerate() {
        c[grid.ijk(k)[0]] += grid.surface_weight(k, 0) * v;
    }
    c
}

/// ∫_{x₁ ≥ x_k} by the trapezoid rule, for every k.
fn slab_integrals(h: f64, c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    for k in (0..n.saturating_sub(1)).rev() {
        out[k] = out[k + 1] + 0.5 * h * (c[k] + c[k + 1]);
    }
    out
}

/// E(r,t) by trapezoid quadrature in time and space over B_r;
/// ∂E/∂t as the volume integral of the weighted density at t; ∂E/∂r as
/// minus the weighted surface-time integral over S_r.
pub fn compute_e(trajectory: &Trajectory, geometry: &SupportGeometry, lambda: f64) -> Result<MeasureSeries, MeasureError> {
    let sc = &trajectory.scenario;
    let sp = spectrum(&sc.material).map_err(|e| MeasureError::Material(e.to_string()))?;
    let decay = zeta_of_lambda(&sp, &sc.material, lambda).map_err(|e| MeasureError::Material(e.to_string()))?;
    let grid = &sc.grid;
    if geometry.r_index.iter().any(|&k| k + 1 >= grid.nodes[0]) {
        return Err(MeasureError::Geometry("r sample outside the grid".into()));
    }
    let t = trajectory.times();
    let t_max = t.last().copied().unwrap_or(0.0);
    if !(lambda * t_max).exp().is_finite() {
        return Err(MeasureError::WeightOverflow { lambda, horizon: t_max });
    }
    let mut series = MeasureSeries::zeros(lambda, decay.zeta, geometry.r_samples.clone(), t.clone());
    let dens = densities(trajectory, lambda);
    let h = grid.h[0];
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    for (n, g) in dens.iter().enumerate() {
        let weight = (lambda * t[n]).exp();
        let c = plane_integrals(grid, g);
        let vol = slab_integrals(h, &c);
        let wc: Vec<f64> = c.iter().map(|x| weight * x).collect();
        let wv: Vec<f64> = vol.iter().map(|x| weight * x).collect();
        for (ri, &k) in geometry.r_index.iter().enumerate() {
            series.de_dt[ri][n] = wv[k];
            if let Some((pc, pv)) = &prev {
                let dt = t[n] - t[n - 1];
                series.e[ri][n] = series.e[ri][n - 1] + 0.5 * dt * (pv[k] + wv[k]);
                series.de_dr[ri][n] = series.de_dr[ri][n - 1] - 0.5 * dt * (pc[k] + wc[k]);
            }
        }
        prev = Some((wc, wv));
    }
    for (ri, r) in series.r.iter().enumerate() {
        let f = (lambda * r / decay.zeta).exp();
        for n in 0..t.len() {
            series.i[ri][n] = f * series.e[ri][n];
        }
    }
    Ok(series)
}

/// ∫_{S_r} e^{λt}[s·u̇ + hφ̇ − qθ/θ₀] da with n the outward normal of B_r
/// (−e₁), and the matching integral of (ζ/λ)·density that bounds it.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePower {
    pub t: Vec<f64>,
    pub power: Vec<f64>,
    pub bound: Vec<f64>,
}

pub fn surface_power(trajectory: &Trajectory, plane_index: usize, lambda: f64) -> Result<SurfacePower, MeasureError> {
    let sc = &trajectory.scenario;
    let m = &sc.material;
    let grid = &sc.grid;
    if plane_index >= grid.nodes[0] {
        return Err(MeasureError::Geometry(format!("plane index {plane_index} outside the grid")));
    }
    let sp = spectrum(m).map_err(|e| MeasureError::Material(e.to_string()))?;
    let decay = zeta_of_lambda(&sp, m, lambda).map_err(|e| MeasureError::Material(e.to_string()))?;
    let d = grid.dim;
    let nodes = grid.slice_nodes(0, plane_index);
    let mut out = SurfacePower {
        t: trajectory.times(),
        power: Vec::new(),
        bound: Vec::new(),
    };
    for f in &trajectory.frames {
        let weight = (lambda * f.time()).exp();
        let ps = point_states(sc, &f.u, &f.phi, &f.w, &f.theta);
        let rs = responses(sc, &ps);
        let (mut p, mut b) = (0.0, 0.0);
        for &k in &nodes {
            let a = grid.surface_weight(k, 0);
            let r = &rs[k];
            // n = −e₁
            let mut sv = 0.0;
            for i in 0..d {
                sv -= r.stress[0][i] * f.v[k][i];
            }
            let flux = sv - r.h[0] * f.w[k] + f.theta[k] * r.q[0] / m.reference_temperature;
            p += a * flux;
            b += a * decay.zeta / lambda * energy_density(&ps[k], &f.v[k], m, lambda);
        }
        out.power.push(weight * p);
        out.bound.push(weight * b);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO3;

    #[test]
    fn density_examples() {
        let m = Material::isotropic(3, 1.0, 1.0);
        assert_eq!(energy_density(&PointState::zero(3), &ZERO3, &m, 4.0), 0.0);
        let mut m = m;
        m.density = 2.0;
        assert_eq!(energy_density(&PointState::zero(3), &[1.0, 0.0, 0.0], &m, 4.0), 4.0);
    }

    #[test]
    fn slab_trapezoid() {
        let c = [1.0, 1.0, 1.0, 1.0, 1.0];
        let v = slab_integrals(0.5, &c);
        assert_eq!(v, vec![2.0, 1.5, 1.0, 0.5, 0.0]);
        let c = [0.0, 1.0, 2.0];
        let v = slab_integrals(1.0, &c);
        // ∫_0^2 x dx = 2, ∫_1^2 x dx = 1.5
        assert_eq!(v, vec![2.0, 1.5, 0.0]);
    }
}
