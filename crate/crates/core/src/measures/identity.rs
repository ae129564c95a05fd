//! Discrete check of the weighted energy balance on a box of grid nodes.

use super::MeasureError;
use crate::linalg::{dot, mat3_vec};
use crate::solver::{point_states_with, ConditionKind, Face, Group, Side, responses, stored_energy_in_box, Grid, Trajectory};

/// Node-index box, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl Region {
    pub fn whole(grid: &Grid) -> Self {
        Self {
            lo: [0; 3],
            hi: [grid.nodes[0] - 1, grid.nodes[1] - 1, grid.nodes[2] - 1],
        }
    }

    /// The slab x₁ ≥ x_k.
    pub fn slab(grid: &Grid, k: usize) -> Self {
        let mut r = Self::whole(grid);
        r.lo[0] = k;
        r
    }

    fn check(&self, grid: &Grid) -> Result<(), MeasureError> {
        for a in 0..3 {
            let used = a < grid.dim;
            if self.hi[a] >= grid.nodes[a] || (used && self.lo[a] >= self.hi[a]) || self.lo[a] > self.hi[a] {
                return Err(MeasureError::Geometry(format!("region {self:?} is empty or leaves the grid")));
            }
        }
        Ok(())
    }

    fn contains(&self, ijk: [usize; 3]) -> bool {
        (0..3).all(|a| self.lo[a] <= ijk[a] && ijk[a] <= self.hi[a])
    }

    fn axis_weight(&self, grid: &Grid, a: usize, i: usize) -> f64 {
        if a >= grid.dim {
            1.0
        } else if i == self.lo[a] || i == self.hi[a] {
            0.5 * grid.h[a]
        } else {
            grid.h[a]
        }
    }

    fn weight(&self, grid: &Grid, ijk: [usize; 3]) -> f64 {
        (0..3).map(|a| self.axis_weight(grid, a, ijk[a])).product()
    }

    fn face_weight(&self, grid: &Grid, ijk: [usize; 3], axis: usize) -> f64 {
        (0..3).filter(|&a| a != axis).map(|a| self.axis_weight(grid, a, ijk[a])).product()
    }
}

/// Time weight e^{rate·(t − offset)}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    pub rate: f64,
    pub offset: f64,
}

impl Weight {
    pub const NONE: Weight = Weight { rate: 0.0, offset: 0.0 };

    pub fn at(&self, t: f64) -> f64 {
        (self.rate * (t - self.offset)).exp()
    }
}

/// Terms of content(t) − content(0) = bulk + boundary + sources, with
/// trapezoid quadrature in time over the stored frames.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyIdentityReport {
    pub time: f64,
    pub content_final: f64,
    pub content_initial: f64,
    /// ∫∫ w'·½(…) + σw(τφ̇² + Kκ·κ/θ₀)
    pub bulk: f64,
    pub boundary: f64,
    pub sources: f64,
    pub residual: f64,
    pub scale: f64,
    /// |residual|/scale, or 0 when every term vanishes.
    pub relative: f64,
    /// Largest relative residual over all stored times.
    pub max_relative: f64,
}

struct FrameTerms {
    content: f64,
    bulk: f64,
    boundary: f64,
    sources: f64,
}

pub fn check_energy_identity(
    trajectory: &Trajectory,
    region: Region,
    weight: Weight,
) -> Result<EnergyIdentityReport, MeasureError> {
    let sc = &trajectory.scenario;
    let grid = &sc.grid;
    region.check(grid)?;
    if trajectory.frames.is_empty() {
        return Err(MeasureError::Geometry("trajectory has no frames".into()));
    }
    let m = &sc.material;
    let d = grid.dim;
    let sigma = sc.direction.sign();
    let theta0 = m.reference_temperature;

    let terms: Vec<FrameTerms> = trajectory
        .frames
        .iter()
        .map(|f| {
            let t = f.time();
            let w = weight.at(t);
            // Second-order boundary rows keep the face fluxes accurate.
            let ps = point_states_with(sc, &f.u, &f.phi, &f.w, &f.theta, true);
            let rs = responses(sc, &ps);
            // Stored energy in the quadrature the scheme conserves.
            let stored = stored_energy_in_box(sc, &f.u, &f.phi, region.lo, region.hi);
            let mut out = FrameTerms {
                content: w * stored,
                bulk: 0.0,
                boundary: 0.0,
                sources: 0.0,
            };
            for k in 0..grid.len() {
                let ijk = grid.ijk(k);
                if !region.contains(ijk) {
                    continue;
                }
                let p = &ps[k];
                let v = &f.v[k];
                let half = 0.5
                    * (m.density * dot(v, v, d)
                        + m.density * m.inertia * p.phidot * p.phidot
                        + m.heat_capacity * p.theta * p.theta);
                let kk = dot(&mat3_vec(&m.conductivity, &p.kappa, d), &p.kappa, d);
                let dissipation = m.memory * p.phidot * p.phidot + kk / theta0;
                let src = sc.source_at(&grid.position(k), t);
                let supply = dot(&src.force, v, d) + src.void * p.phidot - sigma * src.heat * p.theta / theta0;
                let vw = region.weight(grid, ijk);
                out.content += vw * w * half;
                out.bulk += vw * w * (weight.rate * half + sigma * dissipation);
                out.sources += vw * w * supply;

                for axis in 0..d {
                    let side = if ijk[axis] == region.lo[axis] {
                        Side::Low
                    } else if ijk[axis] == region.hi[axis] {
                        Side::High
                    } else {
                        continue;
                    };
                    let face = Face { axis, side };
                    let sign = face.normal()[axis];
                    let r = &rs[k];
                    let mut sn = [0.0; 3];
                    for i in 0..d {
                        sn[i] = sign * r.stress[axis][i];
                    }
                    let mut hn = sign * r.h[axis];
                    let mut qn = sign * r.q[axis];
                    // On the body's own faces the Neumann data are the flux.
                    let on_body = match side {
                        Side::Low => ijk[axis] == 0,
                        Side::High => ijk[axis] + 1 == grid.nodes[axis],
                    };
                    if on_body {
                        let x = grid.position(k);
                        let neumann = |grp| sc.boundary.condition(face, grp).kind == ConditionKind::Neumann;
                        if neumann(Group::Displacement) {
                            sn = sc.neumann_at(face, Group::Displacement, &x, t);
                        }
                        if neumann(Group::Void) {
                            hn = sc.neumann_at(face, Group::Void, &x, t)[0];
                        }
                        if neumann(Group::Thermal) {
                            qn = sc.neumann_at(face, Group::Thermal, &x, t)[0];
                        }
                    }
                    let flux = dot(&sn, v, d) + hn * p.phidot - sigma * p.theta * qn / theta0;
                    out.boundary += region.face_weight(grid, ijk, axis) * w * flux;
                }
            }
            out.bulk += weight.rate * w * stored;
            out
        })
        .collect();

    let times = trajectory.times();
    let (mut bulk, mut boundary, mut sources) = (0.0, 0.0, 0.0);
    let mut max_relative: f64 = 0.0;
    let mut last = None;
    for n in 0..terms.len() {
        if n > 0 {
            let h = 0.5 * (times[n] - times[n - 1]);
            bulk += h * (terms[n - 1].bulk + terms[n].bulk);
            boundary += h * (terms[n - 1].boundary + terms[n].boundary);
            sources += h * (terms[n - 1].sources + terms[n].sources);
        }
        let (c1, c0) = (terms[n].content, terms[0].content);
        let residual = c1 - c0 - bulk - boundary - sources;
        let scale = [c1, c0, bulk, boundary, sources].iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let relative = if scale > 0.0 { residual.abs() / scale } else { 0.0 };
        max_relative = max_relative.max(relative);
        last = Some(EnergyIdentityReport {
            time: times[n],
            content_final: c1,
            content_initial: c0,
            bulk,
            boundary,
            sources,
            residual,
            scale,
            relative,
            max_relative,
        });
    }
    Ok(last.expect("at least one frame"))
}
