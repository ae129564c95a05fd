//! Seeded property suites over random admissible materials: Rayleigh
//! quotients of the stored-energy form and the pointwise inequalities.

use crate::constitutive::{
    check_cauchy_schwarz, check_flux_bound, check_hat_bound, check_stress_bound, check_surface_power_bound,
    check_tensor_inequality, Bound,
};
use crate::material::{assemble_quadratic_form, spectrum, zeta_of_lambda, Material, Spectrum};
use crate::sampling::Sampler;

/// Free parameters tried in the ϵ-dependent bounds.
pub const EPSILONS: [f64; 3] = [0.1, 1.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct RayleighCheck {
    pub dim: usize,
    pub mu_min: f64,
    pub mu_max: f64,
    /// Extremes of the sampled quotients.
    pub quotient_min: f64,
    pub quotient_max: f64,
    pub samples: usize,
    pub violations: usize,
}

/// zᵀQz/zᵀz for `quotients` random z on each of `materials` random
/// materials, cycling d = 1, 2, 3; a quotient outside [μ_m − slack, μ_M +
/// slack] is a violation.
pub fn rayleigh_suite(seed: u64, materials: usize, quotients: usize, slack: f64) -> Vec<RayleighCheck> {
    let mut s = Sampler::new(seed);
    (0..materials)
        .map(|i| {
            let dim = 1 + i % 3;
            let m = s.material(dim);
            let sp = spectrum(&m).expect("sampled materials are admissible");
            let q = assemble_quadratic_form(&m);
            let mut c = RayleighCheck {
                dim,
                mu_min: sp.mu_min,
                mu_max: sp.mu_max,
                quotient_min: f64::INFINITY,
                quotient_max: f64::NEG_INFINITY,
                samples: quotients,
                violations: 0,
            };
            for _ in 0..quotients {
                let z: Vec<f64> = (0..q.n()).map(|_| s.normal()).collect();
                let r = q.quadratic(&z) / z.iter().map(|x| x * x).sum::<f64>();
                c.quotient_min = c.quotient_min.min(r);
                c.quotient_max = c.quotient_max.max(r);
                if r < sp.mu_min - slack || r > sp.mu_max + slack {
                    c.violations += 1;
                }
            }
            c
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    /// Largest (lhs − rhs)/rhs seen; negative when every sample has room.
    pub worst: f64,
}

impl InequalityCheck {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            samples: 0,
            violations: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, b: Bound, rel: f64) {
        self.samples += 1;
        if !b.holds(rel) {
            self.violations += 1;
        }
        if b.rhs > 0.0 {
            self.worst = self.worst.max((b.lhs - b.rhs) / b.rhs);
        }
    }
}

/// Every pointwise inequality on `states` random states each, spread over
/// a few random materials per dimension.
pub fn inequality_suite(seed: u64, states: usize, rel: f64) -> Vec<InequalityCheck> {
    let mut s = Sampler::new(seed);
    let mut checks = vec![
        InequalityCheck::new("cauchy_schwarz"),
        InequalityCheck::new("hat_bound"),
    ];
    for e in EPSILONS {
        checks.push(InequalityCheck::new(format!("stress_bound(eps={e})")));
    }
    checks.push(InequalityCheck::new("flux_bound"));
    for e in EPSILONS {
        checks.push(InequalityCheck::new(format!("tensor(eps={e})")));
    }
    checks.push(InequalityCheck::new("surface_power"));

    let pool: Vec<(Material, Spectrum)> = (0..9)
        .map(|i| {
            let m = s.material(1 + i % 3);
            let sp = spectrum(&m).expect("sampled materials are admissible");
            (m, sp)
        })
        .collect();
    for k in 0..states {
        let (m, sp) = &pool[k % pool.len()];
        let d = m.dim;
        let e = s.kinematic(d);
        let f = s.kinematic(d);
        let state = s.point_state(d);
        let mut c = 0;
        let mut next = |b: Bound| {
            checks[c].record(b, rel);
            c += 1;
        };
        next(check_cauchy_schwarz(&e, &f, m));
        next(check_hat_bound(&e, m, sp));
        for eps in EPSILONS {
            next(check_stress_bound(&state, m, sp, eps).expect("positive epsilon"));
        }
        next(check_flux_bound(&s.vector(d, 1.0), m, sp));
        let (l, g) = (s.tensor(d, 1.0), s.tensor(d, 1.0));
        for eps in EPSILONS {
            next(check_tensor_inequality(&l, &g, d, eps).expect("positive epsilon"));
        }
        let lambda = 10f64.powf(s.uniform(-2.0, 2.0));
        let decay = zeta_of_lambda(sp, m, lambda).expect("positive lambda");
        let v = s.vector(d, 1.0);
        let n = s.unit_vector(d);
        next(check_surface_power_bound(&state, &v, &n, m, sp, &decay));
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass_and_repeat() {
        let r = rayleigh_suite(3, 3, 200, 1e-9);
        assert!(r.iter().all(|c| c.violations == 0));
        assert_eq!(r, rayleigh_suite(3, 3, 200, 1e-9));
        let q = inequality_suite(3, 300, 1e-10);
        assert_eq!(q.len(), 10);
        assert!(q.iter().all(|c| c.violations == 0 && c.samples == 300), "{q:?}");
    }
}
