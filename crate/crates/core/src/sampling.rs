//! Seeded random materials and states for property suites.

use crate::constitutive::{KinematicVector, PointState};
use crate::linalg::{Mat3, SymMatrix, Vec3, ZERO3, ZERO33};
use crate::material::{quadratic_form_size, voigt_len, voigt_pairs, Material};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub struct Sampler {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn vector(&mut self, dim: usize, scale: f64) -> Vec3 {
        let mut v = ZERO3;
        for x in v.iter_mut().take(dim) {
            *x = scale * self.normal();
        }
        v
    }

    pub fn unit_vector(&mut self, dim: usize) -> Vec3 {
        loop {
            let v = self.vector(dim, 1.0);
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n > 1e-8 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }

    pub fn tensor(&mut self, dim: usize, scale: f64) -> Mat3 {
        let mut m = ZERO33;
        for row in m.iter_mut().take(dim) {
            for x in row.iter_mut().take(dim) {
                *x = scale * self.normal();
            }
        }
        m
    }

    pub fn symmetric_tensor(&mut self, dim: usize, scale: f64) -> Mat3 {
        let t = self.tensor(dim, scale);
        let mut s = ZERO33;
        for i in 0..dim {
            for j in 0..dim {
                s[i][j] = 0.5 * (t[i][j] + t[j][i]);
            }
        }
        s
    }

    /// Symmetric positive-definite n×n matrix G Gᵀ/n + shift·I.
    pub fn spd_matrix(&mut self, n: usize, shift: f64) -> SymMatrix {
        let g: Vec<f64> = (0..n * n).map(|_| self.normal()).collect();
        let mut q = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..n {
                    s += g[i * n + k] * g[j * n + k];
                }
                let v = s / n as f64 + if i == j { shift } else { 0.0 };
                q.set_sym(i, j, v);
            }
        }
        q
    }

    /// Admissible material whose stored-energy form is a random SPD matrix,
    /// with random thermal couplings and scalar constants.
    pub fn material(&mut self, dim: usize) -> Material {
        let mut m = Material::zeroed(dim);
        m.inertia = self.uniform(0.5, 2.0);
        m.density = self.uniform(0.5, 2.0);
        let q = self.spd_matrix(quadratic_form_size(dim), 0.2);
        let nv = voigt_len(dim);
        let psi = nv + dim;
        let sqrt_chi = m.inertia.sqrt();
        let pairs = voigt_pairs(dim);
        let scale = |i: usize, j: usize| if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
        for (a, &(i, j)) in pairs.iter().enumerate() {
            let sa = scale(i, j);
            for (b, &(r, s)) in pairs.iter().enumerate() {
                m.set_elastic(i, j, r, s, q.get(a, b) / (sa * scale(r, s)));
            }
            for s in 0..dim {
                m.set_strain_gradient(i, j, s, q.get(a, nv + s) * sqrt_chi / sa);
            }
            let bij = q.get(a, psi) / sa;
            m.strain_void[i][j] = bij;
            m.strain_void[j][i] = bij;
        }
        for i in 0..dim {
            for j in 0..dim {
                m.gradient_stiffness[i][j] = q.get(nv + i, nv + j) * m.inertia;
            }
            m.gradient_void[i] = q.get(nv + i, psi) * sqrt_chi;
        }
        m.void_stiffness = q.get(psi, psi);
        m.thermal_stress = self.symmetric_tensor(dim, 0.3);
        m.thermal_gradient = self.vector(dim, 0.3);
        m.thermal_void = 0.3 * self.normal();
        m.heat_capacity = self.uniform(0.5, 2.0);
        m.memory = self.uniform(0.0, 0.5);
        m.reference_temperature = self.uniform(0.5, 2.0);
        let k = self.spd_matrix(dim, 0.1);
        for i in 0..dim {
            for j in 0..dim {
                m.conductivity[i][j] = k.get(i, j);
            }
        }
        m
    }

    pub fn kinematic(&mut self, dim: usize) -> KinematicVector {
        let e = self.symmetric_tensor(dim, 1.0);
        let pi = self.vector(dim, 1.0);
        let psi = self.normal();
        KinematicVector::new(dim, e, pi, psi)
    }

    pub fn point_state(&mut self, dim: usize) -> PointState {
        PointState {
            dim,
            strain: self.symmetric_tensor(dim, 1.0),
            gamma: self.vector(dim, 1.0),
            kappa: self.vector(dim, 1.0),
            phi: self.normal(),
            phidot: self.normal(),
            theta: self.normal(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::material::{assemble_quadratic_form, spectrum};

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<f64> = {
            let mut s = Sampler::new(7);
            (0..5).map(|_| s.normal()).collect()
        };
        let mut s = Sampler::new(7);
        let b: Vec<f64> = (0..5).map(|_| s.normal()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn random_materials_are_admissible() {
        for dim in 1..=3 {
            let mut s = Sampler::new(dim as u64);
            let m = s.material(dim);
            assert!(m.validate().is_ok(), "{:?}", m.validate().violations);
            let sp = spectrum(&m).unwrap();
            assert!(sp.mu_min >= 0.2 - 1e-12);
            assert!(assemble_quadratic_form(&m).is_symmetric(0.0));
        }
    }
}
