//! Material coefficients of a homogeneous, anisotropic porous thermoelastic
//! body, their admissibility checks, and the scalar constants that drive the
//! spatial decay estimate.
//!
//! Tensors are held in full component form (`c[i][j][r][s]`, ...) so that any
//! symmetry violation is representable and can be reported. Files use the
//! packed ordering of [`voigt_pairs`].

mod decay;
mod file;
mod spectrum;

pub use decay::{
    epsilon_of_lambda, epsilon_residual, feasibility_window, optimize_lambda, zeta_of_lambda,
    DecayError, DecayParameters, FeasibilityWindow, LambdaChoice,
};
pub use file::{MaterialFile, PackedMaterial};
pub use spectrum::{assemble_quadratic_form, quadratic_form_size, scaled_coordinates, spectrum, Spectrum};

use crate::linalg::{mat3_eigenvalues, Mat3, Vec3, ZERO3, ZERO33};
use std::fmt;

pub type Tensor3 = [[[f64; 3]; 3]; 3];
pub type Tensor4 = [[[[f64; 3]; 3]; 3]; 3];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("coefficient array `{key}` has {got} entries, expected {expected} for dim {dim}")]
    DimensionMismatch {
        key: &'static str,
        got: usize,
        expected: usize,
        dim: usize,
    },
    #[error("quadratic form is not positive definite: smallest eigenvalue {mu_m:e}")]
    FormNotPositiveDefinite { mu_m: f64 },
    #[error("conductivity is not positive definite: smallest eigenvalue {k_m:e}")]
    ConductivityNotPositiveDefinite { k_m: f64 },
    #[error("{0}")]
    Parse(String),
}

/// Index pairs (i ≤ j) in packed order: 11, 22, 33, 23, 13, 12.
pub fn voigt_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        1 => &[(0, 0)],
        2 => &[(0, 0), (1, 1), (0, 1)],
        3 => &[(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
        _ => &[],
    }
}

pub fn voigt_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Coefficients of the constitutive law. Field comments give the usual symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub dim: usize,
    /// C_ijrs
    pub elastic: Tensor4,
    /// D_ijs, couples strain with the void-fraction gradient.
    pub strain_gradient: Tensor3,
    /// A_ij
    pub gradient_stiffness: Mat3,
    /// B_ij, couples strain with the void fraction.
    pub strain_void: Mat3,
    /// b_i
    pub gradient_void: Vec3,
    /// M_ij
    pub thermal_stress: Mat3,
    /// a_i
    pub thermal_gradient: Vec3,
    /// ξ
    pub void_stiffness: f64,
    /// m
    pub thermal_void: f64,
    /// a, entropy per unit temperature.
    pub heat_capacity: f64,
    /// τ, rate coefficient of the intrinsic equilibrated body force.
    pub memory: f64,
    /// K_ij
    pub conductivity: Mat3,
    /// ρ
    pub density: f64,
    /// χ
    pub inertia: f64,
    /// θ₀
    pub reference_temperature: f64,
}

impl Material {
    /// All coupling and stiffness coefficients zero, unit scalars.
    /// Not admissible until stiffnesses and conductivity are filled in.
    pub fn zeroed(dim: usize) -> Self {
        Self {
            dim,
            elastic: [[[[0.0; 3]; 3]; 3]; 3],
            strain_gradient: [[[0.0; 3]; 3]; 3],
            gradient_stiffness: ZERO33,
            strain_void: ZERO33,
            gradient_void: ZERO3,
            thermal_stress: ZERO33,
            thermal_gradient: ZERO3,
            void_stiffness: 0.0,
            thermal_void: 0.0,
            heat_capacity: 1.0,
            memory: 0.0,
            conductivity: ZERO33,
            density: 1.0,
            inertia: 1.0,
            reference_temperature: 1.0,
        }
    }

    /// Isotropic elasticity C = λ δδ + μ(δδ + δδ) with decoupled void and
    /// thermal fields.
    pub fn isotropic(dim: usize, lame_lambda: f64, lame_mu: f64) -> Self {
        let mut m = Self::zeroed(dim);
        let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        for i in 0..dim {
            for j in 0..dim {
                for r in 0..dim {
                    for s in 0..dim {
                        m.elastic[i][j][r][s] = lame_lambda * delta(i, j) * delta(r, s)
                            + lame_mu * (delta(i, r) * delta(j, s) + delta(i, s) * delta(j, r));
                    }
                }
            }
        }
        for i in 0..dim {
            m.gradient_stiffness[i][i] = 1.0;
            m.conductivity[i][i] = 1.0;
        }
        m.void_stiffness = 1.0;
        m
    }

    /// Sets C_ijrs and all its symmetric images.
    pub fn set_elastic(&mut self, i: usize, j: usize, r: usize, s: usize, v: f64) {
        for (a, b) in [(i, j), (j, i)] {
            for (c, d) in [(r, s), (s, r)] {
                self.elastic[a][b][c][d] = v;
                self.elastic[c][d][a][b] = v;
            }
        }
    }

    /// Sets D_ijs and D_jis.
    pub fn set_strain_gradient(&mut self, i: usize, j: usize, s: usize, v: f64) {
        self.strain_gradient[i][j][s] = v;
        self.strain_gradient[j][i][s] = v;
    }

    /// M² = M_ijM_ij + a_ia_i/χ. The body is homogeneous, so the maximum
    /// over the closure of the body is this value.
    pub fn thermal_coupling_bound(&self) -> f64 {
        let d = self.dim;
        let mut mm = 0.0;
        for i in 0..d {
            for j in 0..d {
                mm += self.thermal_stress[i][j] * self.thermal_stress[i][j];
            }
        }
        let aa: f64 = (0..d).map(|i| self.thermal_gradient[i] * self.thermal_gradient[i]).sum();
        mm + aa / self.inertia
    }

    /// Symmetry and positivity checks. Positive definiteness of the stored
    /// energy and of K is judged from their spectra.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let d = self.dim;
        if !(1..=3).contains(&d) {
            report.push(Violation::new("dim", vec![d], d as f64, "dimension must be 1, 2 or 3"));
            return report;
        }
        let tol = |x: f64, y: f64| (x - y).abs() <= SYMMETRY_TOL * (1.0 + x.abs().max(y.abs()));

        for i in 0..d {
            for j in 0..d {
                for r in 0..d {
                    for s in 0..d {
                        let c = self.elastic[i][j][r][s];
                        let major = self.elastic[r][s][i][j];
                        if !tol(c, major) && (i, j) < (r, s) {
                            report.push(Violation::new(
                                "C_ijrs = C_rsij",
                                vec![i + 1, j + 1, r + 1, s + 1],
                                (c - major).abs(),
                                "major symmetry of the elasticity tensor",
                            ));
                        }
                        let minor = self.elastic[j][i][r][s];
                        if !tol(c, minor) && i < j {
                            report.push(Violation::new(
                                "C_ijrs = C_jirs",
                                vec![i + 1, j + 1, r + 1, s + 1],
                                (c - minor).abs(),
                                "minor symmetry of the elasticity tensor",
                            ));
                        }
                    }
                }
            }
        }
        for i in 0..d {
            for j in (i + 1)..d {
                for s in 0..d {
                    let a = self.strain_gradient[i][j][s];
                    let b = self.strain_gradient[j][i][s];
                    if !tol(a, b) {
                        report.push(Violation::new(
                            "D_ijs = D_jis",
                            vec![i + 1, j + 1, s + 1],
                            (a - b).abs(),
                            "symmetry of the strain/void-gradient coupling",
                        ));
                    }
                }
            }
        }
        for (name, m) in [
            ("A_ij = A_ji", &self.gradient_stiffness),
            ("B_ij = B_ji", &self.strain_void),
            ("M_ij = M_ji", &self.thermal_stress),
            ("K_ij = K_ji", &self.conductivity),
        ] {
            for i in 0..d {
                for j in (i + 1)..d {
                    if !tol(m[i][j], m[j][i]) {
                        report.push(Violation::new(
                            name,
                            vec![i + 1, j + 1],
                            (m[i][j] - m[j][i]).abs(),
                            "tensor must be symmetric",
                        ));
                    }
                }
            }
        }
        for (name, v, strict) in [
            ("tau >= 0", self.memory, false),
            ("rho > 0", self.density, true),
            ("chi > 0", self.inertia, true),
            ("a > 0", self.heat_capacity, true),
            ("theta0 > 0", self.reference_temperature, true),
        ] {
            let bad = if strict { !(v > 0.0) } else { !(v >= 0.0) };
            if bad {
                report.push(Violation::new(name, vec![], v, "scalar out of range"));
            }
        }
        let all_finite = self.coefficients_finite();
        if !all_finite {
            report.push(Violation::new("finite", vec![], f64::NAN, "non-finite coefficient"));
            return report;
        }

        let k = mat3_eigenvalues(&self.conductivity, d);
        if k[0] <= 0.0 {
            report.push(Violation::new(
                "K positive definite",
                vec![],
                k[0],
                "smallest conductivity eigenvalue must be positive",
            ));
        }
        if self.inertia > 0.0 {
            let q = assemble_quadratic_form(self);
            let e = q.eigenvalues();
            if e[0] <= 0.0 {
                report.push(Violation::new(
                    "W positive definite",
                    vec![],
                    e[0],
                    "smallest eigenvalue of the stored-energy form must be positive",
                ));
            }
        }
        report
    }

    fn coefficients_finite(&self) -> bool {
        let d = self.dim;
        let mut ok = [
            self.void_stiffness,
            self.thermal_void,
            self.heat_capacity,
            self.memory,
            self.density,
            self.inertia,
            self.reference_temperature,
        ]
        .iter()
        .all(|v| v.is_finite());
        for i in 0..d {
            ok &= self.gradient_void[i].is_finite() && self.thermal_gradient[i].is_finite();
            for j in 0..d {
                ok &= self.gradient_stiffness[i][j].is_finite()
                    && self.strain_void[i][j].is_finite()
                    && self.thermal_stress[i][j].is_finite()
                    && self.conductivity[i][j].is_finite();
                for r in 0..d {
                    ok &= self.strain_gradient[i][j][r].is_finite();
                    for s in 0..d {
                        ok &= self.elastic[i][j][r][s].is_finite();
                    }
                }
            }
        }
        ok
    }

    /// Scales every coefficient of the stored-energy form (C, D, A, B, b, ξ).
    pub fn scale_stored_energy(&self, c: f64) -> Self {
        let mut m = self.clone();
        for a in m.elastic.iter_mut().flatten().flatten().flatten() {
            *a *= c;
        }
        for a in m.strain_gradient.iter_mut().flatten().flatten() {
            *a *= c;
        }
        for a in m.gradient_stiffness.iter_mut().flatten() {
            *a *= c;
        }
        for a in m.strain_void.iter_mut().flatten() {
            *a *= c;
        }
        for a in m.gradient_void.iter_mut() {
            *a *= c;
        }
        m.void_stiffness *= c;
        m
    }
}

const SYMMETRY_TOL: f64 = 1e-12;

/// One violated admissibility condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub relation: &'static str,
    /// One-based component indices of the offending entry, if any.
    pub indices: Vec<usize>,
    pub magnitude: f64,
    pub detail: &'static str,
}

impl Violation {
    fn new(relation: &'static str, indices: Vec<usize>, magnitude: f64, detail: &'static str) -> Self {
        Self {
            relation,
            indices,
            magnitude,
            detail,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if !self.indices.is_empty() {
            let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
            write!(f, " at ({})", idx.join(","))?;
        }
        write!(f, ": {} (magnitude {:e})", self.detail, self.magnitude)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, relation: &str) -> bool {
        self.violations.iter().any(|v| v.relation == relation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isotropic_material_is_admissible() {
        for dim in 1..=3 {
            let m = Material::isotropic(dim, 1.5, 1.0);
            let r = m.validate();
            assert!(r.is_ok(), "dim {dim}: {:?}", r.violations);
        }
    }

    #[test]
    fn broken_elastic_symmetry_is_named() {
        let mut m = Material::isotropic(2, 1.0, 1.0);
        m.elastic[0][0][0][1] = 0.3; // C_1112 without its images
        let r = m.validate();
        assert!(r.mentions("C_ijrs = C_rsij"));
        let v = r
            .violations
            .iter()
            .find(|v| v.relation == "C_ijrs = C_rsij")
            .unwrap();
        assert_eq!(v.indices, vec![1, 1, 1, 2]);
        assert!((v.magnitude - 0.3).abs() < 1e-15);
    }

    #[test]
    fn minor_symmetry_violation_flagged() {
        let mut m = Material::isotropic(2, 1.0, 1.0);
        m.elastic[0][1][0][0] = 0.2;
        m.elastic[0][0][0][1] = 0.2; // keeps C_1211 = C_1112
        let r = m.validate();
        assert!(r.mentions("C_ijrs = C_jirs"));
    }

    #[test]
    fn indefinite_conductivity_flagged() {
        // eigenvalues 3 and -1
        let mut m = Material::isotropic(2, 1.0, 1.0);
        m.conductivity = [[1.0, 2.0, 0.0], [2.0, 1.0, 0.0], [0.0; 3]];
        let r = m.validate();
        let v = r.violations.iter().find(|v| v.relation == "K positive definite").unwrap();
        assert!((v.magnitude + 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_ranges() {
        let mut m = Material::isotropic(1, 1.0, 1.0);
        m.memory = -0.1;
        m.density = 0.0;
        let r = m.validate();
        assert!(r.mentions("tau >= 0"));
        assert!(r.mentions("rho > 0"));
        assert!(!r.mentions("chi > 0"));
    }

    #[test]
    fn coupling_bound_arithmetic() {
        let mut m = Material::isotropic(3, 1.0, 1.0);
        m.thermal_stress[0][0] = 3.0;
        m.thermal_gradient = [4.0, 0.0, 0.0];
        m.inertia = 4.0;
        assert_eq!(m.thermal_coupling_bound(), 13.0);
    }

    #[test]
    fn voigt_pair_counts() {
        for d in 1..=3 {
            assert_eq!(voigt_pairs(d).len(), voigt_len(d));
        }
    }
}
