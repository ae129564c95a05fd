//! The stored-energy quadratic form in scaled orthonormal coordinates and its
//! extreme eigenvalues.
//!
//! Coordinates of an element `{E, √χ π, ψ}` are
//!
//! ```text
//! z = [ E_11, E_22, E_33, √2 E_23, √2 E_13, √2 E_12 | √χ π_1 .. √χ π_d | ψ ]
//! ```
//!
//! (strain slots follow [`voigt_pairs`](super::voigt_pairs)), so that
//! `|z|² = E_ijE_ij + χπ_iπ_i + ψ²` and `zᵀQz = 2Ŵ`. The bounds
//! `μ_m|z|² ≤ 2Ŵ ≤ μ_M|z|²` then hold with μ_m, μ_M the extreme eigenvalues of Q.

use super::{voigt_len, voigt_pairs, Material, MaterialError};
use crate::linalg::{mat3_eigenvalues, Mat3, SymMatrix, Vec3};

/// n(d) = d(d+1)/2 + d + 1
pub fn quadratic_form_size(dim: usize) -> usize {
    voigt_len(dim) + dim + 1
}

fn pair_scale(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        std::f64::consts::SQRT_2
    }
}

/// Q with zᵀQz = 2Ŵ(E).
pub fn assemble_quadratic_form(material: &Material) -> SymMatrix {
    let d = material.dim;
    let nv = voigt_len(d);
    let n = quadratic_form_size(d);
    let pairs = voigt_pairs(d);
    let sqrt_chi = material.inertia.sqrt();
    let psi = n - 1;
    let mut q = SymMatrix::zeros(n);

    for (a, &(i, j)) in pairs.iter().enumerate() {
        let sa = pair_scale(i, j);
        for (b, &(r, s)) in pairs.iter().enumerate() {
            let sb = pair_scale(r, s);
            q.set(a, b, sa * sb * material.elastic[i][j][r][s]);
        }
        for s in 0..d {
            q.set_sym(a, nv + s, sa * material.strain_gradient[i][j][s] / sqrt_chi);
        }
        q.set_sym(a, psi, sa * material.strain_void[i][j]);
    }
    for i in 0..d {
        for j in 0..d {
            q.set(nv + i, nv + j, material.gradient_stiffness[i][j] / material.inertia);
        }
        q.set_sym(nv + i, psi, material.gradient_void[i] / sqrt_chi);
    }
    q.set(psi, psi, material.void_stiffness);
    q
}

/// Scaled coordinates z of `{E, √χ π, ψ}`.
pub fn scaled_coordinates(dim: usize, inertia: f64, strain: &Mat3, pi: &Vec3, psi: f64) -> Vec<f64> {
    let mut z = Vec::with_capacity(quadratic_form_size(dim));
    for &(i, j) in voigt_pairs(dim) {
        z.push(pair_scale(i, j) * strain[i][j]);
    }
    let sqrt_chi = inertia.sqrt();
    for p in pi.iter().take(dim) {
        z.push(sqrt_chi * p);
    }
    z.push(psi);
    z
}

/// Extreme eigenvalues of the stored-energy form and of the conductivity,
/// with the thermal coupling bound M².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    /// μ_m
    pub mu_min: f64,
    /// μ_M
    pub mu_max: f64,
    /// k_m
    pub k_min: f64,
    /// k_M
    pub k_max: f64,
    /// M²
    pub coupling: f64,
}

pub fn spectrum(material: &Material) -> Result<Spectrum, MaterialError> {
    if !(1..=3).contains(&material.dim) {
        return Err(MaterialError::BadDimension(material.dim));
    }
    let e = assemble_quadratic_form(material).eigenvalues();
    let mu_m = e[0];
    let mu_big = *e.last().expect("nonempty form");
    if !(mu_m > 0.0) {
        return Err(MaterialError::FormNotPositiveDefinite { mu_m });
    }
    let k = mat3_eigenvalues(&material.conductivity, material.dim);
    let k_m = k[0];
    if !(k_m > 0.0) {
        return Err(MaterialError::ConductivityNotPositiveDefinite { k_m });
    }
    Ok(Spectrum {
        mu_min: mu_m,
        mu_max: mu_big,
        k_min: k_m,
        k_max: *k.last().expect("nonempty"),
        coupling: material.thermal_coupling_bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decoupled_1d() -> Material {
        let mut m = Material::zeroed(1);
        m.elastic[0][0][0][0] = 2.0;
        m.gradient_stiffness[0][0] = 3.0;
        m.void_stiffness = 5.0;
        m.conductivity[0][0] = 1.0;
        m
    }

    #[test]
    fn fully_decoupled_form_is_diagonal() {
        let q = assemble_quadratic_form(&decoupled_1d());
        assert_eq!(q, SymMatrix::diagonal(&[2.0, 3.0, 5.0]));
        let s = spectrum(&decoupled_1d()).unwrap();
        assert_eq!((s.mu_min, s.mu_max), (2.0, 5.0));
    }

    #[test]
    fn coupled_block_placement() {
        let mut m = Material::zeroed(1);
        m.elastic[0][0][0][0] = 2.0;
        m.void_stiffness = 2.0;
        m.strain_void[0][0] = 1.0;
        m.gradient_stiffness[0][0] = 1.0;
        m.conductivity[0][0] = 1.0;
        let q = assemble_quadratic_form(&m);
        assert_eq!(q.get(0, 2), 1.0);
        assert_eq!(q.get(2, 0), 1.0);
        assert_eq!(q.get(1, 1), 1.0);
        assert_eq!(q.get(0, 1), 0.0);
        let s = spectrum(&m).unwrap();
        assert!((s.mu_min - 1.0).abs() < 1e-14);
        assert!((s.mu_max - 3.0).abs() < 1e-14);
    }

    #[test]
    fn conductivity_extremes() {
        let mut m = Material::isotropic(3, 1.0, 1.0);
        m.conductivity = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [0.0, 0.0, 4.0]];
        let s = spectrum(&m).unwrap();
        assert_eq!((s.k_min, s.k_max), (2.0, 4.0));
    }

    #[test]
    fn indefinite_form_rejected() {
        let mut m = decoupled_1d();
        m.strain_void[0][0] = 10.0;
        assert!(matches!(spectrum(&m), Err(MaterialError::FormNotPositiveDefinite { .. })));
    }

    #[test]
    fn form_size() {
        assert_eq!(quadratic_form_size(1), 3);
        assert_eq!(quadratic_form_size(2), 6);
        assert_eq!(quadratic_form_size(3), 10);
    }
}
