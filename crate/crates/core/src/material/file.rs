//! Material file schema (TOML).
//!
//! ```toml
//! dim = 1
//! C = [2.0]        # nv × nv, row-major, rows/columns in packed pair order
//! D = [0.0]        # nv × d, row-major: D[pair(ij)][s]
//! A = [3.0]        # d × d
//! B = [0.0]        # d × d
//! b = [0.0]        # d
//! M = [0.0]        # d × d
//! a_vec = [0.0]    # d
//! K = [1.0]        # d × d
//! xi = 5.0
//! m = 0.0
//! a = 1.0
//! tau = 0.0
//! rho = 1.0
//! chi = 1.0
//! theta0 = 1.0
//! ```
//!
//! `nv = d(d+1)/2`; pairs are ordered 11, 22, 33, 23, 13, 12 (truncated to
//! the dimension). Every key is required and unknown keys are rejected.

use super::{voigt_len, voigt_pairs, Material, MaterialError};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackedMaterial {
    pub dim: usize,
    #[serde(rename = "C")]
    pub c: Vec<f64>,
    #[serde(rename = "D")]
    pub d: Vec<f64>,
    #[serde(rename = "A")]
    pub a_tensor: Vec<f64>,
    #[serde(rename = "B")]
    pub b_tensor: Vec<f64>,
    pub b: Vec<f64>,
    #[serde(rename = "M")]
    pub m_tensor: Vec<f64>,
    pub a_vec: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub xi: f64,
    pub m: f64,
    pub a: f64,
    pub tau: f64,
    pub rho: f64,
    pub chi: f64,
    pub theta0: f64,
}

fn check_len(key: &'static str, v: &[f64], expected: usize, dim: usize) -> Result<(), MaterialError> {
    if v.len() != expected {
        return Err(MaterialError::DimensionMismatch {
            key,
            got: v.len(),
            expected,
            dim,
        });
    }
    Ok(())
}

impl PackedMaterial {
    pub fn unpack(&self) -> Result<Material, MaterialError> {
        let d = self.dim;
        if !(1..=3).contains(&d) {
            return Err(MaterialError::BadDimension(d));
        }
        let nv = voigt_len(d);
        check_len("C", &self.c, nv * nv, d)?;
        check_len("D", &self.d, nv * d, d)?;
        check_len("A", &self.a_tensor, d * d, d)?;
        check_len("B", &self.b_tensor, d * d, d)?;
        check_len("b", &self.b, d, d)?;
        check_len("M", &self.m_tensor, d * d, d)?;
        check_len("a_vec", &self.a_vec, d, d)?;
        check_len("K", &self.k, d * d, d)?;

        let mut m = Material::zeroed(d);
        let pairs = voigt_pairs(d);
        // The packed C fills all minor images; major symmetry is whatever
        // the file says, so an asymmetric packed matrix stays detectable.
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(r, s)) in pairs.iter().enumerate() {
                let v = self.c[p * nv + q];
                for (a, b) in [(i, j), (j, i)] {
                    for (c, e) in [(r, s), (s, r)] {
                        m.elastic[a][b][c][e] = v;
                    }
                }
            }
            for s in 0..d {
                let v = self.d[p * d + s];
                m.strain_gradient[i][j][s] = v;
                m.strain_gradient[j][i][s] = v;
            }
        }
        for i in 0..d {
            for j in 0..d {
                m.gradient_stiffness[i][j] = self.a_tensor[i * d + j];
                m.strain_void[i][j] = self.b_tensor[i * d + j];
                m.thermal_stress[i][j] = self.m_tensor[i * d + j];
                m.conductivity[i][j] = self.k[i * d + j];
            }
            m.gradient_void[i] = self.b[i];
            m.thermal_gradient[i] = self.a_vec[i];
        }
        m.void_stiffness = self.xi;
        m.thermal_void = self.m;
        m.heat_capacity = self.a;
        m.memory = self.tau;
        m.density = self.rho;
        m.inertia = self.chi;
        m.reference_temperature = self.theta0;
        Ok(m)
    }

    /// Packs using the representative (i ≤ j) components.
    pub fn pack(material: &Material) -> Self {
        let d = material.dim;
        let nv = voigt_len(d);
        let pairs = voigt_pairs(d);
        let mut c = vec![0.0; nv * nv];
        let mut dd = vec![0.0; nv * d];
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for (q, &(r, s)) in pairs.iter().enumerate() {
                c[p * nv + q] = material.elastic[i][j][r][s];
            }
            for s in 0..d {
                dd[p * d + s] = material.strain_gradient[i][j][s];
            }
        }
        let flat = |t: &crate::linalg::Mat3| -> Vec<f64> {
            (0..d).flat_map(|i| (0..d).map(move |j| t[i][j])).collect()
        };
        Self {
            dim: d,
            c,
            d: dd,
            a_tensor: flat(&material.gradient_stiffness),
            b_tensor: flat(&material.strain_void),
            b: material.gradient_void[..d].to_vec(),
            m_tensor: flat(&material.thermal_stress),
            a_vec: material.thermal_gradient[..d].to_vec(),
            k: flat(&material.conductivity),
            xi: material.void_stiffness,
            m: material.thermal_void,
            a: material.heat_capacity,
            tau: material.memory,
            rho: material.density,
            chi: material.inertia,
            theta0: material.reference_temperature,
        }
    }
}

/// Reading and writing material files.
pub struct MaterialFile;

impl MaterialFile {
    pub fn parse(text: &str) -> Result<Material, MaterialError> {
        let packed: PackedMaterial =
            toml::from_str(text).map_err(|e| MaterialError::Parse(e.to_string()))?;
        packed.unpack()
    }

    pub fn load(path: &Path) -> Result<Material, MaterialError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| MaterialError::Parse(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            MaterialError::Parse(msg) => MaterialError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_string(material: &Material) -> String {
        toml::to_string(&PackedMaterial::pack(material)).expect("material serializes")
    }
}
