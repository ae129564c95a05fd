//! Uniform node-centred grids on boxes [0, X₁] × … with summation-by-parts
//! first-derivative operators.
//!
//! Interior rows are central differences, boundary rows one-sided first
//! differences. With the trapezoid norm H this pair satisfies
//! `H D + Dᵀ H = diag(−1, 0, …, 0, 1)`, the discrete integration-by-parts
//! rule behind the energy bookkeeping.

use crate::linalg::{Vec3, ZERO3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Low,
    High,
}

/// Face x_{axis+1} = 0 (`Low`) or x_{axis+1} = X (`High`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    pub fn all(dim: usize) -> Vec<Face> {
        (0..dim)
            .flat_map(|axis| [Side::Low, Side::High].map(|side| Face { axis, side }))
            .collect()
    }

    /// Outward unit normal.
    pub fn normal(&self) -> Vec3 {
        let mut n = ZERO3;
        n[self.axis] = match self.side {
            Side::Low => -1.0,
            Side::High => 1.0,
        };
        n
    }

    /// `x1-`, `x1+`, `x2-`, …
    pub fn name(&self) -> String {
        format!(
            "x{}{}",
            self.axis + 1,
            match self.side {
                Side::Low => '-',
                Side::High => '+',
            }
        )
    }

    pub fn parse(name: &str) -> Option<Face> {
        let rest = name.strip_prefix('x')?;
        let (digit, sign) = rest.split_at(rest.len().checked_sub(1)?);
        let axis = digit.parse::<usize>().ok()?.checked_sub(1)?;
        let side = match sign {
            "-" => Side::Low,
            "+" => Side::High,
            _ => return None,
        };
        (axis < 3).then_some(Face { axis, side })
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GridError {
    #[error("dimension must be 1, 2 or 3, got {0}")]
    BadDimension(usize),
    #[error("axis {axis}: need at least 3 nodes, got {nodes}")]
    TooFewNodes { axis: usize, nodes: usize },
    #[error("axis {axis}: extent must be positive and finite, got {extent}")]
    BadExtent { axis: usize, extent: f64 },
    #[error("expected {expected} entries for {key}, got {got}")]
    Shape { key: &'static str, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub extent: [f64; 3],
    /// Node counts; unused axes have one node.
    pub nodes: [usize; 3],
    pub h: [f64; 3],
}

impl Grid {
    pub fn new(dim: usize, extent: &[f64], nodes: &[usize]) -> Result<Self, GridError> {
        if !(1..=3).contains(&dim) {
            return Err(GridError::BadDimension(dim));
        }
        for (key, got) in [("extent", extent.len()), ("nodes", nodes.len())] {
            if got != dim {
                return Err(GridError::Shape { key, expected: dim, got });
            }
        }
        let mut g = Grid {
            dim,
            extent: [0.0; 3],
            nodes: [1; 3],
            h: [1.0; 3],
        };
        for axis in 0..dim {
            if nodes[axis] < 3 {
                return Err(GridError::TooFewNodes { axis, nodes: nodes[axis] });
            }
            if !(extent[axis] > 0.0 && extent[axis].is_finite()) {
                return Err(GridError::BadExtent { axis, extent: extent[axis] });
            }
            g.extent[axis] = extent[axis];
            g.nodes[axis] = nodes[axis];
            g.h[axis] = extent[axis] / (nodes[axis] - 1) as f64;
        }
        Ok(g)
    }

    pub fn uniform_1d(length: f64, nodes: usize) -> Result<Self, GridError> {
        Self::new(1, &[length], &[nodes])
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn h_min(&self) -> f64 {
        self.h[..self.dim].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.nodes[0] * (ijk[1] + self.nodes[1] * ijk[2])
    }

    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.nodes[0];
        let rest = idx / self.nodes[0];
        [i, rest % self.nodes[1], rest / self.nodes[1]]
    }

    pub fn position(&self, idx: usize) -> Vec3 {
        let ijk = self.ijk(idx);
        let mut x = ZERO3;
        for a in 0..self.dim {
            x[a] = ijk[a] as f64 * self.h[a];
        }
        x
    }

    /// Stride between neighbours along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.nodes[..axis].iter().product()
    }

    /// Trapezoid weight of a node index along one axis.
    pub fn axis_weight(&self, axis: usize, i: usize) -> f64 {
        let n = self.nodes[axis];
        if i == 0 || i == n - 1 {
            0.5 * self.h[axis]
        } else {
            self.h[axis]
        }
    }

    /// Tensor-product trapezoid weight (the diagonal of H).
    pub fn weight(&self, idx: usize) -> f64 {
        let ijk = self.ijk(idx);
        (0..self.dim).map(|a| self.axis_weight(a, ijk[a])).product()
    }

    /// Trapezoid weights of a cross-section x_{axis} = const, i.e. the
    /// product of the weights of the other axes.
    pub fn surface_weight(&self, idx: usize, axis: usize) -> f64 {
        let ijk = self.ijk(idx);
        (0..self.dim).filter(|&a| a != axis).map(|a| self.axis_weight(a, ijk[a])).product()
    }

    pub fn on_face(&self, idx: usize, face: Face) -> bool {
        let i = self.ijk(idx)[face.axis];
        match face.side {
            Side::Low => i == 0,
            Side::High => i == self.nodes[face.axis] - 1,
        }
    }

    pub fn face_nodes(&self, face: Face) -> Vec<usize> {
        (0..self.len()).filter(|&idx| self.on_face(idx, face)).collect()
    }

    /// Nodes with a given index along `axis`.
    pub fn slice_nodes(&self, axis: usize, i: usize) -> Vec<usize> {
        (0..self.len()).filter(|&idx| self.ijk(idx)[axis] == i).collect()
    }

    /// Summation-by-parts first derivative along `axis`.
    pub fn derivative(&self, f: &[f64], axis: usize, out: &mut [f64]) {
        let n = self.nodes[axis];
        let s = self.stride(axis);
        let inv_h = 1.0 / self.h[axis];
        let half_inv_h = 0.5 * inv_h;
        for (idx, o) in out.iter_mut().enumerate() {
            let i = (idx / s) % n;
            *o = if i == 0 {
                (f[idx + s] - f[idx]) * inv_h
            } else if i == n - 1 {
                (f[idx] - f[idx - s]) * inv_h
            } else {
                (f[idx + s] - f[idx - s]) * half_inv_h
            };
        }
    }

    /// First derivative with second-order one-sided boundary rows. Not a
    /// summation-by-parts operator; used where pointwise accuracy at the
    /// boundary matters more than the discrete energy balance.
    pub fn derivative_accurate(&self, f: &[f64], axis: usize, out: &mut [f64]) {
        let n = self.nodes[axis];
        let s = self.stride(axis);
        let half_inv_h = 0.5 / self.h[axis];
        for (idx, o) in out.iter_mut().enumerate() {
            let i = (idx / s) % n;
            *o = if i == 0 {
                (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) * half_inv_h
            } else if i == n - 1 {
                (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) * half_inv_h
            } else {
                (f[idx + s] - f[idx - s]) * half_inv_h
            };
        }
    }

    /// Gradient of a scalar field.
    pub fn gradient(&self, f: &[f64]) -> Vec<Vec3> {
        let mut g = vec![ZERO3; f.len()];
        let mut tmp = vec![0.0; f.len()];
        for axis in 0..self.dim {
            self.derivative(f, axis, &mut tmp);
            for (gi, t) in g.iter_mut().zip(&tmp) {
                gi[axis] = *t;
            }
        }
        g
    }

    /// div F = Σ_j D_j F_j for a vector field F.
    pub fn divergence(&self, flux: &[Vec3]) -> Vec<f64> {
        let n = flux.len();
        let mut out = vec![0.0; n];
        let mut col = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        for axis in 0..self.dim {
            for (c, f) in col.iter_mut().zip(flux) {
                *c = f[axis];
            }
            self.derivative(&col, axis, &mut tmp);
            for (o, t) in out.iter_mut().zip(&tmp) {
                *o += *t;
            }
        }
        out
    }
}
