//! Small dense linear algebra: fixed 3×3 helpers and a cyclic Jacobi
//! eigensolver for the tiny symmetric matrices that appear in the theory
//! (n ≤ 10).

/// Vector with up to three components; entries past `dim` are zero.
pub type Vec3 = [f64; 3];
/// Second-order tensor with up to 3×3 components; entries past `dim` are zero.
pub type Mat3 = [[f64; 3]; 3];

pub const ZERO3: Vec3 = [0.0; 3];
pub const ZERO33: Mat3 = [[0.0; 3]; 3];

/// Dense square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.set(i, j, v);
        self.set(j, i, v);
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j) - self.get(j, i)).abs() <= tol))
    }

    pub fn mul_vec(&self, z: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * z[j]).sum())
            .collect()
    }

    /// zᵀ A z
    pub fn quadratic(&self, z: &[f64]) -> f64 {
        self.mul_vec(z).iter().zip(z).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j) * self.get(i, j);
                }
            }
        }
        s.sqrt()
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Vec<f64> {
        jacobi_eigenvalues(self, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    }
}

/// Sweeps stop once the off-diagonal Frobenius norm falls below this fraction
/// of the full norm.
pub const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigenvalue iteration. The input is symmetrized first
/// (upper triangle wins) so small asymmetries never stall convergence.
pub fn jacobi_eigenvalues(matrix: &SymMatrix, tol: f64, max_sweeps: usize) -> Vec<f64> {
    let n = matrix.n();
    let mut a = matrix.clone();
    for i in 0..n {
        for j in 0..i {
            let v = a.get(j, i);
            a.set(i, j, v);
        }
    }
    let scale = a.frobenius();
    if scale == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..max_sweeps {
        if a.off_diagonal_norm() <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                // Rutishauser's stable rotation.
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Only rows k ≠ p, q rotate; the diagonal takes the
                // closed-form update, which is exact when t is.
                for k in (0..n).filter(|&k| k != p && k != q) {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set_sym(k, p, c * akp - s * akq);
                    a.set_sym(k, q, s * akp + c * akq);
                }
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("NaN eigenvalue"));
    eig
}

/// Eigenvalues of the leading `dim × dim` block of a 3×3 tensor.
pub fn mat3_eigenvalues(m: &Mat3, dim: usize) -> Vec<f64> {
    let mut s = SymMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            s.set(i, j, m[i][j]);
        }
    }
    s.eigenvalues()
}

pub fn mat3_vec(m: &Mat3, v: &Vec3, dim: usize) -> Vec3 {
    let mut out = ZERO3;
    for i in 0..dim {
        out[i] = (0..dim).map(|j| m[i][j] * v[j]).sum();
    }
    out
}

pub fn dot(a: &Vec3, b: &Vec3, dim: usize) -> f64 {
    (0..dim).map(|i| a[i] * b[i]).sum()
}

/// Full contraction A_ij B_ij.
pub fn ddot(a: &Mat3, b: &Mat3, dim: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            s += a[i][j] * b[i][j];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let m = SymMatrix::diagonal(&[5.0, 2.0, 3.0]);
        assert_eq!(m.eigenvalues(), vec![2.0, 3.0, 5.0]);
    }

    #[test]
    fn two_by_two_closed_form() {
        // [[2,1],[1,2]] -> 1, 3
        let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let e = m.eigenvalues();
        assert!((e[0] - 1.0).abs() < 1e-14);
        assert!((e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn indefinite_two_by_two() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let e = m.eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-14);
        assert!((e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn trace_and_determinant_preserved() {
        // Tridiagonal 2,-1 matrix of size 6: eigenvalues 2 - 2cos(kπ/7).
        let n = 6;
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 2.0);
            if i + 1 < n {
                m.set_sym(i, i + 1, -1.0);
            }
        }
        let e = m.eigenvalues();
        for (k, ev) in e.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / 7.0).cos();
            assert!((ev - exact).abs() < 1e-12, "{ev} vs {exact}");
        }
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(SymMatrix::zeros(3).eigenvalues(), vec![0.0; 3]);
    }
}
