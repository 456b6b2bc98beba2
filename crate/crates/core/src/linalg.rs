//! Small dense complex linear algebra.
//!
//! Everything here targets matrices of dimension 2 or 4 (Liouvillians reach
//! 4 as well), so the storage is a plain row-major `Vec` and the algorithms
//! favour robustness over asymptotic speed.

use num_complex::Complex64 as C64;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "from_rows: matrix must be square");
            data.extend_from_slice(r);
        }
        Self { n, data }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), n, "from_real_rows: matrix must be square");
            data.extend(r.iter().map(|&x| C64::new(x, 0.0)));
        }
        Self { n, data }
    }

    /// Matrix whose k-th column is `cols[k]`.
    pub fn from_columns(cols: &[Vec<C64>]) -> Self {
        let n = cols.len();
        let mut m = Self::zeros(n);
        for (k, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for i in 0..n {
                m[(i, k)] = c[i];
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, k)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.norm()))
    }

    /// Induced 1-norm (max column sum).
    pub fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.re.is_finite() && x.im.is_finite())
    }

    /// max |A - A†|
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.n;
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    /// max |A†A - 1|
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).sub_identity_max()
    }

    fn sub_identity_max(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { ONE } else { ZERO };
                d = d.max((self[(i, j)] - target).norm());
            }
        }
        d
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (a, b) = (self.n, other.n);
        let mut m = CMatrix::zeros(a * b);
        for i in 0..a {
            for j in 0..a {
                let s = self[(i, j)];
                for k in 0..b {
                    for l in 0..b {
                        m[(i * b + k, j * b + l)] = s * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        m
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_rows(&[[ZERO, -I], [I, ZERO]])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// Eigenpairs of a Hermitian matrix: ascending real eigenvalues and the
/// matching orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Σ_k |v_k⟩ f(λ_k) ⟨v_k|
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let n = self.values.len();
        let mut m = CMatrix::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        m
    }
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// The input is symmetrized as (A + A†)/2 first; callers are responsible for
/// rejecting matrices that are far from Hermitian. Eigenvalues come out
/// ascending; ties are ordered by the index of each vector's largest
/// component, and each vector's largest component is made real-positive.
pub fn eigh(a: &CMatrix) -> EigenDecomposition {
    let n = a.dim();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = apq / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = [[c, s·e^{iφ}], [-s·e^{-iφ}, c]] on (p, q); M ← G† M G, V ← V G.
                let gpq = phase * s;
                let gqp = -phase.conj() * s;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c + mkq * gqp;
                    m[(k, q)] = mkp * gpq + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c + mqk * gqp.conj();
                    m[(q, k)] = mpk * gpq.conj() + mqk * c;
                }
                m[(p, q)] = ZERO;
                m[(q, p)] = ZERO;
                m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * c;
                }
            }
        }
    }

    let pairs: Vec<(f64, Vec<C64>)> = (0..n).map(|k| (m[(k, k)].re, v.column(k))).collect();
    EigenDecomposition::from_pairs(pairs, 1e-9 * scale)
}

impl EigenDecomposition {
    /// Canonical form of a set of eigenpairs: vectors normalized (and
    /// re-orthonormalized inside clusters closer than `degeneracy_tol`), the
    /// largest component of each made real-positive, values ascending with
    /// ties ordered by the index of the largest component.
    pub fn from_pairs(mut pairs: Vec<(f64, Vec<C64>)>, degeneracy_tol: f64) -> Self {
        let scale = pairs.iter().fold(1.0f64, |m, p| m.max(p.0.abs()));
        reorthonormalize_degenerate(&mut pairs, degeneracy_tol);
        for (_, vec) in pairs.iter_mut() {
            fix_phase(vec);
        }
        pairs.sort_by(|a, b| {
            if (a.0 - b.0).abs() <= 1e-12 * scale {
                dominant_index(&a.1).cmp(&dominant_index(&b.1))
            } else {
                a.0.partial_cmp(&b.0).unwrap()
            }
        });
        let values = pairs.iter().map(|p| p.0).collect();
        let cols: Vec<Vec<C64>> = pairs.into_iter().map(|p| p.1).collect();
        EigenDecomposition {
            values,
            vectors: CMatrix::from_columns(&cols),
        }
    }
}

fn dominant_index(v: &[C64]) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, x) in v.iter().enumerate() {
        // strict comparison with a small margin keeps the lowest index on near-ties
        if x.norm() > best_mag + 1e-12 {
            best = i;
            best_mag = x.norm();
        }
    }
    best
}

fn fix_phase(v: &mut [C64]) {
    let k = dominant_index(v);
    let mag = v[k].norm();
    if mag > 0.0 {
        let ph = v[k].conj() / mag;
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// Modified Gram–Schmidt within each cluster of (near-)equal eigenvalues.
fn reorthonormalize_degenerate(pairs: &mut [(f64, Vec<C64>)], tol: f64) {
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let n = pairs.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (pairs[end].0 - pairs[start].0).abs() <= tol {
            end += 1;
        }
        for k in start..end {
            for j in start..k {
                let proj = inner(&pairs[j].1, &pairs[k].1);
                let vj = pairs[j].1.clone();
                for (x, y) in pairs[k].1.iter_mut().zip(&vj) {
                    *x -= proj * y;
                }
            }
            let nrm = norm_sqr(&pairs[k].1).sqrt();
            for x in pairs[k].1.iter_mut() {
                *x /= nrm;
            }
        }
        start = end;
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// Independent of [`eigh`]; works for non-normal matrices (Liouvillians).
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    let norm = a.norm1();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a.scale_re(1.0 / f64::powi(2.0, squarings as i32));
    let mut result = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale_re(1.0 / k as f64);
        result = &result + &term;
        if term.max_abs() <= 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigh_diagonal() {
        let e = eigh(&CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]));
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert_abs_diff_eq!(e.vectors[(1, 0)].re, 1.0);
        assert_abs_diff_eq!(e.vectors[(0, 1)].re, 1.0);
    }

    #[test]
    fn eigh_pauli_x() {
        let e = eigh(&pauli_x());
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        let s = 1.0 / 2f64.sqrt();
        // (1, -1)/√2 for λ = -1, phase fixed so the first component is positive
        assert_abs_diff_eq!(e.vectors[(0, 0)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(1, 0)].re, -s, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(0, 1)].re, s, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(1, 1)].re, s, epsilon = 1e-14);
    }

    #[test]
    fn eigh_complex_residual() {
        let h = CMatrix::from_rows(&[
            [C64::new(0.3, 0.0), C64::new(0.2, -0.7), C64::new(-1.1, 0.4), C64::new(0.0, 0.5)],
            [C64::new(0.2, 0.7), C64::new(-1.0, 0.0), C64::new(0.9, 0.1), C64::new(0.3, -0.3)],
            [C64::new(-1.1, -0.4), C64::new(0.9, -0.1), C64::new(2.0, 0.0), C64::new(0.6, 0.2)],
            [C64::new(0.0, -0.5), C64::new(0.3, 0.3), C64::new(0.6, -0.2), C64::new(-0.4, 0.0)],
        ]);
        let e = eigh(&h);
        for k in 0..4 {
            let v = e.vector(k);
            let hv = h.matvec(&v);
            for i in 0..4 {
                assert!((hv[i] - v[i] * e.values[k]).norm() < 1e-12);
            }
        }
        assert!(e.vectors.unitarity_defect() < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn eigh_degenerate_identity_keeps_basis_order() {
        let e = eigh(&CMatrix::identity(4));
        assert!(e.vectors.max_diff(&CMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn expm_matches_closed_form_rotation() {
        // exp(-i θ σx) = cos θ I - i sin θ σx
        let theta = 2.7;
        let u = expm(&pauli_x().scale(-I * theta));
        assert_abs_diff_eq!(u[(0, 0)].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(u[(0, 1)].im, -theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn expm_nilpotent() {
        let mut a = CMatrix::zeros(2);
        a[(0, 1)] = C64::new(3.0, 0.0);
        let e = expm(&a);
        assert_eq!(e[(0, 1)], C64::new(3.0, 0.0));
        assert_eq!(e[(0, 0)], ONE);
    }

    #[test]
    fn kron_shape() {
        let k = pauli_x().kron(&pauli_z());
        assert_eq!(k.dim(), 4);
        assert_eq!(k[(0, 2)], ONE);
        assert_eq!(k[(1, 3)], -ONE);
    }
}
