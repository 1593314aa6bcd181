//! Low-level helpers over dense complex matrices.
//!
//! Everything downstream reduces to a handful of primitives: Hermitian
//! eigendecomposition (spectral calculus for densities), Frobenius/operator
//! norms, and rank-revealing span bases built by modified Gram–Schmidt.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm.
pub fn fro_norm(m: &CMat) -> f64 {
    m.norm()
}

/// Operator norm: largest singular value, computed as √λ_max(m†m).
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eig = nalgebra::SymmetricEigen::new(gram);
    eig.eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.max(0.0)))
        .sqrt()
}

/// Relative residual: a raw deviation divided by max(1, scale).
pub fn rel(deviation: f64, scale: f64) -> f64 {
    deviation / scale.max(1.0)
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * cx(0.5, 0.0)
}

/// Eigendecomposition of a Hermitian matrix; returns (eigenvalues, eigenvectors).
pub fn hermitian_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = nalgebra::SymmetricEigen::new(hermitize(m));
    (eig.eigenvalues, eig.eigenvectors)
}

pub fn min_eig_hermitian(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let (vals, _) = hermitian_eigen(m);
    vals.iter().fold(f64::INFINITY, |a, &l| a.min(l))
}

/// f(m) for Hermitian m with spectrum mapped through `f`.
pub fn hermitian_map(vals: &DVector<f64>, vecs: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let n = vals.len();
    let mut diag = CMat::zeros(n, n);
    for k in 0..n {
        diag[(k, k)] = f(vals[k]);
    }
    vecs * diag * vecs.adjoint()
}

/// An orthonormal basis grown one vector at a time, used for rank and
/// membership questions with a relative tolerance.
pub struct SpanBasis {
    basis: Vec<CVec>,
    dim: usize,
    tol: f64,
    scale: f64,
}

impl SpanBasis {
    pub fn new(ambient_dim: usize, tol: f64) -> Self {
        SpanBasis {
            basis: Vec::new(),
            dim: ambient_dim,
            tol,
            scale: 1.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Component of `v` orthogonal to the current span (two MGS passes).
    fn orthogonal_part(&self, v: &CVec) -> CVec {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &self.basis {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        w
    }

    /// Distance from `v` to the span, relative to max(1, ‖v‖).
    pub fn residual(&self, v: &CVec) -> f64 {
        rel(self.orthogonal_part(v).norm(), v.norm())
    }

    /// Adds `v` if it enlarges the span; returns true when added.
    pub fn insert(&mut self, v: &CVec) -> bool {
        let norm = v.norm();
        if !norm.is_finite() {
            return false;
        }
        self.scale = self.scale.max(norm);
        if self.basis.len() == self.dim {
            return false;
        }
        let w = self.orthogonal_part(v);
        let wnorm = w.norm();
        if wnorm > self.tol * self.scale.max(1.0) {
            self.basis.push(w / cx(wnorm, 0.0));
            true
        } else {
            false
        }
    }

    pub fn insert_all<'a>(&mut self, vs: impl IntoIterator<Item = &'a CVec>) {
        for v in vs {
            self.insert(v);
        }
    }

    /// Orthogonal projector onto the span.
    pub fn projector(&self) -> CMat {
        let mut p = CMat::zeros(self.dim, self.dim);
        for q in &self.basis {
            p += q * q.adjoint();
        }
        p
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.basis
    }
}

/// Minimum-norm least-squares solution of `a x = b` via SVD.
pub fn least_squares(a: &CMat, b: &CVec, tol: f64) -> CVec {
    let svd = a.clone().svd(true, true);
    svd.solve(b, tol).expect("svd solve")
}

/// Numerical rank of a matrix with relative tolerance.
pub fn rank(a: &CMat, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let sv = a.clone().singular_values();
    let top = sv.iter().fold(0.0f64, |m, &s| m.max(s));
    sv.iter().filter(|&&s| s > tol * top.max(1.0)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_norm_of_unit_is_one() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 1)] = ONE;
        assert!((op_norm(&m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_basis_ranks() {
        let mut sb = SpanBasis::new(3, 1e-10);
        let v1 = CVec::from_vec(vec![ONE, ONE, Complex64::default()]);
        let v2 = CVec::from_vec(vec![ONE, -ONE, Complex64::default()]);
        let v3 = &v1 + &v2;
        assert!(sb.insert(&v1));
        assert!(sb.insert(&v2));
        assert!(!sb.insert(&v3));
        assert_eq!(sb.rank(), 2);
        assert!(sb.residual(&v3) < 1e-12);
    }

    #[test]
    fn hermitian_map_square_root() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        let r = hermitian_map(&vals, &vecs, |l| cx(l.sqrt(), 0.0));
        assert!(fro_norm(&(&r * &r - m)) < 1e-12);
    }
}
