//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Matrices in this crate are at most 64×64, where Jacobi is accurate to a few
//! ulps in the eigenvalues and needs no external LAPACK.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and unitary eigenvector matrix (eigenvectors as columns).
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Column `k` as an owned vector.
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        let n = self.vectors.rows();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V f(Λ) V†.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&v| f(v)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = Complex::zero();
                for (k, &w) in fv.iter().enumerate() {
                    acc = acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            let d = out[(i, i)];
            out[(i, i)] = Complex::new(d.re, T::zero());
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix. Only the upper triangle's
/// Hermitian part is trusted; callers validate Hermiticity separately.
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    let mut v = ComplexMatrix::<T>::identity(n);

    let frob: T = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    let eps = T::epsilon();
    let threshold = eps * eps * frob * frob;

    for _ in 0..MAX_SWEEPS {
        let off: T = off_diagonal_sq(&a);
        if off <= threshold || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    Ok(hermitian_eigen(m)?.values)
}

fn off_diagonal_sq<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            s = s + a[(i, j)].norm_sqr();
        }
    }
    s + s
}

/// One Jacobi step annihilating a[p][q]. The unitary acting on columns (p, q)
/// is diag(1, e^{-iφ}) · [[c, s], [−s, c]] with φ = arg a[p][q].
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag.is_zero() {
        return;
    }
    let phase = apq / mag; // e^{iφ}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let two = T::lit(2.0);
    let tau = (aqq - app) / (two * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let cc = Complex::new(c, T::zero());
    let sc = Complex::new(s, T::zero());
    let u_pp = cc;
    let u_pq = sc;
    let u_qp = -sc * phase.conj();
    let u_qq = cc * phase.conj();

    let n = a.rows();
    // A ← A U
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * u_pp + aiq * u_qp;
        a[(i, q)] = aip * u_pq + aiq * u_qq;
    }
    // A ← U† A
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = u_pp.conj() * apj + u_qp.conj() * aqj;
        a[(q, j)] = u_pq.conj() * apj + u_qq.conj() * aqj;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    let dp = a[(p, p)].re;
    let dq = a[(q, q)].re;
    a[(p, p)] = Complex::new(dp, T::zero());
    a[(q, q)] = Complex::new(dq, T::zero());

    // V ← V U
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * u_pp + viq * u_qp;
        v[(i, q)] = vip * u_pq + viq * u_qq;
    }
}
