use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Seeded Haar-distributed unitary of size `dim`.
///
/// A complex Ginibre matrix is QR-factorised with Householder reflections and
/// the columns of Q are rotated by the phases of R's diagonal, which makes the
/// distribution exactly Haar rather than biased by the QR sign convention.
pub fn haar_random_unitary<T: Real>(dim: usize, seed: u64) -> ComplexMatrix<T> {
    assert!(dim >= 1, "unitary dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ginibre: ComplexMatrix<T> = gaussian_matrix(dim, &mut rng);
    let (q, r_diag) = householder_qr(ginibre);
    let mut u = q;
    for (k, r) in r_diag.iter().enumerate() {
        let norm = r.norm();
        let phase = if norm.is_zero() {
            Complex::one()
        } else {
            r / norm
        };
        for i in 0..dim {
            u[(i, k)] = u[(i, k)] * phase;
        }
    }
    u
}

/// Complex matrix with i.i.d. standard complex normal entries (variance 1).
pub(crate) fn gaussian_matrix<T: Real, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for z in m.as_mut_slice() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z = Complex::new(T::lit(re * scale), T::lit(im * scale));
    }
    m
}

/// Returns Q and the diagonal of R with A = QR.
fn householder_qr<T: Real>(mut a: ComplexMatrix<T>) -> (ComplexMatrix<T>, Vec<Complex<T>>) {
    let n = a.rows();
    let mut reflectors: Vec<Option<Vec<Complex<T>>>> = Vec::with_capacity(n);
    let mut r_diag = Vec::with_capacity(n);
    let two = T::lit(2.0);

    for k in 0..n {
        let x: Vec<Complex<T>> = (k..n).map(|i| a[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if xnorm.is_zero() {
            reflectors.push(None);
            r_diag.push(Complex::zero());
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm().is_zero() {
            Complex::one()
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] = v[0] - alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if vnorm.is_zero() {
            reflectors.push(None);
            r_diag.push(a[(k, k)]);
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vnorm;
        }
        // A[k.., k..] ← (I − 2vv†) A[k.., k..]
        for j in k..n {
            let mut dot = Complex::zero();
            for (off, vi) in v.iter().enumerate() {
                dot = dot + vi.conj() * a[(k + off, j)];
            }
            for (off, vi) in v.iter().enumerate() {
                a[(k + off, j)] = a[(k + off, j)] - *vi * dot * two;
            }
        }
        r_diag.push(a[(k, k)]);
        reflectors.push(Some(v));
    }

    let mut q = ComplexMatrix::identity(n);
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        for j in 0..n {
            let mut dot = Complex::zero();
            for (off, vi) in v.iter().enumerate() {
                dot = dot + vi.conj() * q[(k + off, j)];
            }
            for (off, vi) in v.iter().enumerate() {
                q[(k + off, j)] = q[(k + off, j)] - *vi * dot * two;
            }
        }
    }
    (q, r_diag)
}
