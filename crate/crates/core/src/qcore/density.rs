use std::path::Path;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::eigen::hermitian_eigenvalues;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hermitian, unit-trace, positive semi-definite operator on a tensor product
/// of party spaces. Party 0 is the most significant tensor factor.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dims: Vec<usize>,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates every invariant before accepting `matrix`.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix<T>) -> Result<Self> {
        check_dims(&dims, &matrix)?;
        validate(&matrix)?;
        Ok(Self { dims, matrix })
    }

    /// Skips the eigenvalue check; Hermiticity and trace are still enforced.
    /// Used on outputs of maps already known to be completely positive.
    pub(crate) fn new_cp_output(dims: Vec<usize>, mut matrix: ComplexMatrix<T>) -> Result<Self> {
        check_dims(&dims, &matrix)?;
        matrix.symmetrize();
        check_trace(&matrix)?;
        Ok(Self { dims, matrix })
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(dims: Vec<usize>, amplitudes: &[Complex<T>]) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm.is_zero() {
            return Err(Error::Domain("zero state vector".into()));
        }
        let psi: Vec<_> = amplitudes.iter().map(|z| z / norm).collect();
        let mut m = ComplexMatrix::projector(&psi);
        m.symmetrize();
        Self::new(dims, m)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = ComplexMatrix::identity(d).scale_real(T::one() / T::lit(d as f64));
        Self { dims, matrix: m }
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn parties(&self) -> usize {
        self.dims.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn is_qubits(&self) -> bool {
        self.dims.iter().all(|&d| d == 2)
    }

    pub fn purity(&self) -> T {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<T>> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Reduced state on `keep` (party indices, any order; result keeps ascending order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    /// (⊗ U_i) ρ (⊗ U_i)†, one operator per party.
    pub fn apply_local_unitaries(&self, unitaries: &[ComplexMatrix<T>]) -> Result<Self> {
        if unitaries.len() != self.parties() {
            return Err(Error::Dimension(format!(
                "{} local operators for {} parties",
                unitaries.len(),
                self.parties()
            )));
        }
        let mut m = self.matrix.clone();
        for (party, u) in unitaries.iter().enumerate() {
            conjugate_local(&mut m, &self.dims, party, u)?;
        }
        Self::new_cp_output(self.dims.clone(), m)
    }

    /// Relabels parties: new party `k` is old party `perm[k]`.
    pub fn permute_parties(&self, perm: &[usize]) -> Result<Self> {
        let n = self.parties();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::Usage(format!(
                "{perm:?} is not a permutation of {n} parties"
            )));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let d = self.dim();
        // old index of each new index
        let map: Vec<usize> = (0..d)
            .map(|new_idx| {
                let digits = split_index(new_idx, &new_dims);
                let mut old_digits = vec![0; n];
                for (k, &p) in perm.iter().enumerate() {
                    old_digits[p] = digits[k];
                }
                join_index(&old_digits, &self.dims)
            })
            .collect();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = self.matrix[(map[i], map[j])];
            }
        }
        Ok(Self {
            dims: new_dims,
            matrix: m,
        })
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dims == other.dims && self.matrix.approx_eq(&other.matrix, tol)
    }

    pub fn to_file_format(&self) -> DensityMatrixFile {
        DensityMatrixFile {
            dims: self.dims.clone(),
            re: self
                .matrix
                .as_slice()
                .iter()
                .map(|z| z.re.as_f64())
                .collect(),
            im: self
                .matrix
                .as_slice()
                .iter()
                .map(|z| z.im.as_f64())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file_format()).expect("plain data serializes")
    }

    /// Parses the interchange format. Structural problems are
    /// [`Error::MalformedFile`]; a well-formed matrix that is not a valid state
    /// is [`Error::InvalidStateFile`].
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityMatrixFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedFile(e.to_string()))?;
        file.into_density()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MalformedFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// On-disk layout: `{"dims":[2,2], "re":[...], "im":[...]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DensityMatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl DensityMatrixFile {
    pub fn into_density<T: Real>(self) -> Result<DensityMatrix<T>> {
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::MalformedFile(format!("bad dims {:?}", self.dims)));
        }
        let d: usize = self.dims.iter().product();
        if self.re.len() != d * d || self.im.len() != d * d {
            return Err(Error::MalformedFile(format!(
                "expected {} entries for dims {:?}, got re={} im={}",
                d * d,
                self.dims,
                self.re.len(),
                self.im.len()
            )));
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(Error::MalformedFile("non-finite entry".into()));
        }
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&r, &i)| Complex::new(T::lit(r), T::lit(i)))
            .collect();
        let m =
            ComplexMatrix::from_vec(d, d, data).map_err(|e| Error::MalformedFile(e.to_string()))?;
        DensityMatrix::new(self.dims, m).map_err(|e| Error::InvalidStateFile(Box::new(e)))
    }
}

fn check_dims<T: Real>(dims: &[usize], m: &ComplexMatrix<T>) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!(
            "invalid party dimensions {dims:?}"
        )));
    }
    let d: usize = dims.iter().product();
    if !m.is_square() || m.rows() != d {
        return Err(Error::Dimension(format!(
            "{}x{} matrix for party dimensions {dims:?}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

fn check_trace<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    let tr = m.trace();
    if (tr.re - T::one()).abs() > T::trace_tol() || tr.im.abs() > T::trace_tol() {
        return Err(Error::InvalidTrace(tr.re.as_f64()));
    }
    Ok(())
}

fn validate<T: Real>(m: &ComplexMatrix<T>) -> Result<()> {
    let dev = m.hermitian_deviation();
    if dev > T::hermitian_tol() {
        return Err(Error::NotHermitian(dev.as_f64()));
    }
    check_trace(m)?;
    let min = hermitian_eigenvalues(m)?
        .first()
        .copied()
        .unwrap_or_else(T::zero);
    if min < -T::psd_slack() {
        return Err(Error::NotPsd(min.as_f64()));
    }
    Ok(())
}

/// Digits of `idx` in the mixed radix `dims`, most significant first.
pub(crate) fn split_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (k, &d) in dims.iter().enumerate().rev() {
        digits[k] = idx % d;
        idx /= d;
    }
    digits
}

pub(crate) fn join_index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&g, &d)| acc * d + g)
}

/// Sorted, deduplicated, range-checked party set.
pub(crate) fn normalize_party_set(set: &[usize], parties: usize) -> Result<Vec<usize>> {
    if set.is_empty() {
        return Err(Error::Usage("empty party set".into()));
    }
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != set.len() {
        return Err(Error::Usage(format!("repeated party in {set:?}")));
    }
    if let Some(&bad) = v.iter().find(|&&p| p >= parties) {
        return Err(Error::Usage(format!(
            "party {bad} out of range for {parties} parties"
        )));
    }
    Ok(v)
}

pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: &[usize]) -> Result<DensityMatrix<T>> {
    let keep = normalize_party_set(keep, rho.parties())?;
    let dims = rho.dims();
    let kept_dims: Vec<usize> = keep.iter().map(|&p| dims[p]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&p| dims[p]).collect();

    let d = rho.dim();
    let mut kept_idx = Vec::with_capacity(d);
    let mut traced_idx = Vec::with_capacity(d);
    for i in 0..d {
        let digits = split_index(i, dims);
        let k: Vec<usize> = keep.iter().map(|&p| digits[p]).collect();
        let t: Vec<usize> = traced.iter().map(|&p| digits[p]).collect();
        kept_idx.push(join_index(&k, &kept_dims));
        traced_idx.push(if t.is_empty() {
            0
        } else {
            join_index(&t, &traced_dims)
        });
    }

    let dk: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(dk, dk);
    let m = rho.matrix();
    for i in 0..d {
        for j in 0..d {
            if traced_idx[i] == traced_idx[j] {
                let v = out[(kept_idx[i], kept_idx[j])] + m[(i, j)];
                out[(kept_idx[i], kept_idx[j])] = v;
            }
        }
    }
    out.symmetrize();
    Ok(DensityMatrix {
        dims: kept_dims,
        matrix: out,
    })
}

/// m ← (I ⊗ op ⊗ I) m, with `op` acting on `party`.
pub(crate) fn left_apply_local<T: Real>(
    m: &mut ComplexMatrix<T>,
    dims: &[usize],
    party: usize,
    op: &ComplexMatrix<T>,
) {
    let dp = dims[party];
    let stride: usize = dims[party + 1..].iter().product();
    let d = m.rows();
    let cols = m.cols();
    let mut vals = vec![Complex::zero(); dp];
    for base in (0..d).filter(|i| (i / stride).is_multiple_of(dp)) {
        for c in 0..cols {
            for (b, v) in vals.iter_mut().enumerate() {
                *v = m[(base + b * stride, c)];
            }
            for a in 0..dp {
                let mut acc = Complex::zero();
                for (b, v) in vals.iter().enumerate() {
                    acc = acc + op[(a, b)] * v;
                }
                m[(base + a * stride, c)] = acc;
            }
        }
    }
}

/// m ← m (I ⊗ op ⊗ I)†.
pub(crate) fn right_apply_local_adjoint<T: Real>(
    m: &mut ComplexMatrix<T>,
    dims: &[usize],
    party: usize,
    op: &ComplexMatrix<T>,
) {
    let dp = dims[party];
    let stride: usize = dims[party + 1..].iter().product();
    let d = m.cols();
    let rows = m.rows();
    let mut vals = vec![Complex::zero(); dp];
    for base in (0..d).filter(|i| (i / stride).is_multiple_of(dp)) {
        for r in 0..rows {
            for (b, v) in vals.iter_mut().enumerate() {
                *v = m[(r, base + b * stride)];
            }
            for a in 0..dp {
                let mut acc = Complex::zero();
                for (b, v) in vals.iter().enumerate() {
                    acc = acc + v * op[(a, b)].conj();
                }
                m[(r, base + a * stride)] = acc;
            }
        }
    }
}

/// m ← (I ⊗ op ⊗ I) m (I ⊗ op ⊗ I)†.
pub(crate) fn conjugate_local<T: Real>(
    m: &mut ComplexMatrix<T>,
    dims: &[usize],
    party: usize,
    op: &ComplexMatrix<T>,
) -> Result<()> {
    if party >= dims.len() {
        return Err(Error::Usage(format!(
            "party {party} out of range for {} parties",
            dims.len()
        )));
    }
    if !op.is_square() || op.rows() != dims[party] {
        return Err(Error::Dimension(format!(
            "{}x{} operator on a party of dimension {}",
            op.rows(),
            op.cols(),
            dims[party]
        )));
    }
    left_apply_local(m, dims, party, op);
    right_apply_local_adjoint(m, dims, party, op);
    Ok(())
}
