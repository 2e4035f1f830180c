use num_complex::Complex;

use super::density::{conjugate_local, DensityMatrix};
use super::matrix::{pauli, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Completely positive trace-preserving map in Kraus form, ρ ↦ Σ K ρ K†.
#[derive(Clone, Debug)]
pub struct KrausChannel<T: Real> {
    operators: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    pub fn new(operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Usage("channel needs at least one Kraus operator".into()))?;
        let d = first.rows();
        if operators.iter().any(|k| !k.is_square() || k.rows() != d) {
            return Err(Error::Dimension(
                "Kraus operators must share one square dimension".into(),
            ));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for k in &operators {
            sum = &sum + &(&k.adjoint() * k);
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > T::completeness_tol() {
            return Err(Error::Completeness(dev.as_f64()));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn unitary(u: ComplexMatrix<T>) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Qubit depolarizing channel ρ ↦ (1 − p) ρ + p I/2.
    pub fn depolarizing(p: T) -> Result<Self> {
        if !(T::zero()..=T::one()).contains(&p) {
            return Err(Error::Domain(format!(
                "depolarizing probability {p} outside [0, 1]"
            )));
        }
        let quarter = T::lit(0.25);
        let k0 =
            ComplexMatrix::identity(2).scale_real((T::one() - T::lit(3.0) * p * quarter).sqrt());
        let w = (p * quarter).sqrt();
        let mut ops = vec![k0];
        ops.extend(
            pauli::<T>()
                .iter()
                .map(|s| s.scale(Complex::new(w, T::zero()))),
        );
        Self::new(ops)
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }
}

/// Σ_k K_k ρ K_k† with every K_k acting on `party`.
pub fn apply_channel<T: Real>(
    rho: &DensityMatrix<T>,
    channel: &KrausChannel<T>,
    party: usize,
) -> Result<DensityMatrix<T>> {
    if party >= rho.parties() {
        return Err(Error::Usage(format!(
            "party {party} out of range for {} parties",
            rho.parties()
        )));
    }
    if channel.dim() != rho.dims()[party] {
        return Err(Error::Dimension(format!(
            "channel of dimension {} on party of dimension {}",
            channel.dim(),
            rho.dims()[party]
        )));
    }
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for k in channel.operators() {
        let mut term = rho.matrix().clone();
        conjugate_local(&mut term, rho.dims(), party, k)?;
        acc = &acc + &term;
    }
    DensityMatrix::new_cp_output(rho.dims().to_vec(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::tensor_product;

    fn plus_state() -> DensityMatrix<f64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(vec![2], &[Complex::new(s, 0.0), Complex::new(s, 0.0)]).unwrap()
    }

    #[test]
    fn identity_channel_is_noop() {
        let rho = plus_state();
        let out = apply_channel(&rho, &KrausChannel::identity(2), 0).unwrap();
        assert!(out.approx_eq(&rho, 0.0));
    }

    #[test]
    fn full_depolarization_gives_maximally_mixed() {
        let ch = KrausChannel::depolarizing(1.0).unwrap();
        let out = apply_channel(&plus_state(), &ch, 0).unwrap();
        assert!(out
            .matrix()
            .approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn incomplete_kraus_set_is_rejected() {
        let k = ComplexMatrix::<f64>::identity(2).scale_real(0.9);
        assert!(matches!(
            KrausChannel::new(vec![k]),
            Err(Error::Completeness(_))
        ));
        assert!(KrausChannel::<f64>::depolarizing(1.2).is_err());
    }

    #[test]
    fn channel_on_second_party_matches_explicit_kron() {
        let ch = KrausChannel::depolarizing(0.3).unwrap();
        let a = plus_state();
        let two = DensityMatrix::new(vec![2, 2], tensor_product(a.matrix(), a.matrix())).unwrap();
        let out = apply_channel(&two, &ch, 1).unwrap();
        let mut explicit = ComplexMatrix::zeros(4, 4);
        for k in ch.operators() {
            let full = tensor_product(&ComplexMatrix::identity(2), k);
            explicit = &explicit + &two.matrix().conjugate_by(&full).unwrap();
        }
        assert!(out.matrix().approx_eq(&explicit, 1e-15));
        assert_eq!(out.matrix().hermitian_deviation(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ch = KrausChannel::<f64>::identity(4);
        assert!(matches!(
            apply_channel(&plus_state(), &ch, 0),
            Err(Error::Dimension(_))
        ));
    }
}
