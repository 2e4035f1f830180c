//! Detector model: measurement directions, their projector pairs, and the
//! joint outcome distribution every entropic quantity is computed from.
//!
//! A detector is described by a direction n̂ on the Bloch sphere and measures
//! the pair P± = (I ± n̂·σ)/2. A planar angle α denotes the direction
//! (sin α, 0, cos α) on the x–z great circle, so the angle parameterises the
//! Bloch direction itself and the state-space amplitudes of P₊ carry α/2.
//!
//! Outcome bit 0 is the `+` result. Outcome tables are indexed by bitstring
//! with party 0 as the most significant bit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qcore::{conjugate_local, normalize_party_set, ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

/// One party's measurement direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direction<T: Real> {
    /// Angle on the x–z great circle, reduced to [0, 2π).
    Planar(T),
    /// Unit Bloch vector.
    Sphere([T; 3]),
}

impl<T: Real> Direction<T> {
    pub fn planar(alpha: T) -> Self {
        let tau = T::TAU();
        let mut a = alpha % tau;
        if a < T::zero() {
            a = a + tau;
        }
        if a >= tau {
            a = a - tau;
        }
        Direction::Planar(a)
    }

    pub fn sphere(n: [T; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if len.is_nan() || (len - T::one()).abs() > T::eq_tol() {
            return Err(Error::Domain(format!(
                "direction {n:?} is not a unit vector (|n| = {len})"
            )));
        }
        Ok(Direction::Sphere(n))
    }

    /// Normalizes `n` first; for generated directions.
    pub fn sphere_normalized(n: [T; 3]) -> Result<Self> {
        let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if !len.is_finite() || len <= T::zero() {
            return Err(Error::Domain(format!("cannot normalize direction {n:?}")));
        }
        Ok(Direction::Sphere([n[0] / len, n[1] / len, n[2] / len]))
    }

    pub fn unit_vector(&self) -> [T; 3] {
        match *self {
            Direction::Planar(a) => [a.sin(), T::zero(), a.cos()],
            Direction::Sphere(n) => n,
        }
    }

    /// Orthonormal eigenvectors (u₊, u₋) of n̂·σ with eigenvalues ±1.
    ///
    /// Each is read off a column of the corresponding projector, choosing the
    /// column with the larger norm so neither pole loses precision.
    fn eigenvectors(&self) -> ([Complex<T>; 2], [Complex<T>; 2]) {
        let [x, y, z] = self.unit_vector();
        let one = T::one();
        let two = T::lit(2.0);
        let zero = T::zero();
        let up = if z >= zero {
            let s = (two * (one + z)).sqrt();
            [
                Complex::new((one + z) / s, zero),
                Complex::new(x / s, y / s),
            ]
        } else {
            let s = (two * (one - z)).sqrt();
            [
                Complex::new(x / s, -y / s),
                Complex::new((one - z) / s, zero),
            ]
        };
        let down = if z <= zero {
            let s = (two * (one - z)).sqrt();
            [
                Complex::new((one - z) / s, zero),
                Complex::new(-x / s, -y / s),
            ]
        } else {
            let s = (two * (one + z)).sqrt();
            [
                Complex::new(-x / s, y / s),
                Complex::new((one + z) / s, zero),
            ]
        };
        (up, down)
    }
}

/// One direction per party.
#[derive(Clone, Debug, PartialEq)]
pub struct DetectorSetting<T: Real> {
    pub directions: Vec<Direction<T>>,
}

impl<T: Real> DetectorSetting<T> {
    pub fn new(directions: Vec<Direction<T>>) -> Self {
        Self { directions }
    }

    pub fn planar(angles: &[T]) -> Self {
        Self::new(angles.iter().map(|&a| Direction::planar(a)).collect())
    }

    pub fn parties(&self) -> usize {
        self.directions.len()
    }
}

/// (P₊, P₋) = ((I + n̂·σ)/2, (I − n̂·σ)/2).
pub fn projectors<T: Real>(direction: &Direction<T>) -> (ComplexMatrix<T>, ComplexMatrix<T>) {
    let [x, y, z] = direction.unit_vector();
    let h = T::lit(0.5);
    let zero = T::zero();
    let build = |s: T| {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex::new(h + s * h * z, zero),
                Complex::new(s * h * x, -s * h * y),
                Complex::new(s * h * x, s * h * y),
                Complex::new(h - s * h * z, zero),
            ],
        )
        .expect("2x2")
    };
    (build(T::one()), build(-T::one()))
}

/// Joint probabilities over binary outcomes of all parties.
#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeDistribution<T: Real> {
    parties: usize,
    probs: Vec<T>,
}

impl<T: Real> OutcomeDistribution<T> {
    /// Checks normalization and sign; entries in [−1e-12, 0) are clamped to 0.
    pub fn new(parties: usize, probs: Vec<T>) -> Result<Self> {
        if parties == 0 || parties > usize::BITS as usize - 1 || probs.len() != 1 << parties {
            return Err(Error::Distribution(format!(
                "{} probabilities for {parties} binary parties",
                probs.len()
            )));
        }
        let mut probs = probs;
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -T::prob_neg_tol() {
                return Err(Error::Distribution(format!("invalid probability {p}")));
            }
            if *p < T::zero() {
                *p = T::zero();
            }
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::prob_sum_tol() {
            return Err(Error::Distribution(format!("probabilities sum to {total}")));
        }
        Ok(Self { parties, probs })
    }

    pub fn uniform(parties: usize) -> Self {
        let n = 1usize << parties;
        Self {
            parties,
            probs: vec![T::one() / T::lit(n as f64); n],
        }
    }

    #[inline]
    pub fn parties(&self) -> usize {
        self.parties
    }

    #[inline]
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of the outcome bitstring `bits` (party 0 most significant).
    pub fn prob(&self, bits: usize) -> T {
        self.probs[bits]
    }
}

/// probs[b] = Tr((⊗ᵢ P_{bᵢ}) ρ), computed exactly.
///
/// Each party's basis is rotated onto its detector eigenbasis and the diagonal
/// of the rotated state is read off.
pub fn joint_distribution<T: Real>(
    rho: &DensityMatrix<T>,
    settings: &DetectorSetting<T>,
) -> Result<OutcomeDistribution<T>> {
    if !rho.is_qubits() {
        return Err(Error::Dimension(format!(
            "detector model needs qubits, got dims {:?}",
            rho.dims()
        )));
    }
    if settings.parties() != rho.parties() {
        return Err(Error::Dimension(format!(
            "{} detector directions for {} parties",
            settings.parties(),
            rho.parties()
        )));
    }
    let mut m = rho.matrix().clone();
    for (party, dir) in settings.directions.iter().enumerate() {
        let (up, down) = dir.eigenvectors();
        let v = ComplexMatrix::from_vec(
            2,
            2,
            vec![up[0].conj(), up[1].conj(), down[0].conj(), down[1].conj()],
        )
        .expect("2x2");
        conjugate_local(&mut m, rho.dims(), party, &v)?;
    }
    let slack = T::psd_slack();
    let probs = (0..rho.dim())
        .map(|b| {
            let p = m[(b, b)].re;
            // the state itself is only PSD up to `slack`
            if p < T::zero() && p >= -slack {
                T::zero()
            } else {
                p
            }
        })
        .collect();
    OutcomeDistribution::new(rho.parties(), probs)
}

/// Sums out every party not in `keep`. Kept parties retain ascending order.
pub fn marginalize<T: Real>(
    dist: &OutcomeDistribution<T>,
    keep: &[usize],
) -> Result<OutcomeDistribution<T>> {
    let keep = normalize_party_set(keep, dist.parties)?;
    Ok(marginalize_sorted(dist, &keep))
}

/// `keep` must be sorted, unique and in range.
pub(crate) fn marginalize_sorted<T: Real>(
    dist: &OutcomeDistribution<T>,
    keep: &[usize],
) -> OutcomeDistribution<T> {
    let d = dist.parties;
    if keep.len() == d {
        return dist.clone();
    }
    let k = keep.len();
    let mut out = vec![T::zero(); 1 << k];
    for (b, &p) in dist.probs.iter().enumerate() {
        let mut idx = 0usize;
        for &party in keep {
            idx = (idx << 1) | ((b >> (d - 1 - party)) & 1);
        }
        out[idx] = out[idx] + p;
    }
    OutcomeDistribution {
        parties: k,
        probs: out,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::tensor_all;
    use crate::states::{classical_corr, ghz, product, random_mixed, singlet, werner};
    use std::f64::consts::PI;

    /// Independent route: explicit ⊗ of projector matrices, then Tr(Π ρ).
    fn oracle(rho: &DensityMatrix<f64>, s: &DetectorSetting<f64>) -> Vec<f64> {
        let pairs: Vec<_> = s.directions.iter().map(projectors).collect();
        let d = s.parties();
        (0..1usize << d)
            .map(|b| {
                let factors: Vec<&ComplexMatrix<f64>> = (0..d)
                    .map(|p| {
                        if (b >> (d - 1 - p)) & 1 == 0 {
                            &pairs[p].0
                        } else {
                            &pairs[p].1
                        }
                    })
                    .collect();
                let pi = tensor_all(factors).unwrap();
                (&pi * rho.matrix()).trace().re
            })
            .collect()
    }

    #[test]
    fn projector_examples() {
        let (p, m) = projectors(&Direction::planar(0.0));
        assert!(p.approx_eq_default(&ComplexMatrix::diag(&[1.0, 0.0])));
        assert!(m.approx_eq_default(&ComplexMatrix::diag(&[0.0, 1.0])));
        let (p, _) = projectors(&Direction::planar(PI));
        assert!(p.approx_eq_default(&ComplexMatrix::diag(&[0.0, 1.0])));
        let (p, _) = projectors(&Direction::planar(PI / 2.0));
        assert!(p.approx_eq_default(
            &ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap()
        ));
    }

    #[test]
    fn projectors_are_complete_idempotent_pairs() {
        for k in 0..50 {
            let t = k as f64 * 0.37;
            let dir =
                Direction::sphere_normalized([t.sin(), (2.0 * t).cos(), t.cos() - 0.2]).unwrap();
            let (p, m) = projectors(&dir);
            assert!((&p + &m).approx_eq_default(&ComplexMatrix::identity(2)));
            assert!((&p * &p).approx_eq_default(&p));
            assert!((&m * &m).approx_eq_default(&m));
        }
    }

    #[test]
    fn planar_angle_is_reduced() {
        assert_eq!(
            Direction::planar(-PI / 2.0),
            Direction::planar(3.0 * PI / 2.0)
        );
        let Direction::Planar(a) = Direction::planar(5.0 * PI) else {
            unreachable!()
        };
        assert!((a - PI).abs() < 1e-12);
        assert!(Direction::<f64>::sphere([1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let s = DetectorSetting::planar(&[0.3, 2.1]);
        let d = joint_distribution(&werner::<f64>(0.0).unwrap(), &s).unwrap();
        for &p in d.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn singlet_perfect_anticorrelation() {
        let s = DetectorSetting::planar(&[1.1, 1.1]);
        let d = joint_distribution(&singlet::<f64>(), &s).unwrap();
        assert!(d.prob(0b00).abs() < 1e-15 && d.prob(0b11).abs() < 1e-15);
        assert!((d.prob(0b01) - 0.5).abs() < 1e-15 && (d.prob(0b10) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singlet_agreement_closed_form() {
        // Oracle: explicit 4x4 projector contraction, then compare both
        // against sin²((α − β)/2).
        for i in 0..16 {
            for j in 0..16 {
                let (a, b) = (i as f64 * PI / 8.0, j as f64 * 0.41);
                let s = DetectorSetting::planar(&[a, b]);
                let d = joint_distribution(&singlet(), &s).unwrap();
                let o = oracle(&singlet(), &s);
                let same = d.prob(0) + d.prob(3);
                assert!((same - (o[0] + o[3])).abs() < 1e-14);
                assert!((same - ((a - b) / 2.0).sin().powi(2)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_projector_oracle_on_random_states() {
        for seed in 0..20 {
            let rho = random_mixed::<f64>(3, seed).unwrap();
            let dirs = (0..3)
                .map(|p| {
                    let t = (seed * 3 + p) as f64;
                    Direction::sphere_normalized([t.sin(), (1.7 * t).cos(), (0.3 * t).sin() - 0.5])
                        .unwrap()
                })
                .collect();
            let s = DetectorSetting::new(dirs);
            let d = joint_distribution(&rho, &s).unwrap();
            for (a, b) in d.probs().iter().zip(oracle(&rho, &s)) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn planar_and_sphere_agree_exactly() {
        let rho = random_mixed::<f64>(2, 4).unwrap();
        for k in 0..20 {
            let (a, b) = (k as f64 * 0.31, k as f64 * 0.77 + 1.0);
            let planar = DetectorSetting::planar(&[a, b]);
            let sphere = DetectorSetting::new(
                planar
                    .directions
                    .iter()
                    .map(|d| Direction::Sphere(d.unit_vector()))
                    .collect(),
            );
            assert_eq!(
                joint_distribution(&rho, &planar).unwrap(),
                joint_distribution(&rho, &sphere).unwrap()
            );
        }
    }

    #[test]
    fn product_state_factorizes() {
        let a = [0.6, 0.0, 0.8];
        let b = [0.0, -0.6, 0.8];
        let rho = product::<f64>(&[a, b]).unwrap();
        let s = DetectorSetting::new(vec![
            Direction::sphere_normalized([1.0, 2.0, 0.5]).unwrap(),
            Direction::sphere_normalized([-0.3, 0.1, 1.0]).unwrap(),
        ]);
        let joint = joint_distribution(&rho, &s).unwrap();
        let ma = marginalize(&joint, &[0]).unwrap();
        let mb = marginalize(&joint, &[1]).unwrap();
        for bits in 0..4 {
            let expect = ma.prob(bits >> 1) * mb.prob(bits & 1);
            assert!((joint.prob(bits) - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        let s = DetectorSetting::planar(&[0.0]);
        assert!(matches!(
            joint_distribution(&singlet(), &s),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn marginal_examples() {
        let u = OutcomeDistribution::<f64>::uniform(3);
        assert_eq!(marginalize(&u, &[0]).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(marginalize(&u, &[2, 0, 1]).unwrap(), u);
        assert!(marginalize(&u, &[]).is_err());

        let g = joint_distribution(&ghz::<f64>(3).unwrap(), &DetectorSetting::planar(&[0.0; 3]))
            .unwrap();
        for p in 0..3 {
            let m = marginalize(&g, &[p]).unwrap();
            assert!((m.prob(0) - 0.5).abs() < 1e-15 && (m.prob(1) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_bit_order() {
        // P(A=0, B=1, C=0) = 1; keep {A, B} -> index 0b01, keep {B, C} -> 0b10.
        let mut probs = vec![0.0; 8];
        probs[0b010] = 1.0;
        let d = OutcomeDistribution::new(3, probs).unwrap();
        assert_eq!(marginalize(&d, &[0, 1]).unwrap().prob(0b01), 1.0);
        assert_eq!(marginalize(&d, &[1, 2]).unwrap().prob(0b10), 1.0);
    }

    #[test]
    fn distribution_validation() {
        assert!(OutcomeDistribution::<f64>::new(1, vec![0.5, 0.6]).is_err());
        assert!(OutcomeDistribution::<f64>::new(1, vec![1.0 + 1e-13, -1e-13]).is_ok());
        assert!(OutcomeDistribution::<f64>::new(1, vec![1.1, -0.1]).is_err());
        assert!(OutcomeDistribution::<f64>::new(2, vec![1.0, 0.0]).is_err());
        let d = OutcomeDistribution::<f64>::new(1, vec![1.0 + 1e-13, -1e-13]).unwrap();
        assert_eq!(d.prob(1), 0.0);
    }

    #[test]
    fn classical_corr_z_outcomes() {
        let d = joint_distribution(
            &classical_corr::<f64>(),
            &DetectorSetting::planar(&[0.0, 0.0]),
        )
        .unwrap();
        assert_eq!(d.probs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    mod proptests {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn distributions_are_normalized(seed in 0u64..10_000, n in 1usize..=4, angles in prop::collection::vec((0.0..PI, 0.0..2.0*PI), 4)) {
                let rho = random_mixed::<f64>(n, seed).unwrap();
                let dirs = angles[..n].iter().map(|&(t, f)| {
                    Direction::sphere_normalized([t.sin() * f.cos(), t.sin() * f.sin(), t.cos()]).unwrap()
                }).collect();
                let d = joint_distribution(&rho, &DetectorSetting::new(dirs)).unwrap();
                let total: f64 = d.probs().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-10);
                prop_assert!(d.probs().iter().all(|&p| p >= 0.0));
            }
        }
    }
}
