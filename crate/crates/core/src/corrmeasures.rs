//! Reference correlation measures for two qubits, plus quantum relative
//! entropy and the measurement-count fidelity curve built on it.
//!
//! Entropies are in bits throughout; the fidelity exponent converts to nats.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infogeom::shannon_entropy;
use crate::measure::Direction;
use crate::qcore::{hermitian_eigen, hermitian_eigenvalues, pauli, tensor_product, DensityMatrix};
use crate::scalar::Real;

/// Eigenvalues below this are treated as zero.
pub const EIGEN_FLOOR: f64 = 1e-12;

fn require_two_qubits<T: Real>(rho: &DensityMatrix<T>) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::Dimension(format!(
            "expected a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// S(ρ) = −Tr ρ log₂ ρ.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let ev = rho.eigenvalues()?;
    Ok(shannon_entropy(&ev))
}

/// √v, with eigenvalues at rounding level relative to `scale` sent to 0.
fn rounding_sqrt<T: Real>(v: T, scale: T) -> T {
    if v <= T::lit(64.0) * T::epsilon() * scale {
        T::zero()
    } else {
        v.sqrt()
    }
}

/// Wootters concurrence.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    require_two_qubits(rho)?;
    let [_, sy, _] = pauli::<T>();
    let yy = tensor_product(&sy, &sy);
    let m = rho.matrix();
    let tilde = &(&yy * &m.conj()) * &yy;
    let root = hermitian_eigen(m)?.reconstruct_with(|v| rounding_sqrt(v, T::one()));
    let mut r = &(&root * &tilde) * &root;
    r.symmetrize();
    let ev = hermitian_eigenvalues(&r)?;
    let scale = ev.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let mut mu: Vec<T> = ev.into_iter().map(|v| rounding_sqrt(v, scale)).collect();
    mu.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(T::zero()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordSearchConfig<T: Real> {
    /// Azimuthal grid points per Bloch sphere.
    pub phi_steps: usize,
    /// Polar grid points per Bloch sphere, poles included.
    pub theta_steps: usize,
    /// Coordinate-descent iteration budget.
    pub refine_iters: usize,
    /// Gain in bits below which refinement at fine resolution counts as converged.
    pub tolerance: T,
}

impl<T: Real> Default for DiscordSearchConfig<T> {
    fn default() -> Self {
        Self {
            phi_steps: 24,
            theta_steps: 12,
            refine_iters: 400,
            tolerance: T::lit(1e-10),
        }
    }
}

impl<T: Real> DiscordSearchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.phi_steps < 8 || self.theta_steps < 8 {
            return Err(Error::Usage(format!(
                "discord grid resolution must be ≥ 8 per angle, got {}×{}",
                self.phi_steps, self.theta_steps
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= T::zero() {
            return Err(Error::Usage(format!(
                "discord tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscordResult<T: Real> {
    /// Refined discord in bits, clamped at 0.
    pub value: T,
    /// Best value on the coarse grid alone.
    pub coarse_value: T,
    /// Measurement directions achieving `value`.
    pub directions: [Direction<T>; 2],
    /// Set when refinement ran out of iterations.
    pub approximate: bool,
}

/// Local Bloch vectors and correlation tensor of a two-qubit state.
struct BlochForm<T> {
    a: [T; 3],
    b: [T; 3],
    t: [[T; 3]; 3],
}

impl<T: Real> BlochForm<T> {
    fn of(rho: &DensityMatrix<T>) -> Self {
        let sig = pauli::<T>();
        let id = crate::qcore::ComplexMatrix::identity(2);
        let ev = |op: &crate::qcore::ComplexMatrix<T>| (rho.matrix() * op).trace().re;
        let a = std::array::from_fn(|i| ev(&tensor_product(&sig[i], &id)));
        let b = std::array::from_fn(|j| ev(&tensor_product(&id, &sig[j])));
        let t =
            std::array::from_fn(|i| std::array::from_fn(|j| ev(&tensor_product(&sig[i], &sig[j]))));
        Self { a, b, t }
    }

    /// Classical mutual information of projective measurements along n and m.
    fn classical_mi(&self, n: &[T; 3], m: &[T; 3]) -> T {
        let dot = |u: &[T; 3], v: &[T; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
        let an = dot(&self.a, n);
        let bm = dot(&self.b, m);
        let tm: [T; 3] = std::array::from_fn(|i| dot(&self.t[i], m));
        let ntm = dot(n, &tm);
        let q = T::lit(0.25);
        let one = T::one();
        let joint = [
            (one + an + bm + ntm) * q,
            (one + an - bm - ntm) * q,
            (one - an + bm - ntm) * q,
            (one - an - bm + ntm) * q,
        ]
        .map(|p| p.max(T::zero()));
        let half = T::lit(0.5);
        let pa = [(one + an) * half, (one - an) * half].map(|p| p.max(T::zero()));
        let pb = [(one + bm) * half, (one - bm) * half].map(|p| p.max(T::zero()));
        shannon_entropy(&pa) + shannon_entropy(&pb) - shannon_entropy(&joint)
    }
}

fn angles_to_vector<T: Real>(theta: T, phi: T) -> [T; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// Quantum mutual information S(A) + S(B) − S(AB) in bits.
pub fn quantum_mutual_information<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    require_two_qubits(rho)?;
    let sa = von_neumann_entropy(&rho.partial_trace(&[0])?)?;
    let sb = von_neumann_entropy(&rho.partial_trace(&[1])?)?;
    Ok(sa + sb - von_neumann_entropy(rho)?)
}

/// Global quantum discord: quantum mutual information minus the largest
/// classical mutual information reachable by local projective measurements.
pub fn global_quantum_discord<T: Real>(
    rho: &DensityMatrix<T>,
    cfg: &DiscordSearchConfig<T>,
) -> Result<DiscordResult<T>> {
    cfg.validate()?;
    let iq = quantum_mutual_information(rho)?;
    let form = BlochForm::of(rho);

    let thetas: Vec<T> = (0..cfg.theta_steps)
        .map(|i| T::PI() * T::lit(i as f64 / (cfg.theta_steps - 1) as f64))
        .collect();
    let phis: Vec<T> = (0..cfg.phi_steps)
        .map(|j| T::TAU() * T::lit(j as f64 / cfg.phi_steps as f64))
        .collect();
    let grid: Vec<(T, T)> = thetas
        .iter()
        .flat_map(|&t| phis.iter().map(move |&p| (t, p)))
        .collect();
    let vectors: Vec<[T; 3]> = grid.iter().map(|&(t, p)| angles_to_vector(t, p)).collect();

    let g = grid.len();
    let scores: Vec<T> = (0..g * g)
        .into_par_iter()
        .map(|k| form.classical_mi(&vectors[k / g], &vectors[k % g]))
        .collect();
    let mut best_k = 0;
    for (k, &s) in scores.iter().enumerate() {
        if s > scores[best_k] {
            best_k = k;
        }
    }
    let coarse_mi = scores[best_k];
    let (ta, pa) = grid[best_k / g];
    let (tb, pb) = grid[best_k % g];

    let objective = |x: &[T; 4]| {
        form.classical_mi(&angles_to_vector(x[0], x[1]), &angles_to_vector(x[2], x[3]))
    };
    let mut x = [ta, pa, tb, pb];
    let mut best = coarse_mi;
    let mut step = T::PI() / T::lit((cfg.theta_steps - 1) as f64);
    let fine = T::PI() * T::lit(1e-6);
    let mut gain_since_halving = T::zero();
    let mut converged = false;
    for _ in 0..cfg.refine_iters {
        let mut moved = false;
        for c in 0..4 {
            for sign in [T::one(), -T::one()] {
                let mut y = x;
                y[c] = y[c] + sign * step;
                let v = objective(&y);
                if v > best {
                    gain_since_halving = gain_since_halving + (v - best);
                    best = v;
                    x = y;
                    moved = true;
                }
            }
        }
        if !moved {
            if step < fine && gain_since_halving < cfg.tolerance {
                converged = true;
                break;
            }
            step = step * T::lit(0.5);
            gain_since_halving = T::zero();
        }
    }

    let clamp = |v: T| v.max(T::zero());
    Ok(DiscordResult {
        value: clamp(iq - best),
        coarse_value: clamp(iq - coarse_mi),
        directions: [
            Direction::Sphere(angles_to_vector(x[0], x[1])),
            Direction::Sphere(angles_to_vector(x[2], x[3])),
        ],
        approximate: !converged,
    })
}

/// S(ρ₁‖ρ₂) = Tr ρ₁(log₂ρ₁ − log₂ρ₂).
///
/// Fails with [`Error::SupportViolation`] when ρ₁ puts weight on the null
/// space of ρ₂.
pub fn relative_entropy<T: Real>(rho1: &DensityMatrix<T>, rho2: &DensityMatrix<T>) -> Result<T> {
    if rho1.dims() != rho2.dims() {
        return Err(Error::Dimension(format!(
            "relative entropy between dims {:?} and {:?}",
            rho1.dims(),
            rho2.dims()
        )));
    }
    let floor = T::lit(EIGEN_FLOOR);
    let neg_entropy: T = rho1
        .eigenvalues()?
        .into_iter()
        .filter(|&p| p > floor)
        .map(|p| p * p.log2())
        .sum();
    let e2 = hermitian_eigen(rho2.matrix())?;
    let m1 = rho1.matrix();
    let n = e2.values.len();
    let mut cross = T::zero();
    for (j, &q) in e2.values.iter().enumerate() {
        let v = e2.vector(j);
        let mut w = Complex::new(T::zero(), T::zero());
        for r in 0..n {
            let mut row = Complex::new(T::zero(), T::zero());
            for c in 0..n {
                row = row + m1[(r, c)] * v[c];
            }
            w = w + v[r].conj() * row;
        }
        let w = w.re.max(T::zero());
        if q <= floor {
            if w > floor {
                return Err(Error::SupportViolation(w.as_f64()));
            }
            continue;
        }
        cross = cross + w * q.log2();
    }
    Ok((neg_entropy - cross).max(T::zero()))
}

/// 1 − exp(−n·S·ln 2) for S in bits.
pub fn fidelity_from_bits<T: Real>(s_bits: T, n: u64) -> T {
    let x = T::lit(n as f64) * s_bits * T::LN_2();
    -(-x).exp_m1()
}

/// Distinguishing fidelity after `n` measurements.
pub fn sanov_fidelity<T: Real>(
    rho1: &DensityMatrix<T>,
    rho2: &DensityMatrix<T>,
    n: u64,
) -> Result<T> {
    Ok(fidelity_from_bits(relative_entropy(rho1, rho2)?, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{joint_distribution, DetectorSetting};
    use crate::qcore::haar_random_unitary;
    use crate::states::{
        bell, classical_corr, product, random_mixed, random_pure, singlet, werner,
    };
    use num_complex::Complex64;

    fn hb(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    }

    #[test]
    fn concurrence_of_bell_pair() {
        assert!((concurrence(&bell::<f64>()).unwrap() - 1.0).abs() < 1e-10);
        assert!((concurrence(&singlet::<f64>()).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn concurrence_of_werner_family() {
        for k in 0..=20 {
            let l = k as f64 / 20.0;
            let c = concurrence(&werner(l).unwrap()).unwrap();
            let expect = ((3.0 * l - 1.0) / 2.0).max(0.0);
            assert!((c - expect).abs() < 1e-9, "λ={l}: {c} vs {expect}");
        }
        assert!(concurrence(&werner(1.0 / 3.0).unwrap()).unwrap() < 1e-9);
    }

    #[test]
    fn concurrence_of_pure_states_matches_amplitude_formula() {
        // For |ψ⟩ = a|00⟩ + b|01⟩ + c|10⟩ + d|11⟩, C = 2|ad − bc|.
        for seed in 0..20 {
            let rho = random_pure::<f64>(2, seed).unwrap();
            // recover amplitudes from the first nonzero column
            let m = rho.matrix();
            let col = (0..4)
                .max_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap())
                .unwrap();
            let norm = m[(col, col)].re.sqrt();
            let amp: Vec<Complex64> = (0..4).map(|i| m[(i, col)] / norm).collect();
            let expect = 2.0 * (amp[0] * amp[3] - amp[1] * amp[2]).norm();
            let got = concurrence(&rho).unwrap();
            assert!(
                (got - expect).abs() < 1e-9,
                "seed {seed}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn concurrence_product_and_lu_invariance() {
        let p = product::<f64>(&[[0.3, 0.1, 0.5], [0.0, -0.6, 0.2]]).unwrap();
        assert!(concurrence(&p).unwrap() < 1e-9);
        for seed in 0..10 {
            let rho = random_mixed::<f64>(2, seed).unwrap();
            let us = [
                haar_random_unitary(2, 100 + seed),
                haar_random_unitary(2, 200 + seed),
            ];
            let moved = rho.apply_local_unitaries(&us).unwrap();
            assert!((concurrence(&rho).unwrap() - concurrence(&moved).unwrap()).abs() < 1e-9);
        }
        assert!(concurrence(&random_mixed::<f64>(3, 0).unwrap()).is_err());
    }

    #[test]
    fn bloch_probabilities_match_projector_route() {
        let rho = random_mixed::<f64>(2, 9).unwrap();
        let form = BlochForm::of(&rho);
        let n = angles_to_vector(0.7, 2.1);
        let m = angles_to_vector(2.3, -0.4);
        let dist = joint_distribution(
            &rho,
            &DetectorSetting::new(vec![Direction::Sphere(n), Direction::Sphere(m)]),
        )
        .unwrap();
        let p = dist.probs();
        let direct = shannon_entropy(&[p[0] + p[1], p[2] + p[3]])
            + shannon_entropy(&[p[0] + p[2], p[1] + p[3]])
            - shannon_entropy(p);
        assert!((form.classical_mi(&n, &m) - direct).abs() < 1e-12);
    }

    #[test]
    fn discord_reference_values() {
        let cfg = DiscordSearchConfig::default();
        let b = global_quantum_discord(&bell::<f64>(), &cfg).unwrap();
        assert!((b.value - 1.0).abs() < 1e-4);
        let c = global_quantum_discord(&classical_corr::<f64>(), &cfg).unwrap();
        assert!(c.value < 1e-6);
        let w = global_quantum_discord(&werner::<f64>(0.0).unwrap(), &cfg).unwrap();
        assert!(w.value.abs() < 1e-12);
    }

    #[test]
    fn discord_of_werner_matches_bell_diagonal_form() {
        // Bell-diagonal with isotropic correlations: the best measurement is
        // any common axis, giving I_cl = 1 − H_bin((1+λ)/2).
        for k in 0..=10 {
            let l = k as f64 / 10.0;
            let rho = werner(l).unwrap();
            let ev = [
                (1.0 + 3.0 * l) / 4.0,
                (1.0 - l) / 4.0,
                (1.0 - l) / 4.0,
                (1.0 - l) / 4.0,
            ];
            let s_ab: f64 = ev.iter().filter(|&&p| p > 0.0).map(|p| -p * p.log2()).sum();
            let expect = (2.0 - s_ab) - (1.0 - hb((1.0 + l) / 2.0));
            let d = global_quantum_discord(&rho, &DiscordSearchConfig::default()).unwrap();
            assert!(
                (d.value - expect).abs() < 1e-8,
                "λ={l}: {} vs {expect}",
                d.value
            );
            assert!(d.value <= d.coarse_value + 1e-15);
        }
    }

    #[test]
    fn discord_refinement_only_improves() {
        for seed in 0..6 {
            let rho = random_mixed::<f64>(2, seed).unwrap();
            let d = global_quantum_discord(&rho, &DiscordSearchConfig::default()).unwrap();
            assert!(d.value >= -1e-9);
            assert!(d.value <= d.coarse_value);
        }
        let bad = DiscordSearchConfig::<f64> {
            phi_steps: 4,
            ..Default::default()
        };
        assert!(global_quantum_discord(&bell::<f64>(), &bad).is_err());
    }

    #[test]
    fn relative_entropy_reference_values() {
        let w = werner::<f64>(0.5).unwrap();
        assert!(relative_entropy(&w, &w).unwrap().abs() < 1e-12);
        let zero = product::<f64>(&[[0.0, 0.0, 1.0]]).unwrap();
        let mixed = product::<f64>(&[[0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(relative_entropy(&zero, &mixed).unwrap(), 1.0);
        let s = relative_entropy(&w, &werner(0.0).unwrap()).unwrap();
        let h: f64 = [0.625, 0.125, 0.125, 0.125]
            .iter()
            .map(|p: &f64| -p * p.log2())
            .sum();
        assert!((s - (2.0 - h)).abs() < 1e-12);
    }

    #[test]
    fn support_violation_is_distinct() {
        let mixed = product::<f64>(&[[0.0, 0.0, 0.0]]).unwrap();
        let zero = product::<f64>(&[[0.0, 0.0, 1.0]]).unwrap();
        let err = relative_entropy(&mixed, &zero).unwrap_err();
        assert_eq!(err.code(), "support-violation");
        assert!(relative_entropy(&bell::<f64>(), &zero).is_err());
    }

    #[test]
    fn fidelity_curve() {
        let zero = product::<f64>(&[[0.0, 0.0, 1.0]]).unwrap();
        let mixed = product::<f64>(&[[0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(sanov_fidelity(&zero, &mixed, 0).unwrap(), 0.0);
        assert!((sanov_fidelity(&zero, &mixed, 1).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(sanov_fidelity(&zero, &zero, 50).unwrap(), 0.0);
        let curve: Vec<f64> = (0..60).map(|n| fidelity_from_bits(0.3f64, n)).collect();
        assert!(curve.windows(2).all(|w| w[1] >= w[0]));
        assert!((fidelity_from_bits(0.3f64, 1000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_precision_measures() {
        assert!((concurrence(&bell::<f32>()).unwrap() - 1.0).abs() < 1e-4);
        let d = global_quantum_discord(&bell::<f32>(), &DiscordSearchConfig::default()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-3);
    }
}
