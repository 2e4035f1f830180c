//! Named states and the textual state mini-language.
//!
//! Grammar: `name[:param[:param...]]` or `file:<path>`.
//!
//! | syntax                 | state                                           |
//! |------------------------|-------------------------------------------------|
//! | `bell`                 | (|00⟩+|11⟩)/√2                                   |
//! | `singlet`              | (|01⟩−|10⟩)/√2                                   |
//! | `werner:λ`             | λ·bell + (1−λ)/4 · I                            |
//! | `ghz:n`                | (|0…0⟩+|1…1⟩)/√2 on n qubits                     |
//! | `wstate:n`             | uniform superposition of single excitations     |
//! | `product:x:y:z[:…]`    | ⊗ (I + r·σ)/2, one Bloch vector per qubit       |
//! | `classical-corr`       | (|00⟩⟨00| + |11⟩⟨11|)/2                          |
//! | `random-pure:n:seed`   | seeded Gaussian pure state on n qubits          |
//! | `file:<path>`          | JSON interchange file                           |
//!
//! The Werner family is built on `bell`, the symmetric Bell state. It is
//! sometimes labelled a "singlet" in the literature; the antisymmetric singlet
//! is the separate `singlet` state, whose correlations are invariant under
//! U⊗U.

use std::path::PathBuf;

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qcore::{gaussian_matrix, tensor_all, ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

/// Largest supported party count.
pub const MAX_QUBITS: usize = 6;

fn qubit_dims(n: usize) -> Vec<usize> {
    vec![2; n]
}

fn check_qubits(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(Error::Domain(format!(
            "qubit count {n} outside [{min}, {MAX_QUBITS}]"
        )));
    }
    Ok(())
}

fn basis_amplitudes<T: Real>(n: usize, terms: &[(usize, T)]) -> Vec<Complex<T>> {
    let mut amps = vec![Complex::zero(); 1 << n];
    for &(idx, a) in terms {
        amps[idx] = Complex::new(a, T::zero());
    }
    amps
}

/// (|00⟩+|11⟩)/√2.
pub fn bell<T: Real>() -> DensityMatrix<T> {
    ghz(2).expect("two qubits in range")
}

/// (|01⟩−|10⟩)/√2.
pub fn singlet<T: Real>() -> DensityMatrix<T> {
    let s = T::FRAC_1_SQRT_2();
    DensityMatrix::from_pure(qubit_dims(2), &basis_amplitudes(2, &[(1, s), (2, -s)]))
        .expect("valid pure state")
}

/// λ·bell + (1−λ)/4·I₄.
pub fn werner<T: Real>(lambda: T) -> Result<DensityMatrix<T>> {
    if !(lambda >= T::zero() && lambda <= T::one()) {
        return Err(Error::Domain(format!("werner λ = {lambda} outside [0, 1]")));
    }
    let b = bell::<T>();
    let noise = (T::one() - lambda) * T::lit(0.25);
    let mut m = b.matrix().scale_real(lambda);
    for i in 0..4 {
        m[(i, i)] = m[(i, i)] + Complex::new(noise, T::zero());
    }
    DensityMatrix::new(qubit_dims(2), m)
}

pub fn ghz<T: Real>(n: usize) -> Result<DensityMatrix<T>> {
    check_qubits(n, 2)?;
    let s = T::FRAC_1_SQRT_2();
    DensityMatrix::from_pure(
        qubit_dims(n),
        &basis_amplitudes(n, &[(0, s), ((1 << n) - 1, s)]),
    )
}

pub fn wstate<T: Real>(n: usize) -> Result<DensityMatrix<T>> {
    check_qubits(n, 2)?;
    let a = T::one() / T::lit(n as f64).sqrt();
    let terms: Vec<(usize, T)> = (0..n).map(|k| (1usize << k, a)).collect();
    DensityMatrix::from_pure(qubit_dims(n), &basis_amplitudes(n, &terms))
}

/// ⊗ᵢ (I + rᵢ·σ)/2. Unit vectors give pure states; shorter vectors are
/// accepted as mixed single-qubit states (|r| ≤ 1).
pub fn product<T: Real>(bloch: &[[T; 3]]) -> Result<DensityMatrix<T>> {
    check_qubits(bloch.len(), 1)?;
    let half = T::lit(0.5);
    let mut factors = Vec::with_capacity(bloch.len());
    for r in bloch {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !len.is_finite() || len > T::one() + T::lit(1e-9) {
            return Err(Error::Domain(format!(
                "Bloch vector {r:?} has length {len} > 1"
            )));
        }
        let (x, y, z) = (r[0] * half, r[1] * half, r[2] * half);
        let m = ComplexMatrix::from_vec(
            2,
            2,
            vec![
                Complex::new(half + z, T::zero()),
                Complex::new(x, -y),
                Complex::new(x, y),
                Complex::new(half - z, T::zero()),
            ],
        )?;
        factors.push(m);
    }
    let full = tensor_all(&factors).expect("at least one factor");
    DensityMatrix::new(qubit_dims(bloch.len()), full)
}

/// (|00⟩⟨00| + |11⟩⟨11|)/2: perfectly correlated in z, no coherence.
pub fn classical_corr<T: Real>() -> DensityMatrix<T> {
    let h = T::lit(0.5);
    DensityMatrix::new(
        qubit_dims(2),
        ComplexMatrix::diag(&[h, T::zero(), T::zero(), h]),
    )
    .expect("valid diagonal state")
}

/// Pure state with i.i.d. complex Gaussian amplitudes, normalized.
pub fn random_pure<T: Real>(n: usize, seed: u64) -> Result<DensityMatrix<T>> {
    check_qubits(n, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: ComplexMatrix<T> = gaussian_matrix(1 << n, &mut rng);
    let column: Vec<Complex<T>> = (0..(1 << n)).map(|i| g[(i, 0)]).collect();
    DensityMatrix::from_pure(qubit_dims(n), &column)
}

/// Full-rank mixed state G G† / Tr(G G†) from a seeded Ginibre matrix.
pub fn random_mixed<T: Real>(n: usize, seed: u64) -> Result<DensityMatrix<T>> {
    check_qubits(n, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g: ComplexMatrix<T> = gaussian_matrix(1 << n, &mut rng);
    let mut m = &g * &g.adjoint();
    let tr = m.trace().re;
    m = m.scale_real(T::one() / tr);
    m.symmetrize();
    DensityMatrix::new(qubit_dims(n), m)
}

/// |0…0⟩ on `n` qubits.
pub fn all_zero<T: Real>(n: usize) -> Result<DensityMatrix<T>> {
    check_qubits(n, 1)?;
    product(&vec![[T::zero(), T::zero(), T::one()]; n])
}

/// Recognised state names.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateName {
    Bell,
    Singlet,
    Werner,
    Ghz,
    WState,
    Product,
    ClassicalCorr,
    RandomPure,
    File,
}

impl StateName {
    pub fn parse(token: &str) -> Result<Self> {
        Ok(match token {
            "bell" => Self::Bell,
            "singlet" => Self::Singlet,
            "werner" => Self::Werner,
            "ghz" => Self::Ghz,
            "wstate" => Self::WState,
            "product" => Self::Product,
            "classical-corr" => Self::ClassicalCorr,
            "random-pure" => Self::RandomPure,
            "file" => Self::File,
            other => return Err(Error::UnknownState(other.to_string())),
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bell => "bell",
            Self::Singlet => "singlet",
            Self::Werner => "werner",
            Self::Ghz => "ghz",
            Self::WState => "wstate",
            Self::Product => "product",
            Self::ClassicalCorr => "classical-corr",
            Self::RandomPure => "random-pure",
            Self::File => "file",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateSource {
    Literal,
    File(PathBuf),
}

/// A parsed, not yet constructed, state description.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub name: StateName,
    pub params: Vec<f64>,
    pub source: StateSource,
}

impl StateSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some(path) = text.strip_prefix("file:") {
            if path.is_empty() {
                return Err(Error::Arity {
                    name: "file".into(),
                    expected: "a path".into(),
                    got: 0,
                });
            }
            return Ok(Self {
                name: StateName::File,
                params: Vec::new(),
                source: StateSource::File(PathBuf::from(path)),
            });
        }
        let mut parts = text.split(':');
        let name = StateName::parse(parts.next().unwrap_or_default())?;
        if name == StateName::File {
            return Err(Error::Arity {
                name: "file".into(),
                expected: "a path".into(),
                got: 0,
            });
        }
        let params = parts
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| {
                    Error::Usage(format!("`{p}` is not a number in state spec `{text}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = Self {
            name,
            params,
            source: StateSource::Literal,
        };
        spec.check_arity()?;
        Ok(spec)
    }

    fn check_arity(&self) -> Result<()> {
        let got = self.params.len();
        let (ok, expected) = match self.name {
            StateName::Bell | StateName::Singlet | StateName::ClassicalCorr => (got == 0, "0"),
            StateName::Werner => (got == 1, "1"),
            StateName::Ghz | StateName::WState => (got == 1, "1"),
            StateName::RandomPure => (got == 2, "2"),
            StateName::Product => (
                got >= 3 && got.is_multiple_of(3),
                "a positive multiple of 3",
            ),
            StateName::File => (true, "0"),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Arity {
                name: self.name.as_str().into(),
                expected: expected.into(),
                got,
            })
        }
    }

    fn integer_param(&self, k: usize) -> Result<u64> {
        let x = self.params[k];
        if x.fract() != 0.0 || x < 0.0 || x > u64::MAX as f64 {
            return Err(Error::Domain(format!(
                "`{}` parameter {k} must be a non-negative integer, got {x}",
                self.name.as_str()
            )));
        }
        Ok(x as u64)
    }

    pub fn build<T: Real>(&self) -> Result<DensityMatrix<T>> {
        match self.name {
            StateName::Bell => Ok(bell()),
            StateName::Singlet => Ok(singlet()),
            StateName::ClassicalCorr => Ok(classical_corr()),
            StateName::Werner => werner(T::lit(self.params[0])),
            StateName::Ghz => ghz(self.integer_param(0)? as usize),
            StateName::WState => wstate(self.integer_param(0)? as usize),
            StateName::RandomPure => {
                random_pure(self.integer_param(0)? as usize, self.integer_param(1)?)
            }
            StateName::Product => {
                let vecs: Vec<[T; 3]> = self
                    .params
                    .chunks(3)
                    .map(|c| [T::lit(c[0]), T::lit(c[1]), T::lit(c[2])])
                    .collect();
                product(&vecs)
            }
            StateName::File => match &self.source {
                StateSource::File(p) => DensityMatrix::read_json(p),
                StateSource::Literal => unreachable!("file spec always carries a path"),
            },
        }
    }
}

/// Parses and constructs a state from its textual description.
pub fn parse_state_spec<T: Real>(text: &str) -> Result<DensityMatrix<T>> {
    StateSpec::parse(text)?.build()
}
