//! Averaging over detector settings and assembly of the reactivity.
//!
//! A setting-indexed quantity is averaged over one direction per party, drawn
//! either from the x–z great circle (`Planar`) or the full Bloch sphere
//! (`Sphere`). Three rules are available:
//!
//! * `Grid` (planar only): tensor-product trapezoidal rule with `n` equispaced
//!   angles per party. The error bound is the Richardson gap between the
//!   `n`-point rule and its `n/2`-point sub-rule.
//! * `Fibonacci` (sphere only): randomized quasi-Monte Carlo. Each of 8
//!   copies is a product rule over one spherical Fibonacci set per party,
//!   every party's set carrying its own fixed random rotation. A budget of N
//!   gives m = ⌊(N/8)^(1/d)⌋ points per party; the mean is over the copies and
//!   the error bound is the 97.5% Student-t quantile times their standard
//!   error.
//! * `MonteCarlo`: N seeded i.i.d. uniform settings; the error bound is
//!   1.96 standard errors.
//!
//! The reactivity is the ratio of separately averaged boundary content and
//! volume. With two parties the boundary content is the constant e₀ = 1 and
//! the volume is the information distance, so R = 1/D̄.
//!
//! Evaluation may run on any number of rayon workers. Values are collected
//! in setting order and reduced sequentially, so results are bit-identical
//! regardless of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infogeom::{area_and_volume, info_distance};
use crate::measure::{joint_distribution, DetectorSetting, Direction, OutcomeDistribution};
use crate::qcore::DensityMatrix;
use crate::scalar::Real;
use crate::states::MAX_QUBITS;

/// Means whose magnitude falls below this are treated as degenerate.
pub const VOLUME_FLOOR: f64 = 1e-9;

/// Two-sided 95% normal quantile used for Monte-Carlo half-widths.
const Z95: f64 = 1.96;

/// Rotated copies of the Fibonacci rule.
pub const FIBONACCI_REPLICAS: usize = 8;

/// Two-sided 95% Student-t quantile with `FIBONACCI_REPLICAS − 1` degrees of freedom.
const T95_REPLICAS: f64 = 2.364_624_251_592_785;

const ROTATION_SEED: u64 = 0x5eed_f1b0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Planar,
    Sphere,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    Grid { per_party: usize },
    MonteCarlo { samples: usize, seed: u64 },
    Fibonacci { points: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AveragingMode<T: Real> {
    pub geometry: Geometry,
    pub sampler: Sampler,
    /// Requested half-width; estimates above it are flagged, not rejected.
    pub tolerance: Option<T>,
}

impl<T: Real> AveragingMode<T> {
    pub fn planar_grid(per_party: usize) -> Self {
        Self {
            geometry: Geometry::Planar,
            sampler: Sampler::Grid { per_party },
            tolerance: None,
        }
    }

    pub fn sphere_fibonacci(points: usize) -> Self {
        Self {
            geometry: Geometry::Sphere,
            sampler: Sampler::Fibonacci { points },
            tolerance: None,
        }
    }

    pub fn monte_carlo(geometry: Geometry, samples: usize, seed: u64) -> Self {
        Self {
            geometry,
            sampler: Sampler::MonteCarlo { samples, seed },
            tolerance: None,
        }
    }

    /// Fibonacci sphere with N = 8192 up to three parties, Monte Carlo with
    /// N = 20000 beyond.
    pub fn default_for(parties: usize, seed: u64) -> Self {
        if parties <= 3 {
            Self::sphere_fibonacci(8192)
        } else {
            Self::monte_carlo(Geometry::Sphere, 20_000, seed)
        }
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tolerance = Some(tol);
        self
    }

    /// Short name, e.g. `sphere-fibonacci`.
    pub fn label(&self) -> &'static str {
        match (self.geometry, self.sampler) {
            (Geometry::Planar, Sampler::Grid { .. }) => "planar-grid",
            (Geometry::Planar, Sampler::MonteCarlo { .. }) => "planar-monte-carlo",
            (Geometry::Sphere, Sampler::MonteCarlo { .. }) => "sphere-monte-carlo",
            (Geometry::Sphere, Sampler::Fibonacci { .. }) => "sphere-fibonacci",
            (Geometry::Sphere, Sampler::Grid { .. }) => "sphere-grid",
            (Geometry::Planar, Sampler::Fibonacci { .. }) => "planar-fibonacci",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self.sampler {
            Sampler::MonteCarlo { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn validate(&self, parties: usize) -> Result<()> {
        if parties == 0 || parties > MAX_QUBITS {
            return Err(Error::Mode(format!(
                "{parties} parties outside [1, {MAX_QUBITS}]"
            )));
        }
        match (self.geometry, self.sampler) {
            (Geometry::Planar, Sampler::Grid { per_party }) => {
                if per_party < 4 || per_party % 2 != 0 {
                    return Err(Error::Mode(format!(
                        "grid needs an even point count ≥ 4 per party, got {per_party}"
                    )));
                }
            }
            (Geometry::Sphere, Sampler::Grid { .. }) => {
                return Err(Error::Mode("grid sampler is planar only".into()));
            }
            (Geometry::Planar, Sampler::Fibonacci { .. }) => {
                return Err(Error::Mode("Fibonacci sampler is sphere only".into()));
            }
            (Geometry::Sphere, Sampler::Fibonacci { points }) => {
                if points < 100 {
                    return Err(Error::Mode(format!("need N ≥ 100 points, got {points}")));
                }
                let m = per_party_points(points / FIBONACCI_REPLICAS, parties);
                if m < 2 {
                    return Err(Error::Mode(format!(
                        "N = {points} gives only {m} Fibonacci points per party per copy for {parties} parties; need ≥ 2"
                    )));
                }
            }
            (_, Sampler::MonteCarlo { samples, .. }) => {
                if samples < 100 {
                    return Err(Error::Mode(format!("need N ≥ 100 samples, got {samples}")));
                }
            }
        }
        if let Some(t) = self.tolerance {
            if t.is_nan() || t <= T::zero() {
                return Err(Error::Mode(format!("tolerance must be positive, got {t}")));
            }
        }
        Ok(())
    }
}

/// A setting-averaged value with its error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanEstimate<T: Real> {
    pub mean: T,
    pub half_width: T,
    pub samples: usize,
    /// False when a requested tolerance was not reached within the budget.
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReactivityResult<T: Real> {
    pub area_mean: MeanEstimate<T>,
    pub volume_mean: MeanEstimate<T>,
    pub reactivity: T,
    pub mode: AveragingMode<T>,
}

impl<T: Real> ReactivityResult<T> {
    /// First-order propagated bound: R · (δA/|A| + δV/|V|).
    pub fn half_width(&self) -> T {
        let a = self.area_mean;
        let v = self.volume_mean;
        self.reactivity.abs() * (a.half_width / a.mean.abs() + v.half_width / v.mean.abs())
    }
}

/// ⌊N^(1/d)⌋ computed exactly in integers.
fn per_party_points(budget: usize, parties: usize) -> usize {
    let pow = |m: usize| (0..parties).try_fold(1usize, |acc, _| acc.checked_mul(m));
    let mut m = (budget as f64).powf(1.0 / parties as f64).floor() as usize;
    while pow(m + 1).is_some_and(|v| v <= budget) {
        m += 1;
    }
    while m > 0 && pow(m).is_none_or(|v| v > budget) {
        m -= 1;
    }
    m
}

/// Spherical Fibonacci set: z equispaced at cell midpoints, azimuth advancing
/// by the golden angle.
pub fn fibonacci_sphere<T: Real>(m: usize) -> Vec<Direction<T>> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..m)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / m as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * k as f64;
            Direction::Sphere([T::lit(r * phi.cos()), T::lit(r * phi.sin()), T::lit(z)])
        })
        .collect()
}

/// Uniformly random rotation matrix from a normalized Gaussian quaternion.
fn random_rotation<R: Rng>(rng: &mut R) -> [[f64; 3]; 3] {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|c| c / n);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Rotated Fibonacci sets indexed by `[copy][party]`.
///
/// Rotations are drawn for all `MAX_QUBITS` parties, so a party's set does
/// not depend on how many parties are averaged.
pub fn fibonacci_replicas<T: Real>(m: usize, parties: usize) -> Vec<Vec<Vec<Direction<T>>>> {
    let base = fibonacci_sphere::<f64>(m);
    let mut rng = ChaCha8Rng::seed_from_u64(ROTATION_SEED);
    (0..FIBONACCI_REPLICAS)
        .map(|_| {
            let rotations: Vec<_> = (0..MAX_QUBITS).map(|_| random_rotation(&mut rng)).collect();
            rotations[..parties]
                .iter()
                .map(|r| {
                    base.iter()
                        .map(|d| {
                            let v = d.unit_vector();
                            Direction::Sphere(std::array::from_fn(|i| {
                                T::lit(r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2])
                            }))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn mixed_radix(mut k: usize, base: usize, parties: usize) -> Vec<usize> {
    let mut digits = vec![0; parties];
    for d in digits.iter_mut().rev() {
        *d = k % base;
        k /= base;
    }
    digits
}

fn evaluate<T, const K: usize, F>(
    count: usize,
    setting_at: impl Fn(usize) -> DetectorSetting<T> + Sync,
    f: &F,
) -> Result<Vec<[T; K]>>
where
    T: Real,
    F: Fn(&DetectorSetting<T>) -> Result<[T; K]> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|k| f(&setting_at(k)))
        .collect()
}

fn mean_of<T: Real, const K: usize>(values: impl Iterator<Item = [T; K]>) -> ([T; K], usize) {
    let mut acc = [T::zero(); K];
    let mut n = 0usize;
    for v in values {
        for (a, x) in acc.iter_mut().zip(v) {
            *a = *a + x;
        }
        n += 1;
    }
    let inv = T::one() / T::lit(n as f64);
    (acc.map(|a| a * inv), n)
}

/// Averages a vector-valued setting-indexed function over `parties` directions.
pub fn average_settings<T, const K: usize, F>(
    parties: usize,
    mode: &AveragingMode<T>,
    f: F,
) -> Result<[MeanEstimate<T>; K]>
where
    T: Real,
    F: Fn(&DetectorSetting<T>) -> Result<[T; K]> + Sync,
{
    mode.validate(parties)?;
    let finish = |mean: [T; K], hw: [T; K], samples: usize| {
        std::array::from_fn(|i| MeanEstimate {
            mean: mean[i],
            half_width: hw[i],
            samples,
            converged: mode.tolerance.is_none_or(|t| hw[i] <= t),
        })
    };

    match (mode.geometry, mode.sampler) {
        (Geometry::Planar, Sampler::Grid { per_party: n }) => {
            let total = n.pow(parties as u32);
            let step = T::TAU() / T::lit(n as f64);
            let values = evaluate(
                total,
                |k| {
                    let angles: Vec<T> = mixed_radix(k, n, parties)
                        .into_iter()
                        .map(|g| step * T::lit(g as f64))
                        .collect();
                    DetectorSetting::planar(&angles)
                },
                &f,
            )?;
            let (fine, samples) = mean_of(values.iter().copied());
            let (coarse, _) = mean_of(
                values
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mixed_radix(*k, n, parties).iter().all(|g| g % 2 == 0))
                    .map(|(_, v)| *v),
            );
            let hw = std::array::from_fn(|i| (fine[i] - coarse[i]).abs());
            Ok(finish(fine, hw, samples))
        }
        (Geometry::Sphere, Sampler::Fibonacci { points }) => {
            let m = per_party_points(points / FIBONACCI_REPLICAS, parties);
            let per_copy = m.pow(parties as u32);
            let sets = fibonacci_replicas::<T>(m, parties);
            let values = evaluate(
                FIBONACCI_REPLICAS * per_copy,
                |k| {
                    let set = &sets[k / per_copy];
                    DetectorSetting::new(
                        mixed_radix(k % per_copy, m, parties)
                            .into_iter()
                            .enumerate()
                            .map(|(p, g)| set[p][g])
                            .collect(),
                    )
                },
                &f,
            )?;
            let copies: Vec<[T; K]> = values
                .chunks(per_copy)
                .map(|c| mean_of(c.iter().copied()).0)
                .collect();
            let (mean, _) = mean_of(copies.iter().copied());
            let denom = T::lit((FIBONACCI_REPLICAS * (FIBONACCI_REPLICAS - 1)) as f64);
            let hw = std::array::from_fn(|i| {
                let ss: T = copies
                    .iter()
                    .map(|v| {
                        let d = v[i] - mean[i];
                        d * d
                    })
                    .sum();
                T::lit(T95_REPLICAS) * (ss / denom).sqrt()
            });
            Ok(finish(mean, hw, values.len()))
        }
        (geometry, Sampler::MonteCarlo { samples, seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let settings: Vec<DetectorSetting<T>> = (0..samples)
                .map(|_| {
                    DetectorSetting::new(
                        (0..parties)
                            .map(|_| random_direction(geometry, &mut rng))
                            .collect(),
                    )
                })
                .collect();
            let values = evaluate(samples, |k| settings[k].clone(), &f)?;
            let (mean, n) = mean_of(values.iter().copied());
            let denom = T::lit((n * (n - 1)) as f64);
            let hw = std::array::from_fn(|i| {
                let ss: T = values
                    .iter()
                    .map(|v| {
                        let d = v[i] - mean[i];
                        d * d
                    })
                    .sum();
                T::lit(Z95) * (ss / denom).sqrt()
            });
            Ok(finish(mean, hw, n))
        }
        _ => unreachable!("validate rejects other combinations"),
    }
}

fn random_direction<T: Real, R: Rng>(geometry: Geometry, rng: &mut R) -> Direction<T> {
    let tau = std::f64::consts::TAU;
    match geometry {
        Geometry::Planar => Direction::planar(T::lit(tau * rng.random::<f64>())),
        Geometry::Sphere => {
            let z = 2.0 * rng.random::<f64>() - 1.0;
            let phi = tau * rng.random::<f64>();
            let r = (1.0 - z * z).max(0.0).sqrt();
            Direction::Sphere([T::lit(r * phi.cos()), T::lit(r * phi.sin()), T::lit(z)])
        }
    }
}

/// Average of `quantity(joint_distribution(state, setting))` over settings.
pub fn average<T, F>(
    state: &DensityMatrix<T>,
    quantity: F,
    mode: &AveragingMode<T>,
) -> Result<MeanEstimate<T>>
where
    T: Real,
    F: Fn(&OutcomeDistribution<T>) -> T + Sync,
{
    let [m] = average_settings(state.parties(), mode, |s| {
        Ok([quantity(&joint_distribution(state, s)?)])
    })?;
    Ok(m)
}

fn require_parties<T: Real>(state: &DensityMatrix<T>, lo: usize, hi: usize) -> Result<()> {
    let d = state.parties();
    if !state.is_qubits() || d < lo || d > hi {
        return Err(Error::Dimension(format!(
            "expected {lo}..={hi} qubits, got dims {:?}",
            state.dims()
        )));
    }
    Ok(())
}

/// D̄ over detector settings of a two-qubit state.
pub fn mean_distance<T: Real>(
    state: &DensityMatrix<T>,
    mode: &AveragingMode<T>,
) -> Result<MeanEstimate<T>> {
    require_parties(state, 2, 2)?;
    let [m] = average_settings(2, mode, |s| {
        Ok([info_distance(&joint_distribution(state, s)?, 0, 1)?])
    })?;
    Ok(m)
}

/// R = 1 / D̄ for two qubits.
pub fn reactivity_bipartite<T: Real>(
    state: &DensityMatrix<T>,
    mode: &AveragingMode<T>,
) -> Result<ReactivityResult<T>> {
    let volume = mean_distance(state, mode)?;
    if volume.mean.abs() < T::lit(VOLUME_FLOOR) {
        return Err(Error::Degenerate(format!(
            "mean information distance {} below floor {VOLUME_FLOOR}",
            volume.mean
        )));
    }
    let area = MeanEstimate {
        mean: T::one(),
        half_width: T::zero(),
        samples: volume.samples,
        converged: true,
    };
    Ok(ReactivityResult {
        area_mean: area,
        volume_mean: volume,
        reactivity: T::one() / volume.mean,
        mode: *mode,
    })
}

/// R = mean boundary content / mean volume for 3 to 6 qubits.
pub fn reactivity_multipartite<T: Real>(
    state: &DensityMatrix<T>,
    mode: &AveragingMode<T>,
) -> Result<ReactivityResult<T>> {
    require_parties(state, 3, MAX_QUBITS)?;
    let [area, volume] = average_settings(state.parties(), mode, |s| {
        let (a, v) = area_and_volume(&joint_distribution(state, s)?);
        Ok([a, v])
    })?;
    if volume.mean.abs() < T::lit(VOLUME_FLOOR) {
        return Err(Error::Degenerate(format!(
            "mean {}-party volume {} below floor {VOLUME_FLOOR}",
            state.parties(),
            volume.mean
        )));
    }
    Ok(ReactivityResult {
        area_mean: area,
        volume_mean: volume,
        reactivity: area.mean / volume.mean,
        mode: *mode,
    })
}

/// Dispatches on party count.
pub fn reactivity<T: Real>(
    state: &DensityMatrix<T>,
    mode: &AveragingMode<T>,
) -> Result<ReactivityResult<T>> {
    if state.parties() == 2 {
        reactivity_bipartite(state, mode)
    } else {
        reactivity_multipartite(state, mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{apply_channel, KrausChannel};
    use crate::states::{bell, classical_corr, ghz, product, random_mixed, werner};
    use std::f64::consts::{LN_2, PI, TAU};

    /// Composite Simpson rule; independent of everything under test.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    fn hb(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
        }
    }

    #[test]
    fn integer_root() {
        assert_eq!(per_party_points(8192 / FIBONACCI_REPLICAS, 2), 32);
        assert_eq!(per_party_points(8192 / FIBONACCI_REPLICAS, 3), 10);
        assert_eq!(per_party_points(8000, 3), 20);
        assert_eq!(per_party_points(7999, 3), 19);
        assert_eq!(per_party_points(4096, 6), 4);
    }

    #[test]
    fn mode_validation() {
        assert!(AveragingMode::<f64>::planar_grid(3).validate(2).is_err());
        assert!(AveragingMode::<f64>::planar_grid(6).validate(2).is_ok());
        assert!(AveragingMode::<f64>::sphere_fibonacci(99)
            .validate(2)
            .is_err());
        assert!(AveragingMode::<f64>::sphere_fibonacci(400)
            .validate(6)
            .is_err());
        assert!(AveragingMode::<f64>::sphere_fibonacci(1000)
            .validate(6)
            .is_ok());
        assert!(AveragingMode::<f64>::monte_carlo(Geometry::Sphere, 50, 1)
            .validate(2)
            .is_err());
        let bad = AveragingMode::<f64> {
            geometry: Geometry::Sphere,
            sampler: Sampler::Grid { per_party: 8 },
            tolerance: None,
        };
        assert!(bad.validate(2).is_err());
    }

    #[test]
    fn constant_quantity() {
        for mode in [
            AveragingMode::planar_grid(16),
            AveragingMode::sphere_fibonacci(1000),
            AveragingMode::monte_carlo(Geometry::Sphere, 500, 3),
        ] {
            let m = average(&bell::<f64>(), |_| 1.0, &mode).unwrap();
            assert_eq!(m.mean, 1.0);
            assert!(m.half_width < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_distance_is_two() {
        let w0 = werner::<f64>(0.0).unwrap();
        for mode in [
            AveragingMode::planar_grid(64),
            AveragingMode::sphere_fibonacci(8192),
        ] {
            let m = mean_distance(&w0, &mode).unwrap();
            assert_eq!(m.mean, 2.0);
            let r = reactivity_bipartite(&w0, &mode).unwrap();
            assert_eq!(r.reactivity, 0.5);
        }
    }

    #[test]
    fn closed_form_sphere_integral() {
        // ∫₀¹ H_bin = 1/(2 ln 2), hence D̄(bell, sphere) = 1/ln 2.
        let integral = simpson(hb, 0.0, 1.0, 20_000);
        assert!((integral - 0.5 / LN_2).abs() < 1e-7);
        let m = mean_distance(&bell::<f64>(), &AveragingMode::sphere_fibonacci(8192)).unwrap();
        assert!((m.mean - 2.0 * integral).abs() < 1e-3, "{}", m.mean);
        assert!((m.mean - 1.0 / LN_2).abs() <= m.half_width.max(1e-3));
        let r =
            reactivity_bipartite(&bell::<f64>(), &AveragingMode::sphere_fibonacci(8192)).unwrap();
        assert!((r.reactivity - LN_2).abs() < 0.005);
    }

    #[test]
    fn planar_grid_equals_one_dimensional_rule() {
        // On the n×n grid, D depends on α − β only, so the 2-D rule collapses
        // to the n-point 1-D trapezoid of 2·H_bin(cos²(γ/2)).
        let n = 64;
        let one_d: f64 = (0..n)
            .map(|k| 2.0 * hb((PI * k as f64 / n as f64).cos().powi(2)))
            .sum::<f64>()
            / n as f64;
        assert!((one_d - 1.114_583_450_832_440_6).abs() < 1e-12);
        let m = mean_distance(&bell::<f64>(), &AveragingMode::planar_grid(n)).unwrap();
        assert!((m.mean - one_d).abs() < 1e-12);
        // continuous value by adaptive-free quadrature of the 1-D integrand
        let exact = simpson(|g| 2.0 * hb((g / 2.0).cos().powi(2)), 0.0, TAU, 200_000) / TAU;
        assert!((exact - 1.114_609_918).abs() < 1e-8);
        assert!((m.mean - exact).abs() < 1e-4);
        assert!(m.half_width > (m.mean - exact).abs());
    }

    #[test]
    fn planar_grid_convergence() {
        let b = bell::<f64>();
        let at = |n| {
            mean_distance(&b, &AveragingMode::planar_grid(n))
                .unwrap()
                .mean
        };
        // x² log x endpoint behaviour of the integrand limits the rule to
        // third order; successive doublings fall below 1e-6 from n = 256.
        let (d256, d512, d1024) = (at(256), at(512), at(1024));
        assert!((d512 - d256).abs() < 1e-6);
        assert!((d1024 - d512).abs() < 1e-7);
        assert!((at(128) - at(64)).abs() < 5e-5);
    }

    #[test]
    fn werner_reactivity_strictly_increasing() {
        let mode = AveragingMode::sphere_fibonacci(8192);
        let rs: Vec<f64> = (0..=10)
            .map(|k| {
                reactivity_bipartite(&werner(k as f64 / 10.0).unwrap(), &mode)
                    .unwrap()
                    .reactivity
            })
            .collect();
        assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
    }

    #[test]
    fn classical_corr_exceeds_bell() {
        let mode = AveragingMode::sphere_fibonacci(8192);
        let c = mean_distance(&classical_corr::<f64>(), &mode).unwrap();
        let b = mean_distance(&bell::<f64>(), &mode).unwrap();
        assert!(c.mean - b.mean > c.half_width + b.half_width);
    }

    #[test]
    fn depolarizing_never_raises_reactivity() {
        let mode = AveragingMode::sphere_fibonacci(2048);
        for seed in 0..5 {
            let rho = random_mixed::<f64>(2, seed).unwrap();
            let ch = KrausChannel::depolarizing(0.3).unwrap();
            let noisy = apply_channel(&rho, &ch, (seed % 2) as usize).unwrap();
            let r0 = reactivity_bipartite(&rho, &mode).unwrap().reactivity;
            let r1 = reactivity_bipartite(&noisy, &mode).unwrap().reactivity;
            assert!(r1 <= r0 + 1e-12);
        }
    }

    #[test]
    fn product_state_two_routes() {
        // Identical Bloch vectors: per setting, area = 2Σh_p and
        // volume = e₂(h). Each copy is a product rule, so it contributes
        // 2Σ⟨h⟩_p and e₂(⟨h⟩) with ⟨h⟩_p the single-party average.
        let r = [0.3, -0.2, 0.7];
        let rho = product::<f64>(&[r, r, r]).unwrap();
        let res = reactivity_multipartite(&rho, &AveragingMode::sphere_fibonacci(8192)).unwrap();
        let (mut area, mut volume) = (0.0, 0.0);
        let copies = fibonacci_replicas::<f64>(10, 3);
        for sets in &copies {
            let h: Vec<f64> = sets
                .iter()
                .map(|set| {
                    set.iter()
                        .map(|d| {
                            let n = d.unit_vector();
                            hb(0.5 * (1.0 + r[0] * n[0] + r[1] * n[1] + r[2] * n[2]))
                        })
                        .sum::<f64>()
                        / 10.0
                })
                .collect();
            area += 2.0 * (h[0] + h[1] + h[2]);
            volume += h[0] * h[1] + h[1] * h[2] + h[0] * h[2];
        }
        let k = copies.len() as f64;
        assert!((res.area_mean.mean - area / k).abs() < 1e-12);
        assert!((res.volume_mean.mean - volume / k).abs() < 1e-12);
        // and against the continuous single-party integral
        let rn = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        let h_exact = simpson(|c| hb(0.5 * (1.0 + rn * c)), -1.0, 1.0, 20_000) / 2.0;
        assert!((res.area_mean.mean - 6.0 * h_exact).abs() <= res.area_mean.half_width);
    }

    #[test]
    fn relabeled_parties_give_same_result() {
        let rho = random_mixed::<f64>(3, 11).unwrap();
        let moved = rho.permute_parties(&[2, 0, 1]).unwrap();
        let grid = AveragingMode::planar_grid(16);
        let a = reactivity_multipartite(&rho, &grid).unwrap();
        let b = reactivity_multipartite(&moved, &grid).unwrap();
        assert!((a.reactivity - b.reactivity).abs() < 1e-12);
        assert!((a.area_mean.mean - b.area_mean.mean).abs() < 1e-12);
        assert!((a.volume_mean.mean - b.volume_mean.mean).abs() < 1e-12);

        let fib = AveragingMode::sphere_fibonacci(8192);
        let a = reactivity_multipartite(&rho, &fib).unwrap();
        let b = reactivity_multipartite(&moved, &fib).unwrap();
        assert!((a.reactivity - b.reactivity).abs() <= a.half_width() + b.half_width());
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let rho = ghz::<f64>(3).unwrap();
        let mode = AveragingMode::monte_carlo(Geometry::Sphere, 2000, 7);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| reactivity_multipartite(&rho, &mode).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.reactivity.to_bits(), b.reactivity.to_bits());
        assert_eq!(
            a.area_mean.half_width.to_bits(),
            b.area_mean.half_width.to_bits()
        );
    }

    #[test]
    fn party_count_checked() {
        let rho = product::<f64>(&[[0.0, 0.0, 1.0]; 3]).unwrap();
        let res = reactivity_multipartite(&rho, &AveragingMode::planar_grid(8)).unwrap();
        assert!(res.volume_mean.mean > VOLUME_FLOOR);
        assert!(matches!(
            mean_distance(&rho, &AveragingMode::planar_grid(8)),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            reactivity_multipartite(&bell::<f64>(), &AveragingMode::planar_grid(8)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn tolerance_flag() {
        let mode = AveragingMode::monte_carlo(Geometry::Sphere, 200, 1).with_tolerance(1e-9);
        let m = mean_distance(&bell::<f64>(), &mode).unwrap();
        assert!(!m.converged);
        let mode = AveragingMode::monte_carlo(Geometry::Sphere, 200, 1).with_tolerance(10.0);
        assert!(mean_distance(&bell::<f64>(), &mode).unwrap().converged);
    }

    #[test]
    fn monte_carlo_agrees_with_closed_form() {
        let m = mean_distance(
            &bell::<f64>(),
            &AveragingMode::monte_carlo(Geometry::Sphere, 20_000, 3),
        )
        .unwrap();
        assert!((m.mean - 1.0 / LN_2).abs() < m.half_width * 1.5);
    }

    #[test]
    fn single_precision_average() {
        let m = mean_distance(
            &bell::<f32>(),
            &AveragingMode::<f32>::sphere_fibonacci(2048),
        )
        .unwrap();
        assert!((m.mean as f64 - 1.0 / LN_2).abs() < 5e-3);
    }
}
