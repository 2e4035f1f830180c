//! Entropic geometry of measurement outcomes.
//!
//! All entropies are Shannon entropies in bits. The information distance
//! between two parties is D_ij = H(i|j) + H(j|i) = 2H_ij − H_i − H_j. Higher
//! simplexes use the vector of conditional entropies H(C_i | rest), one per
//! vertex, and measure a k-dimensional content by the elementary symmetric
//! polynomial e_k of that vector:
//!
//! * e₁ of a 2-party profile is the distance,
//! * e₂ of a 3-party profile is the information area,
//! * e₃ of a 4-party profile is the information volume.
//!
//! No 1/k! simplex normalization is applied.
//!
//! The boundary of a d-party simplex is the sum over its d faces (drop one
//! party) of the face's (d−2)-content, each face evaluated on the marginal
//! distribution of its own parties.

use crate::error::{Error, Result};
use crate::measure::{marginalize_sorted, OutcomeDistribution};
use crate::qcore::normalize_party_set;
use crate::scalar::Real;

/// −Σ p log₂ p with 0·log 0 := 0. Negative entries are treated as 0.
pub fn shannon_entropy<T: Real>(probs: &[T]) -> T {
    let mut h = T::zero();
    for &p in probs {
        if p > T::zero() {
            h = h - p * p.log2();
        }
    }
    h
}

/// Binary entropy H(p, 1 − p) in bits.
pub fn binary_entropy<T: Real>(p: T) -> T {
    shannon_entropy(&[p, T::one() - p])
}

/// Entropy of the marginal on `subset`.
pub fn subset_entropy<T: Real>(dist: &OutcomeDistribution<T>, subset: &[usize]) -> Result<T> {
    let s = normalize_party_set(subset, dist.parties())?;
    Ok(sorted_entropy(dist, &s))
}

fn sorted_entropy<T: Real>(dist: &OutcomeDistribution<T>, subset: &[usize]) -> T {
    if subset.is_empty() {
        return T::zero();
    }
    shannon_entropy(marginalize_sorted(dist, subset).probs())
}

fn union_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u
}

/// H(target | given) = H(target ∪ given) − H(given). An empty `given`
/// yields H(target).
pub fn conditional_entropy<T: Real>(
    dist: &OutcomeDistribution<T>,
    target: &[usize],
    given: &[usize],
) -> Result<T> {
    let t = normalize_party_set(target, dist.parties())?;
    if given.is_empty() {
        return Ok(sorted_entropy(dist, &t));
    }
    let g = normalize_party_set(given, dist.parties())?;
    if t.iter().any(|p| g.contains(p)) {
        return Err(Error::Usage(format!(
            "target {target:?} and given {given:?} overlap"
        )));
    }
    let joint = union_sorted(&t, &g);
    Ok(sorted_entropy(dist, &joint) - sorted_entropy(dist, &g))
}

/// D_ij = 2H_ij − H_i − H_j; zero for i = j.
pub fn info_distance<T: Real>(dist: &OutcomeDistribution<T>, i: usize, j: usize) -> Result<T> {
    let n = dist.parties();
    if i >= n || j >= n {
        return Err(Error::Usage(format!(
            "party pair ({i}, {j}) out of range for {n} parties"
        )));
    }
    if i == j {
        return Ok(T::zero());
    }
    let (a, b) = (i.min(j), i.max(j));
    let hab = sorted_entropy(dist, &[a, b]);
    let ha = sorted_entropy(dist, &[a]);
    let hb = sorted_entropy(dist, &[b]);
    Ok(hab + hab - ha - hb)
}

/// Conditional entropies H(C_i | subset ∖ {i}) of each member of `subset`,
/// computed on the subset's own marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyProfile<T: Real> {
    pub subset: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Real> EntropyProfile<T> {
    /// Builds a profile from raw values (for constructed inputs); values must be ≥ 0.
    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan() || *v < T::zero()) {
            return Err(Error::Domain(format!(
                "negative entropy in profile {values:?}"
            )));
        }
        Ok(Self {
            subset: (0..values.len()).collect(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn entropy_profile<T: Real>(
    dist: &OutcomeDistribution<T>,
    subset: &[usize],
) -> Result<EntropyProfile<T>> {
    let s = normalize_party_set(subset, dist.parties())?;
    Ok(profile_sorted(dist, &s))
}

fn profile_sorted<T: Real>(dist: &OutcomeDistribution<T>, subset: &[usize]) -> EntropyProfile<T> {
    let face = marginalize_sorted(dist, subset);
    let k = subset.len();
    let local: Vec<usize> = (0..k).collect();
    let h_all = shannon_entropy(face.probs());
    let values = (0..k)
        .map(|i| {
            let rest: Vec<usize> = local.iter().copied().filter(|&p| p != i).collect();
            let h = h_all - sorted_entropy(&face, &rest);
            // rounding can leave -ulp for deterministic outcomes
            h.max(T::zero())
        })
        .collect();
    EntropyProfile {
        subset: subset.to_vec(),
        values,
    }
}

/// Elementary symmetric polynomials e₀..e_n of `values`, by the
/// subtraction-free recurrence e_k ← e_k + x·e_{k−1}.
pub fn elementary_symmetric<T: Real>(values: &[T]) -> Vec<T> {
    let mut e = vec![T::zero(); values.len() + 1];
    e[0] = T::one();
    for (i, &x) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + x * e[k - 1];
        }
    }
    e
}

/// e_k of the profile values; e₀ := 1.
pub fn sym_volume<T: Real>(profile: &EntropyProfile<T>, k: usize) -> Result<T> {
    if k > profile.len() {
        return Err(Error::Usage(format!(
            "order {k} exceeds profile length {}",
            profile.len()
        )));
    }
    Ok(elementary_symmetric(&profile.values)[k])
}

/// Σ over faces (drop one party j) of e_{|S|−2}(profile of S ∖ {j}).
pub fn boundary_area<T: Real>(dist: &OutcomeDistribution<T>, subset: &[usize]) -> Result<T> {
    let s = normalize_party_set(subset, dist.parties())?;
    if s.len() < 3 {
        return Err(Error::Usage(format!(
            "boundary area needs at least 3 parties, got {}",
            s.len()
        )));
    }
    Ok(boundary_sorted(dist, &s))
}

fn boundary_sorted<T: Real>(dist: &OutcomeDistribution<T>, s: &[usize]) -> T {
    let k = s.len() - 2;
    let mut total = T::zero();
    for j in 0..s.len() {
        let face: Vec<usize> = s
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &p)| p)
            .collect();
        total = total + elementary_symmetric(&profile_sorted(dist, &face).values)[k];
    }
    total
}

/// Boundary content and full-simplex volume of all parties in one pass:
/// (Σ faces e_{d−2}, e_{d−1}(full profile)). Requires d ≥ 3.
pub(crate) fn area_and_volume<T: Real>(dist: &OutcomeDistribution<T>) -> (T, T) {
    let all: Vec<usize> = (0..dist.parties()).collect();
    let d = all.len();
    let area = boundary_sorted(dist, &all);
    let volume = elementary_symmetric(&profile_sorted(dist, &all).values)[d - 1];
    (area, volume)
}
