//! k-multisets over a bounded ground collection, and families thereof.
//!
//! A multiset over `[n]` with per-symbol multiplicity at most `m` is stored
//! as its multiplicity vector. Intersection size uses the min-multiplicity
//! convention: `|A ∩ B| = sum_i min(A[i], B[i])`.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::coeffs::{
    binomial, build_coeff_table, poly_mul_trunc, poly_pow_trunc, q_of, total_multiset_count,
    Params, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};

/// A multiset of `[n]` stored as multiplicities; `n = mult.len()`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset {
    mult: Vec<u32>,
}

impl Multiset {
    pub fn new(mult: Vec<u32>) -> Multiset {
        Multiset { mult }
    }

    pub fn n(&self) -> u32 {
        self.mult.len() as u32
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mult
    }

    /// Total size counting repetitions.
    pub fn size(&self) -> u32 {
        self.mult.iter().sum()
    }

    /// Number of distinct symbols present.
    pub fn support_size(&self) -> u32 {
        self.mult.iter().filter(|&&c| c > 0).count() as u32
    }

    /// Bitmask of symbols present (symbol `i+1` at bit `i`).
    /// Requires `n <= 32`; wider ground sets have no mask form.
    pub fn support_mask(&self) -> Result<u32> {
        if self.mult.len() > 32 {
            return Err(Error::resource(format!(
                "support bitmask requires n <= 32, got {}",
                self.mult.len()
            )));
        }
        Ok(self
            .mult
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .fold(0, |acc, (i, _)| acc | (1 << i)))
    }

    /// Image under a permutation of symbol positions: `sigma[i]` is the
    /// zero-based destination of position `i`.
    pub fn permuted(&self, sigma: &[usize]) -> Multiset {
        let mut out = vec![0; self.mult.len()];
        for (i, &c) in self.mult.iter().enumerate() {
            out[sigma[i]] = c;
        }
        Multiset { mult: out }
    }
}

/// Min-multiplicity intersection size.
pub fn intersection_size(a: &Multiset, b: &Multiset) -> Result<u64> {
    if a.n() != b.n() {
        return Err(Error::usage(format!(
            "intersection_size: ground sets differ ({} vs {})",
            a.n(),
            b.n()
        )));
    }
    Ok(a.mult
        .iter()
        .zip(&b.mult)
        .map(|(&x, &y)| u64::from(x.min(y)))
        .sum())
}

/// A duplicate-free family of k-multisets in canonical (lexicographic) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetFamily {
    params: Params,
    members: Vec<Multiset>,
}

impl MultisetFamily {
    /// Builds a family, validating every member against `(n, m, k)` and
    /// normalizing to sorted, duplicate-free order.
    pub fn new(params: Params, mut members: Vec<Multiset>) -> Result<MultisetFamily> {
        let n = params.ground_set()?;
        for a in &members {
            if a.n() != n {
                return Err(Error::usage("family member has wrong ground-set size"));
            }
            if a.size() != params.k {
                return Err(Error::usage("family member has wrong total size"));
            }
            if a.mult.iter().any(|&c| c > params.m) {
                return Err(Error::usage("family member exceeds the multiplicity bound"));
            }
        }
        members.sort();
        members.dedup();
        Ok(MultisetFamily { params, members })
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn members(&self) -> &[Multiset] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, a: &Multiset) -> bool {
        self.members.binary_search(a).is_ok()
    }

    /// True iff every pair of members shares at least one symbol.
    pub fn is_intersecting(&self) -> bool {
        for (i, a) in self.members.iter().enumerate() {
            for b in &self.members[i + 1..] {
                if intersection_size(a, b).expect("same ground set") == 0 {
                    return false;
                }
            }
        }
        true
    }

    /// True iff some symbol occurs in every member. The empty family is
    /// vacuously trivial.
    pub fn is_trivial(&self) -> bool {
        let Some(first) = self.members.first() else {
            return true;
        };
        (0..first.mult.len()).any(|i| self.members.iter().all(|a| a.mult[i] > 0))
    }

    /// Image under a symbol permutation, re-sorted to canonical order.
    pub fn permuted(&self, sigma: &[usize]) -> MultisetFamily {
        let mut members: Vec<Multiset> = self.members.iter().map(|a| a.permuted(sigma)).collect();
        members.sort();
        MultisetFamily {
            params: self.params,
            members,
        }
    }

    /// Lexicographically minimal image over all symbol permutations.
    /// Factorial search, so the ground set is capped.
    pub fn canonical_form(&self) -> Result<Vec<Vec<u32>>> {
        let n = self.params.ground_set()? as usize;
        if n > 8 {
            return Err(Error::resource(format!(
                "canonical form uses a factorial search; n={n} exceeds 8"
            )));
        }
        let mut best: Option<Vec<Vec<u32>>> = None;
        for sigma in (0..n).permutations(n) {
            let image: Vec<Vec<u32>> = self
                .permuted(&sigma)
                .members
                .iter()
                .map(|a| a.mult.clone())
                .collect();
            if best.as_ref().is_none_or(|b| image < *b) {
                best = Some(image);
            }
        }
        Ok(best.expect("at least the identity permutation"))
    }

    /// Multiplicity vectors of the members, for serialization.
    pub fn to_vectors(&self) -> Vec<Vec<u32>> {
        self.members.iter().map(|a| a.mult.clone()).collect()
    }
}

/// True iff some permutation of symbols maps `f1` onto `f2`.
pub fn are_isomorphic(f1: &MultisetFamily, f2: &MultisetFamily) -> Result<bool> {
    if f1.params != f2.params {
        return Err(Error::usage("are_isomorphic requires identical (n, m, k)"));
    }
    let n = f1.params.ground_set()? as usize;
    if n > 8 {
        return Err(Error::resource(format!(
            "isomorphism search is factorial; n={n} exceeds 8"
        )));
    }
    if f1.members.len() != f2.members.len() {
        return Ok(false);
    }
    for sigma in (0..n).permutations(n) {
        if f1.permuted(&sigma).members == f2.members {
            return Ok(true);
        }
    }
    Ok(false)
}

fn check_cap(count: &BigUint, cap: u64, what: &str) -> Result<()> {
    if count > &BigUint::from(cap) {
        return Err(Error::resource(format!(
            "{what} would materialize {count} items, above the cap of {cap}"
        )));
    }
    Ok(())
}

/// All k-multisets of `[n]_m` in lexicographic multiplicity-vector order.
pub fn enumerate_multisets(n: u32, m: u32, k: u32) -> Result<MultisetFamily> {
    enumerate_multisets_capped(n, m, k, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_multisets_capped(n: u32, m: u32, k: u32, cap: u64) -> Result<MultisetFamily> {
    if n < 1 || m < 1 {
        return Err(Error::usage("enumerate_multisets requires n, m >= 1"));
    }
    let count = total_multiset_count(n, m, k)?;
    check_cap(&count, cap, "multiset enumeration")?;

    let mut members = Vec::new();
    let mut current = vec![0u32; n as usize];
    fill_rest(&mut members, &mut current, 0, k, m);
    debug_assert_eq!(BigUint::from(members.len() as u64), count);

    // k = 0 still has the empty multiset; params require k >= 1 only for
    // family-level semantics, so synthesize k = max(k, 1) never — instead
    // keep k as-is via direct construction.
    let params = Params { n: Some(n), m, k };
    Ok(MultisetFamily { params, members })
}

fn fill_rest(out: &mut Vec<Multiset>, current: &mut Vec<u32>, pos: usize, remaining: u32, m: u32) {
    if pos == current.len() {
        if remaining == 0 {
            out.push(Multiset::new(current.clone()));
        }
        return;
    }
    let tail_capacity = ((current.len() - pos - 1) as u32).saturating_mul(m);
    for c in 0..=m.min(remaining) {
        if remaining - c > tail_capacity {
            continue;
        }
        current[pos] = c;
        fill_rest(out, current, pos + 1, remaining - c, m);
    }
    current[pos] = 0;
}

/// The family of k-multisets with at least `s + t` elements (counted with
/// multiplicity) among the first `2s + t` symbols. With `s = 0, t = 1` this
/// is the star of all k-multisets containing symbol 1.
pub fn fst_family(n: u32, m: u32, k: u32, s: u32, t: u32) -> Result<MultisetFamily> {
    fst_family_capped(n, m, k, s, t, DEFAULT_ENUMERATION_CAP)
}

pub fn fst_family_capped(
    n: u32,
    m: u32,
    k: u32,
    s: u32,
    t: u32,
    cap: u64,
) -> Result<MultisetFamily> {
    if t < 1 {
        return Err(Error::usage("fst_family requires t >= 1"));
    }
    if s + t > k {
        return Err(Error::usage("fst_family requires s <= k - t"));
    }
    if 2 * s + t > n {
        return Err(Error::usage("fst_family requires 2s + t <= n"));
    }
    let all = enumerate_multisets_capped(n, m, k, cap)?;
    let prefix = (2 * s + t) as usize;
    let members = all
        .members
        .iter()
        .filter(|a| a.mult[..prefix].iter().sum::<u32>() >= s + t)
        .cloned()
        .collect();
    MultisetFamily::new(all.params, members)
}

/// Star size by generating function alone: coefficient of `x^k` in
/// `(x + ... + x^m)(1 + x + ... + x^m)^(n-1)`. No range gate, so usable on
/// exploratory instances below the theorem threshold.
pub(crate) fn star_size_unchecked(n: u32, m: u32, k: u32) -> BigUint {
    let deg = k as usize;
    let mut first = vec![BigUint::zero(); deg + 1];
    for c in first.iter_mut().take((m as usize).min(deg) + 1).skip(1) {
        *c = BigUint::from(1u32);
    }
    let mut level = first.clone();
    level[0] = BigUint::from(1u32);
    let rest = poly_pow_trunc(&level, n - 1, deg);
    poly_mul_trunc(&first, &rest, deg)[deg].clone()
}

/// Size of the star `F_{0,1}`: all k-multisets containing symbol 1.
///
/// Computed two independent ways — the level-weighted sum
/// `sum_l C(k, l) * C(n-1, l-1)` and the coefficient of `x^k` in
/// `(x + ... + x^m)(1 + x + ... + x^m)^(n-1)` — which must agree.
pub fn star_size(n: u32, m: u32, k: u32) -> Result<BigUint> {
    if k < 1 || m < 1 || n < 1 {
        return Err(Error::usage("star_size requires n, m, k >= 1"));
    }
    let q = q_of(k, m);
    if n < k + q {
        return Err(Error::usage(format!(
            "star_size requires n >= k + q = {}",
            k + q
        )));
    }
    let table = build_coeff_table(k, m)?;
    let mut by_levels = BigUint::zero();
    for l in q..=(n - q).min(k) {
        by_levels += table.value(l as i64) * binomial(n as i64 - 1, l as i64 - 1);
    }

    let by_poly = star_size_unchecked(n, m, k);

    if by_levels != by_poly {
        return Err(Error::violation(
            "star_size_cross_check",
            format!("n={n} m={m} k={k}: level sum {by_levels} != polynomial {by_poly}"),
        ));
    }
    Ok(by_levels)
}

/// Groups families into isomorphism classes and returns one canonical
/// representative per class, sorted.
pub fn iso_classes(families: &[MultisetFamily]) -> Result<Vec<MultisetFamily>> {
    let mut seen: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut reps = Vec::new();
    for f in families {
        let canon = f.canonical_form()?;
        if seen.insert(canon.clone()) {
            let params = f.params();
            reps.push(MultisetFamily::new(
                params,
                canon.into_iter().map(Multiset::new).collect(),
            )?);
        }
    }
    Ok(reps)
}

/// Exact member count as a u64 when an instance is known to be under a cap.
pub fn small_count(n: u32, m: u32, k: u32) -> Result<Option<u64>> {
    Ok(total_multiset_count(n, m, k)?.to_u64())
}
