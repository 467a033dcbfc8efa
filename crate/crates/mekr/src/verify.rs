//! End-to-end verification: for an instance `(n, m, k)` with `n >= k + q`,
//! the maximum intersecting family of k-multisets has exactly the size of
//! the star, and the star is the unique extremal family up to isomorphism
//! except on the boundary cases, where an explicit non-trivial extremal
//! family exists.
//!
//! Two independent computation paths are kept: a reduction through the
//! subset lattice (maximize the support-counting formula over all maximal
//! lattice families) and a direct maximum-clique search over the
//! compatibility graph of the multisets themselves.

use std::collections::BTreeSet;
use std::fs::OpenOptions;
use std::io::Write as IoWrite;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{q_of, total_multiset_count};
use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_maximal_intersecting, is_maximal_intersecting, phi_inverse_family, phi_inverse_size,
    SubsetFamily, MAX_ENUMERATION_N,
};
use crate::multiset::{
    enumerate_multisets_capped, fst_family_capped, intersection_size, iso_classes, star_size,
    star_size_unchecked, Multiset, MultisetFamily,
};

/// Largest instance (by multiset count) the exhaustive clique search accepts.
pub const BRUTE_FORCE_CAP: u64 = 22;

/// How an instance was (or is requested to be) verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Reduction,
    Brute,
    Both,
}

/// What actually ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Reduction,
    Brute,
    Both,
    /// Out-of-range instance logged without any maximum computation.
    None,
}

impl MethodUsed {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodUsed::Reduction => "reduction",
            MethodUsed::Brute => "brute",
            MethodUsed::Both => "both",
            MethodUsed::None => "none",
        }
    }
}

/// Placement of an instance relative to the theorem's case split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremCase {
    /// `n > k + q`: star is the unique extremal family.
    A,
    /// `n = k + q`, `k > m`, `m` does not divide `k`: still unique.
    B,
    /// `n = k + q` with `k <= m` or `m | k`: non-trivial extremal families exist.
    Exceptional,
    /// `n < k + q`: outside the theorem; recorded for exploration only.
    OutOfRange,
}

impl TheoremCase {
    pub fn classify(n: u32, m: u32, k: u32) -> TheoremCase {
        let q = q_of(k, m);
        if n < k + q {
            TheoremCase::OutOfRange
        } else if n > k + q {
            TheoremCase::A
        } else if k > m && !k.is_multiple_of(m) {
            TheoremCase::B
        } else {
            TheoremCase::Exceptional
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremCase::A => "a",
            TheoremCase::B => "b",
            TheoremCase::Exceptional => "exceptional",
            TheoremCase::OutOfRange => "out_of_range",
        }
    }

    /// Expected uniqueness of the extremal family, where the theorem speaks.
    pub fn expects_unique(&self) -> Option<bool> {
        match self {
            TheoremCase::A | TheoremCase::B => Some(true),
            TheoremCase::Exceptional => Some(false),
            TheoremCase::OutOfRange => None,
        }
    }
}

/// Everything learned about one instance.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub q: u32,
    pub star_size: BigUint,
    pub max_size: BigUint,
    pub method: MethodUsed,
    pub theorem_case: TheoremCase,
    pub num_maximal_lattice_families: Option<u64>,
    pub extremal_unique_up_to_iso: bool,
    pub extremal_iso_classes: u64,
    pub nontrivial_extremal_witness: Option<MultisetFamily>,
    pub duration_ms: u64,
}

/// The JSON-lines ledger schema. Counts are decimal strings so no integer
/// width is ever exceeded on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerRecord {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub q: u32,
    pub star_size: String,
    pub max_size: Option<String>,
    pub method: String,
    pub theorem_case: String,
    pub num_maximal_lattice_families: Option<u64>,
    pub extremal_unique: Option<bool>,
    pub witness: Option<Vec<Vec<u32>>>,
    pub duration_ms: u64,
}

impl VerificationReport {
    pub fn to_record(&self) -> LedgerRecord {
        LedgerRecord {
            n: self.n,
            m: self.m,
            k: self.k,
            q: self.q,
            star_size: self.star_size.to_string(),
            max_size: Some(self.max_size.to_string()),
            method: self.method.as_str().to_string(),
            theorem_case: self.theorem_case.as_str().to_string(),
            num_maximal_lattice_families: self.num_maximal_lattice_families,
            extremal_unique: Some(self.extremal_unique_up_to_iso),
            witness: self
                .nontrivial_extremal_witness
                .as_ref()
                .map(|f| f.to_vectors()),
            duration_ms: self.duration_ms,
        }
    }
}

/// Result of the exhaustive search over intersecting subfamilies.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub max_size: u64,
    /// Every maximum intersecting family, in canonical member order.
    pub maximum_families: Vec<MultisetFamily>,
    /// One canonical representative per isomorphism class.
    pub iso_classes: Vec<MultisetFamily>,
}

/// Exhaustive oracle: enumerates all maximal cliques of the compatibility
/// graph (vertices are multisets, edges join intersecting pairs) and keeps
/// the maximum ones.
pub fn brute_force_max(n: u32, m: u32, k: u32) -> Result<BruteForceResult> {
    let count = total_multiset_count(n, m, k)?;
    if count > BigUint::from(BRUTE_FORCE_CAP) {
        return Err(Error::resource(format!(
            "brute force capped at {BRUTE_FORCE_CAP} multisets, instance has {count}"
        )));
    }
    let all = enumerate_multisets_capped(n, m, k, BRUTE_FORCE_CAP)?;
    let verts = all.members();
    if verts.is_empty() {
        return Ok(BruteForceResult {
            max_size: 0,
            maximum_families: Vec::new(),
            iso_classes: Vec::new(),
        });
    }

    let v = verts.len();
    let mut adj = vec![0u32; v];
    for i in 0..v {
        for j in (i + 1)..v {
            if intersection_size(&verts[i], &verts[j])? > 0 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }

    let mut cliques: Vec<u32> = Vec::new();
    bron_kerbosch(0, (1u32 << v) - 1, 0, &adj, &mut cliques);

    let max_size = cliques
        .iter()
        .map(|c| u64::from(c.count_ones()))
        .max()
        .unwrap_or(0);
    let mut maximum_families = Vec::new();
    for &c in cliques
        .iter()
        .filter(|c| u64::from(c.count_ones()) == max_size)
    {
        let members: Vec<Multiset> = (0..v)
            .filter(|i| c >> i & 1 == 1)
            .map(|i| verts[i].clone())
            .collect();
        maximum_families.push(MultisetFamily::new(all.params(), members)?);
    }
    maximum_families.sort_by(|a, b| a.members().cmp(b.members()));
    let iso = iso_classes(&maximum_families)?;
    Ok(BruteForceResult {
        max_size,
        maximum_families,
        iso_classes: iso,
    })
}

/// Pivoting Bron–Kerbosch over bitmask vertex sets.
fn bron_kerbosch(r: u32, p: u32, x: u32, adj: &[u32], out: &mut Vec<u32>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot = {
        let mut best = u32::MAX;
        let mut best_deg = u32::MAX;
        let mut pool = p | x;
        while pool != 0 {
            let u = pool.trailing_zeros();
            let deg = (p & !adj[u as usize]).count_ones();
            if deg < best_deg {
                best_deg = deg;
                best = u;
            }
            pool &= pool - 1;
        }
        best
    };
    let mut candidates = p & !adj[pivot as usize];
    let mut p = p;
    let mut x = x;
    while candidates != 0 {
        let bit = candidates & candidates.wrapping_neg();
        let u = candidates.trailing_zeros() as usize;
        bron_kerbosch(r | bit, p & adj[u], x & adj[u], adj, out);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

struct ExtremalScan {
    max_size: BigUint,
    iso_classes: Vec<MultisetFamily>,
    num_lattice_families: u64,
}

/// Reduction path: the maximum intersecting family size equals the maximum
/// of the support-counting formula over all maximal lattice families, and
/// the extremal multiset families are exactly the pre-images of the
/// extremal lattice families.
fn reduction_scan(n: u32, m: u32, k: u32, cap: u64) -> Result<ExtremalScan> {
    let families = enumerate_maximal_intersecting(n)?;
    let sizes: Vec<BigUint> = families
        .par_iter()
        .map(|b| phi_inverse_size(b, k, m))
        .collect::<Result<_>>()?;
    let max_size = sizes.iter().max().cloned().unwrap_or_default();

    let mut seen: BTreeSet<Vec<Vec<u32>>> = BTreeSet::new();
    let mut extremal: Vec<MultisetFamily> = Vec::new();
    for (b, size) in families.iter().zip(&sizes) {
        if *size == max_size {
            let f = phi_inverse_family(b, m, k, cap)?;
            if seen.insert(f.to_vectors()) {
                extremal.push(f);
            }
        }
    }
    let iso = iso_classes(&extremal)?;
    Ok(ExtremalScan {
        max_size,
        iso_classes: iso,
        num_lattice_families: families.len() as u64,
    })
}

fn resolve_method(n: u32, m: u32, k: u32, requested: Method) -> Result<MethodUsed> {
    let reduction_ok = n <= MAX_ENUMERATION_N;
    let brute_ok = total_multiset_count(n, m, k)? <= BigUint::from(BRUTE_FORCE_CAP);
    match requested {
        Method::Auto => {
            if reduction_ok && brute_ok {
                Ok(MethodUsed::Both)
            } else if reduction_ok {
                Ok(MethodUsed::Reduction)
            } else if brute_ok {
                Ok(MethodUsed::Brute)
            } else {
                Err(Error::resource(format!(
                    "instance n={n} m={m} k={k} is beyond both the lattice enumeration cap \
                     (n <= {MAX_ENUMERATION_N}) and the brute-force cap ({BRUTE_FORCE_CAP} multisets)"
                )))
            }
        }
        Method::Reduction => {
            if reduction_ok {
                Ok(MethodUsed::Reduction)
            } else {
                Err(Error::resource(format!(
                    "reduction requires n <= {MAX_ENUMERATION_N}, got {n}"
                )))
            }
        }
        Method::Brute => {
            if brute_ok {
                Ok(MethodUsed::Brute)
            } else {
                Err(Error::resource(format!(
                    "brute force requires at most {BRUTE_FORCE_CAP} multisets"
                )))
            }
        }
        Method::Both => {
            if reduction_ok && brute_ok {
                Ok(MethodUsed::Both)
            } else {
                Err(Error::resource(
                    "method=both requires both paths to be feasible".to_string(),
                ))
            }
        }
    }
}

/// Verifies one instance and classifies extremal uniqueness.
///
/// Fails loudly (property violation) if the maximum exceeds the star size or
/// the uniqueness outcome contradicts the case split — either would be a
/// disproof or a bug and must never be silent.
pub fn verify_instance(
    n: u32,
    m: u32,
    k: u32,
    method: Method,
    cap: u64,
) -> Result<VerificationReport> {
    if k < 2 {
        return Err(Error::usage("verification requires k >= 2"));
    }
    if m < 1 {
        return Err(Error::usage("verification requires m >= 1"));
    }
    let q = q_of(k, m);
    if n < k + q {
        return Err(Error::usage(format!(
            "verification requires n >= k + q = {} (got n={n})",
            k + q
        )));
    }
    let started = Instant::now();
    let star = star_size(n, m, k)?;
    let theorem_case = TheoremCase::classify(n, m, k);
    let method_used = resolve_method(n, m, k, method)?;

    let reduction = match method_used {
        MethodUsed::Reduction | MethodUsed::Both => Some(reduction_scan(n, m, k, cap)?),
        _ => None,
    };
    let brute = match method_used {
        MethodUsed::Brute | MethodUsed::Both => Some(brute_force_max(n, m, k)?),
        _ => None,
    };

    if let (Some(r), Some(b)) = (&reduction, &brute) {
        if r.max_size != BigUint::from(b.max_size) {
            return Err(Error::violation(
                "oracle_agreement",
                format!(
                    "n={n} m={m} k={k}: reduction max {} vs brute max {}",
                    r.max_size, b.max_size
                ),
            ));
        }
        if r.iso_classes.len() != b.iso_classes.len() {
            return Err(Error::violation(
                "oracle_agreement",
                format!(
                    "n={n} m={m} k={k}: reduction finds {} extremal classes, brute {}",
                    r.iso_classes.len(),
                    b.iso_classes.len()
                ),
            ));
        }
    }

    let (max_size, classes) = match (&reduction, &brute) {
        (Some(r), _) => (r.max_size.clone(), r.iso_classes.clone()),
        (None, Some(b)) => (BigUint::from(b.max_size), b.iso_classes.clone()),
        (None, None) => unreachable!("method resolution always picks a path"),
    };

    if max_size != star {
        return Err(Error::violation(
            "max_equals_star",
            format!("n={n} m={m} k={k}: max intersecting size {max_size} != star size {star}"),
        ));
    }

    // The star attains the maximum, so it must appear among the classes.
    let star_family = fst_family_capped(n, m, k, 0, 1, cap)?;
    let star_canon = star_family.canonical_form()?;
    if !classes.iter().any(|c| c.to_vectors() == star_canon) {
        return Err(Error::violation(
            "star_extremal",
            format!("n={n} m={m} k={k}: star family missing from extremal classes"),
        ));
    }

    let unique = classes.len() == 1;
    if let Some(expected) = theorem_case.expects_unique() {
        if unique != expected {
            return Err(Error::violation(
                "uniqueness_classification",
                format!(
                    "n={n} m={m} k={k} case={}: expected unique={expected}, found {} extremal classes",
                    theorem_case.as_str(),
                    classes.len()
                ),
            ));
        }
    }

    let witness = classes.iter().find(|c| !c.is_trivial()).cloned();
    if theorem_case == TheoremCase::Exceptional && witness.is_none() {
        return Err(Error::violation(
            "exceptional_witness",
            format!("n={n} m={m} k={k}: boundary case without a non-trivial extremal family"),
        ));
    }

    Ok(VerificationReport {
        n,
        m,
        k,
        q,
        star_size: star,
        max_size,
        method: method_used,
        theorem_case,
        num_maximal_lattice_families: reduction.as_ref().map(|r| r.num_lattice_families),
        extremal_unique_up_to_iso: unique,
        extremal_iso_classes: classes.len() as u64,
        nontrivial_extremal_witness: witness,
        duration_ms: started.elapsed().as_millis() as u64,
    })
}

/// Builds the explicit non-trivial extremal family for the boundary cases
/// `n = k + q` with `k <= m` or `m | k` (and `m >= 2`): swap the subsets of
/// `[q]` containing symbol 1 out of the star for their complements, then
/// pull back through the support map.
pub fn construct_exceptional_family(n: u32, m: u32, k: u32, cap: u64) -> Result<MultisetFamily> {
    if m < 2 {
        return Err(Error::usage("the exceptional construction requires m >= 2"));
    }
    if k < 2 {
        return Err(Error::usage("the exceptional construction requires k >= 2"));
    }
    let q = q_of(k, m);
    if n != k + q {
        return Err(Error::usage(format!(
            "the exceptional construction requires n = k + q = {}",
            k + q
        )));
    }
    if !(k <= m || k.is_multiple_of(m)) {
        return Err(Error::usage(
            "the exceptional construction requires k <= m or m | k; \
             elsewhere the star is the unique extremal family",
        ));
    }

    let full = (1u32 << n) - 1;
    let q_mask = (1u32 << q) - 1;
    let star = SubsetFamily::star(n)?;
    let mut members: Vec<u32> = Vec::with_capacity(star.len());
    for &b in star.members() {
        if b & !q_mask == 0 {
            // b is a subset of [q] containing symbol 1: swap for complement.
            members.push(full ^ b);
        } else {
            members.push(b);
        }
    }
    let swapped = SubsetFamily::new(n, members)?;
    if !is_maximal_intersecting(&swapped) {
        return Err(Error::violation(
            "exceptional_construction",
            format!("n={n} m={m} k={k}: swapped family is not maximal intersecting"),
        ));
    }

    let family = phi_inverse_family(&swapped, m, k, cap)?;
    let star_count = star_size(n, m, k)?;
    if BigUint::from(family.len() as u64) != star_count {
        return Err(Error::violation(
            "exceptional_construction",
            format!(
                "n={n} m={m} k={k}: construction has {} members, star has {star_count}",
                family.len()
            ),
        ));
    }
    if !family.is_intersecting() {
        return Err(Error::violation(
            "exceptional_construction",
            format!("n={n} m={m} k={k}: construction is not intersecting"),
        ));
    }
    if family.is_trivial() {
        return Err(Error::violation(
            "exceptional_construction",
            format!("n={n} m={m} k={k}: construction is trivial"),
        ));
    }
    Ok(family)
}

/// Sweep totals per theorem case.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepSummary {
    pub instances: u64,
    pub case_a: u64,
    pub case_b: u64,
    pub exceptional: u64,
    pub out_of_range: u64,
    pub violations: u64,
    pub duration_ms: u64,
}

fn out_of_range_record(n: u32, m: u32, k: u32) -> Result<LedgerRecord> {
    let started = Instant::now();
    let star = star_size_unchecked(n, m, k);
    let count = total_multiset_count(n, m, k)?;
    let brute = if count <= BigUint::from(BRUTE_FORCE_CAP) && n <= 8 {
        Some(brute_force_max(n, m, k)?)
    } else {
        None
    };
    Ok(LedgerRecord {
        n,
        m,
        k,
        q: q_of(k, m),
        star_size: star.to_string(),
        max_size: brute.as_ref().map(|b| b.max_size.to_string()),
        method: brute
            .as_ref()
            .map_or(MethodUsed::None, |_| MethodUsed::Brute)
            .as_str()
            .to_string(),
        theorem_case: TheoremCase::OutOfRange.as_str().to_string(),
        num_maximal_lattice_families: None,
        extremal_unique: brute.as_ref().and_then(|b| {
            if b.maximum_families.is_empty() {
                None
            } else {
                Some(b.iso_classes.len() == 1)
            }
        }),
        witness: brute
            .as_ref()
            .and_then(|b| b.iso_classes.iter().find(|c| !c.is_trivial()))
            .map(|f| f.to_vectors()),
        duration_ms: started.elapsed().as_millis() as u64,
    })
}

/// Runs every instance in the box `2 <= n <= n_max`, `1 <= m <= m_max`,
/// `2 <= k <= k_max`. In-range instances are fully verified (both paths when
/// both are feasible); sub-threshold instances are logged as out-of-range
/// with brute-force data where that is cheap. One JSON line per instance is
/// appended to the ledger, in deterministic instance order.
pub fn sweep(
    n_max: u32,
    m_max: u32,
    k_max: u32,
    ledger_path: Option<&Path>,
    cap: u64,
) -> Result<SweepSummary> {
    if n_max < 2 || m_max < 1 || k_max < 2 {
        return Err(Error::usage(
            "sweep requires n_max >= 2, m_max >= 1, k_max >= 2",
        ));
    }
    let started = Instant::now();
    let mut grid = Vec::new();
    for n in 2..=n_max {
        for m in 1..=m_max {
            for k in 2..=k_max {
                grid.push((n, m, k));
            }
        }
    }

    let results: Vec<Result<LedgerRecord>> = grid
        .par_iter()
        .map(|&(n, m, k)| {
            if TheoremCase::classify(n, m, k) == TheoremCase::OutOfRange {
                out_of_range_record(n, m, k)
            } else {
                verify_instance(n, m, k, Method::Auto, cap).map(|r| r.to_record())
            }
        })
        .collect();

    let mut ledger = match ledger_path {
        Some(p) => Some(OpenOptions::new().create(true).append(true).open(p)?),
        None => None,
    };
    let mut summary = SweepSummary::default();
    for result in results {
        match result {
            Ok(record) => {
                if let Some(f) = ledger.as_mut() {
                    let line = serde_json::to_string(&record)
                        .map_err(|e| Error::usage(format!("ledger serialization failed: {e}")))?;
                    writeln!(f, "{line}")?;
                }
                summary.instances += 1;
                match record.theorem_case.as_str() {
                    "a" => summary.case_a += 1,
                    "b" => summary.case_b += 1,
                    "exceptional" => summary.exceptional += 1,
                    _ => summary.out_of_range += 1,
                }
            }
            Err(e) => {
                if let Some(f) = ledger.as_mut() {
                    f.flush()?;
                }
                return Err(e);
            }
        }
    }
    summary.duration_ms = started.elapsed().as_millis() as u64;
    Ok(summary)
}

/// Reads a ledger file back into records, for round-trip checks and tooling.
pub fn read_ledger(path: &Path) -> Result<Vec<LedgerRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            serde_json::from_str(l).map_err(|e| Error::usage(format!("malformed ledger line: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::DEFAULT_ENUMERATION_CAP;
    use crate::multiset::are_isomorphic;

    #[test]
    fn case_classification() {
        assert_eq!(TheoremCase::classify(4, 2, 2), TheoremCase::A);
        assert_eq!(TheoremCase::classify(5, 2, 3), TheoremCase::B);
        assert_eq!(TheoremCase::classify(3, 2, 2), TheoremCase::Exceptional);
        assert_eq!(TheoremCase::classify(6, 2, 4), TheoremCase::Exceptional);
        assert_eq!(TheoremCase::classify(4, 1, 2), TheoremCase::Exceptional);
        assert_eq!(TheoremCase::classify(2, 2, 5), TheoremCase::OutOfRange);
    }

    #[test]
    fn brute_force_examples() {
        let r = brute_force_max(3, 2, 2).unwrap();
        assert_eq!(r.max_size, 3);
        assert_eq!(r.iso_classes.len(), 2);

        // Classical sets: max intersecting 2-uniform family on [4] has 3
        // sets, attained by the 4 stars and the 4 triangles.
        let r = brute_force_max(4, 1, 2).unwrap();
        assert_eq!(r.max_size, 3);
        assert_eq!(r.maximum_families.len(), 8);
        assert_eq!(r.iso_classes.len(), 2);

        let r = brute_force_max(4, 2, 2).unwrap();
        assert_eq!(r.max_size, 4);
        assert_eq!(r.iso_classes.len(), 1);

        assert!(brute_force_max(6, 2, 4).is_err());
    }

    #[test]
    fn brute_force_half_size_sets() {
        // Two 3-subsets of [6] are disjoint exactly when complementary, so
        // every one-per-pair selection of the ten complement pairs is a
        // maximum family: 2^10 of them.
        let r = brute_force_max(6, 1, 3).unwrap();
        assert_eq!(r.max_size, 10);
        assert_eq!(r.maximum_families.len(), 1024);
        assert_eq!(r.iso_classes.len(), 13);
    }

    #[test]
    fn verify_unique_case_a() {
        let r = verify_instance(4, 2, 2, Method::Auto, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.max_size, BigUint::from(4u32));
        assert_eq!(r.star_size, BigUint::from(4u32));
        assert_eq!(r.theorem_case, TheoremCase::A);
        assert_eq!(r.method, MethodUsed::Both);
        assert!(r.extremal_unique_up_to_iso);
        assert!(r.nontrivial_extremal_witness.is_none());
        assert_eq!(r.num_maximal_lattice_families, Some(12));
    }

    #[test]
    fn verify_unique_case_b() {
        let r = verify_instance(5, 2, 3, Method::Reduction, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.max_size, BigUint::from(14u32));
        assert_eq!(r.theorem_case, TheoremCase::B);
        assert!(r.extremal_unique_up_to_iso);
        assert_eq!(r.num_maximal_lattice_families, Some(81));
    }

    #[test]
    fn verify_exceptional_with_witness() {
        let r = verify_instance(3, 2, 2, Method::Auto, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.max_size, BigUint::from(3u32));
        assert_eq!(r.theorem_case, TheoremCase::Exceptional);
        assert!(!r.extremal_unique_up_to_iso);
        let witness = r.nontrivial_extremal_witness.unwrap();
        assert_eq!(
            witness.to_vectors(),
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );
    }

    #[test]
    fn verify_rejects_out_of_range() {
        assert!(matches!(
            verify_instance(2, 2, 5, Method::Auto, DEFAULT_ENUMERATION_CAP),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn exceptional_construction_examples() {
        let f = construct_exceptional_family(3, 2, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(
            f.to_vectors(),
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );

        let f = construct_exceptional_family(6, 2, 4, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(f.len(), 45);
        assert!(f.is_intersecting());
        assert!(!f.is_trivial());

        assert!(construct_exceptional_family(5, 2, 3, DEFAULT_ENUMERATION_CAP).is_err());
        assert!(construct_exceptional_family(4, 1, 2, DEFAULT_ENUMERATION_CAP).is_err());
    }

    #[test]
    fn exceptional_construction_is_found_by_scan() {
        let constructed = construct_exceptional_family(3, 2, 2, DEFAULT_ENUMERATION_CAP).unwrap();
        let r = verify_instance(3, 2, 2, Method::Auto, DEFAULT_ENUMERATION_CAP).unwrap();
        let witness = r.nontrivial_extremal_witness.unwrap();
        assert!(are_isomorphic(&constructed, &witness).unwrap());
    }

    #[test]
    fn sweep_small_grid() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = dir.path().join("ledger.jsonl");
        let summary = sweep(4, 2, 3, Some(&ledger), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(summary.violations, 0);
        let records = read_ledger(&ledger).unwrap();
        assert_eq!(records.len() as u64, summary.instances);

        // Deterministic rerun: identical records apart from duration_ms.
        let ledger2 = dir.path().join("ledger2.jsonl");
        sweep(4, 2, 3, Some(&ledger2), DEFAULT_ENUMERATION_CAP).unwrap();
        let records2 = read_ledger(&ledger2).unwrap();
        assert_eq!(records.len(), records2.len());
        for (a, b) in records.iter().zip(&records2) {
            let mut a = a.clone();
            let mut b = b.clone();
            a.duration_ms = 0;
            b.duration_ms = 0;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn ledger_lines_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ledger = dir.path().join("ledger.jsonl");
        sweep(4, 2, 2, Some(&ledger), DEFAULT_ENUMERATION_CAP).unwrap();
        let text = std::fs::read_to_string(&ledger).unwrap();
        for line in text.lines().filter(|l| !l.is_empty()) {
            let record: LedgerRecord = serde_json::from_str(line).unwrap();
            assert_eq!(serde_json::to_string(&record).unwrap(), line);
        }
    }
}
