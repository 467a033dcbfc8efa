//! Machinery on the lattice of nonempty proper subsets of `[n]`.
//!
//! Subsets are n-bit masks (symbol `i` at bit `i-1`). A maximal intersecting
//! family here picks exactly one set from each complement pair and is closed
//! under taking proper supersets; enumeration exploits exactly that shape.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::coeffs::Params;
use crate::coeffs::{binomial, build_coeff_table, q_of};
use crate::error::{Error, Result};
use crate::multiset::{Multiset, MultisetFamily};

/// Hard cap for full enumeration of maximal families; the count explodes
/// combinatorially past this.
pub const MAX_ENUMERATION_N: u32 = 7;

/// A family of nonempty proper subsets of `[n]`, as sorted bitmasks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubsetFamily {
    n: u32,
    members: Vec<u32>,
}

impl SubsetFamily {
    pub fn new(n: u32, mut members: Vec<u32>) -> Result<SubsetFamily> {
        if n < 2 {
            return Err(Error::usage(
                "subset families need a ground set of size >= 2",
            ));
        }
        if n > 30 {
            return Err(Error::resource("bitmask ground set capped at 30 symbols"));
        }
        let full = (1u32 << n) - 1;
        for &b in &members {
            if b == 0 || b >= full {
                return Err(Error::usage(format!(
                    "subset family members must be nonempty proper subsets, got {b:#b}"
                )));
            }
        }
        members.sort_unstable();
        members.dedup();
        Ok(SubsetFamily { n, members })
    }

    /// The star: every nonempty proper subset containing symbol 1.
    pub fn star(n: u32) -> Result<SubsetFamily> {
        let full = (1u32 << n) - 1;
        let members = (1..full).filter(|b| b & 1 == 1).collect();
        SubsetFamily::new(n, members)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    /// `counts[l]` = number of members of size `l`, for `l = 0..=n`.
    pub fn level_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n as usize + 1];
        for &b in &self.members {
            counts[b.count_ones() as usize] += 1;
        }
        counts
    }

    /// Pairwise intersection check; quadratic, intended for small families.
    pub fn is_intersecting(&self) -> bool {
        for (i, &a) in self.members.iter().enumerate() {
            for &b in &self.members[i + 1..] {
                if a & b == 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Level counts of a subset family on `[n]`, used for deficiency profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelProfile {
    pub n: u32,
    /// Indexed by level `0..=n`; only `1..=n-1` can be nonzero.
    pub counts: Vec<u64>,
}

const UNKNOWN: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

/// One complement pair, pre-split into the branching order.
struct Pair {
    small: u32,
    large: u32,
}

fn complement_pairs(n: u32) -> Vec<Pair> {
    let full = (1u32 << n) - 1;
    let mut pairs: Vec<Pair> = (1..full)
        .filter(|b| b & 1 == 0)
        .map(|b| {
            let c = full ^ b;
            // Choosing the small side first knocks out the most sets.
            if b.count_ones() <= c.count_ones() {
                Pair { small: b, large: c }
            } else {
                Pair { small: c, large: b }
            }
        })
        .collect();
    pairs.sort_by_key(|p| (p.small.count_ones(), p.small));
    pairs
}

/// Marks `x` and all its proper supersets as members, complements as
/// non-members. Returns false on contradiction; appends marks to `trail`.
fn propagate(x: u32, full: u32, status: &mut [u8], trail: &mut Vec<u32>) -> bool {
    let rest = full & !x;
    let mut s = rest;
    loop {
        let w = x | s;
        if w != full {
            match status[w as usize] {
                IN => {}
                OUT => return false,
                _ => {
                    status[w as usize] = IN;
                    status[(full ^ w) as usize] = OUT;
                    trail.push(w);
                }
            }
        }
        if s == 0 {
            break;
        }
        s = (s - 1) & rest;
    }
    true
}

fn undo(mark: usize, full: u32, status: &mut [u8], trail: &mut Vec<u32>) {
    while trail.len() > mark {
        let w = trail.pop().unwrap();
        status[w as usize] = UNKNOWN;
        status[(full ^ w) as usize] = UNKNOWN;
    }
}

fn collect_family(n: u32, status: &[u8]) -> SubsetFamily {
    let members = (1..status.len() as u32)
        .filter(|&w| status[w as usize] == IN)
        .collect();
    SubsetFamily { n, members }
}

/// Every maximal intersecting family of nonempty proper subsets of `[n]`,
/// by backtracking over complement pairs with superset propagation.
/// Output is sorted into a canonical order and each family is verified
/// to be closed under proper supersets.
pub fn enumerate_maximal_intersecting(n: u32) -> Result<Vec<SubsetFamily>> {
    if n < 2 {
        return Err(Error::usage("enumeration requires n >= 2"));
    }
    if n > MAX_ENUMERATION_N {
        return Err(Error::resource(format!(
            "maximal-family enumeration capped at n <= {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    let full = (1u32 << n) - 1;
    let pairs = complement_pairs(n);
    let mut status = vec![UNKNOWN; 1 << n];
    let mut trail: Vec<u32> = Vec::new();
    let mut out: Vec<SubsetFamily> = Vec::new();

    fn rec(
        pairs: &[Pair],
        idx: usize,
        full: u32,
        status: &mut Vec<u8>,
        trail: &mut Vec<u32>,
        out: &mut Vec<SubsetFamily>,
    ) {
        let mut i = idx;
        while i < pairs.len() && status[pairs[i].small as usize] != UNKNOWN {
            i += 1;
        }
        if i == pairs.len() {
            out.push(collect_family(full.count_ones(), status));
            return;
        }
        for side in [pairs[i].small, pairs[i].large] {
            let mark = trail.len();
            if propagate(side, full, status, trail) {
                rec(pairs, i + 1, full, status, trail, out);
            }
            undo(mark, full, status, trail);
        }
    }

    rec(&pairs, 0, full, &mut status, &mut trail, &mut out);
    out.sort();

    for f in &out {
        verify_up_closed(f)?;
    }
    Ok(out)
}

/// Confirms that every proper superset of a member is a member.
fn verify_up_closed(f: &SubsetFamily) -> Result<()> {
    let full = (1u32 << f.n) - 1;
    for &b in &f.members {
        for i in 0..f.n {
            let sup = b | (1 << i);
            if sup != b && sup != full && !f.contains(sup) {
                return Err(Error::violation(
                    "superset_closure",
                    format!("n={} member {b:#b} lacks superset {sup:#b}", f.n),
                ));
            }
        }
    }
    Ok(())
}

/// Maximality test via the structural characterization: the family has one
/// member from each complement pair and is closed under proper supersets.
/// (Those two conditions force pairwise intersection: two disjoint members
/// would put a set and its complement in the family.)
pub fn is_maximal_intersecting(f: &SubsetFamily) -> bool {
    let n = f.n;
    if n > 20 {
        return false;
    }
    let full = (1u32 << n) - 1;
    let expected = (1u32 << (n - 1)) - 1;
    if f.members.len() != expected as usize {
        return false;
    }
    let mut table = vec![false; 1 << n];
    for &b in &f.members {
        table[b as usize] = true;
    }
    for &b in &f.members {
        if table[(full ^ b) as usize] {
            return false;
        }
        for i in 0..n {
            let sup = b | (1 << i);
            if sup != b && sup != full && !table[sup as usize] {
                return false;
            }
        }
    }
    true
}

/// Support map: the set of symbols present in a multiset. Defined only when
/// the support is a nonempty proper subset of the ground set.
pub fn phi(a: &Multiset) -> Result<u32> {
    if a.n() > 30 {
        return Err(Error::resource("support map uses bitmasks; n capped at 30"));
    }
    let mask = a.support_mask()?;
    let full = (1u32 << a.n()) - 1;
    if mask == 0 {
        return Err(Error::usage("support map undefined on the empty multiset"));
    }
    if mask == full {
        return Err(Error::usage(
            "support map requires a proper support (guaranteed when n > k)",
        ));
    }
    Ok(mask)
}

/// Number of k-multisets whose support lies in the family:
/// `sum_l C(k, l) * |B(l)|`.
pub fn phi_inverse_size(b: &SubsetFamily, k: u32, m: u32) -> Result<BigUint> {
    let q = q_of(k, m);
    if b.n < k + q {
        return Err(Error::usage(format!(
            "phi_inverse_size requires n >= k + q = {}",
            k + q
        )));
    }
    let table = build_coeff_table(k, m)?;
    let counts = b.level_counts();
    let mut acc = BigUint::zero();
    for (l, &c) in counts.iter().enumerate() {
        if c > 0 {
            acc += table.value(l as i64) * BigUint::from(c);
        }
    }
    Ok(acc)
}

/// Materializes `{A : phi(A) in B}`. The result is intersecting whenever `B`
/// is, since members sharing a support symbol intersect.
pub fn phi_inverse_family(b: &SubsetFamily, m: u32, k: u32, cap: u64) -> Result<MultisetFamily> {
    let n = b.n;
    let q = q_of(k, m);
    if n < k + q {
        return Err(Error::usage(format!(
            "phi_inverse_family requires n >= k + q = {}",
            k + q
        )));
    }
    let size = phi_inverse_size(b, k, m)?;
    if size > BigUint::from(cap) {
        return Err(Error::resource(format!(
            "phi_inverse_family would materialize {size} multisets, above the cap of {cap}"
        )));
    }

    let mut members = Vec::new();
    for &mask in &b.members {
        let support = mask.count_ones();
        if support < q || support > k {
            continue;
        }
        let positions: Vec<usize> = (0..n as usize).filter(|i| mask >> i & 1 == 1).collect();
        let mut current = vec![0u32; n as usize];
        compositions_onto(&mut members, &mut current, &positions, 0, k, m);
    }
    let family = MultisetFamily::new(Params { n: Some(n), m, k }, members)?;
    if BigUint::from(family.len() as u64) != size {
        return Err(Error::violation(
            "support_count_formula",
            format!(
                "n={n} m={m} k={k}: materialized {} members, level formula gives {size}",
                family.len()
            ),
        ));
    }
    Ok(family)
}

fn compositions_onto(
    out: &mut Vec<Multiset>,
    current: &mut Vec<u32>,
    positions: &[usize],
    idx: usize,
    remaining: u32,
    m: u32,
) {
    if idx == positions.len() {
        if remaining == 0 {
            out.push(Multiset::new(current.clone()));
        }
        return;
    }
    let tail = positions.len() - idx - 1;
    for c in 1..=m.min(remaining) {
        let left = remaining - c;
        if left < tail as u32 || left > tail as u32 * m {
            continue;
        }
        current[positions[idx]] = c;
        compositions_onto(out, current, positions, idx + 1, left, m);
    }
    current[positions[idx]] = 0;
}

/// Level counts of `D = U \ B`, where `U` is the star at symbol 1.
/// Verifies the pair identity `|B(l)| = |U(l)| - |D(l)| + |D(n-l)|` and the
/// per-level dominance `|D(l)| >= |D(n-l)|` for `l <= (n-1)/2`.
pub fn deficiency_profile(b: &SubsetFamily) -> Result<LevelProfile> {
    if !is_maximal_intersecting(b) {
        return Err(Error::usage(
            "deficiency_profile requires a maximal intersecting family",
        ));
    }
    let n = b.n;
    let full = (1u32 << n) - 1;
    let mut counts = vec![0u64; n as usize + 1];
    for w in 1..full {
        if w & 1 == 1 && !b.contains(w) {
            counts[w.count_ones() as usize] += 1;
        }
    }

    let b_counts = b.level_counts();
    for l in 1..n as usize {
        let u_l = binomial(n as i64 - 1, l as i64 - 1);
        let lhs = BigUint::from(b_counts[l]);
        let rhs = u_l + BigUint::from(counts[n as usize - l]) - BigUint::from(counts[l]);
        if lhs != rhs {
            return Err(Error::violation(
                "complement_level_identity",
                format!("n={n} l={l}: |B(l)|={} mismatch", b_counts[l]),
            ));
        }
    }
    for l in 1..=(n as usize - 1) / 2 {
        if counts[l] < counts[n as usize - l] {
            return Err(Error::violation(
                "deficiency_dominance",
                format!(
                    "n={n} l={l}: |D(l)|={} < |D(n-l)|={}",
                    counts[l],
                    counts[n as usize - l]
                ),
            ));
        }
    }
    Ok(LevelProfile { n, counts })
}

/// Greedily extends an intersecting family to a maximal one: complement
/// pairs are scanned in canonical order and the side containing symbol 1 is
/// preferred whenever both sides stay compatible. At least one side always
/// works, because two incompatible sides would witness two disjoint members.
pub fn complete_to_maximal(seed: &SubsetFamily) -> Result<SubsetFamily> {
    let n = seed.n;
    if n > 12 {
        return Err(Error::resource("greedy completion capped at n <= 12"));
    }
    if !seed.is_intersecting() {
        return Err(Error::usage("completion requires an intersecting seed"));
    }
    let full = (1u32 << n) - 1;
    let mut status = vec![UNKNOWN; 1 << n];
    let mut trail = Vec::new();
    for &b in &seed.members {
        if !propagate(b, full, &mut status, &mut trail) {
            return Err(Error::violation(
                "completion_seed",
                format!("intersecting seed produced a contradiction at {b:#b}"),
            ));
        }
    }
    for pair in complement_pairs(n) {
        if status[pair.small as usize] != UNKNOWN {
            continue;
        }
        let (first, second) = if pair.small & 1 == 1 {
            (pair.small, pair.large)
        } else {
            (pair.large, pair.small)
        };
        let mark = trail.len();
        if propagate(first, full, &mut status, &mut trail) {
            continue;
        }
        undo(mark, full, &mut status, &mut trail);
        if !propagate(second, full, &mut status, &mut trail) {
            return Err(Error::violation(
                "completion_stuck",
                format!(
                    "neither side of pair {:#b}/{:#b} extends",
                    pair.small, pair.large
                ),
            ));
        }
    }
    Ok(collect_family(n, &status))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn family(n: u32, members: &[u32]) -> SubsetFamily {
        SubsetFamily::new(n, members.to_vec()).unwrap()
    }

    #[test]
    fn enumeration_small_counts() {
        assert_eq!(enumerate_maximal_intersecting(2).unwrap().len(), 2);
        assert_eq!(enumerate_maximal_intersecting(3).unwrap().len(), 4);
        assert_eq!(enumerate_maximal_intersecting(4).unwrap().len(), 12);
        assert_eq!(enumerate_maximal_intersecting(5).unwrap().len(), 81);
    }

    #[test]
    fn enumeration_n2_explicit() {
        let fams = enumerate_maximal_intersecting(2).unwrap();
        assert_eq!(fams[0].members(), &[0b01]);
        assert_eq!(fams[1].members(), &[0b10]);
    }

    #[test]
    fn enumeration_n3_explicit() {
        let fams = enumerate_maximal_intersecting(3).unwrap();
        // Three stars plus the triangle of two-element sets.
        assert!(fams.contains(&family(3, &[0b001, 0b011, 0b101])));
        assert!(fams.contains(&family(3, &[0b010, 0b011, 0b110])));
        assert!(fams.contains(&family(3, &[0b100, 0b101, 0b110])));
        assert!(fams.contains(&family(3, &[0b011, 0b101, 0b110])));
    }

    #[test]
    fn enumeration_rejects_out_of_range() {
        assert!(enumerate_maximal_intersecting(1).is_err());
        assert!(matches!(
            enumerate_maximal_intersecting(8),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn maximality_characterization_vs_direct_oracle() {
        // Direct oracle: intersecting and no addable set keeps it intersecting.
        fn oracle(f: &SubsetFamily) -> bool {
            if !f.is_intersecting() {
                return false;
            }
            let full = (1u32 << f.n()) - 1;
            for w in 1..full {
                if !f.contains(w) && f.members().iter().all(|&b| b & w != 0) {
                    return false;
                }
            }
            true
        }
        for n in 2..=4 {
            for f in enumerate_maximal_intersecting(n).unwrap() {
                assert!(is_maximal_intersecting(&f));
                assert!(oracle(&f));
            }
        }
        let not_complete = family(3, &[0b011, 0b101]);
        assert!(!is_maximal_intersecting(&not_complete));
        assert!(!oracle(&not_complete));
        let not_intersecting = family(4, &[0b0011, 0b1100, 0b0111, 0b1011, 0b1101, 0b1110, 0b0101]);
        assert!(!is_maximal_intersecting(&not_intersecting));
    }

    #[test]
    fn star_is_maximal() {
        for n in 2..=6 {
            assert!(is_maximal_intersecting(&SubsetFamily::star(n).unwrap()));
        }
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(&Multiset::new(vec![2, 0, 1, 0])).unwrap(), 0b0101);
        assert_eq!(phi(&Multiset::new(vec![0, 1, 0])).unwrap(), 0b010);
        assert!(phi(&Multiset::new(vec![1, 1, 1])).is_err());
        assert!(phi(&Multiset::new(vec![0, 0])).is_err());
    }

    #[test]
    fn phi_inverse_size_examples() {
        let star = SubsetFamily::star(4).unwrap();
        assert_eq!(phi_inverse_size(&star, 2, 2).unwrap(), BigUint::from(4u32));

        let triangle = family(3, &[0b011, 0b101, 0b110]);
        assert_eq!(
            phi_inverse_size(&triangle, 2, 2).unwrap(),
            BigUint::from(3u32)
        );

        // All levels below q contribute nothing: q = 2 for k = 4, m = 2.
        let singles = family(6, &[0b000001, 0b000010]);
        assert_eq!(phi_inverse_size(&singles, 4, 2).unwrap(), BigUint::zero());

        assert!(phi_inverse_size(&triangle, 3, 2).is_err());
    }

    #[test]
    fn phi_inverse_family_examples() {
        let triangle = family(3, &[0b011, 0b101, 0b110]);
        let f = phi_inverse_family(&triangle, 2, 2, 1000).unwrap();
        assert_eq!(
            f.to_vectors(),
            vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]
        );

        let star = SubsetFamily::star(3).unwrap();
        let f = phi_inverse_family(&star, 2, 2, 1000).unwrap();
        assert_eq!(
            f.to_vectors(),
            vec![vec![1, 0, 1], vec![1, 1, 0], vec![2, 0, 0]]
        );

        let single = family(3, &[0b001]);
        let f = phi_inverse_family(&single, 2, 2, 1000).unwrap();
        assert_eq!(f.to_vectors(), vec![vec![2, 0, 0]]);
    }

    #[test]
    fn phi_inverse_members_have_supports_in_family() {
        for b in enumerate_maximal_intersecting(4).unwrap() {
            let f = phi_inverse_family(&b, 2, 2, 100_000).unwrap();
            for a in f.members() {
                assert!(b.contains(phi(a).unwrap()));
            }
            assert!(f.is_intersecting());
        }
    }

    #[test]
    fn deficiency_examples() {
        let star = SubsetFamily::star(4).unwrap();
        let p = deficiency_profile(&star).unwrap();
        assert!(p.counts.iter().all(|&c| c == 0));

        let triangle = family(3, &[0b011, 0b101, 0b110]);
        let p = deficiency_profile(&triangle).unwrap();
        assert_eq!(p.counts, vec![0, 1, 0, 0]);

        let not_maximal = family(3, &[0b011]);
        assert!(deficiency_profile(&not_maximal).is_err());
    }

    #[test]
    fn deficiency_of_swapped_prefix_family() {
        // Star at 1 on [6] with the subsets of {1,2} containing 1 traded for
        // their complements: exactly one member missing at levels 1 and 2.
        let full = 0b111111u32;
        let members: Vec<u32> = (1..full)
            .filter_map(|b| {
                if b & 1 == 0 {
                    return None;
                }
                Some(if b & !0b11 == 0 { full ^ b } else { b })
            })
            .collect();
        let swapped = SubsetFamily::new(6, members).unwrap();
        assert!(is_maximal_intersecting(&swapped));
        let p = deficiency_profile(&swapped).unwrap();
        assert_eq!(p.counts, vec![0, 1, 1, 0, 0, 0, 0]);
    }

    #[test]
    fn deficiency_equality_propagates_upward() {
        // If |D(l0)| = |D(n-l0)| at some level l0 <= (n-1)/2, the same holds
        // at every level l in [l0, n-l0]. The family is a star on exactly
        // those levels; outside that band single complement-pair swaps (for
        // example trading {x} for its complement) can break the symmetry, so
        // the equality genuinely stops at n-l0.
        for n in 2..=6 {
            for b in enumerate_maximal_intersecting(n).unwrap() {
                let p = deficiency_profile(&b).unwrap();
                let half = (n as usize - 1) / 2;
                for l0 in 1..=half {
                    if p.counts[l0] == p.counts[n as usize - l0] {
                        for l in l0..=(n as usize - l0) {
                            assert_eq!(
                                p.counts[l],
                                p.counts[n as usize - l],
                                "n={n} l0={l0} l={l}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn deficiency_equality_can_stop_past_the_band() {
        // Star at symbol 2 on [5] with the pair {2}/{1,3,4,5} flipped:
        // D-profile (1, 3, 3, 0) is symmetric at levels 2..3 but not at 4.
        let full = 0b11111u32;
        let members: Vec<u32> = (1..full)
            .filter(|&b| {
                if b == 0b00010 {
                    false
                } else {
                    b & 0b00010 != 0 || b == full ^ 0b00010
                }
            })
            .collect();
        let b = SubsetFamily::new(5, members).unwrap();
        assert!(is_maximal_intersecting(&b));
        let p = deficiency_profile(&b).unwrap();
        assert_eq!(p.counts, vec![0, 1, 3, 3, 0, 0]);
    }

    #[test]
    fn completion_respects_seed_and_is_maximal() {
        let seed = family(4, &[0b0011, 0b0101]);
        let completed = complete_to_maximal(&seed).unwrap();
        assert!(is_maximal_intersecting(&completed));
        for &b in seed.members() {
            assert!(completed.contains(b));
        }
        let bad = family(4, &[0b0011, 0b1100]);
        assert!(complete_to_maximal(&bad).is_err());
    }

    #[test]
    fn completion_of_empty_seed_prefers_star() {
        let seed = SubsetFamily::new(5, vec![]).unwrap();
        let completed = complete_to_maximal(&seed).unwrap();
        assert_eq!(completed, SubsetFamily::star(5).unwrap());
    }

    proptest::proptest! {
        /// Characterized maximality must agree with the direct add-a-set oracle
        /// on arbitrary families.
        #[test]
        fn maximality_agrees_with_oracle(n in 2u32..5, picks in proptest::collection::vec(proptest::bool::ANY, 7)) {
            let full = (1u32 << n) - 1;
            // Build a family by choosing one side of each complement pair.
            let pair_bases: Vec<u32> = (1..full).filter(|b| b & 1 == 0).collect();
            let mut members = Vec::new();
            for (i, &b) in pair_bases.iter().enumerate() {
                let side = if picks[i % picks.len()] { b } else { full ^ b };
                members.push(side);
            }
            let f = SubsetFamily::new(n, members).unwrap();
            let characterized = is_maximal_intersecting(&f);
            let direct = f.is_intersecting() && {
                let mut addable = false;
                for w in 1..full {
                    if !f.contains(w) && f.members().iter().all(|&b| b & w != 0) {
                        addable = true;
                        break;
                    }
                }
                !addable
            };
            proptest::prop_assert_eq!(characterized, direct);
        }
    }
}
