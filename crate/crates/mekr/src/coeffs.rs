//! Exact coefficient computation.
//!
//! `coeff(k, l)` counts the compositions of `k` into exactly `l` parts, each
//! part between 1 and `m` — equivalently the coefficient of `x^k` in
//! `(x + x^2 + ... + x^m)^l`. Three independent algorithms are provided so
//! they can cross-check each other:
//!
//! * a dynamic program over the recurrence
//!   `C(k, l) = C(k-1, l-1) + C(k-2, l-1) + ... + C(k-m, l-1)`,
//! * truncated dense polynomial powering,
//! * an inclusion–exclusion closed form.
//!
//! All values are arbitrary-precision: the coefficients grow super-polynomially
//! and a verification tool cannot tolerate silent overflow.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Default cap on materialized enumerations (multisets, pre-image families).
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

static ZERO: OnceLock<BigUint> = OnceLock::new();

/// Shared `&'static` zero, handy for out-of-range coefficient lookups.
pub(crate) fn zero() -> &'static BigUint {
    ZERO.get_or_init(BigUint::zero)
}

/// Instance parameters. `n` is optional because pure coefficient work does
/// not need a ground set. The unbounded multiplicity request is normalized
/// to `m := k` (a k-multiset never uses a symbol more than k times).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Params {
    pub n: Option<u32>,
    pub m: u32,
    pub k: u32,
}

impl Params {
    pub fn new(n: Option<u32>, m: u32, k: u32) -> Result<Self> {
        if m < 1 {
            return Err(Error::usage("multiplicity bound m must be >= 1"));
        }
        if k < 1 {
            return Err(Error::usage("multiset size k must be >= 1"));
        }
        if let Some(n) = n {
            if n < 1 {
                return Err(Error::usage("ground-set size n must be >= 1"));
            }
        }
        Ok(Params { n, m, k })
    }

    /// Normalizes an unbounded multiplicity request (`None`) to `m := k`.
    pub fn with_multiplicity(n: Option<u32>, m: Option<u32>, k: u32) -> Result<Self> {
        Params::new(n, m.unwrap_or(k), k)
    }

    /// Minimum support size of a k-multiset: `q = ceil(k / m)`.
    /// Always recomputed, never stored.
    pub fn q(&self) -> u32 {
        self.k.div_ceil(self.m)
    }

    pub fn ground_set(&self) -> Result<u32> {
        self.n
            .ok_or_else(|| Error::usage("this operation requires a ground-set size n"))
    }
}

/// `q = ceil(k/m)` for raw integers.
pub fn q_of(k: u32, m: u32) -> u32 {
    k.div_ceil(m)
}

/// Binomial coefficient with the convention `C(a, b) = 0` when
/// `a < max(0, b)` (and for `b < 0`).
pub(crate) fn binomial(a: i64, b: i64) -> BigUint {
    if b < 0 || a < 0 || a < b {
        return BigUint::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 1..=b {
        acc *= BigUint::from((a - b + i) as u64);
        acc /= BigUint::from(i as u64);
    }
    acc
}

/// Dense polynomial product truncated at `deg` (inclusive).
pub(crate) fn poly_mul_trunc(a: &[BigUint], b: &[BigUint], deg: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); deg + 1];
    for (i, ai) in a.iter().enumerate().take(deg + 1) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > deg {
                break;
            }
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `base^e` truncated at `deg`, by repeated multiplication.
pub(crate) fn poly_pow_trunc(base: &[BigUint], e: u32, deg: usize) -> Vec<BigUint> {
    let mut acc = vec![BigUint::zero(); deg + 1];
    acc[0] = BigUint::one();
    for _ in 0..e {
        acc = poly_mul_trunc(&acc, base, deg);
    }
    acc
}

/// `x + x^2 + ... + x^m` as a dense coefficient vector, truncated at `deg`.
fn part_poly(m: u32, deg: usize) -> Vec<BigUint> {
    let top = (m as usize).min(deg);
    let mut p = vec![BigUint::zero(); deg + 1];
    for coeff in p.iter_mut().take(top + 1).skip(1) {
        *coeff = BigUint::one();
    }
    p
}

/// `1 + x + ... + x^m` truncated at `deg`.
fn level_poly(m: u32, deg: usize) -> Vec<BigUint> {
    let mut p = part_poly(m, deg);
    p[0] = BigUint::one();
    p
}

/// All rows `C(j, .)` for `j = 0..=k_max` at a fixed multiplicity bound.
/// Row `j` has entries for `l = 0..=j`.
#[derive(Debug)]
pub(crate) struct CoeffTriangle {
    rows: Vec<Vec<BigUint>>,
}

impl CoeffTriangle {
    pub(crate) fn build(m: u32, k_max: u32) -> CoeffTriangle {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(k_max as usize + 1);
        rows.push(vec![BigUint::one()]);
        for j in 1..=k_max as usize {
            let mut row = vec![BigUint::zero(); j + 1];
            for l in 1..=j {
                let mut acc = BigUint::zero();
                for i in 1..=(m as usize).min(j) {
                    let prev = &rows[j - i];
                    if l - 1 < prev.len() {
                        acc += &prev[l - 1];
                    }
                }
                row[l] = acc;
            }
            rows.push(row);
        }
        CoeffTriangle { rows }
    }

    pub(crate) fn k_max(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// `C(k, l)` with zero outside the stored/defined range.
    pub(crate) fn value(&self, k: i64, l: i64) -> &BigUint {
        if k < 1 || l < 1 || l > k {
            return zero();
        }
        debug_assert!(k <= self.k_max() as i64, "triangle too small");
        &self.rows[k as usize][l as usize]
    }

    pub(crate) fn row(&self, k: u32) -> &[BigUint] {
        &self.rows[k as usize]
    }
}

static TRIANGLES: OnceLock<RwLock<HashMap<u32, Arc<CoeffTriangle>>>> = OnceLock::new();

/// Per-process memo of coefficient triangles, one per multiplicity bound.
/// Single writer, many readers; results are identical to uncached computation.
pub(crate) fn shared_triangle(m: u32, k_min: u32) -> Arc<CoeffTriangle> {
    let lock = TRIANGLES.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(t) = lock.read().unwrap().get(&m) {
        if t.k_max() >= k_min {
            return Arc::clone(t);
        }
    }
    let mut map = lock.write().unwrap();
    // Re-check under the write lock; another writer may have grown it.
    if let Some(t) = map.get(&m) {
        if t.k_max() >= k_min {
            return Arc::clone(t);
        }
    }
    let grown = map.get(&m).map_or(0, |t| t.k_max() * 2);
    let t = Arc::new(CoeffTriangle::build(m, k_min.max(grown).max(16)));
    map.insert(m, Arc::clone(&t));
    t
}

/// One row of coefficients: `values[l] = C(k, l)` for `l = 0..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffTable {
    k: u32,
    m: u32,
    values: Vec<BigUint>,
}

impl CoeffTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u32 {
        q_of(self.k, self.m)
    }

    /// `C(k, l)`; zero for `l <= 0` and `l > k`.
    pub fn value(&self, l: i64) -> &BigUint {
        if l < 1 || l > self.k as i64 {
            zero()
        } else {
            &self.values[l as usize]
        }
    }

    /// Entries indexed `l = 0..=k` (entry 0 is the conventional zero).
    pub fn values(&self) -> &[BigUint] {
        &self.values
    }

    /// Index of the first maximum among `C(k, q), ..., C(k, k)`.
    pub fn alpha(&self) -> u32 {
        let q = self.q() as usize;
        let mut best = q;
        for l in q..=self.k as usize {
            if self.values[l] > self.values[best] {
                best = l;
            }
        }
        best as u32
    }

    /// Prefix sums `P[l] = sum_{i<=l} C(k, i)` for window-sum queries.
    pub fn prefix_sums(&self) -> Vec<BigUint> {
        let mut acc = BigUint::zero();
        let mut out = Vec::with_capacity(self.values.len());
        for v in &self.values {
            acc += v;
            out.push(acc.clone());
        }
        out
    }
}

/// Builds the coefficient row for `(k, m)` via the dynamic program, reusing
/// the per-process triangle memo.
pub fn build_coeff_table(k: u32, m: u32) -> Result<CoeffTable> {
    if k < 1 {
        return Err(Error::usage("k must be >= 1"));
    }
    if m < 1 {
        return Err(Error::usage("m must be >= 1"));
    }
    let tri = shared_triangle(m, k);
    Ok(CoeffTable {
        k,
        m,
        values: tri.row(k).to_vec(),
    })
}

/// Independent oracle: expands `(x + ... + x^m)^l` by repeated dense
/// multiplication truncated at degree `k` and reads off the coefficient.
pub fn coeff_oracle_poly_power(k: u32, m: u32, l: u32) -> Result<BigUint> {
    if k < 1 || m < 1 || l < 1 {
        return Err(Error::usage(
            "coeff_oracle_poly_power requires k, m, l >= 1",
        ));
    }
    let deg = k as usize;
    let pw = poly_pow_trunc(&part_poly(m, deg), l, deg);
    Ok(pw[deg].clone())
}

/// Independent oracle: inclusion–exclusion closed form
/// `sum_j (-1)^j C(l, j) C(k - j*m - 1, l - 1)`.
pub fn coeff_oracle_closed_form(k: u32, m: u32, l: u32) -> Result<BigUint> {
    if k < 1 || m < 1 || l < 1 {
        return Err(Error::usage(
            "coeff_oracle_closed_form requires k, m, l >= 1",
        ));
    }
    let (k, m, l) = (k as i64, m as i64, l as i64);
    let mut acc = BigInt::zero();
    for j in 0..=l {
        let top = k - j * m - 1;
        if top < 0 {
            break;
        }
        let term = binomial(l, j) * binomial(top, l - 1);
        let term = BigInt::from_biguint(Sign::Plus, term);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.to_biguint().ok_or_else(|| {
        Error::violation(
            "closed_form_nonnegative",
            format!("negative alternating sum at k={k} m={m} l={l}"),
        )
    })
}

/// Number of k-multisets of `[n]_m`: coefficient of `x^k` in
/// `(1 + x + ... + x^m)^n`.
pub fn total_multiset_count(n: u32, m: u32, k: u32) -> Result<BigUint> {
    if n < 1 || m < 1 {
        return Err(Error::usage("total_multiset_count requires n, m >= 1"));
    }
    let deg = k as usize;
    let pw = poly_pow_trunc(&level_poly(m, deg), n, deg);
    Ok(pw[deg].clone())
}
