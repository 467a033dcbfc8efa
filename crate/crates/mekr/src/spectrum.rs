//! Shape of the coefficient rows: first-peak unimodality, the `alpha`
//! profile, window sets, and exhaustive checkers for the row inequalities
//! that drive the extremal argument.

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffs::{binomial, build_coeff_table, q_of, shared_triangle};
use crate::error::{Error, Result};

/// Location and value of the first maximum of the row `C(k, q), ..., C(k, k)`,
/// together with a unimodality witness flag.
#[derive(Debug, Clone)]
pub struct SpectrumProfile {
    pub k: u32,
    pub m: u32,
    pub q: u32,
    /// Smallest index attaining the row maximum.
    pub alpha: u32,
    pub peak: BigUint,
    pub unimodal: bool,
    /// `alpha(k) - alpha(k-1)`, present for `k >= 2`.
    pub alpha_delta: Option<i64>,
}

impl SpectrumProfile {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "k": self.k,
            "m": self.m,
            "q": self.q,
            "alpha": self.alpha,
            "peak": self.peak.to_string(),
            "unimodal": self.unimodal,
            "alpha_delta": self.alpha_delta,
        })
    }
}

/// The set of indices `i` in `[0, r-1]` where
/// `C(r-1, i) - C(r-j-1, i) >= l`, stored as an inclusive interval.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowSet {
    pub j: u32,
    pub l: u64,
    pub r: u32,
    /// Inclusive `(lo, hi)`; `None` when the set is empty.
    pub bounds: Option<(u32, u32)>,
}

impl WindowSet {
    pub fn is_empty(&self) -> bool {
        self.bounds.is_none()
    }

    pub fn indices(&self) -> impl Iterator<Item = u32> {
        let (lo, hi) = match self.bounds {
            Some((lo, hi)) => (lo, hi + 1),
            None => (0, 0),
        };
        lo..hi
    }
}

/// `f(i) = C(r-1, i) - C(r-j-1, i)`; nonnegative since the top argument
/// only shrinks. Also well-defined for `j >= r`, where the second term
/// vanishes and `f` degenerates to a plain binomial row.
fn window_gap(j: u32, r: u32, i: u32) -> BigUint {
    binomial(r as i64 - 1, i as i64) - binomial(r as i64 - j as i64 - 1, i as i64)
}

fn window_indices(j: u32, l: u64, r: u32) -> Vec<u32> {
    let threshold = BigUint::from(l);
    (0..r)
        .filter(|&i| window_gap(j, r, i) >= threshold)
        .collect()
}

fn interval_of(indices: &[u32]) -> Result<Option<(u32, u32)>> {
    match (indices.first(), indices.last()) {
        (Some(&lo), Some(&hi)) => {
            if (hi - lo + 1) as usize != indices.len() {
                return Err(Error::violation(
                    "window_consecutive",
                    format!("threshold set {indices:?} is not a contiguous interval"),
                ));
            }
            Ok(Some((lo, hi)))
        }
        _ => Ok(None),
    }
}

/// Computes the window set and verifies by direct scan that it is a single
/// interval of consecutive integers.
pub fn window_set(j: u32, l: u64, r: u32) -> Result<WindowSet> {
    if j < 1 || l < 1 {
        return Err(Error::usage("window_set requires j >= 1 and l >= 1"));
    }
    if j >= r {
        return Err(Error::usage(format!(
            "window_set requires j < r, got j={j} r={r}"
        )));
    }
    let indices = window_indices(j, l, r);
    Ok(WindowSet {
        j,
        l,
        r,
        bounds: interval_of(&indices)?,
    })
}

/// Outcome of evaluating the coefficient transform identity at one tuple:
/// the direct coefficient, its binomial-weighted expansion, and the
/// window-partitioned rewrite of that expansion all agree.
#[derive(Debug, Clone)]
pub struct TransformIdentity {
    pub q: u32,
    pub m: u32,
    pub r: u32,
    pub s: u32,
    pub value: BigUint,
}

impl TransformIdentity {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.q,
            "m": self.m,
            "r": self.r,
            "s": self.s,
            "value": self.value.to_string(),
            "pass": true,
        })
    }
}

/// Evaluates both expansions of `C((q-1)m + r, s)` — the binomial-weighted
/// double sum and the windowed triple sum — and confirms they equal the
/// directly computed coefficient.
pub fn transform_identity_check(q: u32, m: u32, r: u32, s: u32) -> Result<TransformIdentity> {
    if q < 2 {
        return Err(Error::usage("transform_identity_check requires q >= 2"));
    }
    if m < 1 || r < 1 || r > m {
        return Err(Error::usage(
            "transform_identity_check requires 1 <= r <= m",
        ));
    }
    if s < 2 {
        return Err(Error::usage("transform_identity_check requires s >= 2"));
    }
    let k = (q - 1) * m + r;
    let tri = shared_triangle(m, k);
    let lhs = tri.value(k as i64, s as i64).clone();

    // Binomial-weighted double sum over parts j and offsets i.
    let mut weighted = BigUint::zero();
    for j in 1..=m {
        let inner_k = ((q - 2) * m + j) as i64;
        for i in 0..r {
            let w = window_gap(j, r, i);
            if w.is_zero() {
                continue;
            }
            weighted += w * tri.value(inner_k, s as i64 - i as i64 - 1);
        }
    }

    // Windowed triple sum: levels of the weight function, one window per level.
    let mut windowed = BigUint::zero();
    for j in 1..=m {
        let inner_k = ((q - 2) * m + j) as i64;
        let gaps: Vec<BigUint> = (0..r).map(|i| window_gap(j, r, i)).collect();
        let max_gap = gaps.iter().max().cloned().unwrap_or_default();
        let mut level = BigUint::from(1u32);
        while level <= max_gap {
            for (i, g) in gaps.iter().enumerate() {
                if *g >= level {
                    windowed += tri.value(inner_k, s as i64 - i as i64 - 1);
                }
            }
            level += 1u32;
        }
    }

    if weighted != lhs || windowed != lhs {
        return Err(Error::violation(
            "transform_identity",
            format!(
                "q={q} m={m} r={r} s={s}: direct={lhs} weighted={weighted} windowed={windowed}"
            ),
        ));
    }
    Ok(TransformIdentity {
        q,
        m,
        r,
        s,
        value: lhs,
    })
}

/// Per-instance report for the row-ordering inequalities.
#[derive(Debug, Clone)]
pub struct SpiralityReport {
    pub k: u32,
    pub m: u32,
    pub q: u32,
    pub alpha: u32,
    pub n_max: u32,
    pub pass: bool,
}

/// Checks, for one `(k, m)`:
/// (a) weak spirality `C(k, q+d) >= C(k, k-d)` for all `2d <= k - q`;
/// (b) the peak bound `2 * alpha <= k + q`;
/// (c) the tail reflection `C(k, l) >= C(k, n-l)` for every
///     `n` in `[k+q, n_max]` and `q <= l <= floor((n-1)/2)`.
pub fn spirality_and_bounds_check(k: u32, m: u32, n_max: u32) -> Result<SpiralityReport> {
    if k < 2 || m < 2 {
        return Err(Error::usage(
            "spirality_and_bounds_check requires k, m >= 2",
        ));
    }
    let q = q_of(k, m);
    if n_max < k + q {
        return Err(Error::usage(format!("n_max must be >= k + q = {}", k + q)));
    }
    let table = build_coeff_table(k, m)?;

    for d in 0..=(k - q) / 2 {
        if table.value((q + d) as i64) < table.value((k - d) as i64) {
            return Err(Error::violation(
                "weak_spirality",
                format!("k={k} m={m} d={d}"),
            ));
        }
    }

    let alpha = table.alpha();
    if 2 * alpha > k + q {
        return Err(Error::violation(
            "alpha_upper_bound",
            format!("k={k} m={m} alpha={alpha} exceeds (k+q)/2"),
        ));
    }

    for n in (k + q)..=n_max {
        for l in q..=(n - 1) / 2 {
            if table.value(l as i64) < table.value((n - l) as i64) {
                return Err(Error::violation(
                    "tail_reflection",
                    format!("k={k} m={m} n={n} l={l}"),
                ));
            }
        }
    }

    Ok(SpiralityReport {
        k,
        m,
        q,
        alpha,
        n_max,
        pass: true,
    })
}

// Indices above k hold no mass, so both bounds clamp to the last prefix.
fn interval_sum(prefix: &[BigUint], lo: u32, hi: u32) -> BigUint {
    let top = prefix.len() - 1;
    let head = &prefix[(hi as usize).min(top)];
    if lo == 0 {
        head.clone()
    } else {
        head - &prefix[((lo - 1) as usize).min(top)]
    }
}

/// Compares `sum_{i in S1} C(k, i)` against `sum_{i in S2} C(k, i)` for two
/// equal-length consecutive intervals with `min S1 + max S2 >= k + q` and
/// `min S1 <= min S2`. For a valid coefficient row this is always `true`.
pub fn window_dominance(k: u32, m: u32, s1: (u32, u32), s2: (u32, u32)) -> Result<bool> {
    if k < 2 || m < 2 {
        return Err(Error::usage("window_dominance requires k, m >= 2"));
    }
    let (a1, b1) = s1;
    let (a2, b2) = s2;
    if a1 < 1 || a2 < 1 || a1 > b1 || a2 > b2 {
        return Err(Error::usage(
            "intervals must be nonempty ranges of positive integers",
        ));
    }
    if b1 - a1 != b2 - a2 {
        return Err(Error::usage("intervals must have equal length"));
    }
    let q = q_of(k, m);
    if a1 + b2 < k + q {
        return Err(Error::usage(format!(
            "min S1 + max S2 must be >= k + q = {}",
            k + q
        )));
    }
    if a1 > a2 {
        return Err(Error::usage("min S1 must be <= min S2"));
    }
    let table = build_coeff_table(k, m)?;
    let prefix = table.prefix_sums();
    // Indices above k contribute nothing; prefix lookups clamp to k.
    Ok(interval_sum(&prefix, a1, b1) >= interval_sum(&prefix, a2, b2))
}

/// Result of one exhaustive range check, CLI-serializable.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub property: String,
    pub range: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckReport {
    fn new(property: &str, range: String, witnesses: Vec<String>) -> CheckReport {
        CheckReport {
            property: property.to_string(),
            range,
            pass: witnesses.is_empty(),
            witness: if witnesses.is_empty() {
                None
            } else {
                Some(witnesses.join("; "))
            },
        }
    }
}

/// Gathers witnesses over `m` in `[m_min, m_max]`, parallelized over `k`.
/// With `all` unset, only the first witness (in `(m, k)` order) is kept.
fn scan_km<F>(m_min: u32, m_max: u32, k_max: u32, all: bool, per_k: F) -> Vec<String>
where
    F: Fn(u32, u32) -> Vec<String> + Sync,
{
    let mut witnesses = Vec::new();
    for m in m_min..=m_max {
        shared_triangle(m, k_max);
        let found: Vec<String> = if all {
            (1..=k_max)
                .into_par_iter()
                .flat_map_iter(|k| per_k(m, k))
                .collect()
        } else {
            (1..=k_max)
                .into_par_iter()
                .find_map_first(|k| {
                    let w = per_k(m, k);
                    if w.is_empty() {
                        None
                    } else {
                        Some(w)
                    }
                })
                .unwrap_or_default()
        };
        witnesses.extend(found);
        if !all && !witnesses.is_empty() {
            break;
        }
    }
    witnesses
}

/// First-peak unimodality of every row plus the step property
/// `0 <= alpha(k) - alpha(k-1) <= 1`.
pub fn check_unimodality_range(k_max: u32, m_min: u32, m_max: u32, all: bool) -> CheckReport {
    let witnesses = scan_km(m_min, m_max, k_max, all, |m, k| {
        let mut found = Vec::new();
        let table = build_coeff_table(k, m).expect("valid range");
        let q = table.q();
        let alpha = table.alpha();
        for l in q..alpha {
            if table.value(l as i64) > table.value(l as i64 + 1) {
                found.push(format!("descent before peak: m={m} k={k} l={l}"));
            }
        }
        for l in alpha..k {
            if table.value(l as i64) < table.value(l as i64 + 1) {
                found.push(format!("ascent after peak: m={m} k={k} l={l}"));
            }
        }
        if k >= 2 {
            let prev = build_coeff_table(k - 1, m).expect("valid range").alpha();
            let delta = alpha as i64 - prev as i64;
            if !(0..=1).contains(&delta) {
                found.push(format!(
                    "alpha step out of range: m={m} k={k} delta={delta}"
                ));
            }
        }
        found
    });
    CheckReport::new(
        "first_peak_unimodality",
        format!("k<={k_max}, {m_min}<=m<={m_max}"),
        witnesses,
    )
}

/// Every threshold window is a single interval, for all `1 <= j < r <= m_max`
/// and every achievable level (plus one level beyond, which must be empty).
pub fn check_window_intervals(m_max: u32, all: bool) -> CheckReport {
    let mut witnesses = Vec::new();
    'outer: for r in 2..=m_max {
        for j in 1..r {
            let gaps: Vec<BigUint> = (0..r).map(|i| window_gap(j, r, i)).collect();
            let max_gap = gaps.iter().max().cloned().unwrap_or_default();
            let mut level = BigUint::from(1u32);
            loop {
                let indices: Vec<u32> = (0..r).filter(|&i| gaps[i as usize] >= level).collect();
                if let Err(e) = interval_of(&indices) {
                    witnesses.push(format!("j={j} r={r} l={level}: {e}"));
                    if !all {
                        break 'outer;
                    }
                }
                if level > max_gap {
                    break;
                }
                level += 1u32;
            }
        }
    }
    CheckReport::new(
        "window_consecutive",
        format!("1<=j<r<=m<={m_max}"),
        witnesses,
    )
}

/// The transform identity over the full tuple grid.
pub fn check_transform_range(m_max: u32, q_max: u32, all: bool) -> CheckReport {
    let mut witnesses = Vec::new();
    'outer: for m in 1..=m_max {
        for q in 2..=q_max {
            for r in 1..=m {
                for s in 2..=(q - 1) * m + r {
                    if let Err(e) = transform_identity_check(q, m, r, s) {
                        witnesses.push(e.to_string());
                        if !all {
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    CheckReport::new(
        "transform_identity",
        format!("m<={m_max}, 2<=q<={q_max}, r<=m, s<=(q-1)m+r"),
        witnesses,
    )
}

/// Weak spirality, the peak bound, and the tail reflection, exhaustively.
pub fn check_order_inequalities(
    k_max: u32,
    m_min: u32,
    m_max: u32,
    n_pad: u32,
    all: bool,
) -> CheckReport {
    let witnesses = scan_km(m_min.max(2), m_max, k_max, all, |m, k| {
        if k < 2 {
            return Vec::new();
        }
        let q = q_of(k, m);
        match spirality_and_bounds_check(k, m, k + q + n_pad) {
            Ok(_) => Vec::new(),
            Err(e) => vec![e.to_string()],
        }
    });
    CheckReport::new(
        "row_order_inequalities",
        format!(
            "2<=k<={k_max}, {}<=m<={m_max}, n<=k+q+{n_pad}",
            m_min.max(2)
        ),
        witnesses,
    )
}

/// Window dominance over every admissible interval pair with endpoints in
/// `[q, k]`.
pub fn check_window_dominance_range(k_max: u32, m_min: u32, m_max: u32, all: bool) -> CheckReport {
    let witnesses = scan_km(m_min.max(2), m_max, k_max, all, |m, k| {
        if k < 2 {
            return Vec::new();
        }
        let mut found = Vec::new();
        let q = q_of(k, m);
        let table = build_coeff_table(k, m).expect("valid range");
        let prefix = table.prefix_sums();
        for a1 in q..=k {
            for b1 in a1..=k {
                let len = b1 - a1;
                for a2 in a1..=(k - len) {
                    let b2 = a2 + len;
                    if a1 + b2 < k + q {
                        continue;
                    }
                    if interval_sum(&prefix, a1, b1) < interval_sum(&prefix, a2, b2) {
                        found.push(format!("m={m} k={k} S1=[{a1},{b1}] S2=[{a2},{b2}]"));
                        if !all {
                            return found;
                        }
                    }
                }
            }
        }
        found
    });
    CheckReport::new(
        "window_dominance",
        format!(
            "2<=k<={k_max}, {}<=m<={m_max}, endpoints in [q,k]",
            m_min.max(2)
        ),
        witnesses,
    )
}

/// Alpha profile of the row for `(k, m)`, with the unimodality assertion.
pub fn spectrum_profile(k: u32, m: u32) -> Result<SpectrumProfile> {
    if k < 1 || m < 1 {
        return Err(Error::usage("spectrum_profile requires k, m >= 1"));
    }
    let table = build_coeff_table(k, m)?;
    let q = table.q();
    let alpha = table.alpha();
    let peak = table.value(alpha as i64).clone();
    if peak.is_zero() {
        return Err(Error::violation(
            "first_peak_unimodality",
            format!("zero peak at k={k} m={m}"),
        ));
    }
    for l in q..alpha {
        if table.value(l as i64) > table.value(l as i64 + 1) {
            return Err(Error::violation(
                "first_peak_unimodality",
                format!("descent before peak at k={k} m={m} l={l}"),
            ));
        }
    }
    for l in alpha..k {
        if table.value(l as i64) < table.value(l as i64 + 1) {
            return Err(Error::violation(
                "first_peak_unimodality",
                format!("ascent after peak at k={k} m={m} l={l}"),
            ));
        }
    }
    let alpha_delta = if k >= 2 {
        Some(alpha as i64 - build_coeff_table(k - 1, m)?.alpha() as i64)
    } else {
        None
    };
    Ok(SpectrumProfile {
        k,
        m,
        q,
        alpha,
        peak,
        unimodal: true,
        alpha_delta,
    })
}
