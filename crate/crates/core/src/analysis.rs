//! Closed-form bounds on degeneracy and sum-rate.
//!
//! For a fixed non-unit integer vector `a` and Gaussian `h` of length `L`,
//! the probability that `a` beats a unit vector, `Pr(f(a) <= f(e_i))`, is
//! bounded through the squared cosine between `a` and `h`, which is
//! `Beta(1/2, (L-1)/2)`:
//!
//! ```text
//! Pr(f(a) <= f(e_i)) <= 1 - I_phi(1/2, (L-1)/2),   phi = 1 - 1/|a|^2
//!                    <= (1/|a|^2)^((L-1)/2 - 1) = exp(-L (1 - 3/L) ln|a|)
//! ```
//!
//! A union bound over the candidate set then drives the probability that
//! any non-unit vector wins to zero as `L` grows.

use alloc::vec::Vec;
use core::f64::consts::LN_2;

use crate::rate::RateValue;
use crate::special::reg_inc_beta;
use crate::{ChannelVector, Error, PowerConfig, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    /// `1 - I_phi(1/2, (L-1)/2)`.
    CosineTail,
    /// `|a|^(-(L-3))`.
    PowerLawTail,
    /// Union over the candidate set of the power-law tail at `|a|^2 = 2`.
    UnionNonUnit,
    /// Square-system sum-rate ceiling, bits.
    SumRateUpper,
    /// Square-system sum-rate with relay `m` forced to `e_m`, bits.
    SumRateLower,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::CosineTail => "cosine_tail_bound",
            BoundKind::PowerLawTail => "power_law_tail_bound",
            BoundKind::UnionNonUnit => "union_bound_nonunit",
            BoundKind::SumRateUpper => "sum_rate_upper_bound",
            BoundKind::SumRateLower => "sum_rate_lower_bound",
        }
    }
}

/// A bound value. Probability bounds are clamped into `[0, 1]` in `value`;
/// `raw` keeps the unclamped expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub raw: f64,
    pub kind: BoundKind,
}

impl BoundValue {
    fn probability(raw: f64, kind: BoundKind) -> Self {
        BoundValue {
            value: raw.clamp(0.0, 1.0),
            raw,
            kind,
        }
    }

    fn bits(raw: f64, kind: BoundKind) -> Self {
        BoundValue { value: raw, raw, kind }
    }
}

fn check_norm_sq(norm_sq: f64) -> Result<()> {
    if norm_sq >= 2.0 && norm_sq.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain("|a|^2 must be at least 2 (non-unit vector)"))
    }
}

/// `phi(a) = 1 - 1/|a|^2`, in `[1/2, 1)` for non-unit `a`.
pub fn cosine_threshold(norm_sq: f64) -> Result<f64> {
    check_norm_sq(norm_sq)?;
    Ok(1.0 - 1.0 / norm_sq)
}

/// `1 - I_phi(1/2, (L-1)/2)`: upper bound on `Pr(f(a) <= f(e_i))`.
pub fn cosine_tail_bound(norm_sq: f64, users: usize) -> Result<BoundValue> {
    if users < 2 {
        return Err(Error::Domain("need at least 2 users"));
    }
    let phi = cosine_threshold(norm_sq)?;
    let cdf = reg_inc_beta(phi, 0.5, (users as f64 - 1.0) / 2.0)?;
    Ok(BoundValue::probability(1.0 - cdf, BoundKind::CosineTail))
}

/// `(1 - 3/L) ln|a|`, the decay exponent of [`power_law_tail_bound`].
pub fn power_law_exponent(norm_sq: f64, users: usize) -> f64 {
    (1.0 - 3.0 / users as f64) * 0.5 * libm::log(norm_sq)
}

/// `exp(-L (1 - 3/L) ln|a|) = (1/|a|^2)^((L-1)/2 - 1)`; needs `L >= 4`.
pub fn power_law_tail_bound(norm_sq: f64, users: usize) -> Result<BoundValue> {
    check_norm_sq(norm_sq)?;
    if users < 4 {
        return Err(Error::Domain("need at least 4 users for a positive exponent"));
    }
    let raw = libm::exp(-(users as f64) * power_law_exponent(norm_sq, users));
    Ok(BoundValue::probability(raw, BoundKind::PowerLawTail))
}

/// `1 - (1 - alpha)^(floor(L/2) - 1)`: lower bound on the CDF of the squared
/// cosine at `alpha`. Odd `L` behaves as `L - 1`.
pub fn min_uniform_cdf_bound(alpha: f64, users: usize) -> Result<f64> {
    if users < 4 {
        return Err(Error::Domain("need at least 4 users"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Domain("alpha must lie in [0, 1]"));
    }
    let k = (users / 2 - 1) as i32;
    Ok(1.0 - libm::pow(1.0 - alpha, k as f64))
}

/// `min(1, 2L (P |h|^2 + 3) (1/2)^((L-1)/2 - 1))`.
pub fn union_bound_nonunit(users: usize, power: PowerConfig, h_norm_sq: f64) -> Result<BoundValue> {
    if users < 4 {
        return Err(Error::Domain("need at least 4 users"));
    }
    let l = users as f64;
    let raw = 2.0 * l * (power.get() * h_norm_sq + 3.0) * libm::pow(0.5, (l - 1.0) / 2.0 - 1.0);
    Ok(BoundValue::probability(raw, BoundKind::UnionNonUnit))
}

/// `(1/2)(1 - 1/L) ln 2`.
pub fn union_exponent(users: usize) -> f64 {
    0.5 * (1.0 - 1.0 / users as f64) * LN_2
}

/// Large-`L` form of the union bound with `|h|^2 ~ L`: `4 P L^2 exp(-L E)`,
/// `E` from [`union_exponent`].
pub fn union_bound_asymptotic(users: usize, power: PowerConfig) -> f64 {
    let l = users as f64;
    4.0 * power.get() * l * l * libm::exp(-l * union_exponent(users))
}

/// `(1/4)(1 - 1/L) ln 2`, the exponent governing the non-unit share of the
/// sum-rate. Informational only; no bound here uses it.
pub fn sum_rate_exponent(users: usize) -> f64 {
    0.25 * (1.0 - 1.0 / users as f64) * LN_2
}

/// `2L (ceil(sqrt(1 + P |h|^2)) + 1)`: size of the candidate family.
/// `power` may be zero here.
pub fn cardinality_bound(users: usize, power: f64, h_norm_sq: f64) -> u64 {
    let r = libm::ceil(libm::sqrt(1.0 + power * h_norm_sq)) as u64;
    2 * users as u64 * (r + 1)
}

/// `log2(P) / (1 + 1/M) + log2(log2(P))`, for `M >= 2`, `P >= 3`.
pub fn sum_rate_upper_bound(relays: usize, power: PowerConfig) -> Result<BoundValue> {
    if relays < 2 {
        return Err(Error::Domain("need at least 2 relays"));
    }
    let p = power.get();
    if p < 3.0 {
        return Err(Error::Domain("power must be at least 3"));
    }
    let lp = libm::log2(p);
    let raw = lp / (1.0 + 1.0 / relays as f64) + libm::log2(lp);
    Ok(BoundValue::bits(raw, BoundKind::SumRateUpper))
}

/// Sum over relays `m` of `1/2 log2(1 + P h_mm^2 / (1 + P sum_{j != m} h_mj^2))`:
/// each relay decodes its own user and treats the rest as noise.
pub fn sum_rate_lower_bound(channels: &[ChannelVector], power: PowerConfig) -> Result<BoundValue> {
    let m = channels.len();
    if m == 0 {
        return Err(Error::InvalidDimension);
    }
    let p = power.get();
    let mut total = 0.0;
    for (idx, h) in channels.iter().enumerate() {
        if h.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: h.len(),
            });
        }
        let own = h.as_slice()[idx] * h.as_slice()[idx];
        let interference = h.norm_sq() - own;
        total += RateValue::half_log2_plus(1.0 + p * own / (1.0 + p * interference)).bits();
    }
    Ok(BoundValue::bits(total, BoundKind::SumRateLower))
}

/// The most evenly spread integer vector of length `users` with
/// `|a|^2 = norm_sq`: the smallest possible largest entry, then as few
/// entries at that size as possible. Entries are non-negative and
/// non-increasing. `None` when no such vector fits in `users` entries.
pub fn spread_vector(norm_sq: u64, users: usize) -> Option<Vec<i64>> {
    fn fill(rest: u64, max: i64, slots: usize, out: &mut Vec<i64>) -> bool {
        if rest == 0 {
            return true;
        }
        if slots == 0 {
            return false;
        }
        let mut v = max;
        while v >= 1 {
            let sq = (v * v) as u64;
            if sq <= rest && rest <= sq * slots as u64 {
                out.push(v);
                if fill(rest - sq, v, slots - 1, out) {
                    return true;
                }
                out.pop();
            }
            v -= 1;
        }
        false
    }
    if norm_sq == 0 || users == 0 {
        return None;
    }
    let mut max = 1i64;
    while ((max * max) as u64) <= norm_sq {
        let mut out = Vec::new();
        if fill(norm_sq, max, users, &mut out) {
            out.resize(users, 0);
            return Some(out);
        }
        max += 1;
    }
    None
}
