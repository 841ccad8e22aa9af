//! Computation rates with MMSE scaling and the quadratic form behind them.
//!
//! All rates are in bits per real channel use (base-2 logarithm). For a
//! relay with channel `h`, power `P` and coefficient vector `a`, the MMSE
//! computation rate is
//!
//! ```text
//! R(h, a) = 1/2 log2+ ( (|a|^2 - P (h.a)^2 / (1 + P|h|^2))^-1 )
//!         = 1/2 log2+ ( (1 + P|h|^2) / f(a) ),
//! f(a)    = a' G a = |a|^2 + P (|a|^2 |h|^2 - (h.a)^2),
//! G       = (1 + P|h|^2) I - P h h'.
//! ```

use alloc::vec::Vec;

use crate::{ChannelVector, Error, PowerConfig, Result};

/// Integer coefficient vector selecting which combination a relay decodes.
///
/// Entries keep the sign they were given; [`CoefficientVector::canonical`]
/// and [`CoefficientVector::aligned_with`] produce the sign-normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoefficientVector(Vec<i64>);

impl CoefficientVector {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.is_empty() || entries.iter().all(|&x| x == 0) {
            return Err(Error::InvalidCoefficient);
        }
        Ok(CoefficientVector(entries))
    }

    /// The unit vector `e_index` of length `len`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = alloc::vec![0; len];
        v[index] = 1;
        CoefficientVector(v)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn negated(&self) -> Self {
        CoefficientVector(self.0.iter().map(|x| -x).collect())
    }

    /// Sign-normalized copy: first nonzero entry positive.
    pub fn canonical(&self) -> Self {
        match self.0.iter().find(|&&x| x != 0) {
            Some(&x) if x < 0 => self.negated(),
            _ => self.clone(),
        }
    }

    /// Sign-normalized against a channel: `h.a >= 0`, falling back to
    /// [`canonical`](Self::canonical) when `h.a == 0`.
    pub fn aligned_with(&self, h: &ChannelVector) -> Self {
        let d = dot(h.as_slice(), &self.0);
        if d > 0.0 {
            self.clone()
        } else if d < 0.0 {
            self.negated()
        } else {
            self.canonical()
        }
    }

    /// Entry indices carrying the maximal magnitude.
    pub fn argmax_abs(&self) -> Vec<usize> {
        let m = self.0.iter().map(|x| x.abs()).max().unwrap_or(0);
        (0..self.0.len()).filter(|&i| self.0[i].abs() == m).collect()
    }
}

/// Achievable computation rate, bits per real channel use. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateValue(f64);

impl RateValue {
    pub const ZERO: RateValue = RateValue(0.0);

    /// `1/2 log2+(x)`.
    pub fn half_log2_plus(x: f64) -> Self {
        RateValue(0.5 * libm::log2(x).max(0.0))
    }

    #[inline]
    pub fn bits(self) -> f64 {
        self.0
    }
}

/// `G = (1 + P|h|^2) I - P h h'`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    pub fn new(h: &ChannelVector, power: PowerConfig) -> Self {
        let p = power.get();
        let hs = h.as_slice();
        let dim = hs.len();
        let diag = 1.0 + p * h.norm_sq();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let identity = if i == j { diag } else { 0.0 };
                entries.push(identity - p * hs[i] * hs[j]);
            }
        }
        GramMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// `a' G a`.
    pub fn quadratic_form(&self, a: &CoefficientVector) -> Result<f64> {
        check_dims(self.dim, a.len())?;
        let a = a.as_slice();
        let mut total = 0.0;
        for i in 0..self.dim {
            let row: f64 = (0..self.dim).map(|j| self.get(i, j) * a[j] as f64).sum();
            total += a[i] as f64 * row;
        }
        Ok(total)
    }

    /// Upper-triangular Cholesky factor `R` with `G = R' R`, row-major.
    pub(crate) fn cholesky_upper(&self) -> Result<Vec<f64>> {
        let n = self.dim;
        let mut r = alloc::vec![0.0; n * n];
        for j in 0..n {
            let mut d = self.get(j, j);
            for k in 0..j {
                d -= r[k * n + j] * r[k * n + j];
            }
            if d <= 0.0 {
                return Err(Error::InvariantViolation("Gram matrix is not positive definite"));
            }
            let rjj = libm::sqrt(d);
            r[j * n + j] = rjj;
            for i in (j + 1)..n {
                let mut s = self.get(j, i);
                for k in 0..j {
                    s -= r[k * n + j] * r[k * n + i];
                }
                r[j * n + i] = s / rjj;
            }
        }
        Ok(r)
    }
}

#[inline]
pub(crate) fn dot(h: &[f64], a: &[i64]) -> f64 {
    h.iter().zip(a).map(|(x, &y)| x * y as f64).sum()
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `P h.a / (1 + P|h|^2)`, the MMSE scaling for decoding `a`.
pub fn alpha_mmse(h: &ChannelVector, a: &CoefficientVector, power: PowerConfig) -> Result<f64> {
    check_dims(h.len(), a.len())?;
    let p = power.get();
    Ok(p * dot(h.as_slice(), a.as_slice()) / (1.0 + p * h.norm_sq()))
}

/// Computation rate for an arbitrary scaling `alpha`:
/// `1/2 log2+( P / (alpha^2 + P |alpha h - a|^2) )`.
pub fn computation_rate_alpha(
    h: &ChannelVector,
    a: &CoefficientVector,
    power: PowerConfig,
    alpha: f64,
) -> Result<RateValue> {
    check_dims(h.len(), a.len())?;
    let p = power.get();
    let mismatch: f64 = h
        .as_slice()
        .iter()
        .zip(a.as_slice())
        .map(|(&x, &y)| {
            let e = alpha * x - y as f64;
            e * e
        })
        .sum();
    let denom = alpha * alpha + p * mismatch;
    if denom <= 0.0 {
        return Err(Error::InvariantViolation("zero effective noise"));
    }
    Ok(RateValue::half_log2_plus(p / denom))
}

/// MMSE computation rate,
/// `1/2 log2+( (|a|^2 - P (h.a)^2 / (1 + P|h|^2))^-1 )`.
///
/// Vectors with `|a|^2 >= 1 + P|h|^2` get exactly zero.
pub fn computation_rate(h: &ChannelVector, a: &CoefficientVector, power: PowerConfig) -> Result<RateValue> {
    check_dims(h.len(), a.len())?;
    let p = power.get();
    let a_sq = a.norm_sq() as f64;
    let snr = 1.0 + p * h.norm_sq();
    if a_sq >= snr {
        return Ok(RateValue::ZERO);
    }
    let d = dot(h.as_slice(), a.as_slice());
    let denom = a_sq - p * d * d / snr;
    if denom <= 0.0 {
        return Err(Error::InvariantViolation("non-positive rate denominator"));
    }
    Ok(RateValue::half_log2_plus(1.0 / denom))
}

/// `f(a) = |a|^2 + P (|a|^2 |h|^2 - (h.a)^2)`. The bracket is clamped at
/// zero (Cauchy-Schwarz), so `f(a) >= |a|^2` holds in floating point too.
pub fn quadratic_form(h: &ChannelVector, a: &CoefficientVector, power: PowerConfig) -> Result<f64> {
    check_dims(h.len(), a.len())?;
    let a_sq = a.norm_sq() as f64;
    let d = dot(h.as_slice(), a.as_slice());
    Ok(f_from_parts(a_sq, h.norm_sq(), d, power.get()))
}

#[inline]
pub(crate) fn f_from_parts(a_sq: f64, h_sq: f64, dot: f64, p: f64) -> f64 {
    a_sq + p * (a_sq * h_sq - dot * dot).max(0.0)
}

/// `f(a)` through the pairwise expansion
/// `|a|^2 + P sum_{i<j} (h_i a_j - h_j a_i)^2`. O(L^2).
pub fn quadratic_form_pairwise(h: &ChannelVector, a: &CoefficientVector, power: PowerConfig) -> Result<f64> {
    check_dims(h.len(), a.len())?;
    let hs = h.as_slice();
    let av = a.as_slice();
    let mut cross = 0.0;
    for i in 0..hs.len() {
        for j in 0..i {
            let t = hs[i] * av[j] as f64 - hs[j] * av[i] as f64;
            cross += t * t;
        }
    }
    Ok(a.norm_sq() as f64 + power.get() * cross)
}

/// Rate from a known quadratic-form value: `1/2 log2+((1 + P|h|^2) / f)`.
pub fn rate_from_f(f_value: f64, h: &ChannelVector, power: PowerConfig) -> Result<RateValue> {
    if f_value.is_nan() || f_value < 1.0 {
        return Err(Error::InvariantViolation("quadratic form value below 1"));
    }
    Ok(RateValue::half_log2_plus((1.0 + power.get() * h.norm_sq()) / f_value))
}

/// `sqrt(1 + P|h|^2)`: coefficient vectors at or beyond this norm have zero rate.
pub fn search_radius(h: &ChannelVector, power: PowerConfig) -> f64 {
    libm::sqrt(1.0 + power.get() * h.norm_sq())
}
