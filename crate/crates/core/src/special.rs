//! Regularized incomplete beta function and the normal CDF.

use crate::{Error, Result};

const MAX_ITER: usize = 300;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `I_x(a, b)`, the CDF of `Beta(a, b)` at `x`.
///
/// Continued fraction (modified Lentz) on whichever of `I_x(a, b)` and
/// `1 - I_{1-x}(b, a)` converges fast: the direct form is used for
/// `x < (a + 1)/(a + b + 2)`.
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::Domain("beta parameters must be positive and finite"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain("x must lie in [0, 1]"));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let ln_front = a * libm::log(x) + b * libm::log1p(-x) - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(libm::exp(ln_front) * continued_fraction(x, a, b)? / a)
    } else {
        Ok(1.0 - libm::exp(ln_front) * continued_fraction(1.0 - x, b, a)? / b)
    }
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

fn clamp_tiny(v: f64) -> f64 {
    if v.abs() < TINY {
        TINY
    } else {
        v
    }
}

fn continued_fraction(x: f64, a: f64, b: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 / clamp_tiny(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let even = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / clamp_tiny(1.0 + even * d);
        c = clamp_tiny(1.0 + even / c);
        h *= d * c;

        let odd = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / clamp_tiny(1.0 + odd * d);
        c = clamp_tiny(1.0 + odd / c);
        let delta = d * c;
        h *= delta;

        if (delta - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Convergence { iterations: MAX_ITER })
}
