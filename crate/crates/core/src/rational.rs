//! Exact rational helpers: parsing, canonical formatting and float bridges.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};

pub type Rational = BigRational;

/// Builds `num/den` from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn from_usize(value: usize) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `"p/q"`, an integer, or a decimal such as `"2.2"` or `"-1.5e-3"`
/// into an exact rational. Decimals are never routed through `f64`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(invalid("empty rational"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_decimal(num.trim())?;
        let den = parse_decimal(den.trim())?;
        if den.is_zero() {
            return Err(invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(num / den);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || invalid(format!("not a rational number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(at) => {
            let exp: i32 = s[at + 1..].parse().map_err(|_| bad())?;
            (&s[..at], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{whole}{frac}");
    let numer: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| bad())?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Canonical `"p/q"` form; integers keep the explicit `/1`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `floor(q)` as `usize`; `q` must be nonnegative.
pub fn floor_usize(q: &Rational) -> usize {
    q.floor()
        .to_integer()
        .to_usize()
        .expect("floor of a nonnegative rational fits usize")
}

/// Common denominator of `values` and their scaled numerators, when every
/// numerator fits in `i128`.
pub(crate) fn common_scale(values: &[&Rational]) -> Option<(BigInt, Vec<i128>)> {
    let den = values
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let nums = values
        .iter()
        .map(|q| (q.numer() * (&den / q.denom())).to_i128())
        .collect::<Option<Vec<_>>>()?;
    Some((den, nums))
}

/// Best rational approximation of `value` with denominator at most `max_den`
/// (continued-fraction convergents and semiconvergents).
pub fn rationalize(value: f64, max_den: u64) -> Rational {
    if !value.is_finite() {
        return Rational::zero();
    }
    let exact = Rational::from_float(value).unwrap_or_else(Rational::zero);
    let negative = exact.is_negative();
    let target = exact.abs();
    let max_den = BigInt::from(max_den.max(1));

    // convergents h/k
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut rest = target.clone();
    let mut best = Rational::from_integer(target.floor().to_integer());
    loop {
        let a = rest.floor().to_integer();
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            // largest admissible semiconvergent
            let t = (&max_den - &k_prev).div_floor(&k);
            if t > BigInt::zero() {
                let semi = Rational::new(&t * &h + &h_prev, &t * &k + &k_prev);
                if (&semi - &target).abs() < (&best - &target).abs() {
                    best = semi;
                }
            }
            break;
        }
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        best = Rational::new(h.clone(), k.clone());
        let frac = &rest - Rational::from_integer(a);
        if frac.is_zero() {
            break;
        }
        rest = frac.recip();
    }
    if negative {
        -best
    } else {
        best
    }
}
