//! Domain types, the shortfall objective and the externality moments.
//!
//! The objective over a service vector `v` of length `n` is
//!
//! ```text
//! f(v) = sum over 1 <= k <= l <= n of max(x - (v_k + ... + v_l), 0)
//! ```
//!
//! All evaluation is exact. Vectors whose entries share a small common
//! denominator are evaluated in scaled `i128` arithmetic; anything else falls
//! back to big rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::rational::{format_rational, from_usize, Rational};

/// Problem parameters `(n, x, w)` with the derived `m = floor(w/x)` and
/// `r = w - m*x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    n: usize,
    x: Rational,
    w: Rational,
    m: usize,
    r: Rational,
}

impl Instance {
    pub fn new(n: usize, x: Rational, w: Rational) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !x.is_positive() {
            return Err(invalid(format!("x must be positive, got {}", format_rational(&x))));
        }
        if !w.is_positive() {
            return Err(invalid(format!("w must be positive, got {}", format_rational(&w))));
        }
        let nx = &x * from_usize(n);
        if w >= nx {
            return Err(Error::TrivialRegime {
                w: format_rational(&w),
                nx: format_rational(&nx),
            });
        }
        let m = (&w / &x)
            .floor()
            .to_integer()
            .to_usize()
            .expect("m < n fits usize");
        let r = &w - &x * from_usize(m);
        Ok(Self { n, x, w, m, r })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn w(&self) -> &Rational {
        &self.w
    }

    /// Number of full-size masses, `floor(w/x)`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Remainder mass, `w - m*x`, in `[0, x)`.
    pub fn r(&self) -> &Rational {
        &self.r
    }

    /// Complement of the remainder, `x - r`, in `(0, x]`.
    pub fn y(&self) -> Rational {
        &self.x - &self.r
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} x={} w={}",
            self.n,
            format_rational(&self.x),
            format_rational(&self.w)
        )
    }
}

/// A nonempty vector of nonnegative exact service demands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ServiceVector(Vec<Rational>);

impl ServiceVector {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("service vector is empty"));
        }
        if let Some(i) = entries.iter().position(Signed::is_negative) {
            return Err(invalid(format!(
                "entry {} is negative ({})",
                i + 1,
                format_rational(&entries[i])
            )));
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Rational> {
        self.0
    }

    pub fn sum(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, e| acc + e)
    }

    /// Nonnegative with total mass at most `w`.
    pub fn is_in_lambda(&self, inst: &Instance) -> bool {
        self.len() == inst.n() && self.sum() <= *inst.w()
    }

    /// Exactly `m` entries equal to `x`, one entry `r` when `r > 0`, zeros
    /// elsewhere.
    pub fn is_in_upsilon(&self, inst: &Instance) -> bool {
        if self.len() != inst.n() {
            return false;
        }
        let full = self.0.iter().filter(|e| *e == inst.x()).count();
        let rest: Vec<&Rational> = self.0.iter().filter(|e| *e != inst.x()).collect();
        let nonzero: Vec<&&Rational> = rest.iter().filter(|e| !e.is_zero()).collect();
        if full != inst.m() {
            return false;
        }
        if inst.r().is_zero() {
            nonzero.is_empty()
        } else {
            nonzero.len() == 1 && *nonzero[0] == inst.r()
        }
    }
}

impl fmt::Display for ServiceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Arrival rate and the first two moments of the service demand of an
/// M/G/1 queue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueParams {
    lambda: Rational,
    mu1: Rational,
    mu2: Rational,
}

impl QueueParams {
    /// `lambda = 0` is accepted as the empty-traffic limit.
    pub fn new(lambda: Rational, mu1: Rational, mu2: Rational) -> Result<Self> {
        if lambda.is_negative() {
            return Err(invalid("lambda must be nonnegative"));
        }
        if !mu1.is_positive() || !mu2.is_positive() {
            return Err(invalid("mu1 and mu2 must be positive"));
        }
        if mu2 < &mu1 * &mu1 {
            return Err(invalid("mu2 must be at least mu1^2"));
        }
        let rho = &lambda * &mu1;
        if rho >= Rational::one() {
            return Err(Error::Unstable {
                rho: format_rational(&rho),
            });
        }
        Ok(Self { lambda, mu1, mu2 })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn mu1(&self) -> &Rational {
        &self.mu1
    }

    pub fn mu2(&self) -> &Rational {
        &self.mu2
    }

    pub fn rho(&self) -> Rational {
        &self.lambda * &self.mu1
    }
}

fn check_x(x: &Rational) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(invalid(format!("x must be positive, got {}", format_rational(x))))
    }
}

/// `v` and `x` over one common denominator, when that fits in `i128` with
/// room for every partial sum of the objective.
struct Scaled {
    entries: Vec<i128>,
    x: i128,
    den: BigInt,
}

impl Scaled {
    fn new(v: &[Rational], x: &Rational) -> Option<Self> {
        let mut den = x.denom().clone();
        for e in v {
            if !e.denom().is_one() {
                den = den.lcm(e.denom());
            }
        }
        let lift = |q: &Rational| (q.numer() * (&den / q.denom())).to_i128();
        let xs = lift(x)?;
        let entries = v.iter().map(lift).collect::<Option<Vec<_>>>()?;
        let n = v.len() as i128;
        let mut total = 0i128;
        for e in &entries {
            total = total.checked_add(*e)?;
        }
        total.checked_add(xs)?.checked_mul(n.checked_mul(n + 1)?)?;
        Some(Self { entries, x: xs, den })
    }

    fn unscale(&self, value: i128) -> Rational {
        Rational::new(BigInt::from(value), self.den.clone())
    }

    fn objective(&self) -> i128 {
        scaled_objective(&self.entries, self.x)
    }

    fn row(&self, j: usize) -> i128 {
        let n = self.entries.len();
        let mut window: i128 = self.entries[..j].iter().sum();
        let mut total = (self.x - window).max(0);
        for l in j..n {
            window += self.entries[l] - self.entries[l - j];
            total += (self.x - window).max(0);
        }
        total
    }
}

/// Objective over integer entries and threshold. The caller guarantees that
/// `n^2 * (x + sum)` fits in `i128`.
pub(crate) fn scaled_objective(entries: &[i128], x: i128) -> i128 {
    let n = entries.len();
    let mut total = 0i128;
    for k in 0..n {
        let mut acc = 0i128;
        for e in &entries[k..] {
            acc += e;
            if acc >= x {
                break;
            }
            total += x - acc;
        }
    }
    total
}

/// Objective without validation, for hot loops over vectors already known to
/// be nonnegative.
pub(crate) fn objective(v: &[Rational], x: &Rational) -> Rational {
    if let Some(scaled) = Scaled::new(v, x) {
        return scaled.unscale(scaled.objective());
    }
    let n = v.len();
    let mut total = Rational::zero();
    for k in 0..n {
        let mut acc = Rational::zero();
        for e in &v[k..] {
            acc += e;
            if acc >= *x {
                break;
            }
            total += x - &acc;
        }
    }
    total
}

fn row_objective(v: &[Rational], x: &Rational, j: usize) -> Rational {
    if let Some(scaled) = Scaled::new(v, x) {
        return scaled.unscale(scaled.row(j));
    }
    // prefix[i] = v_1 + ... + v_i
    let mut prefix = Vec::with_capacity(v.len() + 1);
    prefix.push(Rational::zero());
    for e in v {
        let next = prefix.last().unwrap() + e;
        prefix.push(next);
    }
    (j..=v.len())
        .map(|l| x - (&prefix[l] - &prefix[l - j]))
        .filter(Signed::is_positive)
        .fold(Rational::zero(), |acc, s| acc + s)
}

/// Sum of `max(x - interval sum, 0)` over every index interval `[k, l]`.
pub fn eval_f(v: &ServiceVector, x: &Rational) -> Result<Rational> {
    check_x(x)?;
    Ok(objective(v.entries(), x))
}

/// Contribution of the `n + 1 - j` intervals of length exactly `j`.
pub fn eval_f_row(v: &ServiceVector, x: &Rational, j: usize) -> Result<Rational> {
    check_x(x)?;
    if j == 0 || j > v.len() {
        return Err(invalid(format!("row {j} outside 1..={}", v.len())));
    }
    Ok(row_objective(v.entries(), x, j))
}

/// The objective restricted to intervals with `k < l` (singletons excluded),
/// as it appears in the externality variance.
pub fn eval_f_strict(v: &ServiceVector, x: &Rational) -> Result<Rational> {
    let full = eval_f(v, x)?;
    let diagonal = row_objective(v.entries(), x, 1);
    Ok(full - diagonal)
}

/// Mean externality `n*x / (1 - rho)`.
pub fn externality_mean(q: &QueueParams, n: usize, x: &Rational) -> Result<Rational> {
    check_x(x)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    Ok(x * from_usize(n) / (Rational::one() - q.rho()))
}

/// Externality variance `lambda*mu2/(1-rho)^3 * (n*x + 2*S)` where `S` is
/// [`eval_f_strict`].
pub fn externality_variance(q: &QueueParams, v: &ServiceVector, x: &Rational) -> Result<Rational> {
    let strict = eval_f_strict(v, x)?;
    let slack = Rational::one() - q.rho();
    let scale = q.lambda() * q.mu2() / (&slack * &slack * &slack);
    let bracket = x * from_usize(v.len()) + strict * Rational::from_integer(2.into());
    Ok(scale * bracket)
}

/// `(w, 0, ..., 0)`: all mass on the first customer.
pub fn supremum_vector(inst: &Instance) -> ServiceVector {
    let mut entries = vec![Rational::zero(); inst.n()];
    entries[0] = inst.w().clone();
    ServiceVector(entries)
}
