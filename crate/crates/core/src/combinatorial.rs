//! Closed-form minimization over the combinatorial set: `m` entries equal to
//! `x`, one entry equal to `r`, zeros elsewhere.
//!
//! An optimal vector is described by its gap profile: the distances between
//! consecutive full masses (with virtual boundaries at `0` and `n + 1`). The
//! widest gap has size `delta*`; every other gap is as even as possible, and
//! the remainder `r` sits at a middle point of the widest open stretch. The
//! cost of such a profile is
//!
//! ```text
//! A(d) = x * (h(m, n + 1 - d) + d(d - 1)/2) - r * floor(d/2) * ceil(d/2)
//! ```
//!
//! and `phi(d) = A(d + 2) - A(d)` is increasing, so the best odd and best even
//! `d` are found by bisection on the sign of `phi`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::continuous::tau;
use crate::error::{invalid, Error, Result};
use crate::model::{objective, Instance, ServiceVector};
use crate::rational::{floor_usize, from_usize, int, Rational};
use crate::report::{Domain, SolveReport, Status};

/// Default largest `n` accepted by [`enumerate_gamma`].
pub const DEFAULT_ENUMERATION_CAP: usize = 20;

/// Gaps `Δ_0..Δ_m` between consecutive full masses, summing to `n + 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GapProfile {
    gaps: Vec<usize>,
    t: usize,
}

impl GapProfile {
    /// Checks the sum, that gap `t` is maximal, and that all other gaps
    /// differ pairwise by at most one.
    pub fn new(n: usize, gaps: Vec<usize>, t: usize) -> Result<Self> {
        if gaps.is_empty() || gaps.contains(&0) {
            return Err(invalid("gaps must be positive and nonempty"));
        }
        if gaps.iter().sum::<usize>() != n + 1 {
            return Err(invalid(format!("gaps {gaps:?} do not sum to n + 1 = {}", n + 1)));
        }
        let max = *gaps.iter().max().unwrap();
        if t >= gaps.len() || gaps[t] != max {
            return Err(invalid(format!("gap {t} is not a widest gap of {gaps:?}")));
        }
        let others = gaps.iter().enumerate().filter(|&(k, _)| k != t).map(|(_, g)| *g);
        if let (Some(lo), Some(hi)) = (others.clone().min(), others.max()) {
            if hi - lo > 1 {
                return Err(invalid(format!("gaps {gaps:?} are not near-equidistant")));
            }
        }
        Ok(Self { gaps, t })
    }

    pub fn gaps(&self) -> &[usize] {
        &self.gaps
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn max_gap(&self) -> usize {
        self.gaps[self.t]
    }

    /// 1-based positions of the full masses.
    pub fn mass_positions(&self) -> Vec<usize> {
        cumulative_positions(&self.gaps)
    }

    /// Bounds `(a, b)`, 1-based and inclusive, of the open stretch behind
    /// gap `t`; empty when `a > b`.
    pub fn widest_stretch(&self) -> (usize, usize) {
        let start: usize = self.gaps[..self.t].iter().sum();
        (start + 1, start + self.gaps[self.t] - 1)
    }
}

/// Cumulative sums of all gaps but the last.
pub(crate) fn cumulative_positions(gaps: &[usize]) -> Vec<usize> {
    gaps[..gaps.len() - 1]
        .iter()
        .scan(0, |acc, g| {
            *acc += g;
            Some(*acc)
        })
        .collect()
}

/// Output of the `delta*` search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaCertificate {
    /// Smallest odd `d` with `phi(d) > 0`.
    pub delta1: usize,
    /// Smallest even `d` with `phi(d) > 0`.
    pub delta2: usize,
    pub delta_star: usize,
    pub a_delta1: Rational,
    pub a_delta2: Rational,
    pub delta_minus: Rational,
    pub delta_plus: Rational,
    /// Set when the bracketing window could not be trusted and the parity
    /// classes were scanned instead.
    pub linear_scan: bool,
}

/// Integers `j` with `floor((a+b)/2) <= j <= ceil((a+b)/2)`, for `0 < a < b`.
pub fn middle_points(a: usize, b: usize) -> Result<Vec<usize>> {
    if a == 0 || a >= b {
        return Err(invalid(format!("middle points need 0 < a < b, got a={a} b={b}")));
    }
    Ok(stretch_middle_points(a, b))
}

/// Same as [`middle_points`] but also accepts the one-element range `a == b`.
fn stretch_middle_points(a: usize, b: usize) -> Vec<usize> {
    let s = a + b;
    (s / 2..=s.div_ceil(2)).collect()
}

/// `total` split into `parts` positive integers differing by at most one,
/// smallest first.
pub fn near_equidistant(parts: usize, total: usize) -> Vec<usize> {
    let (q, rem) = total.div_rem(&parts);
    let mut out = vec![q; parts - rem];
    out.extend(std::iter::repeat_n(q + 1, rem));
    out
}

fn h_closed(a: usize, b: usize) -> u128 {
    let (q, rem) = (b / a, b % a);
    let (q, rem, a) = (q as u128, rem as u128, a as u128);
    (rem * (q + 1) * q + (a - rem) * q * q.saturating_sub(1)) / 2
}

/// `½ Σ Δ(Δ - 1)` over a near-equidistant split of `b` into `a` parts.
pub fn h(a: usize, b: usize) -> Result<Rational> {
    if a == 0 || b < a {
        return Err(invalid(format!("h needs 0 < a <= b, got a={a} b={b}")));
    }
    Ok(Rational::from_integer(h_closed(a, b).into()))
}

fn floor_half_product(d: usize) -> usize {
    (d / 2) * d.div_ceil(2)
}

fn require_full_masses(inst: &Instance) -> Result<()> {
    if inst.m() == 0 {
        Err(Error::WrongBranch(
            "m = 0 has no full masses; the optimum is r at a middle point".into(),
        ))
    } else {
        Ok(())
    }
}

/// Cost of the best profile whose widest gap is `delta`.
pub fn a_value(inst: &Instance, delta: usize) -> Result<Rational> {
    require_full_masses(inst)?;
    let hi = inst.n() + 1 - inst.m();
    if delta == 0 || delta > hi {
        return Err(invalid(format!("delta = {delta} outside 1..={hi}")));
    }
    Ok(a_unchecked(inst, delta))
}

fn a_unchecked(inst: &Instance, delta: usize) -> Rational {
    let spread = h_closed(inst.m(), inst.n() + 1 - delta) + (delta * (delta - 1) / 2) as u128;
    inst.x() * Rational::from_integer(spread.into()) - inst.r() * from_usize(floor_half_product(delta))
}

/// Second difference `A(delta + 2) - A(delta)` in closed form, for
/// `1 <= delta <= n`.
pub fn phi(inst: &Instance, delta: usize) -> Result<Rational> {
    require_full_masses(inst)?;
    if delta == 0 || delta > inst.n() {
        return Err(invalid(format!("delta = {delta} outside 1..={}", inst.n())));
    }
    Ok(phi_unchecked(inst, delta))
}

fn phi_unchecked(inst: &Instance, delta: usize) -> Rational {
    let (n, m) = (inst.n() as i64, inst.m() as i64);
    let d = delta as i64;
    let floors = Integer::div_floor(&(n - d - 1), &m) + Integer::div_floor(&(n - d), &m);
    let half_r = inst.r() / int(2);
    int(2 * d + 1) * (inst.x() - &half_r) - inst.x() * int(floors) - half_r
}

/// Widest gaps for which the profile family is nonempty: `[tau_u, n+1-m]`
/// when `m >= 1`, and the single value `n + 1` when `m = 0`.
pub fn feasible_delta_range(inst: &Instance) -> RangeInclusive<usize> {
    if inst.m() == 0 {
        inst.n() + 1..=inst.n() + 1
    } else {
        tau(inst.n(), inst.m()).upper..=inst.n() + 1 - inst.m()
    }
}

/// Bracketing window `[delta_minus, delta_plus]` for `delta1` and `delta2`.
pub fn delta_window(inst: &Instance) -> (Rational, Rational) {
    let m = from_usize(inst.m());
    let (n, x, r) = (from_usize(inst.n()), inst.x(), inst.r());
    let half_r = r / int(2);
    let centre = &half_r + x * (int(2) * &n - int(1) - &m) / (int(2) * &m);
    let slope = x * (Rational::one() + m.recip()) - &half_r;
    (
        (&centre - Rational::one()) / &slope,
        (&centre + Rational::one()) / &slope,
    )
}

/// Smallest `d` of the given parity in `lo..=hi` with `phi(d) > 0`, found
/// by bisection. Returns `None` when no element of the class qualifies.
fn bisect_parity(inst: &Instance, lo: usize, hi: usize, odd: bool) -> Option<usize> {
    let first = if (lo % 2 == 1) == odd { lo } else { lo + 1 };
    if first > hi {
        return None;
    }
    // class elements are first + 2i, i in 0..=count-1
    let count = (hi - first) / 2 + 1;
    let at = |i: usize| first + 2 * i;
    if !phi_unchecked(inst, at(count - 1)).is_positive() {
        return None;
    }
    let (mut lo_i, mut hi_i) = (0usize, count - 1);
    while lo_i < hi_i {
        let mid = (lo_i + hi_i) / 2;
        if phi_unchecked(inst, at(mid)).is_positive() {
            hi_i = mid;
        } else {
            lo_i = mid + 1;
        }
    }
    Some(at(lo_i))
}

fn scan_parity(inst: &Instance, hi: usize, odd: bool) -> Option<usize> {
    (1..=hi)
        .filter(|d| (d % 2 == 1) == odd)
        .find(|&d| phi_unchecked(inst, d).is_positive())
}

/// `d` is the first of its parity class in `1..` with a positive `phi`.
fn is_class_minimum(inst: &Instance, d: usize) -> bool {
    phi_unchecked(inst, d).is_positive() && (d < 3 || !phi_unchecked(inst, d - 2).is_positive())
}

/// Locates `delta1`, `delta2` and `delta*` for an instance with `m >= 1`.
pub fn delta_search(inst: &Instance) -> Result<DeltaCertificate> {
    require_full_masses(inst)?;
    let top = inst.n() + 1 - inst.m();
    let (delta_minus, delta_plus) = delta_window(inst);
    let lo = if delta_minus <= Rational::one() {
        1
    } else {
        floor_usize(&delta_minus.ceil())
    };
    let hi = if delta_plus.is_negative() {
        0
    } else {
        floor_usize(&delta_plus).min(top)
    };

    let from_window = |odd| {
        bisect_parity(inst, lo.max(1), hi, odd).filter(|&d| is_class_minimum(inst, d))
    };
    let (mut linear_scan, mut pair) = (false, (from_window(true), from_window(false)));
    if pair.0.is_none() || pair.1.is_none() {
        linear_scan = true;
        pair = (scan_parity(inst, top, true), scan_parity(inst, top, false));
    }
    let (Some(delta1), Some(delta2)) = pair else {
        return Err(Error::Construction(format!(
            "phi has no positive value in 1..={top} for {inst}"
        )));
    };
    let a_delta1 = a_unchecked(inst, delta1);
    let a_delta2 = a_unchecked(inst, delta2);
    // ties keep the even candidate unless no profile has that widest gap
    let delta_star = match a_delta1.cmp(&a_delta2) {
        Ordering::Less => delta1,
        Ordering::Greater => delta2,
        Ordering::Equal if feasible_delta_range(inst).contains(&delta2) => delta2,
        Ordering::Equal => delta1,
    };
    Ok(DeltaCertificate {
        delta1,
        delta2,
        delta_star,
        a_delta1,
        a_delta2,
        delta_minus,
        delta_plus,
        linear_scan,
    })
}

fn check_feasible(inst: &Instance, delta: usize) -> Result<()> {
    let range = feasible_delta_range(inst);
    if range.contains(&delta) {
        Ok(())
    } else {
        Err(Error::Construction(format!(
            "no profile with widest gap {delta} for {inst}; feasible range is {}..={}",
            range.start(),
            range.end()
        )))
    }
}

/// Widest gap first, the remaining gaps near-equidistant and ascending.
fn canonical_profile(inst: &Instance, delta: usize) -> GapProfile {
    let mut gaps = vec![delta];
    if inst.m() > 0 {
        gaps.extend(near_equidistant(inst.m(), inst.n() + 1 - delta));
    }
    GapProfile::new(inst.n(), gaps, 0).expect("canonical profile is valid")
}

fn place(inst: &Instance, profile: &GapProfile, r_at: Option<usize>) -> ServiceVector {
    let mut entries = vec![Rational::zero(); inst.n()];
    for p in profile.mass_positions() {
        entries[p - 1] = inst.x().clone();
    }
    if let Some(j) = r_at {
        entries[j - 1] = inst.r().clone();
    }
    ServiceVector::new(entries).expect("entries are nonnegative")
}

/// Canonical member of the family with widest gap `delta`: that gap comes
/// first, and `r` sits at the smallest middle point of its stretch.
pub fn build_gamma_member(inst: &Instance, delta: usize) -> Result<ServiceVector> {
    check_feasible(inst, delta)?;
    let profile = canonical_profile(inst, delta);
    let r_at = if inst.r().is_zero() {
        None
    } else {
        let (a, b) = profile.widest_stretch();
        Some(stretch_middle_points(a, b)[0])
    };
    Ok(place(inst, &profile, r_at))
}

/// In-place lexicographic successor; `false` once the last arrangement has
/// been passed.
fn next_permutation(items: &mut [usize]) -> bool {
    let Some(i) = items.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = items.iter().rposition(|&e| e > items[i]).unwrap();
    items.swap(i, j);
    items[i + 1..].reverse();
    true
}

/// Every member of the family with widest gap `delta`, sorted and without
/// duplicates. Empty when `delta` admits no profile.
pub fn enumerate_gamma(inst: &Instance, delta: usize, max_n: usize) -> Result<Vec<ServiceVector>> {
    if inst.n() > max_n {
        return Err(Error::SizeCap {
            what: "gap-profile enumeration",
            needed: inst.n() as u128,
            cap: max_n as u128,
        });
    }
    if !feasible_delta_range(inst).contains(&delta) {
        return Ok(Vec::new());
    }
    let mut gaps = canonical_profile(inst, delta).gaps().to_vec();
    gaps.sort_unstable();
    let mut members = BTreeSet::new();
    loop {
        for t in (0..gaps.len()).filter(|&k| gaps[k] == delta) {
            let profile = GapProfile::new(inst.n(), gaps.clone(), t)?;
            if inst.r().is_zero() {
                members.insert(place(inst, &profile, None));
            } else {
                let (a, b) = profile.widest_stretch();
                for j in stretch_middle_points(a, b) {
                    members.insert(place(inst, &profile, Some(j)));
                }
            }
        }
        if !next_permutation(&mut gaps) {
            break;
        }
    }
    Ok(members.into_iter().collect())
}

/// Optimal combinatorial vector with its objective and `delta*` certificate.
pub fn solve_combinatorial(inst: &Instance) -> Result<SolveReport> {
    let (vector, delta, solver) = if inst.m() == 0 {
        (build_gamma_member(inst, inst.n() + 1)?, None, "middle-point")
    } else {
        let cert = delta_search(inst)?;
        let v = build_gamma_member(inst, cert.delta_star)?;
        (v, Some(cert), "gap-profile")
    };
    let objective = objective(vector.entries(), inst.x());
    let closed_form = delta.as_ref().map(|c: &DeltaCertificate| {
        if c.delta_star == c.delta1 {
            c.a_delta1.clone()
        } else {
            c.a_delta2.clone()
        }
    });
    Ok(SolveReport {
        domain: Domain::Combinatorial,
        vector,
        objective,
        closed_form,
        status: Status::Proven,
        delta,
        tau: Some((tau(inst.n(), inst.m()), tau(inst.n(), inst.m() + 1))),
        solver,
    })
}

/// `delta*` when `r = 0`: `ceil((n+1)/(m+1))`.
pub fn integer_delta_star(n: usize, m: usize) -> usize {
    (n + 1).div_ceil(m + 1)
}
