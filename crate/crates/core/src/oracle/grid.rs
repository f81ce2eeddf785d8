use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::model::{Instance, ServiceVector};
use crate::rational::{common_scale, from_usize, Rational};

pub const DEFAULT_GRID_CAP: u128 = 10_000_000;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        let Some(next) = acc.checked_mul((n - i) as u128) else {
            return u128::MAX;
        };
        acc = next / (i as u128 + 1);
    }
    acc
}

/// Smallest resolution whose lattice `w/resolution * Z` contains both `y`
/// and `r`, so the duo vector is a lattice point.
pub fn duo_resolution(inst: &Instance) -> usize {
    let y = inst.y();
    let r = inst.r();
    let unit = if r.is_zero() {
        inst.x().clone()
    } else {
        let den = y.denom().lcm(r.denom());
        let a = y.numer() * (&den / y.denom());
        let b = r.numer() * (&den / r.denom());
        Rational::new(a.gcd(&b), den)
    };
    (inst.w() / unit)
        .to_integer()
        .to_usize()
        .expect("resolution fits usize")
}

struct Lattice {
    n: usize,
    resolution: i128,
    /// threshold and unit mass over a shared denominator
    x: i128,
    unit: i128,
    counts: Vec<i128>,
    best: Option<(i128, Vec<i128>)>,
}

impl Lattice {
    /// Cost of the intervals that end at position `i`.
    fn closing_cost(&self, i: usize) -> i128 {
        let mut acc = 0i128;
        let mut cost = 0i128;
        for k in (0..=i).rev() {
            acc += self.counts[k] * self.unit;
            if acc >= self.x {
                break;
            }
            cost += self.x - acc;
        }
        cost
    }

    /// Lower bound on the intervals inside positions `i..n` when they hold
    /// `left` units: the `n - i + 1 - j` intervals of length `j` share at
    /// most `j * left` units between them.
    fn tail_bound(&self, i: usize, left: i128) -> i128 {
        let len = (self.n - i) as i128;
        let mass = left * self.unit;
        (1..=len)
            .map(|j| ((len + 1 - j) * self.x - j * mass).max(0))
            .sum()
    }

    /// Depth-first over compositions in lexicographic order, pruning any
    /// prefix whose partial cost plus a bound on the rest reaches the
    /// incumbent.
    fn descend(&mut self, i: usize, left: i128, partial: i128) {
        if let Some((best, _)) = &self.best {
            if partial + self.tail_bound(i, left) >= *best {
                return;
            }
        }
        if i + 1 == self.n {
            self.counts[i] = left;
            let total = partial + self.closing_cost(i);
            if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                self.best = Some((total, self.counts.clone()));
            }
            return;
        }
        for c in 0..=left {
            self.counts[i] = c;
            let cost = self.closing_cost(i);
            self.descend(i + 1, left - c, partial + cost);
        }
        self.counts[i] = 0;
    }
}

/// Exact minimum of the objective over all vectors whose entries are
/// nonnegative multiples of `w / resolution` summing to `w`. Ties go to the
/// lexicographically smallest vector.
pub fn grid_search(inst: &Instance, resolution: usize, cap: u128) -> Result<(ServiceVector, Rational)> {
    if resolution == 0 {
        return Err(invalid("resolution must be positive"));
    }
    let n = inst.n();
    let points = binomial(resolution + n - 1, n - 1);
    if points > cap {
        return Err(Error::SizeCap {
            what: "lattice search",
            needed: points,
            cap,
        });
    }
    let unit = inst.w() / from_usize(resolution);
    let (den, scaled) = common_scale(&[inst.x(), &unit])
        .filter(|(_, s)| {
            s[0].checked_mul((n * n + n) as i128).is_some()
                && s[1].checked_mul(resolution as i128 * 2).is_some()
        })
        .ok_or_else(|| invalid("lattice values are too large to scale exactly"))?;
    let mut lattice = Lattice {
        n,
        resolution: resolution as i128,
        x: scaled[0],
        unit: scaled[1],
        counts: vec![0; n],
        best: None,
    };
    lattice.descend(0, lattice.resolution, 0);
    let (value, counts) = lattice.best.expect("lattice is nonempty");
    let entries = counts.into_iter().map(|c| &unit * Rational::from_integer(c.into())).collect();
    Ok((
        ServiceVector::new(entries)?,
        Rational::new(BigInt::from(value), den),
    ))
}

/// Dynamic program over the same lattice. The cost of the intervals ending
/// at a position only depends on the trailing positions whose suffix sums
/// stay below `x`; the state records how many of them have each suffix sum,
/// one byte per sum, along with the units still to place.
struct Chain {
    n: usize,
    /// `x` in lattice units, at most 16
    k: u32,
    memo: Vec<HashMap<(u128, u32), u64>>,
    states: usize,
    max_states: usize,
}

impl Chain {
    /// Appends an entry of `c` units: returns the shortfall of the intervals
    /// ending there and the next state.
    fn step(&self, run: u128, c: u32) -> (u64, u128) {
        if c >= self.k {
            return (0, 0);
        }
        // suffix sum s becomes s + c; sums reaching k fall off the top
        let keep = (self.k - c) * 8;
        let mask = if keep >= 128 { u128::MAX } else { (1u128 << keep) - 1 };
        let next = ((run & mask) << (c * 8)) + (1u128 << (c * 8));
        let cost = (c..self.k)
            .map(|s| ((next >> (s * 8)) & 0xff) as u64 * (self.k - s) as u64)
            .sum();
        (cost, next)
    }

    /// No entry needs to exceed `x`: moving the excess anywhere else keeps
    /// every interval through it at or above `x` and can only help the rest.
    /// Ranges are empty when the units left cannot be placed.
    fn choices(&self, i: usize, left: u32) -> std::ops::RangeInclusive<u32> {
        let after = (self.n - i - 1) as u32 * self.k;
        left.saturating_sub(after)..=left.min(self.k)
    }

    fn value(&mut self, i: usize, left: u32, run: u128) -> Result<u64> {
        if i == self.n {
            return Ok(if left == 0 { 0 } else { u64::MAX });
        }
        if let Some(&v) = self.memo[i].get(&(run, left)) {
            return Ok(v);
        }
        self.states += 1;
        if self.states > self.max_states {
            return Err(Error::SizeCap {
                what: "lattice dynamic program",
                needed: self.states as u128,
                cap: self.max_states as u128,
            });
        }
        let mut best = u64::MAX;
        for c in self.choices(i, left) {
            let (cost, next) = self.step(run, c);
            best = best.min(cost.saturating_add(self.value(i + 1, left - c, next)?));
        }
        self.memo[i].insert((run, left), best);
        Ok(best)
    }
}

/// Same minimum as [`grid_search`], found by dynamic programming instead of
/// enumeration. The minimizer is the lexicographically smallest one with
/// every entry at most `x`. Needs `x` to be a whole number of at
/// most 16 lattice units and `n < 256`; `max_states` bounds the memo table.
pub fn lattice_minimum(inst: &Instance, resolution: usize, max_states: usize) -> Result<(ServiceVector, Rational)> {
    if resolution == 0 {
        return Err(invalid("resolution must be positive"));
    }
    let n = inst.n();
    let unit = inst.w() / from_usize(resolution);
    let ratio = inst.x() / &unit;
    if !ratio.is_integer() {
        // shortfalls would not be whole units
        return Err(invalid("the dynamic program needs x to be a whole number of lattice units"));
    }
    let k = ratio.to_integer().to_u32().filter(|k| *k <= 16);
    let (Some(k), true, Ok(units)) = (k, n < 256, u32::try_from(resolution)) else {
        return Err(invalid("lattice too fine for the dynamic program"));
    };
    let mut chain = Chain {
        n,
        k,
        memo: vec![HashMap::new(); n],
        states: 0,
        max_states,
    };
    let total = chain.value(0, units, 0)?;
    // walk forward taking the smallest entry that stays optimal
    let mut counts = Vec::with_capacity(n);
    let (mut left, mut run, mut remaining) = (units, 0u128, total);
    for i in 0..n {
        let mut chosen = None;
        for c in chain.choices(i, left) {
            let (cost, next) = chain.step(run, c);
            if cost <= remaining && cost.saturating_add(chain.value(i + 1, left - c, next)?) == remaining {
                chosen = Some((c, cost, next));
                break;
            }
        }
        let (c, cost, next) = chosen.expect("optimal continuation exists");
        counts.push(c);
        left -= c;
        remaining -= cost;
        run = next;
    }
    let entries = counts.into_iter().map(|c| &unit * Rational::from_integer(c.into())).collect();
    Ok((ServiceVector::new(entries)?, &unit * Rational::from_integer(total.into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_f;
    use crate::rational::{int, parse_rational, rat};

    fn inst(n: usize, x: &str, w: &str) -> Instance {
        Instance::new(n, parse_rational(x).unwrap(), parse_rational(w).unwrap()).unwrap()
    }

    fn sv(items: &[&str]) -> ServiceVector {
        ServiceVector::new(items.iter().map(|s| parse_rational(s).unwrap()).collect()).unwrap()
    }

    /// Every composition, no pruning.
    fn exhaustive(inst: &Instance, resolution: usize) -> Rational {
        fn rec(i: usize, left: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i + 1 == counts.len() {
                counts[i] = left;
                out.push(counts.clone());
                return;
            }
            for c in 0..=left {
                counts[i] = c;
                rec(i + 1, left - c, counts, out);
            }
        }
        let mut all = vec![];
        rec(0, resolution, &mut vec![0; inst.n()], &mut all);
        let unit = inst.w() / from_usize(resolution);
        all.iter()
            .map(|c| {
                let v = ServiceVector::new(c.iter().map(|&k| &unit * from_usize(k)).collect()).unwrap();
                eval_f(&v, inst.x()).unwrap()
            })
            .min()
            .unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(17, 6), 12376);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(200, 100), u128::MAX);
    }

    #[test]
    fn seven_slot_optimum_is_the_lattice_minimum() {
        let i = inst(7, "1", "2.2");
        assert_eq!(duo_resolution(&i), 11);
        let (v, best) = grid_search(&i, 11, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(best, rat(32, 5));
        assert_eq!(eval_f(&v, i.x()).unwrap(), best);
    }

    #[test]
    fn unit_mass_on_three_slots() {
        let (v, best) = grid_search(&inst(3, "1", "1"), 10, DEFAULT_GRID_CAP).unwrap();
        // (0, 1, 0): singletons 1 + 0 + 1, every longer interval covered
        assert_eq!(best, int(2));
        assert_eq!(v, sv(&["0", "1", "0"]));
        assert_eq!(exhaustive(&inst(3, "1", "1"), 10), int(2));
    }

    #[test]
    fn resolution_one_visits_vertices() {
        let i = inst(4, "1", "0.5");
        let (v, best) = grid_search(&i, 1, DEFAULT_GRID_CAP).unwrap();
        assert_eq!(v, sv(&["0", "0", "0.5", "0"]));
        let vertex_best = (0..4)
            .map(|j| {
                let mut e = vec![int(0); 4];
                e[j] = rat(1, 2);
                eval_f(&ServiceVector::new(e).unwrap(), i.x()).unwrap()
            })
            .min()
            .unwrap();
        assert_eq!(best, vertex_best);
    }

    #[test]
    fn pruned_search_matches_exhaustive() {
        for (n, x, w, res) in [
            (4, "1", "1.5", 6),
            (5, "1", "2.5", 5),
            (6, "1.1", "2.2", 4),
            (5, "3/7", "1", 7),
            (6, "1", "0.7", 7),
        ] {
            let i = inst(n, x, w);
            assert_eq!(grid_search(&i, res, DEFAULT_GRID_CAP).unwrap().1, exhaustive(&i, res), "{i}");
        }
    }

    #[test]
    fn dynamic_program_matches_enumeration() {
        for (n, x, w, res) in [
            (4, "1", "1.5", 6),
            (5, "1", "2.5", 5),
            (6, "1.1", "2.2", 4),
            (7, "1", "2.2", 11),
            (3, "1", "1", 10),
            (6, "1", "0.75", 3),
            (8, "1", "3.25", 13),
        ] {
            let i = inst(n, x, w);
            assert_eq!(
                lattice_minimum(&i, res, 1_000_000).unwrap(),
                grid_search(&i, res, DEFAULT_GRID_CAP).unwrap(),
                "{i}"
            );
        }
        // unit 1/2 does not divide 3/7
        assert!(lattice_minimum(&inst(5, "3/7", "1"), 2, 1_000).is_err());
        assert!(matches!(
            lattice_minimum(&inst(12, "1", "3.5"), 35, 10),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn cap_and_bad_resolution() {
        let i = inst(25, "1", "3.5");
        assert!(matches!(grid_search(&i, 40, DEFAULT_GRID_CAP), Err(Error::SizeCap { .. })));
        assert!(grid_search(&i, 0, DEFAULT_GRID_CAP).is_err());
    }
}
