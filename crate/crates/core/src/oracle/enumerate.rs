use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{scaled_objective, Instance, ServiceVector};
use crate::oracle::grid::binomial;
use crate::rational::{common_scale, Rational};

pub const DEFAULT_BRUTE_FORCE_CAP: u128 = 5_000_000;

type Candidate = (i128, Vec<i128>);

fn better(a: Candidate, b: Candidate) -> Candidate {
    if (b.0, &b.1) < (a.0, &a.1) {
        b
    } else {
        a
    }
}

/// Exhaustive minimum over every placement of `m` full masses and, when
/// `r > 0`, one remainder. Ties go to the lexicographically smallest vector.
pub fn brute_force_combinatorial(inst: &Instance, cap: u128) -> Result<(ServiceVector, Rational)> {
    let (n, m) = (inst.n(), inst.m());
    let has_r = !num_traits::Zero::is_zero(inst.r());
    let needed = binomial(n, m).saturating_mul(if has_r { (n - m) as u128 } else { 1 });
    if needed > cap {
        return Err(Error::SizeCap {
            what: "combinatorial enumeration",
            needed,
            cap,
        });
    }
    let (den, scaled) = common_scale(&[inst.x(), inst.r()])
        .filter(|(_, s)| s[0].checked_mul((n * n + n) as i128 * (m as i128 + 2)).is_some())
        .ok_or_else(|| Error::InvalidInput("x and r are too large to enumerate exactly".into()))?;
    let (x, r) = (scaled[0], scaled[1]);

    let search = |combo: &[usize], best: &mut Option<Candidate>| {
        let mut entries = vec![0i128; n];
        for &p in combo {
            entries[p] = x;
        }
        let mut consider = |entries: &Vec<i128>| {
            let value = scaled_objective(entries, x);
            let cand = (value, entries.clone());
            *best = Some(match best.take() {
                Some(b) => better(b, cand),
                None => cand,
            });
        };
        if has_r {
            for j in 0..n {
                if entries[j] == 0 {
                    entries[j] = r;
                    consider(&entries);
                    entries[j] = 0;
                }
            }
        } else {
            consider(&entries);
        }
    };

    let best = if m == 0 {
        let mut best = None;
        search(&[], &mut best);
        best
    } else {
        (0..=n - m)
            .into_par_iter()
            .filter_map(|first| {
                let mut best = None;
                let mut combo: Vec<usize> = (first..first + m).collect();
                loop {
                    search(&combo, &mut best);
                    // advance positions 1..m, keeping combo[0] fixed
                    let mut i = m;
                    while i > 1 && combo[i - 1] == n - m + i - 1 {
                        i -= 1;
                    }
                    if i == 1 {
                        break;
                    }
                    combo[i - 1] += 1;
                    for k in i..m {
                        combo[k] = combo[k - 1] + 1;
                    }
                }
                best
            })
            .reduce_with(better)
    };
    let (value, entries) = best.expect("at least one placement exists");
    let unscale = |v: i128| Rational::new(BigInt::from(v), den.clone());
    let vector = ServiceVector::new(entries.into_iter().map(unscale).collect())?;
    Ok((vector, unscale(value)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_f;
    use crate::rational::{int, parse_rational, rat};

    fn inst(n: usize, x: &str, w: &str) -> Instance {
        Instance::new(n, parse_rational(x).unwrap(), parse_rational(w).unwrap()).unwrap()
    }

    #[test]
    fn seven_slot_example() {
        let (v, best) = brute_force_combinatorial(&inst(7, "1", "2.2"), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(best, rat(33, 5));
        assert_eq!(eval_f(&v, &int(1)).unwrap(), best);
    }

    #[test]
    fn single_mass_goes_to_the_centre() {
        let (v, best) = brute_force_combinatorial(&inst(5, "1", "1"), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(best, int(6));
        assert_eq!(v.entries(), &[int(0), int(0), int(1), int(0), int(0)]);
    }

    #[test]
    fn two_slots_tie_to_the_smaller_vector() {
        let (v, best) = brute_force_combinatorial(&inst(2, "1", "1"), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(best, int(1));
        assert_eq!(v.entries(), &[int(0), int(1)]);
    }

    #[test]
    fn remainder_only() {
        let (v, _) = brute_force_combinatorial(&inst(4, "1", "0.5"), DEFAULT_BRUTE_FORCE_CAP).unwrap();
        assert_eq!(v.entries(), &[int(0), int(0), rat(1, 2), int(0)]);
    }

    #[test]
    fn cap_is_enforced() {
        let err = brute_force_combinatorial(&inst(30, "1", "10.5"), DEFAULT_BRUTE_FORCE_CAP).unwrap_err();
        assert!(matches!(err, Error::SizeCap { .. }));
    }
}
