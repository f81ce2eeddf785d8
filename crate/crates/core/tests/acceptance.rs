//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use extopt_core::combinatorial::{a_value, build_gamma_member, feasible_delta_range, phi};
use extopt_core::continuous::{canonical_gap_profiles, closed_form_objective, interleaves, regime, tau, Regime};
use extopt_core::model::{eval_f_row, externality_mean, externality_variance, supremum_vector};
use extopt_core::oracle::{
    binomial, brute_force_combinatorial, duo_resolution, lattice_minimum, projected_subgradient, verify_conjecture,
    SubgradientConfig, VerifyConfig, DEFAULT_BRUTE_FORCE_CAP,
};
use extopt_core::rational::{from_usize, int, rat, to_f64};
use extopt_core::{eval_f, solve_combinatorial, solve_continuous, Instance, QueueParams, Rational, ServiceVector, Status};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn instance(n: usize, x: &Rational, w: Rational) -> Option<Instance> {
    Instance::new(n, x.clone(), w).ok()
}

fn sv(entries: Vec<Rational>) -> ServiceVector {
    ServiceVector::new(entries).unwrap()
}

fn worked_example() -> Outcome {
    let i = Instance::new(7, int(1), rat(11, 5)).unwrap();
    let comb = solve_combinatorial(&i).map_err(|e| e.to_string())?;
    let cont = solve_continuous(&i).map_err(|e| e.to_string())?;
    ensure!(comb.objective == rat(33, 5), "combinatorial objective {}", comb.objective);
    ensure!(cont.objective == rat(32, 5), "continuous objective {}", cont.objective);
    ensure!(cont.objective < comb.objective, "continuous does not beat combinatorial");
    Ok("combinatorial 33/5, continuous 32/5".into())
}

fn integer_closed_form() -> Outcome {
    let mut count = 0;
    for x in [int(1), rat(11, 10), rat(3, 7)] {
        for n in 2..=30 {
            for m in 1..n {
                let i = instance(n, &x, &x * from_usize(m)).unwrap();
                let tu = tau(n, m).upper;
                let v = build_gamma_member(&i, tu).map_err(|e| format!("{i}: {e}"))?;
                let expected = from_usize(tu - 1)
                    * (&x * from_usize(n + 1) - (i.w() + &x) * from_usize(tu) / int(2));
                let got = eval_f(&v, &x).unwrap();
                ensure!(got == expected, "{i}: f = {got}, closed form {expected}");
                ensure!(closed_form_objective(&i) == expected, "{i}: library closed form differs");
                count += 1;
            }
        }
    }
    Ok(format!("{count} instances exact"))
}

fn combinatorial_oracle() -> Outcome {
    let mut count = 0;
    for x in [int(1), rat(3, 7)] {
        for n in 1..=12 {
            for m in 0..=4 {
                for q in [0, 1, 2, 3] {
                    let w = &x * from_usize(m) + &x * rat(q, 4);
                    let Some(i) = instance(n, &x, w) else { continue };
                    let solved = solve_combinatorial(&i).map_err(|e| format!("{i}: {e}"))?;
                    let (_, best) =
                        brute_force_combinatorial(&i, DEFAULT_BRUTE_FORCE_CAP).map_err(|e| format!("{i}: {e}"))?;
                    ensure!(solved.objective == best, "{i}: solver {} vs enumeration {best}", solved.objective);
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances match exhaustive enumeration"))
}

fn delta_star(i: &Instance) -> Result<usize, String> {
    let rep = solve_combinatorial(i).map_err(|e| format!("{i}: {e}"))?;
    rep.delta.map(|c| c.delta_star).ok_or_else(|| format!("{i}: no certificate"))
}

fn delta_properties() -> Outcome {
    let x = int(1);
    let mut integer = 0;
    for n in 2..=60 {
        for m in 1..n {
            let i = instance(n, &x, from_usize(m)).unwrap();
            let d = delta_star(&i)?;
            ensure!(d == (n + 1).div_ceil(m + 1), "{i}: delta* = {d}");
            integer += 1;
        }
    }
    let (mut sweeps, mut identities) = (0, 0);
    for n in 2..=20 {
        for m in 1..n {
            let mut last = 0;
            for k in 0..50 {
                let i = instance(n, &x, from_usize(m) + rat(k, 50)).unwrap();
                let d = delta_star(&i)?;
                ensure!(d >= last, "{i}: delta* fell from {last} to {d}");
                last = d;
                let hi = *feasible_delta_range(&i).end();
                for delta in 1..=hi.saturating_sub(2) {
                    let lhs = phi(&i, delta).map_err(|e| e.to_string())?;
                    let rhs = a_value(&i, delta + 2).unwrap() - a_value(&i, delta).unwrap();
                    ensure!(lhs == rhs, "{i}: phi({delta}) = {lhs}, second difference {rhs}");
                    identities += 1;
                }
            }
            sweeps += 1;
        }
    }
    Ok(format!(
        "{integer} integer cases, {sweeps} monotone r-sweeps, {identities} second differences"
    ))
}

fn interleaving() -> Outcome {
    let mut count = 0;
    for n in 2..=200 {
        for m in 1..n {
            let (y, r) = canonical_gap_profiles(n, m).map_err(|e| e.to_string())?;
            ensure!(interleaves(&y, &r), "n={n} m={m}: {y:?} / {r:?}");
            count += 1;
        }
    }
    Ok(format!("{count} (n, m) pairs"))
}

fn proven_duo_regime() -> Outcome {
    let mut count = 0;
    let fractions = [
        (int(1), vec![rat(1, 2), rat(1, 3), rat(2, 3), rat(1, 4), rat(3, 4)]),
        (rat(3, 7), vec![rat(3, 14), rat(1, 7)]),
    ];
    for (x, rs) in &fractions {
        for r in rs {
            for n in 2..=25 {
                for m in 0..n {
                    let Some(i) = instance(n, x, x * from_usize(m) + r) else { continue };
                    if regime(&i) != Regime::DuoProven {
                        continue;
                    }
                    let rep = solve_continuous(&i).map_err(|e| format!("{i}: {e}"))?;
                    let closed = closed_form_objective(&i);
                    ensure!(rep.status == Status::Proven, "{i}: status {}", rep.status);
                    ensure!(rep.objective == closed, "{i}: duo {} vs closed form {closed}", rep.objective);
                    let res = duo_resolution(&i);
                    let unit = i.w() / from_usize(res);
                    ensure!(
                        rep.vector.entries().iter().all(|e| (e / &unit).is_integer()),
                        "{i}: duo vector is off the lattice"
                    );
                    let (_, best) = lattice_minimum(&i, res, 50_000_000).map_err(|e| format!("{i}: {e}"))?;
                    ensure!(best >= closed, "{i}: lattice point with {best} < {closed}");
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} instances, no lattice point below the closed form"))
}

fn conjecture_harness() -> Outcome {
    let started = Instant::now();
    let cfg = VerifyConfig::default();
    let (mut confirmed, mut worst) = (0, 0.0f64);
    'outer: for n in 4..=30 {
        for m in 1..n / 2 {
            for k in 1..16 {
                let x = int(1);
                let Some(i) = instance(n, &x, from_usize(m) + rat(k, 16)) else { continue };
                if regime(&i) != Regime::Conjectured {
                    continue;
                }
                let rep = verify_conjecture(&i, &cfg).map_err(|e| format!("{i}: {e}"))?;
                ensure!(rep.status != Status::Violated, "{i}: VIOLATED, {rep:?}");
                ensure!(
                    rep.status == Status::Confirmed && rep.gap.abs() <= 1e-6,
                    "{i}: {} with gap {}",
                    rep.status,
                    rep.gap
                );
                worst = worst.max(rep.gap.abs());
                confirmed += 1;
                if confirmed >= 520 {
                    break 'outer;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    ensure!(confirmed >= 500, "only {confirmed} conjecture instances");
    ensure!(elapsed <= Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("{confirmed} CONFIRMED, 0 VIOLATED, worst |gap| {worst:.1e}"))
}

/// Random vector with total mass exactly `mass`.
fn random_full(rng: &mut ChaCha8Rng, n: usize, mass: &Rational) -> ServiceVector {
    let mut weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..20)).collect();
    if weights.iter().all(|k| *k == 0) {
        weights[0] = 1;
    }
    let total: i64 = weights.iter().sum();
    sv(weights.into_iter().map(|k| mass * rat(k, total)).collect())
}

/// Random member of `{v >= 0, sum(v) <= mass}`.
fn random_vector(rng: &mut ChaCha8Rng, n: usize, mass: &Rational) -> ServiceVector {
    let scaled = mass * rat(rng.gen_range(0..=10), 10);
    random_full(rng, n, &scaled)
}

fn rows_and_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=15);
        let x = rat(rng.gen_range(1..30), rng.gen_range(1..10));
        let v = random_vector(&mut rng, n, &(&x * int(3)));
        let rows = (1..=n).fold(Rational::zero(), |a, j| a + eval_f_row(&v, &x, j).unwrap());
        ensure!(eval_f(&v, &x).unwrap() == rows, "row sum mismatch at {v}");
    }
    let mut checked = 0;
    for n in 2..=15 {
        for w in [rat(1, 2), rat(3, 2), rat(11, 5), rat(13, 4)] {
            let x = int(1);
            let Some(i) = instance(n, &x, w.clone()) else { continue };
            let tu = tau(n, i.m()).upper;
            for _ in 0..1000 {
                let v = random_vector(&mut rng, n, &w);
                for j in 1..tu {
                    let bound = &x * from_usize(n + 1 - j) - &w * from_usize(j);
                    let row = eval_f_row(&v, &x, j).unwrap();
                    ensure!(row >= bound, "{i}: row {j} of {v} is {row} < {bound}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("1000 decompositions, {checked} row bounds"))
}

fn subgradient_sanity() -> Outcome {
    let cfg = SubgradientConfig::default();
    let (mut count, mut worst) = (0, 0.0f64);
    for n in 2..=10 {
        for k in 1..n * 10 {
            let x = int(1);
            let i = instance(n, &x, rat(k as i64, 10)).unwrap();
            let rep = solve_continuous(&i).map_err(|e| format!("{i}: {e}"))?;
            if rep.status != Status::Proven {
                continue;
            }
            let target = to_f64(&closed_form_objective(&i));
            let out = projected_subgradient(&i, &cfg);
            let gap = (out.value - target).abs();
            ensure!(gap <= 1e-6, "{i}: oracle {} vs {target}", out.value);
            worst = worst.max(gap);
            count += 1;
        }
    }
    Ok(format!("{count} PROVEN instances, worst |gap| {worst:.1e}"))
}

/// Strict interval sum by direct enumeration.
fn strict_sum(v: &[Rational], x: &Rational) -> Rational {
    let mut total = Rational::zero();
    for k in 0..v.len() {
        for l in k + 1..v.len() {
            let s = v[k..=l].iter().fold(Rational::zero(), |a, e| a + e);
            if x > &s {
                total += x - s;
            }
        }
    }
    total
}

fn compositions(n: usize, units: usize, out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>) {
    if cur.len() + 1 == n {
        cur.push(units);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for c in 0..=units {
        cur.push(c);
        compositions(n, units - c, out, cur);
        cur.pop();
    }
}

fn moments() -> Outcome {
    let half = QueueParams::new(rat(1, 2), int(1), int(2)).unwrap();
    let golden = [
        (externality_mean(&half, 4, &int(2)).unwrap(), int(16)),
        (externality_mean(&QueueParams::new(rat(1, 4), int(2), int(4)).unwrap(), 10, &rat(1, 2)).unwrap(), int(10)),
        (externality_mean(&half, 7, &int(1)).unwrap(), int(14)),
        (externality_variance(&half, &sv(vec![int(1), int(1)]), &int(1)).unwrap(), int(16)),
        (externality_variance(&half, &sv(vec![int(0), int(0)]), &int(1)).unwrap(), int(32)),
        (
            externality_variance(
                &half,
                &sv(vec![int(0), int(1), int(0), int(0), int(1), rat(1, 5), int(0)]),
                &int(1),
            )
            .unwrap(),
            rat(424, 5),
        ),
    ];
    for (k, (got, want)) in golden.iter().enumerate() {
        ensure!(got == want, "hand-computed value {k}: {got} vs {want}");
    }

    let scale = {
        let slack = Rational::from_integer(1.into()) - half.rho();
        half.lambda() * half.mu2() / (&slack * &slack * &slack)
    };
    let variance = |v: &[Rational], x: &Rational| &scale * (x * from_usize(v.len()) + strict_sum(v, x) * int(2));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    for n in 2..=8 {
        for w in [rat(1, 2), rat(3, 2), rat(11, 5), rat(5, 2), rat(13, 4), rat(9, 2)] {
            let x = int(1);
            let Some(i) = instance(n, &x, w.clone()) else { continue };
            let best = solve_continuous(&i).unwrap().vector;
            let low = variance(best.entries(), &x);
            ensure!(low == externality_variance(&half, &best, &x).unwrap(), "{i}: formula mismatch");
            let high = variance(supremum_vector(&i).entries(), &x);
            let mut res = duo_resolution(&i);
            while binomial(res + n - 1, n - 1) > 20_000 {
                res /= 2;
            }
            let unit = &w / from_usize(res.max(1));
            let mut comps = Vec::new();
            compositions(n, res.max(1), &mut comps, &mut Vec::new());
            let mut candidates: Vec<Vec<Rational>> = comps
                .into_iter()
                .map(|c| c.into_iter().map(|k| &unit * from_usize(k)).collect())
                .collect();
            candidates.extend((0..200).map(|_| random_full(&mut rng, n, &w).into_entries()));
            for v in candidates {
                let var = variance(&v, &x);
                ensure!(var >= low, "{i}: {v:?} has variance {var} below the optimum's {low}");
                ensure!(var <= high, "{i}: {v:?} has variance {var} above the supremum's {high}");
                tested += 1;
            }
        }
    }
    Ok(format!("6 hand-computed values, {tested} vectors bracketed"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("worked example golden values", worked_example),
        ("integer-mass closed form", integer_closed_form),
        ("combinatorial solver vs exhaustive enumeration", combinatorial_oracle),
        ("optimal widest gap properties", delta_properties),
        ("two-layer interleaving", interleaving),
        ("proven two-layer regime vs exact lattice", proven_duo_regime),
        ("conjecture harness", conjecture_harness),
        ("row decomposition and row bounds", rows_and_bounds),
        ("subgradient oracle on proven instances", subgradient_sanity),
        ("externality mean and variance", moments),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
