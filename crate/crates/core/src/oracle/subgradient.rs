//! Floating-point projected subgradient descent over
//! `{v >= 0, sum(v) = w}`.
//!
//! Each run starts from a random point of the simplex and takes normalized
//! steps of length `c / sqrt(k)`. When the best value stops improving by more
//! than `tolerance` for `stagnation_window` iterations, or a few windows have
//! passed anyway, the run restarts from its best point with `c` halved and
//! `k` reset. A run has converged once `c`
//! falls below `tolerance * w`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::Instance;
use crate::rational::to_f64;

/// An epoch is cut after this many stagnation windows even while the best
/// value still creeps down.
const EPOCH_FACTOR: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientConfig {
    pub max_iters: usize,
    /// Initial step constant `c`; `None` means `w`.
    pub step_scale: Option<f64>,
    pub tolerance: f64,
    pub stagnation_window: usize,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SubgradientConfig {
    fn default() -> Self {
        Self {
            max_iters: 200_000,
            step_scale: None,
            tolerance: 1e-7,
            stagnation_window: 1000,
            seed: 0,
            restarts: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    /// Every restart reached the step floor within `max_iters`.
    pub converged: bool,
    pub iterations: usize,
}

pub fn objective_f64(v: &[f64], x: f64) -> f64 {
    let n = v.len();
    let mut total = 0.0;
    for k in 0..n {
        let mut acc = 0.0;
        for e in &v[k..] {
            acc += e;
            if acc >= x {
                break;
            }
            total += x - acc;
        }
    }
    total
}

/// Objective value and one subgradient. Every interval with positive
/// shortfall contributes `-1` on its indices, an interval exactly at the
/// threshold contributes `-1/2`.
pub fn subgradient(v: &[f64], x: f64) -> (f64, Vec<f64>) {
    let n = v.len();
    let mut diff = vec![0.0; n + 1];
    let mut total = 0.0;
    for k in 0..n {
        let mut acc = 0.0;
        for l in k..n {
            acc += v[l];
            let slack = x - acc;
            let coef = if slack > 0.0 {
                total += slack;
                -1.0
            } else if slack == 0.0 {
                -0.5
            } else {
                break;
            };
            diff[k] += coef;
            diff[l + 1] -= coef;
        }
    }
    let mut g = Vec::with_capacity(n);
    let mut run = 0.0;
    for d in &diff[..n] {
        run += d;
        g.push(run);
    }
    (total, g)
}

/// Euclidean projection onto `{v >= 0, sum(v) = w}` by sorting and
/// thresholding.
pub fn project_simplex(p: &[f64], w: f64) -> Vec<f64> {
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - w) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    p.iter().map(|e| (e - theta).max(0.0)).collect()
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, w: f64) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = draws.iter().sum();
    draws.iter().map(|d| d * w / total).collect()
}

struct Run {
    point: Vec<f64>,
    value: f64,
    converged: bool,
    iterations: usize,
}

fn single_run(n: usize, x: f64, w: f64, cfg: &SubgradientConfig, seed: u64) -> Run {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_start(&mut rng, n, w);
    let mut best_point = v.clone();
    let mut best = objective_f64(&v, x);
    let floor = cfg.tolerance * w;
    let mut scale = cfg.step_scale.unwrap_or(w);
    let mut k = 1usize;
    let mut idle = 0usize;
    let mut converged = false;
    let mut iterations = 0;

    let (_, mut g) = subgradient(&v, x);
    while iterations < cfg.max_iters {
        iterations += 1;
        let norm = g.iter().map(|e| e * e).sum::<f64>().sqrt();
        if norm == 0.0 {
            // no shortfall anywhere: f = 0 is the global minimum
            converged = true;
            break;
        }
        let step = scale / (k as f64).sqrt() / norm;
        let moved: Vec<f64> = v.iter().zip(&g).map(|(e, d)| e - step * d).collect();
        v = project_simplex(&moved, w);
        let (value, next_g) = subgradient(&v, x);
        g = next_g;
        if value < best {
            if best - value > cfg.tolerance {
                idle = 0;
            } else {
                idle += 1;
            }
            best = value;
            best_point.clone_from(&v);
        } else {
            idle += 1;
        }
        k += 1;
        if idle >= cfg.stagnation_window || k > EPOCH_FACTOR * cfg.stagnation_window {
            scale *= 0.5;
            if scale < floor {
                converged = true;
                break;
            }
            v.clone_from(&best_point);
            g = subgradient(&v, x).1;
            k = 1;
            idle = 0;
        }
    }
    Run {
        point: best_point,
        value: best,
        converged,
        iterations,
    }
}

/// Best point over `restarts` independent runs. Runs are seeded from
/// `cfg.seed` and reduced deterministically, so the outcome does not depend
/// on thread scheduling.
pub fn projected_subgradient(inst: &Instance, cfg: &SubgradientConfig) -> SubgradientOutcome {
    let n = inst.n();
    let x = to_f64(inst.x());
    let w = to_f64(inst.w());
    let runs: Vec<Run> = (0..cfg.restarts.max(1) as u64)
        .into_par_iter()
        .map(|i| single_run(n, x, w, cfg, cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i)))
        .collect();
    let converged = runs.iter().all(|r| r.converged);
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| {
            let order = b.value.total_cmp(&a.value).then_with(|| {
                b.point
                    .iter()
                    .zip(&a.point)
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            if order.is_lt() {
                b
            } else {
                a
            }
        })
        .expect("at least one run");
    SubgradientOutcome {
        point: best.point,
        value: best.value,
        converged,
        iterations,
    }
}
