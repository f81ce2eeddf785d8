//! `extopt`: solve, verify and tabulate externality-minimizing service
//! vectors. Reports go to stdout as JSON, diagnostics to stderr.

mod json;
mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use extopt_core::combinatorial::{enumerate_gamma, DEFAULT_ENUMERATION_CAP};
use extopt_core::model::{externality_mean, externality_variance, supremum_vector};
use extopt_core::oracle::{verify_conjecture, SubgradientConfig, VerifyConfig};
use extopt_core::{
    parse_rational, solve_combinatorial, solve_continuous, Domain, Error, Instance, QueueParams, Rational, Status,
};
use num_traits::Signed;
use serde_json::{json, Value};

/// A diagnostic plus the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TrivialRegime { .. } | Error::Unstable { .. } => 3,
            Error::Construction(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(name = "extopt", version, about = "Service vectors that minimize queueing externalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal vector and objective for one instance.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = DomainArg::Continuous)]
        domain: DomainArg,
    },
    /// Check the continuous construction against independent oracles.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Tabulate many instances, optionally as CSV.
    Sweep {
        /// Inclusive range of n, e.g. `7..9`, or a single value.
        #[arg(long = "n-range")]
        n_range: String,
        #[arg(short = 'x')]
        x: String,
        /// Inclusive range of w, e.g. `0.1..6.9`.
        #[arg(long = "w-range")]
        w_range: String,
        #[arg(long = "w-step")]
        w_step: String,
        #[arg(long, value_enum, default_value_t = DomainArg::Continuous)]
        domain: DomainArg,
        /// Run the oracle for every row.
        #[arg(long = "with-oracle")]
        with_oracle: bool,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Largest number of instances the sweep may cover.
        #[arg(long, default_value_t = 100_000)]
        cap: u128,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Mean and variance range of the externality.
    Variance {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        mu1: String,
        #[arg(long)]
        mu2: String,
    },
    /// Every member of the gap-profile family with a given widest gap.
    Enumerate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        delta: usize,
        /// Largest n accepted.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(short = 'n')]
    n: usize,
    #[arg(short = 'x')]
    x: String,
    #[arg(short = 'w')]
    w: String,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "max-iters")]
    max_iters: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Lattice size up to which the exact grid oracle enumerates; 0 turns
    /// the lattice oracle off.
    #[arg(long = "grid-cap")]
    grid_cap: Option<u128>,
    /// Lattice resolution for the grid oracle; defaults to the coarsest
    /// lattice that contains the constructed vector.
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Combinatorial,
    Continuous,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Combinatorial => Domain::Combinatorial,
            DomainArg::Continuous => Domain::Continuous,
        }
    }
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).map_err(|e| Failure::usage(format!("{name}: {e}")))
}

impl InstanceArgs {
    fn build(&self) -> Result<Instance, Failure> {
        let x = rational_arg("-x", &self.x)?;
        let w = rational_arg("-w", &self.w)?;
        Ok(Instance::new(self.n, x, w)?)
    }
}

impl OracleArgs {
    fn config(&self) -> Result<VerifyConfig, Failure> {
        let mut cfg = VerifyConfig::default();
        let sub: &mut SubgradientConfig = &mut cfg.subgradient;
        if let Some(it) = self.max_iters {
            if it == 0 {
                return Err(Failure::usage("--max-iters must be at least 1"));
            }
            sub.max_iters = it;
        }
        if let Some(seed) = self.seed {
            sub.seed = seed;
        }
        if let Some(restarts) = self.restarts {
            sub.restarts = restarts.max(1);
        }
        if let Some(cap) = self.grid_cap {
            cfg.grid_cap = cap;
        }
        if let Some(res) = self.resolution {
            if res == 0 {
                return Err(Failure::usage("--resolution must be positive"));
            }
            cfg.resolution = Some(res);
        }
        Ok(cfg)
    }
}

fn parse_range<T>(text: &str, parse: impl Fn(&str) -> Result<T, Failure>) -> Result<(T, T), Failure> {
    match text.split_once("..") {
        Some((lo, hi)) => Ok((parse(lo.trim())?, parse(hi.trim().trim_start_matches('='))?)),
        None => Ok((parse(text.trim())?, parse(text.trim())?)),
    }
}

fn run(cli: Cli) -> Result<(Value, u8), Failure> {
    match cli.command {
        Command::Solve { instance, domain } => {
            let inst = instance.build()?;
            let rep = match Domain::from(domain) {
                Domain::Combinatorial => solve_combinatorial(&inst)?,
                Domain::Continuous => solve_continuous(&inst)?,
            };
            let out = json::envelope("solve", json::instance(&inst, None), rep.status, json::solve_report(&rep));
            Ok((out, 0))
        }
        Command::Verify { instance, oracle } => {
            let inst = instance.build()?;
            let rep = verify_conjecture(&inst, &oracle.config()?)?;
            let code = match rep.status {
                Status::Confirmed => 0,
                Status::Violated => 5,
                _ => 4,
            };
            let out = json::envelope("verify", json::instance(&inst, None), rep.status, json::verify_report(&rep));
            Ok((out, code))
        }
        Command::Sweep {
            n_range,
            x,
            w_range,
            w_step,
            domain,
            with_oracle,
            output,
            cap,
            oracle,
        } => {
            let (n_lo, n_hi) = parse_range(&n_range, |s| {
                s.parse::<usize>().map_err(|e| Failure::usage(format!("--n-range: {e}")))
            })?;
            let (w_lo, w_hi) = parse_range(&w_range, |s| rational_arg("--w-range", s))?;
            let x = rational_arg("-x", &x)?;
            if !x.is_positive() {
                return Err(Failure::usage("-x must be positive"));
            }
            let plan = sweep::Plan {
                n_lo,
                n_hi,
                x: x.clone(),
                w_lo: w_lo.clone(),
                w_hi: w_hi.clone(),
                w_step: rational_arg("--w-step", &w_step)?,
                domain: domain.into(),
                oracle: if with_oracle { Some(oracle.config()?) } else { None },
                cap,
            };
            let rows = plan
                .instances()?
                .into_iter()
                .map(|inst| plan.row(inst))
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(path) = &output {
                sweep::write_csv(path, &rows)?;
            }
            let spec = json!({
                "n_range": [n_lo, n_hi],
                "x": json::rational(&x),
                "w_range": [json::rational(&w_lo), json::rational(&w_hi)],
                "w_step": json::rational(&plan.w_step),
                "domain": plan.domain.as_str(),
            });
            let status = sweep::overall(&rows, with_oracle);
            let out = json::envelope("sweep", spec, status, sweep::summary(&rows, output.as_deref()));
            Ok((out, 0))
        }
        Command::Variance {
            instance,
            lambda,
            mu1,
            mu2,
        } => {
            let lambda = rational_arg("--lambda", &lambda)?;
            if !lambda.is_positive() {
                return Err(Failure::usage("--lambda must be positive"));
            }
            let q = QueueParams::new(lambda, rational_arg("--mu1", &mu1)?, rational_arg("--mu2", &mu2)?)?;
            let inst = instance.build()?;
            let best = solve_continuous(&inst)?;
            let sup = supremum_vector(&inst);
            let result = json!({
                "rho": json::rational(&q.rho()),
                "mean": json::rational(&externality_mean(&q, inst.n(), inst.x())?),
                "variance_min": json::rational(&externality_variance(&q, &best.vector, inst.x())?),
                "variance_sup": json::rational(&externality_variance(&q, &sup, inst.x())?),
                "minimizer": json::vector(&best.vector),
                "supremum_vector": json::vector(&sup),
            });
            let out = json::envelope("variance", json::instance(&inst, Some(&q)), best.status, result);
            Ok((out, 0))
        }
        Command::Enumerate { instance, delta, cap } => {
            let inst = instance.build()?;
            let members = enumerate_gamma(&inst, delta, cap)?;
            let result = json!({
                "delta": delta,
                "count": members.len(),
                "members": members.iter().map(json::vector).collect::<Vec<_>>(),
            });
            let out = json::envelope("enumerate", json::instance(&inst, None), Status::Proven, result);
            Ok((out, 0))
        }
    }
}

fn init_threads() -> Result<(), Failure> {
    let Ok(text) = std::env::var("EXTOPT_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Failure::usage(format!("EXTOPT_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::usage(format!("thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok((out, code)) => {
            let text = serde_json::to_string_pretty(&out).expect("report serializes");
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("extopt: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
