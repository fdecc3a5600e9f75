//! Verification suites behind the `thetaring` command.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use thetaring::exact::is_prime;
use thetaring::lubin_tate::{
    build_tower, drinfeld_divisibility, verify_cyclotomic_iso, verify_level_homomorphism,
};
use thetaring::obstruction::{
    contradiction_report, obstruction_report, p2_quartic_search, telescoping_sum,
    theta_sum_divisibility, Conclusion, MAX_SEARCH_PRECISION,
};
use thetaring::theta::{
    verify_additivity, verify_multsum, verify_p2_product_formula, verify_product_rule,
    verify_theta_power, ThetaRing, ThetaVar, ADDITIVITY_SIGN, DEFAULT_MONOMIAL_CAP,
};
use thetaring::{AlgebraError, Result};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "thetaring", version, about = "Exact checks of theta-ring identities and their obstruction on cyclotomic rings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Symbolic identities in the free theta-ring.
    Identities,
    /// Frobenius-lift candidates and the contradiction on Z[zeta].
    Obstruction,
    /// Telescoping sums and theta-sum divisibility.
    Sum,
    /// The height-one Lubin-Tate tower.
    Tower,
    /// Every suite.
    All,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Identities => "identities",
            Command::Obstruction => "obstruction",
            Command::Sum => "sum",
            Command::Tower => "tower",
            Command::All => "all",
        })
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Comma-separated primes.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_prime, default_values_t = [2u64, 3, 5, 7])]
    pub primes: Vec<u64>,
    /// Largest level k.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_level: u32,
    /// Bound on summands m and powers n in the identity suite.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    pub summands: u32,
    /// Precision N for the search over (Z/2^N)[i].
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=MAX_SEARCH_PRECISION as i64))]
    pub precision: u32,
    /// Largest number of terms a symbolic intermediate may hold.
    #[arg(long, global = true, default_value_t = DEFAULT_MONOMIAL_CAP, value_parser = parse_cap)]
    pub monomial_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Sanity check: run with the additivity sign negated. Must fail.
    #[arg(long, global = true, hide = true)]
    pub flip_additivity_sign: bool,
}

fn parse_prime(s: &str) -> std::result::Result<u64, String> {
    let p: u64 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not prime"))
    }
}

fn parse_cap(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub primes: Vec<u64>,
    pub max_level: u32,
    pub precision: u32,
    pub summands: u32,
    pub monomial_cap: usize,
    pub additivity_sign: i64,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            primes: vec![2, 3, 5, 7],
            max_level: 3,
            precision: 4,
            summands: 4,
            monomial_cap: DEFAULT_MONOMIAL_CAP,
            additivity_sign: ADDITIVITY_SIGN,
        }
    }

    pub fn from_cli(cli: &Cli) -> Self {
        let o = &cli.options;
        let mut primes = o.primes.clone();
        primes.sort_unstable();
        primes.dedup();
        RunConfig {
            command: cli.command,
            primes,
            max_level: o.max_level,
            precision: o.precision,
            summands: o.summands,
            monomial_cap: o.monomial_cap,
            additivity_sign: if o.flip_additivity_sign {
                -ADDITIVITY_SIGN
            } else {
                ADDITIVITY_SIGN
            },
        }
    }

    fn theta_ring(&self, p: u64) -> Result<ThetaRing> {
        Ok(ThetaRing::new(p)?.with_monomial_cap(self.monomial_cap))
    }

    fn levels(&self) -> impl Iterator<Item = u32> + Clone {
        1..=self.max_level
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub parameters: String,
    pub status: Status,
    pub detail: String,
    pub wall_time_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: RunConfig,
    pub records: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.count(Status::Fail) == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!(
                "[{}] {} ({}): {} [{:.3} ms]\n",
                r.status,
                r.name,
                r.parameters,
                r.detail,
                r.wall_time_us as f64 / 1000.0
            ));
        }
        out.push_str(&format!(
            "{}: {} passed, {} failed, {} skipped\n",
            self.config.command,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        ));
        out
    }
}

type Outcome = Result<(bool, String)>;
type Job = Box<dyn Fn() -> Outcome + Send + Sync>;

struct Check {
    name: &'static str,
    parameters: String,
    run: Job,
}

fn check(
    name: &'static str,
    parameters: String,
    run: impl Fn() -> Outcome + Send + Sync + 'static,
) -> Check {
    Check {
        name,
        parameters,
        run: Box::new(run),
    }
}

fn execute(checks: Vec<Check>) -> Vec<CheckRecord> {
    checks
        .into_par_iter()
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)();
            let wall_time_us = start.elapsed().as_micros() as u64;
            let (status, detail) = match outcome {
                Ok((true, d)) => (Status::Pass, d),
                Ok((false, d)) => (Status::Fail, d),
                Err(e @ AlgebraError::ResourceLimit { .. }) => (Status::Skipped, e.to_string()),
                Err(e) => (Status::Fail, format!("error: {e}")),
            };
            CheckRecord {
                name: c.name.to_string(),
                parameters: c.parameters,
                status,
                detail,
                wall_time_us,
            }
        })
        .collect()
}

fn identity_checks(config: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let sign = config.additivity_sign;
    for &p in &config.primes {
        let cfg = config.clone();
        checks.push(check("additivity", format!("p={p}"), move || {
            let r = verify_additivity(&cfg.theta_ring(p)?)?;
            Ok((
                r.sign == sign,
                format!("resolved sign {}, configured {sign}", r.sign),
            ))
        }));
        for n in 1..=config.summands as u64 {
            let cfg = config.clone();
            checks.push(check("theta power", format!("p={p} n={n}"), move || {
                let r = verify_theta_power(&cfg.theta_ring(p)?, n)?;
                Ok((r.holds(), difference_detail(&r.difference.to_string())))
            }));
        }
        for m in 2..=config.summands {
            let cfg = config.clone();
            checks.push(check("multsum", format!("p={p} m={m}"), move || {
                let r = verify_multsum(&cfg.theta_ring(p)?, m, sign)?;
                Ok((r.holds(), difference_detail(&r.difference.to_string())))
            }));
        }
        let cfg = config.clone();
        checks.push(check("product rule", format!("p={p}"), move || {
            let ring = cfg.theta_ring(p)?;
            let x = ring.generator(0);
            let y = ring.generator(1);
            let x1 = ring.var(ThetaVar::new(0, 1));
            let pairs = [
                (x.clone(), y.clone()),
                (ring.add(&x, &ring.one()), ring.mul(&y, &y)?),
                (ring.sub(&ring.mul(&x, &y)?, &ring.integer(3)), ring.add(&x1, &y)),
                (ring.integer(p as i64 + 1), x.clone()),
            ];
            let mut failures = 0;
            for (f, g) in &pairs {
                if !verify_product_rule(&ring, f, g)?.holds() {
                    failures += 1;
                }
            }
            Ok((failures == 0, format!("{} pairs, {failures} failures", pairs.len())))
        }));
        if p == 2 {
            let cfg = config.clone();
            checks.push(check("p=2 product formula", "p=2".into(), move || {
                let r = verify_p2_product_formula(&cfg.theta_ring(2)?)?;
                Ok((r.holds(), difference_detail(&r.difference.to_string())))
            }));
        }
    }
    checks
}

fn difference_detail(diff: &str) -> String {
    if diff == "0" {
        "difference 0".into()
    } else {
        format!("difference {diff}")
    }
}

fn sum_checks(config: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for &p in &config.primes {
        checks.push(check("telescoping sum", format!("p={p}"), move || {
            let t = telescoping_sum(p)?;
            let minus_one = t.as_integer().is_some_and(|c| *c == (-1).into());
            Ok((minus_one, format!("T = {t}")))
        }));
        checks.push(check("theta sum divisibility", format!("p={p}"), move || {
            let s = theta_sum_divisibility(p)?;
            let detail = format!(
                "S(t) = {}, divisible by p: {}",
                s.poly.display("t"),
                s.divisible
            );
            Ok((s.divisible == (p % 2 == 1), detail))
        }));
    }
    checks
}

fn obstruction_checks(config: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    let sign = config.additivity_sign;
    for &p in &config.primes {
        for k in config.levels() {
            checks.push(check("frobenius lifts", format!("p={p} k={k}"), move || {
                let r = obstruction_report(p, k)?;
                let failing = r.candidates.iter().filter(|c| !c.divisible).count();
                let mut detail = format!(
                    "{}: {failing} of {} candidates fail",
                    r.conclusion,
                    r.candidates.len()
                );
                if r.informational {
                    detail.push_str(" (informational)");
                    return Ok((true, detail));
                }
                let ok = r.conclusion == Conclusion::NoThetaStructure && r.all_candidates_fail();
                Ok((ok, detail))
            }));
            if p != 2 {
                checks.push(check("contradiction", format!("p={p} k={k}"), move || {
                    let r = contradiction_report(p, k, sign)?;
                    Ok((r.consistent && r.established, r.equation))
                }));
            }
        }
        if p == 2 {
            let n = config.precision;
            checks.push(check("quartic search", format!("p=2 N={n}"), move || {
                let r = p2_quartic_search(n)?;
                let detail = format!(
                    "theta(-1) = {} vs {}; {} candidates, {} solutions",
                    r.lhs,
                    r.relation,
                    r.candidates_checked,
                    r.solutions.len()
                );
                Ok((r.no_solution() && r.parity_witness, detail))
            }));
        }
    }
    checks.extend(sum_checks(config));
    checks
}

fn tower_checks(config: &RunConfig) -> Vec<Check> {
    let mut checks = Vec::new();
    for &p in &config.primes {
        for k in config.levels() {
            checks.push(check("tower", format!("p={p} k={k}"), move || {
                let t = build_tower(p, k)?;
                Ok((true, t.to_string()))
            }));
            checks.push(check("cyclotomic iso", format!("p={p} k={k}"), move || {
                let r = verify_cyclotomic_iso(p, k)?;
                let mut detail = format!(
                    "rank {} (expected {})",
                    r.flattened_degree, r.expected_degree
                );
                if r.expected_degree <= 8 {
                    detail.push_str(&format!(", modulus {}", r.flattened_modulus.display("y")));
                }
                Ok((r.holds(), detail))
            }));
            checks.push(check("drinfeld divisor", format!("p={p} k={k}"), move || {
                let r = drinfeld_divisibility(p, k)?;
                let detail = format!(
                    "quotient one: {}, remainder zero: {}",
                    r.quotient_is_one, r.remainder_is_zero
                );
                Ok((r.quotient_is_one && r.remainder_is_zero, detail))
            }));
            checks.push(check("level homomorphism", format!("p={p} k={k}"), move || {
                let r = verify_level_homomorphism(p, k)?;
                let detail = format!(
                    "{} pairs ({}), {} failures",
                    r.pairs_checked,
                    if r.exhaustive { "exhaustive" } else { "sampled" },
                    r.failures.len()
                );
                Ok((r.holds(), detail))
            }));
        }
    }
    checks
}

fn report(config: &RunConfig, checks: Vec<Check>) -> SuiteReport {
    SuiteReport {
        config: config.clone(),
        records: execute(checks),
    }
}

pub fn cmd_identities(config: &RunConfig) -> SuiteReport {
    report(config, identity_checks(config))
}

pub fn cmd_obstruction(config: &RunConfig) -> SuiteReport {
    report(config, obstruction_checks(config))
}

pub fn cmd_sum(config: &RunConfig) -> SuiteReport {
    report(config, sum_checks(config))
}

pub fn cmd_tower(config: &RunConfig) -> SuiteReport {
    report(config, tower_checks(config))
}

pub fn cmd_all(config: &RunConfig) -> SuiteReport {
    let mut checks = identity_checks(config);
    checks.extend(obstruction_checks(config));
    checks.extend(tower_checks(config));
    report(config, checks)
}

pub fn run(config: &RunConfig) -> SuiteReport {
    match config.command {
        Command::Identities => cmd_identities(config),
        Command::Obstruction => cmd_obstruction(config),
        Command::Sum => cmd_sum(config),
        Command::Tower => cmd_tower(config),
        Command::All => cmd_all(config),
    }
}

/// Parse arguments, run, emit the report, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let config = RunConfig::from_cli(&cli);
    let report = run(&config);
    let rendered = match cli.options.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    let written = match &cli.options.out {
        Some(path) => std::fs::write(path, &rendered),
        None => std::io::stdout().write_all(rendered.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("thetaring: cannot write report: {e}");
        return EXIT_USAGE;
    }
    report.exit_code()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> std::result::Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("thetaring").chain(args.iter().copied()))
    }

    #[test]
    fn defaults() {
        let cli = parse(&["all"]).unwrap();
        assert_eq!(RunConfig::from_cli(&cli), RunConfig::new(Command::All));
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = parse(&["tower", "--primes", "3,2,3", "--max-level", "1"]).unwrap();
        let c = RunConfig::from_cli(&cli);
        assert_eq!(c.primes, vec![2, 3]);
        assert_eq!(c.max_level, 1);
        assert_eq!(c.command, Command::Tower);
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            &["identities", "--primes", "4"][..],
            &["identities", "--primes", "x"],
            &["tower", "--max-level", "0"],
            &["obstruction", "--precision", "9"],
            &["all", "--monomial-cap", "0"],
            &["all", "--format", "xml"],
            &["frobnicate"],
        ] {
            let err = parse(args).unwrap_err();
            assert!(err.use_stderr(), "{args:?}");
        }
        assert_eq!(main_with_args(["thetaring", "identities", "--primes", "4"]), EXIT_USAGE);
    }

    #[test]
    fn flip_flag_negates_sign() {
        let cli = parse(&["all", "--flip-additivity-sign"]).unwrap();
        assert_eq!(RunConfig::from_cli(&cli).additivity_sign, -ADDITIVITY_SIGN);
    }

    #[test]
    fn identities_minimal_run() {
        let mut c = RunConfig::new(Command::Identities);
        c.primes = vec![3];
        c.summands = 2;
        let r = cmd_identities(&c);
        assert!(r.passed(), "{}", r.to_text());
        assert!(r.records.iter().any(|x| x.name == "additivity"));
    }

    #[test]
    fn resource_cap_skips() {
        let mut c = RunConfig::new(Command::Identities);
        c.primes = vec![5];
        c.summands = 4;
        c.monomial_cap = 5;
        let r = cmd_identities(&c);
        assert!(r.passed());
        assert!(r.count(Status::Skipped) > 0);
    }

    #[test]
    fn tower_reports_first_stage() {
        let mut c = RunConfig::new(Command::Tower);
        c.primes = vec![3];
        c.max_level = 1;
        let r = cmd_tower(&c);
        assert!(r.passed());
        assert!(r.records[0].detail.contains("g1(y) = y^2 + 3*y + 3"));
    }

    #[test]
    fn json_round_trip_and_stable_order() {
        let mut c = RunConfig::new(Command::Sum);
        c.primes = vec![2, 3, 5];
        let a = cmd_sum(&c);
        let back = SuiteReport::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        let b = cmd_sum(&c);
        let key = |r: &SuiteReport| {
            r.records
                .iter()
                .map(|x| (x.name.clone(), x.parameters.clone(), x.status, x.detail.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(key(&a), key(&b));
    }

    #[test]
    fn flipped_sign_fails_identities() {
        let mut c = RunConfig::new(Command::Identities);
        c.primes = vec![3];
        c.summands = 3;
        c.additivity_sign = -ADDITIVITY_SIGN;
        let r = cmd_identities(&c);
        assert!(!r.passed());
        assert_eq!(r.exit_code(), EXIT_FAIL);
    }
}
