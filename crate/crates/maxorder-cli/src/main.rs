//! Command-line surface: single-prime queries, record scans, construction
//! verification, and the bound evaluator.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use maxorder::construction::{
    find_split_prime, theorem_bound, verify_halving_argument, verify_identities, xi_poly,
    BoundConstants, BoundMode,
};
use maxorder::modmath::primes_up_to;
use maxorder::scan::{self, ScanConfig, TableFormat};
use maxorder::{construction, CurveQ};

/// Named aliases for the seven tabulated curves.
const CURVE_ALIASES: &[(&str, i64, i64)] = &[
    ("x3+x", 1, 0),
    ("x3-x", -1, 0),
    ("x3+1", 0, 1),
    ("cm7", -385_875, -113_447_250),
    ("x3+x+1", 1, 1),
    ("t6", -13_392, -1_080_432),
    ("x0_11", -7, 6),
];

fn parse_curve(s: &str) -> Result<CurveQ, String> {
    let (a, b) = match CURVE_ALIASES.iter().find(|(name, _, _)| *name == s) {
        Some(&(_, a, b)) => (a, b),
        None => {
            let (a, b) = s.split_once(',').ok_or_else(|| {
                format!("expected \"A,B\" or one of the curve aliases, got {s:?}")
            })?;
            (
                a.trim().parse::<i64>().map_err(|e| format!("bad A: {e}"))?,
                b.trim().parse::<i64>().map_err(|e| format!("bad B: {e}"))?,
            )
        }
    };
    CurveQ::new(a, b).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Markdown,
    Latex,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Json => TableFormat::Json,
            FormatArg::Markdown => TableFormat::Markdown,
            FormatArg::Latex => TableFormat::Latex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Unconditional,
    Grh,
}

#[derive(Parser)]
#[command(
    name = "maxorder",
    version,
    about = "Maximal-order point statistics for elliptic curves over F_p"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute r(E, p) and the group structure at a single prime.
    Rofp {
        /// Curve as "A,B" or a named alias (x3+x, x3-x, x3+1, cm7, x3+x+1, t6, x0_11).
        #[arg(long, value_parser = parse_curve)]
        curve: CurveQ,
        /// Good-reduction prime p >= 5.
        #[arg(long)]
        p: u64,
        /// Emit a single JSON object instead of human text.
        #[arg(long)]
        json: bool,
        /// Seed for the point-sampling RNG.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Scan primes below pmax and print the record table.
    Records {
        #[arg(long, value_parser = parse_curve)]
        curve: CurveQ,
        /// Scan all good-reduction primes p < pmax.
        #[arg(long)]
        pmax: u64,
        /// Rows below this prime feed the running maximum but are not shown.
        #[arg(long = "pmin-display", default_value_t = 100)]
        pmin_display: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads (default: MAXORDER_THREADS or available parallelism).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Verify the polynomial identities, the splitting-degree property, and
    /// the halving argument at a found split prime.
    VerifyConstruction {
        #[arg(long, value_parser = parse_curve)]
        curve: CurveQ,
        /// Check identities and factor degrees for j = 0..jmax.
        #[arg(long, default_value_t = 10)]
        jmax: u64,
        /// Force r(E, p) > N at the found split prime.
        #[arg(long = "N", default_value_t = 2)]
        n: u64,
        /// Upper limit of the split-prime search.
        #[arg(long, default_value_t = 100_000)]
        pmax: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Evaluate the split-prime upper bound for a given N.
    Bounds {
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Unconditional)]
        mode: ModeArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.cmd {
        Cmd::Rofp {
            curve,
            p,
            json,
            seed,
        } => {
            let rc = maxorder::curve::reduce_curve(&curve, p).map_err(|e| e.to_string())?;
            let info = maxorder::curve::group_structure(&rc, seed);
            let r = scan::r_of_p(&curve, p, seed).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::json!({
                        "p": p, "r": r, "n": info.n, "L": info.l, "M": info.m,
                        "a_p": info.trace, "supersingular": info.supersingular,
                    })
                );
            } else {
                println!(
                    "p={p} r={r} n={} L={} M={} a_p={} supersingular={}",
                    info.n, info.l, info.m, info.trace, info.supersingular
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Records {
            curve,
            pmax,
            pmin_display,
            format,
            seed,
            threads,
        } => {
            if pmax < 5 || pmin_display < 5 {
                return Err("pmax and pmin-display must be at least 5".into());
            }
            let threads = threads
                .or_else(|| {
                    std::env::var("MAXORDER_THREADS")
                        .ok()
                        .and_then(|v| v.parse().ok())
                })
                .unwrap_or_else(|| {
                    std::thread::available_parallelism()
                        .map(|n| n.get())
                        .unwrap_or(1)
                });
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let cfg = ScanConfig {
                curve,
                pmax,
                pmin_display,
                rng_seed: seed,
            };
            let table = pool.install(|| scan::reproduce_table(&cfg, format.into()));
            print!("{table}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::VerifyConstruction {
            curve,
            jmax,
            n,
            pmax,
            seed,
        } => Ok(run_verify_construction(&curve, jmax, n, pmax, seed)),
        Cmd::Bounds { n, mode } => {
            let k = BoundConstants::default();
            let (mode, label) = match mode {
                ModeArg::Unconditional => (BoundMode::Unconditional, "log log p"),
                ModeArg::Grh => (BoundMode::Grh, "log p"),
            };
            let bound = theorem_bound(n, &k, mode);
            println!("N = {n}");
            println!("bound on {label}: {bound}");
            println!("bound / N = {}", bound / n as f64);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify_construction(curve: &CurveQ, jmax: u64, n: u64, pmax: u64, seed: u64) -> ExitCode {
    let mut failed = false;

    let rep = verify_identities(curve, jmax);
    report_line(
        &format!("identities (j <= {jmax})"),
        rep.pass,
        &rep.failures.join("; "),
    );
    failed |= !rep.pass;

    // Splitting-degree property: at 50 good primes where f splits
    // completely, the splitting degree of every xi_j divides 4.
    let mut checked = 0usize;
    let mut degree_failures = Vec::new();
    let f = construction::f_poly(curve);
    for p in primes_up_to(1_000_000) {
        if checked >= 50 {
            break;
        }
        if p < 5 || !curve.good_reduction_at(p) {
            continue;
        }
        if !construction::splits_completely(&f, p).unwrap_or(false) {
            continue;
        }
        checked += 1;
        for j in 0..=jmax {
            let degs = construction::factor_degrees_mod_p(&xi_poly(curve, j), p).expect("monic");
            // lcm of the degrees divides 4 iff every degree does
            if !degs.iter().all(|&d| 4 % d == 0) {
                degree_failures.push(format!("p={p} j={j} degrees {degs:?}"));
            }
        }
    }
    let degrees_pass = degree_failures.is_empty() && checked == 50;
    report_line(
        &format!("splitting degrees ({checked} split primes, j <= {jmax})"),
        degrees_pass,
        &degree_failures.join("; "),
    );
    failed |= !degrees_pass;

    match find_split_prime(curve, n, pmax) {
        Some(p) => {
            println!("split prime for N = {n}: p = {p}");
            match verify_halving_argument(curve, p, n, seed) {
                Ok(rep) => {
                    report_line(
                        &format!(
                            "halving argument at p = {p} (r(E,p) = {} > {n})",
                            rep.r_value
                        ),
                        rep.pass,
                        &rep.failures.join("; "),
                    );
                    failed |= !rep.pass;
                }
                Err(e) => {
                    report_line(
                        &format!("halving argument at p = {p}"),
                        false,
                        &e.to_string(),
                    );
                    failed = true;
                }
            }
        }
        None => {
            report_line(
                &format!("split prime for N = {n} below {pmax}"),
                false,
                "none found",
            );
            failed = true;
        }
    }

    if failed {
        println!("verify-construction: FAIL");
        ExitCode::from(1)
    } else {
        println!("verify-construction: PASS");
        ExitCode::SUCCESS
    }
}

fn report_line(what: &str, pass: bool, detail: &str) {
    if pass {
        println!("{what}: pass");
    } else if detail.is_empty() {
        println!("{what}: FAIL");
    } else {
        println!("{what}: FAIL ({detail})");
    }
}
