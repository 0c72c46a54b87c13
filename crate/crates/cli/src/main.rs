use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use detsolve_core::detstart::Bounds;
use detsolve_core::problem::ProblemSpec;
use detsolve_core::solve::{self, Mode, SolveOptions, SolveReport, DEFAULT_PRIME};
use detsolve_core::{Error, PrimeField};
use num_bigint::BigUint;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "detsolve", version, about = "Isolated and simple points of determinantal systems over a prime field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve rank F < p, G = 0 and print the parametrization.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "auto")]
        mode: Mode,
        /// Keep only points where the Jacobian has full rank.
        #[arg(long)]
        simple: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_PRIME)]
        prime: u64,
        /// Exit with an error if any verification fails.
        #[arg(long)]
        check: bool,
        /// Write a JSON report here ("-" for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        retries: u32,
    },
    /// Print the degree profile and the bounds c, c', e, e'.
    Bounds {
        #[arg(long)]
        input: PathBuf,
    },
    /// Enumerate all points over F_Q and compare with a solve over F_Q.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        field: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of points to scan.
        #[arg(long, default_value_t = 1 << 27)]
        budget: u64,
    },
}

fn read_spec(path: &Path) -> Result<ProblemSpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ProblemSpec::parse(&text).with_context(|| format!("in {}", path.display()))
}

fn big(x: &BigUint) -> Value {
    match u64::try_from(x) {
        Ok(v) => json!(v),
        Err(_) => json!(x.to_string()),
    }
}

fn bounds_json(b: &Bounds) -> Value {
    json!({ "c": big(&b.c), "cprime": big(&b.cprime), "e": big(&b.e), "eprime": big(&b.eprime) })
}

fn report_json(r: &SolveReport) -> Result<Value> {
    let f = PrimeField::new(r.prime)?;
    let z = &r.zdp;
    Ok(json!({
        "prime": r.prime,
        "seed": r.seed,
        "mode": r.mode_used.to_string(),
        "lambda": z.lambda.iter().map(|&c| f.to_u64(c)).collect::<Vec<_>>(),
        "w": z.w.to_u64s(&f),
        "v": z.v.iter().map(|v| v.to_u64s(&f)).collect::<Vec<_>>(),
        "count": z.degree(),
        "bounds": bounds_json(&r.bounds),
        "retries": r.retries,
        "checks": {
            "residual_zero": r.checks.residual_zero,
            "simple_rank_full": r.checks.simple_rank_full,
            "count_within_bound": r.checks.count_within_bound,
        },
    }))
}

fn print_summary(r: &SolveReport) -> Result<()> {
    let f = PrimeField::new(r.prime)?;
    let z = &r.zdp;
    println!("mode: {}  prime: {}  seed: {}  retries: {}", r.mode_used, r.prime, r.seed, r.retries);
    println!("bounds: c={} c'={} e={} e'={}", r.bounds.c, r.bounds.cprime, r.bounds.e, r.bounds.eprime);
    println!("points: {}", z.degree());
    println!("w: {:?}", z.w.to_u64s(&f));
    for (i, v) in z.v.iter().enumerate() {
        println!("v{}: {:?}", i + 1, v.to_u64s(&f));
    }
    let pts = z.rational_points(&f)?;
    for p in &pts {
        let xs: Vec<i64> = p.iter().map(|&c| f.to_i64(c)).collect();
        println!("  point {xs:?}");
    }
    let rest = z.irrational_count(&f);
    if rest > 0 {
        println!("  ({rest} more over extensions of F_{})", r.prime);
    }
    let c = &r.checks;
    println!(
        "checks: residual_zero={} count_within_bound={}{}",
        c.residual_zero,
        c.count_within_bound,
        c.simple_rank_full.map_or(String::new(), |b| format!(" simple_rank_full={b}"))
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            input,
            mode,
            simple,
            seed,
            prime,
            check,
            json,
            retries,
        } => {
            let spec = read_spec(&input)?;
            let opts = SolveOptions {
                mode,
                simple,
                prime,
                seed,
                retry_budget: retries,
            };
            let report = solve::solve(&spec, &opts)?;
            match json.as_deref() {
                Some(p) if p == Path::new("-") => println!("{}", serde_json::to_string_pretty(&report_json(&report)?)?),
                Some(p) => {
                    fs::write(p, serde_json::to_string_pretty(&report_json(&report)?)? + "\n")
                        .with_context(|| format!("writing {}", p.display()))?;
                    print_summary(&report)?;
                }
                None => print_summary(&report)?,
            }
            if check && !report.checks.all_passed() {
                bail!("verification failed: {:?}", report.checks);
            }
        }
        Command::Bounds { input } => {
            let spec = read_spec(&input)?;
            let (prof, b) = solve::profile_bounds(&spec)?;
            println!("n={} p={} q={} s={}", prof.n, prof.p, prof.q, prof.s);
            println!("column degrees: {:?}", prof.cdeg);
            println!("row degrees: {:?}", prof.rdeg);
            println!("equation degrees: {:?}", prof.gdeg);
            println!("c={} c'={} e={} e'={}", b.c, b.cprime, b.e, b.eprime);
            println!("auto mode: {}", solve::choose_mode(&b));
        }
        Command::Oracle {
            input,
            field,
            seed,
            budget,
        } => {
            let spec = read_spec(&input)?;
            let opts = SolveOptions {
                prime: field,
                seed,
                ..SolveOptions::default()
            };
            let solved = match solve::solve(&spec, &opts) {
                Ok(r) => Some(r),
                Err(e @ Error::TooLarge(_)) => {
                    println!("solver skipped: {e}");
                    None
                }
                Err(e) => return Err(e.into()),
            };
            let o = solve::oracle_check(&spec, field, budget, solved.as_ref())?;
            println!("oracle points over F_{}: {}", o.prime, o.oracle_points.len());
            for p in &o.oracle_points {
                println!("  {p:?}");
            }
            if let Some(r) = &solved {
                println!(
                    "solver points: {} rational, {} over extensions (total {})",
                    o.solver_points.len(),
                    o.solver_irrational,
                    r.zdp.degree()
                );
                println!("contained: {}", o.contained);
                if !o.contained {
                    bail!("a solver point is missing from the enumeration");
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
