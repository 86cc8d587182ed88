//! Batch front-end: spectra, region audits, weight certification,
//! simulation runs, and the verification suite.
//!
//! Exit codes: 0 ok, 1 condition/certification failure, 2 validation
//! error, 3 blow-up.

mod config;

use clap::{Args, Parser, Subcommand};
use rdtoeplitz::error::Error;
use rdtoeplitz::lyapunov::{
    check_condition, theta_search, Certificate, LyapunovConfig, ThetaSearch,
};
use rdtoeplitz::regions::{boundary_compat, enumerate_regions, membership};
use rdtoeplitz::simulate::{run, write_csv, RunSpec};
use rdtoeplitz::spectral::{decompose, ToeplitzSystem};
use rdtoeplitz::verify;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_CONDITION: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "rdtoeplitz",
    about = "Spectra, invariant regions, Lyapunov certificates, and 1-D simulations \
             for m-component reaction-diffusion systems with tridiagonal symmetric \
             Toeplitz diffusion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArgs {
    /// Number of components (>= 2)
    #[arg(short = 'm', long)]
    m: usize,
    /// Diagonal diffusion coefficient (> 0)
    #[arg(short = 'a', long)]
    a: f64,
    /// Off-diagonal coupling coefficient (> 0)
    #[arg(short = 'b', long)]
    b: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Print eigenvalues in both orders and the parabolicity verdict
    Spectrum(SystemArgs),
    /// Enumerate the 2^m regions; optionally audit data and boundary vectors
    Regions {
        /// Number of components (2..=16 for printing)
        #[arg(short = 'm', long)]
        m: usize,
        /// Comma-separated initial data vector to test for membership
        #[arg(long)]
        u0: Option<String>,
        /// Comma-separated boundary data vector to test for compatibility
        #[arg(long)]
        beta: Option<String>,
        /// Margin tolerance for the cone tests
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Search for positivity-certifying weights and write the certificate
    Certify {
        #[command(flatten)]
        sys: SystemArgs,
        /// Polynomial degree (>= 2)
        #[arg(short = 'p', long)]
        p: u32,
        /// Maximum number of weight vectors to test
        #[arg(long, default_value_t = 50_000)]
        budget: usize,
        /// Certificate output file (stdout if omitted)
        #[arg(short = 'o', long)]
        out: Option<String>,
    },
    /// Run a simulation from a key = value configuration file
    Simulate {
        /// Configuration file
        #[arg(short = 'c', long)]
        config: String,
        /// CSV output path
        #[arg(short = 'o', long, default_value = "run.csv")]
        out: String,
    },
    /// Run the acceptance suite and print one line per criterion
    VerifyAll,
}

fn parse_vector(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| format!("bad number `{}`", t.trim()))
        })
        .collect()
}

fn validation_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_VALIDATION)
}

fn cmd_spectrum(args: &SystemArgs) -> ExitCode {
    let sys = match ToeplitzSystem::new(args.m, args.a, args.b) {
        Ok(sys) => sys,
        Err(e) => return validation_error(&e.to_string()),
    };
    let dec = decompose(&sys);
    println!("{:>4}  {:>18}  {:>18}", "l", "lambda", "lambda_ascending");
    for l in 0..args.m {
        println!(
            "{:>4}  {:>18.12}  {:>18.12}",
            l + 1,
            dec.eigenvalues[l],
            dec.eigenvalues_ascending[l]
        );
    }
    let lhs = 2.0 * args.b * (std::f64::consts::PI / (args.m as f64 + 1.0)).cos();
    if sys.is_parabolic() {
        println!(
            "verdict: PARABOLIC (2 b cos(pi/(m+1)) = {lhs:.6} < a = {:.6})",
            args.a
        );
        ExitCode::from(EXIT_OK)
    } else {
        println!(
            "verdict: NOT PARABOLIC (2 b cos(pi/(m+1)) = {lhs:.6} >= a = {:.6})",
            args.a
        );
        ExitCode::from(EXIT_CONDITION)
    }
}

fn cmd_regions(m: usize, u0: Option<String>, beta: Option<String>, tol: f64) -> ExitCode {
    if m > 16 {
        return validation_error("region enumeration output is capped at m = 16");
    }
    let regions = match enumerate_regions(m) {
        Ok(r) => r,
        Err(e) => return validation_error(&e.to_string()),
    };
    // the sine transform depends only on m; any valid coefficients do
    let dec = decompose(&ToeplitzSystem::new(m, 1.0, 0.25).expect("valid system"));

    let u0 = match u0.map(|t| parse_vector(&t)).transpose() {
        Ok(v) => v,
        Err(e) => return validation_error(&format!("--u0: {e}")),
    };
    let beta = match beta.map(|t| parse_vector(&t)).transpose() {
        Ok(v) => v,
        Err(e) => return validation_error(&format!("--beta: {e}")),
    };
    for v in [&u0, &beta].into_iter().flatten() {
        if v.len() != m {
            return validation_error(&format!("expected {m} components, got {}", v.len()));
        }
    }

    for (code, spec) in regions.iter().enumerate() {
        let mut line = format!("{code:>5}  {spec}");
        if let Some(u0) = &u0 {
            let rep = membership(spec, &dec, u0, tol).expect("dimensions checked");
            line.push_str(&format!(
                "  u0: {} (min margin {:.3e})",
                if rep.inside { "inside" } else { "outside" },
                rep.min_margin()
            ));
        }
        if let Some(beta) = &beta {
            let rep = boundary_compat(spec, &dec, beta, tol).expect("dimensions checked");
            line.push_str(&format!(
                "  beta: {} (min margin {:.3e})",
                if rep.inside {
                    "compatible"
                } else {
                    "incompatible"
                },
                rep.min_margin()
            ));
        }
        println!("{line}");
    }
    ExitCode::from(EXIT_OK)
}

fn cmd_certify(args: &SystemArgs, p: u32, budget: usize, out: Option<String>) -> ExitCode {
    let sys = match ToeplitzSystem::new(args.m, args.a, args.b) {
        Ok(sys) => sys,
        Err(e) => return validation_error(&e.to_string()),
    };
    if !sys.is_parabolic() {
        return validation_error("system is not parabolic");
    }
    if p < 2 {
        return validation_error("degree must be >= 2 (second derivatives are undefined below)");
    }
    let dec = decompose(&sys);
    let search = match theta_search(&dec, p, budget) {
        Ok(s) => s,
        Err(e) => return validation_error(&e.to_string()),
    };
    match search {
        ThetaSearch::Found(cfg) => {
            let cert = Certificate::build(&sys, &dec, &cfg).expect("certificate for found config");
            let text = cert.to_string();
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                        return validation_error(&format!("cannot write `{path}`: {e}"));
                    }
                    println!("certificate written to {path}");
                    let thetas: Vec<String> =
                        cert.thetas.iter().map(|t| format!("{t:.6}")).collect();
                    println!("theta = {}", thetas.join(", "));
                    println!("min K over all tuples = {:.6e}", cert.min_k);
                }
                None => println!("{text}"),
            }
            ExitCode::from(EXIT_OK)
        }
        ThetaSearch::Exhausted {
            best_min_k,
            evaluated,
            ..
        } => {
            eprintln!(
                "certification failed: no passing weights within {evaluated} evaluations; \
                 tightest margin {best_min_k:.6e}"
            );
            ExitCode::from(EXIT_CONDITION)
        }
    }
}

fn cmd_simulate(config_path: &str, out: &str) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return validation_error(&format!("cannot read `{config_path}`: {e}")),
    };
    let cfg = match config::build_run_config(&text) {
        Ok(c) => c,
        Err(e) => return validation_error(&e),
    };
    if !cfg.sys.is_parabolic() {
        return validation_error("system is not parabolic");
    }
    let dec = decompose(&cfg.sys);
    let lyapunov = match cfg.theta {
        config::ThetaChoice::Auto => match theta_search(&dec, cfg.degree, 50_000) {
            Ok(ThetaSearch::Found(found)) => found,
            Ok(ThetaSearch::Exhausted { best_min_k, .. }) => {
                eprintln!(
                    "error: automatic weight search failed (tightest margin {best_min_k:.3e})"
                );
                return ExitCode::from(EXIT_CONDITION);
            }
            Err(e) => return validation_error(&e.to_string()),
        },
        config::ThetaChoice::Explicit(thetas) => {
            let lyap = match LyapunovConfig::new(cfg.degree, thetas) {
                Ok(l) => l,
                Err(e) => return validation_error(&e.to_string()),
            };
            match check_condition(&dec, &lyap) {
                Ok(report) if report.satisfied => lyap,
                Ok(report) => {
                    let failure = report.first_failure.expect("failure recorded");
                    eprintln!(
                        "error: positivity condition failed at tuple {:?} level {} (K = {:.3e})",
                        failure.tuple, failure.level, failure.value
                    );
                    return ExitCode::from(EXIT_CONDITION);
                }
                Err(e) => return validation_error(&e.to_string()),
            }
        }
    };

    let spec = RunSpec {
        sys: cfg.sys,
        region: cfg.region,
        reaction: cfg.reaction,
        bc: cfg.bc,
        lyapunov,
        mesh: cfg.mesh,
        t_final: cfg.t_final,
        dt: cfg.dt,
        sample_every: cfg.sample_every,
        initial: cfg.initial,
    };
    let result = match run(&spec) {
        Ok(r) => r,
        Err(e @ Error::RegionMembershipFailed(_)) => {
            eprintln!("abort: region membership failed ({e})");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(e @ Error::BoundaryIncompatible(_)) => {
            eprintln!("abort: boundary compatibility failed ({e})");
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(e @ Error::ConditionFailed(_)) => {
            eprintln!("abort: positivity condition failed ({e})");
            return ExitCode::from(EXIT_CONDITION);
        }
        Err(e) => return validation_error(&e.to_string()),
    };

    let mut buf = Vec::new();
    if let Err(e) = write_csv(&result, spec.sys.m(), &mut buf) {
        return validation_error(&format!("csv formatting failed: {e}"));
    }
    if let Err(e) = std::fs::write(out, &buf) {
        return validation_error(&format!("cannot write `{out}`: {e}"));
    }

    let last = result.samples.last().expect("at least the initial sample");
    println!("csv written to {out} ({} rows)", result.samples.len());
    println!(
        "final t = {:.6}, steps = {}, L = {:.6e}, supnorm = {:.6e}",
        last.t, result.steps, last.l, last.supnorm
    );
    let minw: Vec<String> = result
        .min_signed_w
        .iter()
        .map(|v| format!("{v:.3e}"))
        .collect();
    println!("min signed w per component: {}", minw.join(", "));
    if let Some(fit) = result.gronwall {
        println!(
            "gronwall fit: C6 = {:.6}, C8 = {:.6} (max violation {:.2e})",
            fit.c6, fit.c8, fit.max_violation
        );
    }
    match result.blow_up {
        Some(t_max) => {
            println!("BLOW-UP detected: T_max = {t_max:.6}");
            ExitCode::from(EXIT_BLOW_UP)
        }
        None => ExitCode::from(EXIT_OK),
    }
}

fn cmd_verify_all() -> ExitCode {
    let results = verify::run_all();
    let mut all_pass = true;
    for r in &results {
        println!("{}", r.line());
        all_pass &= r.passed;
    }
    if all_pass {
        println!("all {} criteria passed", results.len());
        ExitCode::from(EXIT_OK)
    } else {
        println!("FAILURES present");
        ExitCode::from(EXIT_CONDITION)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Spectrum(args) => cmd_spectrum(&args),
        Command::Regions { m, u0, beta, tol } => cmd_regions(m, u0, beta, tol),
        Command::Certify {
            sys,
            p,
            budget,
            out,
        } => cmd_certify(&sys, p, budget, out),
        Command::Simulate { config, out } => cmd_simulate(&config, &out),
        Command::VerifyAll => cmd_verify_all(),
    }
}
