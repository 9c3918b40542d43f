//! Command-line front end: validate, structure, compile, analyze, fourier,
//! empirical, fluctuation, selftest.
//!
//! Exit codes: 0 success, 1 domain error (invalid transducer, ill-posed
//! recursion, numeric failure), 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use digitflux::dirichlet::{self, SpecialFunctionContext};
use digitflux::empirical::{self, DistributionCheck};
use digitflux::fixtures;
use digitflux::rational::{format_rat, to_f64};
use digitflux::recursion;
use digitflux::spectral::{self, AsymptoticReport};
use digitflux::transducer::{self, Transducer};

#[derive(Parser)]
#[command(
    name = "digitflux",
    version,
    about = "Analyze sequences defined by digit-reading transducers",
    long_about = "Analyzes sequences defined as the summed output of finite transducers \
                  reading q-ary digit expansions: compiles recursion systems into \
                  transducers, computes exact and asymptotic moments, classifies the \
                  limit law, and evaluates the Fourier coefficients of the periodic \
                  fluctuation in the expected value."
)]
struct Cli {
    /// Number of worker threads for internal parallelism (0 = automatic).
    /// Results do not depend on this value.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a transducer file is complete, deterministic and
    /// subsequential.
    Validate { file: PathBuf },
    /// Report accessibility, final components, periods and reset sequence.
    Structure { file: PathBuf },
    /// Compile a recursion system (.rec) into a transducer file.
    Compile {
        file: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Full asymptotic report: e_T, v_T, spectral gap, limit law.
    Analyze {
        file: PathBuf,
        #[command(flatten)]
        out: OutArg,
    },
    /// Fourier coefficients of the periodic fluctuation of the mean (d = 1).
    Fourier {
        file: PathBuf,
        /// Number of coefficients K (computes c_k for |k| <= K).
        #[arg(long, default_value_t = 23)]
        terms: usize,
        /// Working precision in decimal digits.
        #[arg(long, default_value_t = 30)]
        precision: u32,
        /// Number of explicit Dirichlet-series terms R.
        #[arg(long, default_value_t = 65536)]
        depth: usize,
        /// Also emit samples of the partial series: `lo:hi:step` in
        /// log_q N units.
        #[arg(long)]
        grid: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Exact prefix moments at one cutoff N.
    Empirical {
        file: PathBuf,
        /// Cutoff N (d = 1: any u64; d >= 2: per-axis, at most 2^20).
        #[arg(long, conflicts_with = "max_exp")]
        n: Option<u64>,
        /// Use N = q^E instead of an explicit cutoff.
        #[arg(long, value_name = "E")]
        max_exp: Option<u32>,
        /// Also run the Kolmogorov-Smirnov check against the predicted
        /// mixture law.
        #[arg(long)]
        ks: bool,
        #[command(flatten)]
        out: OutArg,
    },
    /// Empirical fluctuation samples over a grid of log_q N values.
    Fluctuation {
        file: PathBuf,
        /// Grid specification lo:hi:step in log_q N units.
        #[arg(long)]
        grid: String,
        /// When set, also evaluate the partial Fourier series with this many
        /// terms at each sample point (third CSV column).
        #[arg(long)]
        terms: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the bundled-corpus self tests and print a pass/fail table.
    Selftest,
}

#[derive(Args)]
struct OutArg {
    /// Write the report to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // results are deterministic regardless of the pool size
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

/// Loads a transducer from either format; `.rec` files are compiled first.
fn load(path: &Path) -> anyhow::Result<Transducer> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    let t = if path.extension().is_some_and(|e| e == "rec") {
        let sys = recursion::parse_recursion(&text)?;
        let (t, _) = recursion::compile(&sys)?;
        t
    } else {
        transducer::parse(&text)?
    };
    let violations = transducer::validate(&t);
    if !violations.is_empty() {
        let mut msg = String::from("transducer is invalid:");
        for v in violations {
            let _ = write!(msg, "\n  {v}");
        }
        anyhow::bail!(msg);
    }
    Ok(t)
}

fn emit(out: &OutArg, text: &str) -> anyhow::Result<()> {
    match &out.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        anyhow::bail!("grid must be lo:hi:step");
    }
    let lo: f64 = parts[0].parse()?;
    let hi: f64 = parts[1].parse()?;
    let step: f64 = parts[2].parse()?;
    if step <= 0.0 || hi < lo {
        anyhow::bail!("grid must satisfy lo <= hi and step > 0");
    }
    let mut grid = Vec::new();
    let mut x = lo;
    while x <= hi + 1e-12 {
        grid.push(x);
        x += step;
    }
    Ok(grid)
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(&file)?;
            let t = transducer::parse(&text)?;
            let violations = transducer::validate(&t);
            if violations.is_empty() {
                println!("ok: {} states, q = {}, d = {}", t.state_count, t.q, t.d);
                Ok(())
            } else {
                for v in &violations {
                    println!("violation: {v}");
                }
                anyhow::bail!("{} violation(s)", violations.len());
            }
        }
        Command::Structure { file } => {
            let t = load(&file)?;
            let st = transducer::structure(&t);
            println!("accessible_states {}", st.accessible.len());
            println!("scc_count {}", st.scc_list.len());
            println!("final_components {}", st.final_components.len());
            for (j, p) in st.component_periods.iter().enumerate() {
                println!(
                    "component {} states {} period {}",
                    j,
                    st.final_component_states(j).len(),
                    p
                );
            }
            println!("final_period {}", st.final_period);
            println!("finally_connected {}", st.finally_connected);
            println!("finally_aperiodic {}", st.finally_aperiodic);
            match &st.reset_sequence {
                Some(word) => {
                    let digits: Vec<String> = word
                        .iter()
                        .map(|s| {
                            s.0.iter()
                                .map(|d| d.to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        })
                        .collect();
                    println!("reset_sequence {}", digits.join(" "));
                }
                None => println!("reset_sequence none"),
            }
            println!("nondiff_structural {}", st.nondiff_structural);
            Ok(())
        }
        Command::Compile { file, out } => {
            anyhow::ensure!(
                file.extension().is_some_and(|e| e == "rec"),
                "compile expects a .rec recursion file"
            );
            let text = std::fs::read_to_string(&file)?;
            let sys = recursion::parse_recursion(&text)?;
            let (t, report) = recursion::compile(&sys)?;
            let mut s = String::new();
            let _ = writeln!(s, "# compiled from {}", file.display());
            let _ = writeln!(s, "# initial-value classes: {}", report.classes.len());
            s.push_str(&transducer::serialize(&t));
            emit(&out, &s)
        }
        Command::Analyze { file, out } => {
            let t = load(&file)?;
            let report = spectral::analyze(&t)?;
            emit(&out, &render_analysis(&t, &report))
        }
        Command::Fourier {
            file,
            terms,
            precision,
            depth,
            grid,
            out,
        } => {
            let t = load(&file)?;
            let ctx = SpecialFunctionContext {
                precision_digits: precision,
                explicit_terms: depth,
                ..Default::default()
            };
            let result = dirichlet::fourier(&t, terms, &ctx)?;
            let mut s = String::new();
            let _ = writeln!(s, "period {}", result.period);
            let _ = writeln!(s, "k,re,im,err");
            for c in &result.coefficients {
                let _ = writeln!(
                    s,
                    "{},{:.12e},{:.12e},{:.2e}",
                    c.k, c.value.re, c.value.im, c.error_estimate
                );
            }
            if let Some(spec) = grid {
                let _ = writeln!(s, "x,psi1_partial");
                for x in parse_grid(&spec)? {
                    let _ = writeln!(s, "{:.6},{:.12e}", x, result.psi1(x));
                }
            }
            emit(&out, &s)
        }
        Command::Empirical {
            file,
            n,
            max_exp,
            ks,
            out,
        } => {
            let t = load(&file)?;
            let n = match (n, max_exp) {
                (Some(n), _) => n,
                (None, Some(e)) => (t.q as u64)
                    .checked_pow(e)
                    .ok_or_else(|| anyhow::anyhow!("q^{e} exceeds u64"))?,
                (None, None) => anyhow::bail!("one of --n or --max-exp is required"),
            };
            let summary = empirical::prefix_moments(&t, n)?;
            let report = spectral::analyze(&t)?;
            let mut s = String::new();
            let _ = writeln!(s, "n {}", summary.n);
            let _ = writeln!(s, "count {}", summary.count);
            let _ = writeln!(s, "sum {}", format_rat(&summary.sum));
            let _ = writeln!(s, "sum_sq {}", format_rat(&summary.sum_sq));
            let _ = writeln!(s, "mean {}", format_rat(&summary.mean()));
            let _ = writeln!(s, "variance {}", format_rat(&summary.variance()));
            let _ = writeln!(s, "psi1 {:.12}", summary.psi1(&report.e_t, t.q));
            if ks {
                match empirical::distribution_check(&t, &report, n)? {
                    DistributionCheck::Quantitative {
                        ks,
                        reference_scale,
                        ..
                    } => {
                        let _ = writeln!(s, "N,ks_distance,reference_scale");
                        let _ = writeln!(s, "{n},{ks:.6},{reference_scale:.6}");
                    }
                    DistributionCheck::DegenerateSupport { support, .. } => {
                        let _ = writeln!(
                            s,
                            "ks_refused degenerate (all-b_j-positive assumption fails)"
                        );
                        for (value, count) in support {
                            let _ = writeln!(s, "support {} {}", format_rat(&value), count);
                        }
                    }
                }
            }
            emit(&out, &s)
        }
        Command::Fluctuation {
            file,
            grid,
            terms,
            out,
        } => {
            let t = load(&file)?;
            let report = spectral::analyze(&t)?;
            let grid = parse_grid(&grid)?;
            let rows = empirical::fluctuation_samples(&t, &report, &grid)?;
            let partial = match terms {
                Some(k) => Some(dirichlet::fourier(&t, k, &SpecialFunctionContext::default())?),
                None => None,
            };
            let mut s = String::new();
            match &partial {
                Some(_) => {
                    let _ = writeln!(s, "x,empirical_psi1,fourier_partial");
                }
                None => {
                    let _ = writeln!(s, "x,empirical_psi1");
                }
            }
            for row in rows {
                match &partial {
                    Some(f) => {
                        let _ = writeln!(
                            s,
                            "{:.8},{:.10e},{:.10e}",
                            row.x,
                            row.psi1,
                            f.psi1(row.x)
                        );
                    }
                    None => {
                        let _ = writeln!(s, "{:.8},{:.10e}", row.x, row.psi1);
                    }
                }
            }
            emit(&out, &s)
        }
        Command::Selftest => selftest(),
    }
}

fn render_analysis(t: &Transducer, report: &AsymptoticReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "q {}", t.q);
    let _ = writeln!(s, "d {}", t.d);
    let _ = writeln!(s, "states {}", t.state_count);
    let _ = writeln!(s, "final_components {}", report.components.len());
    for (j, c) in report.components.iter().enumerate() {
        let _ = writeln!(
            s,
            "component {} period {} a {} b {} lambda {}",
            j,
            c.period,
            format_rat(&c.a),
            format_rat(&c.b),
            format_rat(&c.lambda)
        );
    }
    let _ = writeln!(s, "final_period {}", report.structure.final_period);
    let _ = writeln!(s, "e_T {}", format_rat(&report.e_t));
    let _ = writeln!(s, "v_T {}", format_rat(&report.v_t));
    let _ = writeln!(s, "e_T_approx {:.12}", to_f64(&report.e_t));
    let _ = writeln!(s, "v_T_approx {:.12}", to_f64(&report.v_t));
    let _ = writeln!(s, "second_modulus {:.10}", report.second_modulus);
    if report.xi.is_infinite() {
        let _ = writeln!(s, "xi unbounded");
    } else {
        let _ = writeln!(s, "xi {:.10}", report.xi);
    }
    let _ = writeln!(s, "exact_no_error_term {}", report.exact_no_error_term);
    let _ = writeln!(s, "classification {:?}", report.classification);
    let _ = writeln!(
        s,
        "reset_sequence {}",
        report.structure.reset_sequence.is_some()
    );
    let _ = writeln!(
        s,
        "nondiff_applicable {}",
        report
            .structure
            .nondiff_applicable
            .map_or("unknown".to_string(), |b| b.to_string())
    );
    s
}

/// Offline checks over the bundled corpus; prints one line per check.
fn selftest() -> anyhow::Result<()> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {}", if ok { "pass" } else { "FAIL" }, name);
        if !ok {
            failures += 1;
        }
    };

    // corpus round-trip
    let mut roundtrip = true;
    for (name, text) in fixtures::ALL {
        if name.ends_with(".fst") {
            let t = match transducer::parse(text) {
                Ok(t) => t,
                Err(_) => {
                    roundtrip = false;
                    break;
                }
            };
            let again = transducer::parse(&transducer::serialize(&t)).ok();
            if again.as_ref() != Some(&t) {
                roundtrip = false;
            }
        }
    }
    check("corpus parse/serialize round-trip", roundtrip);

    // paperfolding constants
    let pf = fixtures::paperfolding();
    let report = spectral::analyze(&pf)?;
    check("paperfolding e_T = 8/13", format_rat(&report.e_t) == "8/13");
    check(
        "paperfolding v_T = 432/2197",
        format_rat(&report.v_t) == "432/2197",
    );
    let target = (0.7718445063f64.powi(2) + 1.1151425080f64.powi(2)).sqrt();
    check(
        "paperfolding second modulus",
        (report.second_modulus - target).abs() < 1e-6,
    );
    check(
        "paperfolding nondiff applicability",
        report.structure.nondiff_applicable == Some(true),
    );

    // six-periodic example
    let six = fixtures::sixperiodic();
    let sixrep = spectral::analyze(&six)?;
    check("six-periodic e_T = 11/8", format_rat(&sixrep.e_t) == "11/8");
    check(
        "six-periodic final period 6",
        sixrep.structure.final_period == 6,
    );

    // degenerate guardrails
    let sf = fixtures::signflip();
    let sfrep = spectral::analyze(&sf)?;
    check(
        "signflip degenerate",
        format_rat(&sfrep.e_t) == "0"
            && format_rat(&sfrep.v_t) == "0"
            && matches!(sfrep.classification, spectral::LimitLaw::Degenerate),
    );
    check(
        "signflip refuses quantitative KS",
        matches!(
            empirical::distribution_check(&sf, &sfrep, 64)?,
            DistributionCheck::DegenerateSupport { .. }
        ),
    );

    // ill-posed detector
    let ill = recursion::parse_recursion(fixtures::ILLPOSED_REC)?;
    check(
        "ill-posed fixture rejected",
        matches!(
            recursion::compile(&ill),
            Err(recursion::CompileError::IllPosed(_))
        ),
    );

    // Delange coefficient for q = 2
    let s2 = fixtures::sumdigits(2);
    let ctx = SpecialFunctionContext::default();
    let f = dirichlet::fourier(&s2, 1, &ctx)?;
    let c0 = f.coefficient(0).unwrap().value.re;
    let lq = 2f64.ln();
    let c0_expect = 0.5 / lq * ((2.0 * std::f64::consts::PI).ln() - 1.0) - 0.75;
    check(
        "sum-of-digits c_0 (closed form)",
        (c0 - c0_expect).abs() < 1e-9,
    );

    // paperfolding c_0 reference value
    let fpf = dirichlet::fourier(&pf, 0, &ctx)?;
    check(
        "paperfolding c_0 = 1.5308151288",
        (fpf.coefficient(0).unwrap().value.re - 1.5308151288).abs() < 1e-6,
    );

    // exact moment recursion vs direct evaluation
    let mut moments_ok = true;
    for n in [1u64, 7, 255, 1024] {
        let m = empirical::prefix_moments(&pf, n)?;
        let mut sum = digitflux::rational::rat(0);
        for k in 0..n as i64 {
            sum += transducer::evaluate(&pf, &[k]);
        }
        if m.sum != sum {
            moments_ok = false;
        }
    }
    check("prefix moments match enumeration", moments_ok);

    // reset replay on paperfolding
    let st = transducer::structure(&pf);
    let replay_ok = st.reset_sequence.as_ref().is_some_and(|word| {
        let mut ends = std::collections::HashSet::new();
        for &s in &st.accessible {
            let mut cur = s;
            for sym in word {
                cur = pf.step(cur, sym).0;
            }
            ends.insert(cur);
        }
        ends.len() == 1
    });
    check("paperfolding reset word verifies", replay_ok);

    if failures == 0 {
        println!("selftest: all checks passed ({} fixtures)", fixtures::ALL.len());
        Ok(())
    } else {
        anyhow::bail!("selftest: {failures} check(s) failed");
    }
}
