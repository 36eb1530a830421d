//! Command-line entry point: parse, classify, synthesize, verify, report.
//!
//! Exit codes: 0 success (solutions exist and verify), 2 no entire solution,
//! 3 invalid input (syntax errors, singular matrix, bad flags), 4
//! verification failed.

use std::ffi::OsString;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::multipoly::MAX_VARS;
use crate::parser::{parse_expr, parse_poly};
use crate::reduce::{reduce_solve_backsub, MatrixA};
use crate::report::{
    emit_report, InputEcho, MergeSummary, Report, ReportFormat, SolutionReport, Timings,
};
use crate::scalar::Precision;
use crate::structure::Classification;
use crate::synthesize::{
    enumerate_affine_merges, family_note, render_solution, solution_for_partition, synthesize,
    RenderFormat, SolutionForm,
};
use crate::verify::{
    fd_stats, numeric_verify, quadrature_convergence, symbolic_verify, GradientSource, RhsSource,
    SampleConfig, VerifyMode, VerifyReport,
};

const EXIT_OK: i32 = 0;
const EXIT_NO_SOLUTION: i32 = 2;
const EXIT_INVALID_INPUT: i32 = 3;
const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Parser)]
#[command(
    name = "holo-eikonal",
    version,
    about = "Classify, solve, and verify product-type gradient equations with polynomial exponents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the additive partition and case tag of g.
    Classify(ClassifyArgs),
    /// Classify g, construct solutions and affine-merge alternatives, verify.
    Solve(SolveArgs),
    /// Verify a provided solution (JSON) or an expression pair against g.
    Verify(VerifyArgs),
    /// Matrix pipeline: determinant gate, change of variables, solve,
    /// back-substitute, verify in matrix mode.
    Reduce(ReduceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> ReportFormat {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Text => ReportFormat::Text,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Polynomial text, or @path to a UTF-8 file (# starts a line comment).
    #[arg(long, allow_hyphen_values = true)]
    g: String,
    /// Ambient variable count (1..=64).
    #[arg(long)]
    nvars: usize,
    /// Report format on standard output.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include wall-clock timings (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of numeric verification sample points.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Polydisk radius for sampling.
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// RNG seed for sampling.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Evaluation precision in bits (53 or 256).
    #[arg(long, default_value_t = 256)]
    precision: usize,
}

impl SampleArgs {
    fn config(&self) -> Result<SampleConfig> {
        Ok(SampleConfig {
            samples: self.samples,
            radius: self.radius,
            tol: self.tol,
            seed: self.seed,
            precision: Precision::from_bits(self.precision)?,
        })
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Cap on enumerated affine-merge alternatives (1..=32).
    #[arg(long, default_value_t = 8)]
    merges: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Structured solution JSON, or @path to it.
    #[arg(long)]
    solution: Option<String>,
    /// Expression for u (may contain exp), or @path to it.
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Coefficient matrix as JSON array of arrays of scalar strings,
    /// or @path to it.
    #[arg(long)]
    matrix: String,
}

/// Run the CLI; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID_INPUT,
            };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Classify(args) => run_classify(args),
        Command::Solve(args) => run_solve(args),
        Command::Verify(args) => run_verify(args),
        Command::Reduce(args) => run_reduce(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_INVALID_INPUT
        }
    }
}

fn resolve_input(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn check_nvars(nvars: usize) -> Result<()> {
    if nvars == 0 || nvars > MAX_VARS {
        return Err(Error::InvalidInput(format!(
            "nvars must be between 1 and {MAX_VARS}"
        )));
    }
    Ok(())
}

struct StageClock {
    enabled: bool,
    start: Instant,
    last: Instant,
    stages: Vec<(String, f64)>,
}

impl StageClock {
    fn new(enabled: bool) -> Self {
        let now = Instant::now();
        StageClock {
            enabled,
            start: now,
            last: now,
            stages: Vec::new(),
        }
    }

    fn lap(&mut self, name: &str) {
        if self.enabled {
            let now = Instant::now();
            self.stages.push((
                name.to_string(),
                now.duration_since(self.last).as_secs_f64() * 1e3,
            ));
            self.last = now;
        }
    }

    fn finish(self) -> Option<Timings> {
        if self.enabled {
            Some(Timings {
                total_ms: self.start.elapsed().as_secs_f64() * 1e3,
                stages: self.stages,
            })
        } else {
            None
        }
    }
}

fn run_classify(args: ClassifyArgs) -> Result<i32> {
    check_nvars(args.common.nvars)?;
    let g_text = resolve_input(&args.common.g)?;
    let mut clock = StageClock::new(args.common.timings);
    let g = parse_poly(&g_text, args.common.nvars)?;
    clock.lap("parse");
    let (part, cls) = crate::structure::classify(&g)?;
    clock.lap("classify");
    let mut report = Report::new(InputEcho {
        command: "classify".into(),
        g: Some(g_text),
        nvars: args.common.nvars,
        ..InputEcho::default()
    });
    report.set_classification(&part, &cls);
    report.timings = clock.finish();
    print!("{}", emit_report(&report, args.common.format.into()));
    Ok(if cls.is_solvable() {
        EXIT_OK
    } else {
        EXIT_NO_SOLUTION
    })
}

/// Symbolic + numeric + quadrature/fd cross-checks for one solution.
fn verify_solution_full(
    sol: &SolutionForm,
    g: &crate::multipoly::MultiPoly,
    mode: VerifyMode<'_>,
    cfg: &SampleConfig,
) -> Result<VerifyReport> {
    let mut report = symbolic_verify(sol, g, mode)?;
    let numeric = match mode {
        VerifyMode::Plain => numeric_verify(
            GradientSource::Form(sol),
            RhsSource::Poly(g),
            sol.nvars,
            cfg,
        )?,
        VerifyMode::Matrix(a) => numeric_verify(
            GradientSource::FormMatrix(sol, a),
            RhsSource::Poly(g),
            sol.nvars,
            cfg,
        )?,
    };
    report.numeric = numeric.numeric;
    report.quadrature = Some(quadrature_convergence(
        sol,
        3,
        64,
        128,
        cfg.seed,
        Precision::P53,
    )?);
    report.fd = Some(fd_stats(sol, 2, 1e-6, cfg.seed, Precision::P53)?);
    Ok(report)
}

fn run_solve(args: SolveArgs) -> Result<i32> {
    check_nvars(args.common.nvars)?;
    if args.merges == 0 || args.merges > 32 {
        return Err(Error::InvalidInput(
            "affine merge cap must be between 1 and 32".into(),
        ));
    }
    let cfg = args.sample.config()?;
    let g_text = resolve_input(&args.common.g)?;
    let mut clock = StageClock::new(args.common.timings);
    let g = parse_poly(&g_text, args.common.nvars)?;
    clock.lap("parse");
    let syn = synthesize(&g)?;
    clock.lap("classify_synthesize");
    let mut report = Report::new(InputEcho {
        command: "solve".into(),
        g: Some(g_text),
        nvars: args.common.nvars,
        samples: Some(cfg.samples),
        radius: Some(cfg.radius),
        tol: Some(cfg.tol),
        seed: Some(cfg.seed),
        precision: Some(cfg.precision.bits()),
        merges: Some(args.merges),
        ..InputEcho::default()
    });
    report.set_classification(&syn.partition, &syn.classification);
    let Some(canonical) = syn.solution else {
        report.timings = clock.finish();
        print!("{}", emit_report(&report, args.common.format.into()));
        return Ok(EXIT_NO_SOLUTION);
    };
    let mut solutions = vec![("canonical", canonical)];
    let (merged_partitions, truncated) = enumerate_affine_merges(&syn.partition, args.merges)?;
    for part in &merged_partitions {
        solutions.push(("affine_merge", solution_for_partition(part)?));
    }
    report.merges = Some(MergeSummary {
        count: merged_partitions.len(),
        truncated,
        cap: args.merges,
    });
    clock.lap("merges");
    let mut all_pass = true;
    for (origin, sol) in &solutions {
        let verification = verify_solution_full(sol, &g, VerifyMode::Plain, &cfg)?;
        all_pass &= verification.passed();
        report.verification.push(verification);
        report.solutions.push(SolutionReport {
            origin,
            rendered: render_solution(sol, RenderFormat::Text),
            latex: render_solution(sol, RenderFormat::Latex),
            structured: sol.clone(),
            family_note: family_note(sol),
        });
    }
    clock.lap("verify");
    report.timings = clock.finish();
    print!("{}", emit_report(&report, args.common.format.into()));
    Ok(if all_pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    check_nvars(args.common.nvars)?;
    let cfg = args.sample.config()?;
    let g_text = resolve_input(&args.common.g)?;
    let nvars = args.common.nvars;
    match (&args.solution, &args.u) {
        (Some(_), Some(_)) | (None, None) => Err(Error::InvalidInput(
            "verify needs exactly one of --solution or --u".into(),
        )),
        (Some(solution_arg), None) => {
            let mut clock = StageClock::new(args.common.timings);
            let g = parse_poly(&g_text, nvars)?;
            let sol_text = resolve_input(solution_arg)?;
            let sol: SolutionForm = serde_json::from_str(&sol_text)
                .map_err(|e| Error::InvalidInput(format!("solution JSON: {e}")))?;
            if sol.nvars != nvars {
                return Err(Error::InvalidInput(format!(
                    "solution nvars {} does not match --nvars {nvars}",
                    sol.nvars
                )));
            }
            if !sol.canonical {
                return Err(Error::InvalidInput(
                    "only canonical solutions verify in plain mode; matrix-reduced \
                     solutions are verified by the reduce command"
                        .into(),
                ));
            }
            clock.lap("parse");
            let verification = verify_solution_full(&sol, &g, VerifyMode::Plain, &cfg)?;
            clock.lap("verify");
            let pass = verification.passed();
            let mut report = Report::new(InputEcho {
                command: "verify".into(),
                g: Some(g_text),
                nvars,
                samples: Some(cfg.samples),
                radius: Some(cfg.radius),
                tol: Some(cfg.tol),
                seed: Some(cfg.seed),
                precision: Some(cfg.precision.bits()),
                ..InputEcho::default()
            });
            report.solutions.push(SolutionReport {
                origin: "provided",
                rendered: render_solution(&sol, RenderFormat::Text),
                latex: render_solution(&sol, RenderFormat::Latex),
                structured: sol,
                family_note: None,
            });
            report.verification.push(verification);
            report.timings = clock.finish();
            print!("{}", emit_report(&report, args.common.format.into()));
            Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        (None, Some(u_arg)) => {
            let mut clock = StageClock::new(args.common.timings);
            let u_text = resolve_input(u_arg)?;
            let u = parse_expr(&u_text, nvars)?;
            let g = parse_expr(&g_text, nvars)?;
            clock.lap("parse");
            let verification =
                numeric_verify(GradientSource::Expr(&u), RhsSource::Expr(&g), nvars, &cfg)?;
            clock.lap("verify");
            let pass = verification.passed();
            let mut report = Report::new(InputEcho {
                command: "verify".into(),
                g: Some(g_text),
                nvars,
                u: Some(u_text),
                samples: Some(cfg.samples),
                radius: Some(cfg.radius),
                tol: Some(cfg.tol),
                seed: Some(cfg.seed),
                precision: Some(cfg.precision.bits()),
                ..InputEcho::default()
            });
            report.verification.push(verification);
            report.timings = clock.finish();
            print!("{}", emit_report(&report, args.common.format.into()));
            Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn run_reduce(args: ReduceArgs) -> Result<i32> {
    check_nvars(args.common.nvars)?;
    let cfg = args.sample.config()?;
    let g_text = resolve_input(&args.common.g)?;
    let matrix_text = resolve_input(&args.matrix)?;
    let mut clock = StageClock::new(args.common.timings);
    let g = parse_poly(&g_text, args.common.nvars)?;
    let a = MatrixA::from_json(&matrix_text)?;
    if a.n() != args.common.nvars {
        return Err(Error::InvalidInput(format!(
            "matrix size {} does not match --nvars {}",
            a.n(),
            args.common.nvars
        )));
    }
    clock.lap("parse");
    let reduction = reduce_solve_backsub(&a, &g)?;
    clock.lap("reduce");
    let mut report = Report::new(InputEcho {
        command: "reduce".into(),
        g: Some(g_text),
        nvars: args.common.nvars,
        matrix: Some(matrix_text.trim().to_string()),
        samples: Some(cfg.samples),
        radius: Some(cfg.radius),
        tol: Some(cfg.tol),
        seed: Some(cfg.seed),
        precision: Some(cfg.precision.bits()),
        ..InputEcho::default()
    });
    report.set_classification(&reduction.partition, &reduction.classification);
    if let Classification::NoEntireSolution { .. } = reduction.classification {
        if let Some(w) = &mut report.witness {
            w.detail = format!(
                "in the transformed coordinates w = (A^T)^(-1) z: {}",
                w.detail
            );
        }
    }
    let Some(sol) = reduction.solution else {
        report.timings = clock.finish();
        print!("{}", emit_report(&report, args.common.format.into()));
        return Ok(EXIT_NO_SOLUTION);
    };
    let verification = verify_solution_full(&sol, &g, VerifyMode::Matrix(&a), &cfg)?;
    clock.lap("verify");
    let pass = verification.passed();
    report.solutions.push(SolutionReport {
        origin: "reduce_backsub",
        rendered: render_solution(&sol, RenderFormat::Text),
        latex: render_solution(&sol, RenderFormat::Latex),
        structured: sol,
        family_note: None,
    });
    report.verification.push(verification);
    report.timings = clock.finish();
    print!("{}", emit_report(&report, args.common.format.into()));
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}
