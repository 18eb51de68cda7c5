//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O, schema or usage error, 2 breakdown,
//! 3 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::demo::Example;
use crate::io::{read_document, read_pencil_as, write_pencil, write_result, Document, IoError, WriteOptions};
use crate::pencil::PencilSpec;
use crate::polyseq::{build_family_general, check_identities, verification_steps};
use crate::scalar::{Field, Rational, ScalarMode};
use crate::transform::{evolve, required_steps, transform, Algorithm, TransformError, Trajectory};
use crate::verify::{check_tau_formulas, isospectral_report, real_roots, result_charpoly, TauError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_BREAKDOWN: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "toda-pencil", version, about = "Subtraction-free isospectral transforms of matrix pencils")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transform a pencil document into a result document.
    Transform(TransformArgs),
    /// Transform a pencil and run every exact check on the outcome.
    Verify(VerifyArgs),
    /// Print the real eigenvalues of a pencil or result document.
    Roots(RootsArgs),
    /// Emit one of the built-in example pencils.
    Demo(DemoArgs),
    /// Dump the full evolution table as CSV.
    Trajectory(TrajectoryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    F64,
}

impl From<ModeArg> for ScalarMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => ScalarMode::Exact,
            ModeArg::F64 => ScalarMode::Float64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Auto,
    Relativistic,
    Elementary,
    Hungry,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Auto => Algorithm::Auto,
            AlgorithmArg::Relativistic => Algorithm::Relativistic,
            AlgorithmArg::Elementary => Algorithm::Elementary,
            AlgorithmArg::Hungry => Algorithm::Hungry,
        }
    }
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Pencil document, `-` for standard input.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Attach the characteristic polynomial and an exact isospectrality verdict.
    #[arg(long)]
    pub verify: bool,
    /// Force a specific evolution instead of choosing from M and epsilon.
    #[arg(long, value_enum, default_value = "auto")]
    pub algorithm: AlgorithmArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Pencil document, `-` for standard input.
    #[arg(short, long)]
    pub input: PathBuf,
    /// A result document to certify against the pencil instead of a fresh run.
    #[arg(short, long)]
    pub result: Option<PathBuf>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Pencil or result document, `-` for standard input.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Bracket width for each root.
    #[arg(long, default_value_t = 1e-10, value_parser = positive_f64)]
    pub tol: f64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Which example: 2 (bidiagonal), 3 (tridiagonal) or 4 (Hessenberg).
    #[arg(short, long, value_parser = clap::value_parser!(u8).range(2..=4))]
    pub section: u8,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    /// Pencil document, `-` for standard input.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, found `{s}`")),
    }
}

/// A failed command: its exit code and the diagnostic for standard error.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(err: IoError) -> Self {
        Failure::usage(err.to_string())
    }
}

impl From<TransformError> for Failure {
    fn from(err: TransformError) -> Self {
        let code = match err {
            TransformError::Breakdown(_) => EXIT_BREAKDOWN,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

/// What a successful command writes, plus its exit code.
struct Output {
    text: String,
    code: i32,
    note: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            code: EXIT_OK,
            note: None,
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    if path.as_os_str() == "-" {
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::usage(format!("reading standard input: {e}")))?;
    } else {
        buf = std::fs::read(path).map_err(|e| Failure::usage(format!("reading {}: {e}", path.display())))?;
    }
    Ok(buf)
}

fn emit(text: &str, output: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::usage(format!("writing {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::usage(format!("writing standard output: {e}"))),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = err.render().to_string();
            let sink: &mut dyn Write = if err.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let output_path = match &cli.command {
        Command::Transform(a) => a.output.clone(),
        Command::Verify(a) => a.output.clone(),
        Command::Roots(a) => a.output.clone(),
        Command::Demo(a) => a.output.clone(),
        Command::Trajectory(a) => a.output.clone(),
    };
    let outcome = match cli.command {
        Command::Transform(a) => cmd_transform(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Roots(a) => cmd_roots(&a),
        Command::Demo(a) => cmd_demo(&a),
        Command::Trajectory(a) => cmd_trajectory(&a),
    };
    match outcome {
        Ok(out) => {
            if let Err(f) = emit(&out.text, output_path.as_deref(), stdout) {
                let _ = writeln!(stderr, "error: {}", f.message);
                return f.code;
            }
            if let Some(note) = out.note {
                let _ = writeln!(stderr, "{note}");
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn cmd_transform(args: &TransformArgs) -> Result<Output, Failure> {
    if args.mode == ModeArg::F64 && args.verify {
        return Err(Failure::usage("--verify needs exact mode; drop --mode f64"));
    }
    let bytes = read_input(&args.input)?;
    let algorithm = Algorithm::from(args.algorithm);
    match args.mode {
        ModeArg::F64 => {
            let spec: PencilSpec<f64> = read_pencil_as(&bytes)?;
            let (result, _) = transform(&spec, algorithm)?;
            Ok(Output::ok(write_result(&result, &WriteOptions::default())))
        }
        ModeArg::Exact => {
            let spec: PencilSpec<Rational> = read_pencil_as(&bytes)?;
            let (result, _) = transform(&spec, algorithm)?;
            if !args.verify {
                return Ok(Output::ok(write_result(&result, &WriteOptions::default())));
            }
            let report = isospectral_report(&spec, &result, None);
            let (tau_ok, tau_note) = tau_verdict(&result);
            let verified = report.equal && tau_ok;
            let text = write_result(
                &result,
                &WriteOptions {
                    charpoly: Some(&report.pencil_charpoly),
                    verified: Some(verified),
                },
            );
            let mut note = tau_note;
            let mut code = EXIT_OK;
            if !verified {
                code = EXIT_VERIFY;
                let reason = if report.equal {
                    "moment formulas disagree with the output"
                } else {
                    "characteristic polynomials differ"
                };
                note = Some(format!("error: verification failed: {reason}"));
            }
            Ok(Output { text, code, note })
        }
    }
}

/// Runs the moment check where it applies. A vanishing Hankel determinant
/// means the oracle itself is undefined, which is reported but not failed.
fn tau_verdict(result: &crate::pencil::TransformResult<Rational>) -> (bool, Option<String>) {
    match check_tau_formulas(result) {
        Ok(report) => (report.all_passed(), None),
        Err(TauError::NotTridiagonal(_)) => (true, None),
        Err(err) => (true, Some(format!("note: moment check skipped: {err}"))),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<Output, Failure> {
    let spec: PencilSpec<Rational> = read_pencil_as(&read_input(&args.input)?)?;
    let (fresh, _) = transform(&spec, Algorithm::Auto)?;
    let mut text = String::new();
    let mut ok = true;

    let result = match &args.result {
        Some(path) => match read_document(&read_input(path)?)? {
            Document::Result(doc) => {
                let same = doc.result == fresh;
                ok &= same;
                let _ = writeln!(text, "result matches transform: {}", verdict(same));
                doc.result
            }
            Document::Pencil(_) => return Err(Failure::usage("--result must be a result document")),
        },
        None => fresh,
    };

    let report = isospectral_report(&spec, &result, None);
    ok &= report.equal;
    let _ = writeln!(text, "characteristic polynomial: {}", report.pencil_charpoly);
    let _ = writeln!(text, "isospectral: {}", verdict(report.equal));

    match check_tau_formulas(&result) {
        Ok(tau) => {
            ok &= tau.all_passed();
            let _ = writeln!(text, "moment formulas: {} ({} checks)", verdict(tau.all_passed()), tau.checks.len());
        }
        Err(TauError::NotTridiagonal(_)) => {
            let _ = writeln!(text, "moment formulas: skipped (M > 1)");
        }
        Err(err) => {
            let _ = writeln!(text, "moment formulas: skipped ({err})");
        }
    }

    match evolve(&spec, verification_steps(spec.n, spec.m, &spec.epsilon)) {
        Ok(traj) => {
            let family = build_family_general(&traj);
            let identities = check_identities(&family, &traj, &result);
            ok &= identities.all_passed();
            let _ = writeln!(text, "polynomial identities: {}", verdict(identities.all_passed()));
            for line in identities.to_string().lines() {
                let _ = writeln!(text, "  {line}");
            }
        }
        Err(partial) => {
            let _ = writeln!(text, "polynomial identities: skipped ({})", partial.breakdown);
        }
    }
    let _ = writeln!(text, "verified: {ok}");
    Ok(Output {
        text,
        code: if ok { EXIT_OK } else { EXIT_VERIFY },
        note: None,
    })
}

fn cmd_roots(args: &RootsArgs) -> Result<Output, Failure> {
    let charpoly = match read_document(&read_input(&args.input)?)? {
        Document::Pencil(spec) => crate::verify::pencil_charpoly(&spec),
        Document::Result(doc) => result_charpoly(&doc.result),
    };
    let report = real_roots(&charpoly, args.tol);
    let mut text = String::new();
    for root in &report.roots {
        if root.multiplicity == 1 {
            let _ = writeln!(text, "{}", root.value);
        } else {
            let _ = writeln!(text, "{} (multiplicity {})", root.value, root.multiplicity);
        }
    }
    if report.non_isolated() > 0 {
        let _ = writeln!(
            text,
            "non-simple: {} of {} roots are repeated or complex ({} complex)",
            report.non_isolated(),
            report.degree,
            report.complex_count
        );
    }
    Ok(Output::ok(text))
}

fn cmd_demo(args: &DemoArgs) -> Result<Output, Failure> {
    let example = Example::from_number(args.section)
        .ok_or_else(|| Failure::usage(format!("no example {}", args.section)))?;
    Ok(Output::ok(write_pencil(&example.spec())))
}

fn cmd_trajectory(args: &TrajectoryArgs) -> Result<Output, Failure> {
    let bytes = read_input(&args.input)?;
    match args.mode {
        ModeArg::Exact => trajectory_csv::<Rational>(&bytes),
        ModeArg::F64 => trajectory_csv::<f64>(&bytes),
    }
}

fn trajectory_csv<S: Field>(bytes: &[u8]) -> Result<Output, Failure> {
    let spec: PencilSpec<S> = read_pencil_as(bytes)?;
    match evolve(&spec, required_steps(&spec.epsilon, spec.m)) {
        Ok(traj) => Ok(Output::ok(format_trajectory(&traj))),
        Err(partial) => Ok(Output {
            text: format_trajectory(&partial.trajectory),
            code: EXIT_BREAKDOWN,
            note: Some(format!("error: {}", partial.breakdown)),
        }),
    }
}

/// CSV with header `k,n,q,e,f,d`, one row per completed step and position.
/// Values absent at a level are left empty.
pub fn format_trajectory<S: Field>(traj: &Trajectory<S>) -> String {
    let cell = |v: Option<&S>| v.map(ToString::to_string).unwrap_or_default();
    let mut out = String::from("k,n,q,e,f,d\n");
    for k in 0..traj.steps() {
        for n in 0..traj.n {
            let _ = writeln!(
                out,
                "{k},{n},{},{},{},{}",
                cell(traj.q.get(k, n)),
                cell(traj.e.get(k, n)),
                cell(traj.f.get(k, n)),
                cell(traj.d.get(k, n)),
            );
        }
    }
    out
}
