//! Command-line front end.
//!
//! Every command reads its inputs from text files (`-` for standard input),
//! writes one deterministic rendering to standard output or `--out`, and
//! exits with 0 on success, 1 on I/O, parse or usage errors and 2 when a
//! mathematical precondition fails.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::decompositions::{
    pd_square_root_factor, peel_dense_rank1, psd_congruence_factor, signed_rank1_decomp, spectral,
    Sign,
};
use crate::definiteness::inertia;
use crate::error::{Error, Result};
use crate::factorization::{factorize_hadamard, singular_pd_witness, FactorizationResult};
use crate::operator::{op_from_congruences, op_from_hadamard_congruence, OperatorMatrix};
use crate::random::{
    random_invertible, random_pd, random_psd_of_rank, random_unit_diag_psd, split_seed,
};
use crate::symmetric::SymMatrix;
use crate::textio::{
    format_real, parse_operator, parse_symmetric, read_input, section, write_dense, write_operator,
    write_symmetric, write_vector,
};
use crate::tolerance::ToleranceConfig;
use crate::verification::{
    check_corollary_equivalences, classify, verify_pd_preservation, CheckOutcome, PreserverVerdict,
    DEFAULT_SAMPLES,
};

/// Condition cap for the invertible factors drawn by `generate`.
pub const GENERATE_COND_CAP: f64 = 1e3;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sympreserve",
    version,
    about = "Positive-definite preserving maps on symmetric matrices"
)]
pub struct Cli {
    #[command(flatten)]
    pub options: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Master seed for generators and sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Samples per sampled check.
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES, value_parser = parse_samples)]
    pub samples: usize,
    #[arg(long, global = true, value_parser = parse_positive)]
    pub tol_eig: Option<f64>,
    #[arg(long, global = true, value_parser = parse_positive)]
    pub tol_zero: Option<f64>,
    #[arg(long, global = true, value_parser = parse_positive)]
    pub tol_residual: Option<f64>,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Options {
    pub fn tolerances(&self) -> ToleranceConfig {
        let mut tol = ToleranceConfig::default();
        if let Some(v) = self.tol_eig {
            tol = tol.with_tol_eig(v);
        }
        if let Some(v) = self.tol_zero {
            tol = tol.with_tol_zero(v);
        }
        if let Some(v) = self.tol_residual {
            tol = tol.with_tol_residual(v);
        }
        tol
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Factor an operator as T(A) = W (H ∘ A) Wᵗ.
    Factorize { operator: PathBuf },
    /// Classify an operator as a preserver.
    Classify { operator: PathBuf },
    /// Report sampled preservation checks, one finding per line.
    Verify { operator: PathBuf },
    /// Write a seeded random matrix or operator.
    Generate {
        #[arg(value_enum)]
        kind: GenerateKind,
        /// Matrix order.
        #[arg(short, long)]
        n: usize,
        /// Rank of the PSD matrix, or of H for `hadamard-op`; defaults to n.
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Write a singular PSD matrix whose image is positive definite.
    Witness { operator: PathBuf },
    /// Decompose a symmetric matrix.
    Decompose {
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = DecomposeKind::Spectral)]
        kind: DecomposeKind,
    },
    /// Write the entrywise product of two symmetric matrices.
    Hadamard { a: PathBuf, b: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    /// Positive definite matrix.
    Pd,
    /// PSD matrix of rank `--rank`.
    PsdRank,
    /// Single congruence A ↦ W A Wᵗ.
    CongruenceOp,
    /// Hadamard congruence A ↦ W (H ∘ A) Wᵗ with unit-diagonal PSD H.
    HadamardOp,
    /// Sum of two congruences.
    SumCongruenceOp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DecomposeKind {
    Spectral,
    Signed,
    PsdFactor,
    PdFactor,
    Peel,
    Inertia,
}

fn parse_samples(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(v) => Err(format!("must be positive and finite, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

/// Parses `args` (including the program name), runs the command and returns its exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                EXIT_INPUT
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli) {
        Ok(text) => match emit(&cli.options, &text, stdout) {
            Ok(()) => EXIT_OK,
            Err(e) => report(stderr, &e),
        },
        Err(e) => report(stderr, &e),
    }
}

fn report(stderr: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_PRECONDITION
    }
}

fn emit(options: &Options, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match &options.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the parsed command and returns its rendering.
pub fn execute(cli: &Cli) -> Result<String> {
    let options = &cli.options;
    let tol = options.tolerances();
    tol.validate()?;
    match &cli.command {
        Command::Factorize { operator } => {
            let t = load_operator(operator)?;
            Ok(render_factorization(&factorize_hadamard(&t, &tol)?))
        }
        Command::Classify { operator } => {
            let t = load_operator(operator)?;
            Ok(render_verdict(
                &classify(&t, options.samples, options.seed, &tol),
                options,
            ))
        }
        Command::Verify { operator } => {
            let t = load_operator(operator)?;
            cmd_verify(&t, options, &tol)
        }
        Command::Generate { kind, n, rank } => cmd_generate(*kind, *n, *rank, options.seed),
        Command::Witness { operator } => {
            let t = load_operator(operator)?;
            let f = factorize_hadamard(&t, &tol)?;
            Ok(write_symmetric(&singular_pd_witness(&f, &tol)?))
        }
        Command::Decompose { matrix, kind } => {
            let a = load_symmetric(matrix)?;
            cmd_decompose(&a, *kind, &tol)
        }
        Command::Hadamard { a, b } => {
            let a = load_symmetric(a)?;
            let b = load_symmetric(b)?;
            Ok(write_symmetric(&a.hadamard(&b)?))
        }
    }
}

fn load_operator(path: &Path) -> Result<OperatorMatrix> {
    parse_operator(&read_input(path)?)
}

fn load_symmetric(path: &Path) -> Result<SymMatrix> {
    parse_symmetric(&read_input(path)?)
}

fn real_line(x: f64) -> String {
    format!("{}\n", format_real(x))
}

fn render_factorization(f: &FactorizationResult) -> String {
    let mut out = String::new();
    section(&mut out, "W:", &write_dense(&f.w));
    section(&mut out, "H:", &write_symmetric(&f.h));
    section(&mut out, "RESIDUAL:", &real_line(f.residual));
    if let Some(s) = &f.standard {
        section(&mut out, "W_STD:", &write_dense(&s.w_std));
        section(&mut out, "U:", &write_vector(&s.sign_values()));
    }
    out
}

fn render_verdict(verdict: &PreserverVerdict, options: &Options) -> String {
    let mut out = format!("VERDICT: {}\n", verdict.tag());
    let _ = writeln!(
        out,
        "EVIDENCE: sampled PD preservation, {} samples per check, seed {}",
        options.samples, options.seed
    );
    match verdict {
        PreserverVerdict::StandardForm(f) => {
            let s = f
                .standard
                .as_ref()
                .expect("standard-form verdict carries its form");
            section(&mut out, "W_STD:", &write_dense(&s.w_std));
            section(&mut out, "U:", &write_vector(&s.sign_values()));
            section(&mut out, "RESIDUAL:", &real_line(s.residual));
        }
        PreserverVerdict::HadamardForm {
            factorization,
            witness,
        } => {
            section(&mut out, "W:", &write_dense(&factorization.w));
            section(&mut out, "H:", &write_symmetric(&factorization.h));
            section(&mut out, "RESIDUAL:", &real_line(factorization.residual));
            section(&mut out, "WITNESS:", &write_symmetric(witness));
        }
        PreserverVerdict::NotRankOneImages(ranks) => {
            let ranks: Vec<String> = ranks.iter().map(usize::to_string).collect();
            section(&mut out, "IMAGE_RANKS:", &format!("{}\n", ranks.join(" ")));
        }
        PreserverVerdict::NotPdPreserving(a) => {
            section(&mut out, "COUNTEREXAMPLE:", &write_symmetric(a));
        }
        PreserverVerdict::Inconclusive(reason) => {
            section(&mut out, "REASON:", &format!("{reason}\n"));
        }
    }
    out
}

/// Path for a counterexample written next to `out`.
pub fn counterexample_path(out: &Path, check: &str) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".{check}.txt"));
    out.with_file_name(name)
}

fn check_line(
    out: &mut String,
    inline: &mut Vec<(&'static str, SymMatrix)>,
    c: &CheckOutcome,
    options: &Options,
) -> Result<()> {
    let _ = write!(out, "CHECK {} {} evidence={}", c.name, c.status, c.evidence);
    if c.samples > 0 {
        let _ = write!(
            out,
            " samples={} passed={} indeterminate={}",
            c.samples, c.passed, c.indeterminate
        );
    }
    if let Some(a) = &c.counterexample {
        match &options.out {
            Some(path) => {
                let file = counterexample_path(path, c.name);
                std::fs::write(&file, write_symmetric(a))?;
                let _ = write!(out, " counterexample={}", file.display());
            }
            None => {
                out.push_str(" counterexample=inline");
                inline.push((c.name, a.clone()));
            }
        }
    }
    if !c.note.is_empty() {
        let _ = write!(out, " note={:?}", c.note);
    }
    out.push('\n');
    Ok(())
}

fn cmd_verify(t: &OperatorMatrix, options: &Options, tol: &ToleranceConfig) -> Result<String> {
    let mut out = String::new();
    let mut inline = Vec::new();
    let preservation = verify_pd_preservation(t, options.samples, options.seed, tol)?;
    check_line(&mut out, &mut inline, &preservation.pd, options)?;
    check_line(&mut out, &mut inline, &preservation.psd, options)?;
    if preservation.passes() {
        let corollary = check_corollary_equivalences(t, options.samples, options.seed, tol)?;
        for c in &corollary.checks {
            check_line(&mut out, &mut inline, c, options)?;
        }
    } else {
        out.push_str("SKIP corollary checks: PD preservation failed\n");
    }
    let _ = writeln!(
        out,
        "NOTE sampled checks are evidence, not proof (seed {})",
        options.seed
    );
    for (name, a) in inline {
        section(
            &mut out,
            &format!("COUNTEREXAMPLE {name}:"),
            &write_symmetric(&a),
        );
    }
    Ok(out)
}

fn cmd_generate(kind: GenerateKind, n: usize, rank: Option<usize>, seed: u64) -> Result<String> {
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    let rank = rank.unwrap_or(n);
    let factor = |k: u64| random_invertible(n, split_seed(seed, k), GENERATE_COND_CAP);
    Ok(match kind {
        GenerateKind::Pd => write_symmetric(&random_pd(n, seed)?),
        GenerateKind::PsdRank => write_symmetric(&random_psd_of_rank(n, rank, seed)?),
        GenerateKind::CongruenceOp => write_operator(&op_from_congruences(&[factor(0)?])?),
        GenerateKind::HadamardOp => {
            let h = random_unit_diag_psd(n, rank, split_seed(seed, 1))?;
            write_operator(&op_from_hadamard_congruence(&factor(0)?, &h)?)
        }
        GenerateKind::SumCongruenceOp => {
            write_operator(&op_from_congruences(&[factor(0)?, factor(1)?])?)
        }
    })
}

fn cmd_decompose(a: &SymMatrix, kind: DecomposeKind, tol: &ToleranceConfig) -> Result<String> {
    let mut out = String::new();
    match kind {
        DecomposeKind::Spectral => {
            let s = spectral(a, tol)?;
            section(&mut out, "EIGENVALUES:", &write_vector(&s.lambda));
            section(&mut out, "EIGENVECTORS:", &write_dense(&s.q));
        }
        DecomposeKind::Signed => {
            let d = signed_rank1_decomp(a, tol)?;
            let _ = writeln!(out, "TERMS: {}", d.terms.len());
            for term in &d.terms {
                let sign = match term.sign {
                    Sign::Plus => "+",
                    Sign::Minus => "-",
                };
                section(
                    &mut out,
                    &format!("TERM {sign}"),
                    &write_vector(&term.vector),
                );
            }
        }
        DecomposeKind::PsdFactor => {
            let (w, r) = psd_congruence_factor(a, tol)?;
            let _ = writeln!(out, "RANK: {r}");
            section(&mut out, "W:", &write_dense(&w));
        }
        DecomposeKind::PdFactor => {
            section(
                &mut out,
                "L:",
                &write_dense(&pd_square_root_factor(a, tol)?),
            );
        }
        DecomposeKind::Peel => {
            let p = peel_dense_rank1(a, tol)?;
            section(&mut out, "X:", &write_vector(&p.x));
            section(&mut out, "REMAINDER:", &write_symmetric(&p.remainder));
        }
        DecomposeKind::Inertia => {
            let _ = writeln!(out, "INERTIA: {}", inertia(a, tol)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("sympreserve").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_INPUT);
        assert_eq!(
            run_capture(&["classify", "x", "--samples", "0"]).0,
            EXIT_INPUT
        );
        assert_eq!(
            run_capture(&["classify", "x", "--tol-eig", "-1"]).0,
            EXIT_INPUT
        );
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("factorize"));
    }

    #[test]
    fn missing_file_exits_one() {
        let (code, _, err) = run_capture(&["factorize", "/nonexistent/op.txt"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.starts_with("error:"));
    }

    #[test]
    fn generate_is_deterministic() {
        let a = run_capture(&["generate", "hadamard-op", "-n", "3", "--seed", "4"]);
        let b = run_capture(&["generate", "hadamard-op", "-n", "3", "--seed", "4"]);
        assert_eq!(a.0, EXIT_OK);
        assert_eq!(a.1, b.1);
        assert!(parse_operator(&a.1).is_ok());
        let c = run_capture(&["generate", "hadamard-op", "-n", "3", "--seed", "5"]);
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn infeasible_rank_is_a_precondition_failure() {
        assert_eq!(
            run_capture(&["generate", "psd-rank", "-n", "3", "--rank", "4"]).0,
            EXIT_PRECONDITION
        );
    }

    #[test]
    fn counterexample_path_sits_next_to_output() {
        assert_eq!(
            counterexample_path(Path::new("/tmp/r/report.txt"), "pd_preservation"),
            PathBuf::from("/tmp/r/report.txt.pd_preservation.txt")
        );
    }
}
