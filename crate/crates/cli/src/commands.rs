//! Subcommand implementations. Each returns captured output and an exit code
//! so the binary stays a thin wrapper.

use std::fmt::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use zsf_core::matcore::{pairing_error, poly_roots};
use zsf_core::oracle::{siso_numerator, square_mimo_zero_roots};
use zsf_core::{
    dynamic_extension, invariant_zeros, transform, verify_zero_set, CMultiset, Complex64,
    StateSpace, SystemShape, Tolerances, ZsfError,
};

use crate::corpus;
use crate::document::{SystemDocument, ToleranceOverrides};
use crate::report::{self, fmt_complex, fmt_multiset, FormView};

pub mod exit {
    pub const OK: i32 = 0;
    pub const DOCUMENT: i32 = 1;
    pub const TALL: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const CHECK_FAILED: i32 = 4;
    pub const USAGE: i32 = 64;
}

#[derive(Debug, Parser)]
#[command(
    name = "zsf",
    version,
    about = "Invariant zeros of state-space systems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Default, Args)]
pub struct ToleranceFlags {
    /// Relative singular-value cutoff for rank decisions
    #[arg(long = "tol-rank", value_name = "X")]
    pub rank: Option<f64>,
    /// Absolute threshold for zero Markov parameters and feedthrough
    #[arg(long = "tol-zero", value_name = "X")]
    pub zero: Option<f64>,
    /// Tolerance for pairing and merging zeros
    #[arg(long = "tol-match", value_name = "X")]
    pub matching: Option<f64>,
}

impl ToleranceFlags {
    fn overrides(&self) -> ToleranceOverrides {
        ToleranceOverrides {
            rank_rtol: self.rank,
            zero_atol: self.zero,
            match_tol: self.matching,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the invariant zeros of a system document
    Zeros {
        file: PathBuf,
        /// Emit the full zero set as JSON
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Show the zero-subspace form and its structural residuals
    Transform {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Cross-check the zeros by rank tests and an independent oracle
    Verify {
        file: PathBuf,
        #[command(flatten)]
        tol: ToleranceFlags,
    },
    /// Run every bundled example against its expected zeros
    Corpus,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output {
            code: exit::OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Output {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

pub fn solver_exit_code(e: &ZsfError) -> i32 {
    match e {
        ZsfError::TallSystemUnsupported { .. } => exit::TALL,
        _ => exit::SOLVER,
    }
}

fn solver_failure(e: ZsfError) -> Output {
    Output::fail(solver_exit_code(&e), format!("error: {e}\n"))
}

struct Loaded {
    doc: SystemDocument,
    sys: StateSpace,
    tol: Tolerances,
}

fn load(path: &Path, flags: &ToleranceFlags) -> Result<Loaded, Output> {
    let doc = SystemDocument::load(path)
        .map_err(|e| Output::fail(exit::DOCUMENT, format!("error: {e}\n")))?;
    let tol = doc.tolerances(&flags.overrides());
    tol.validate()
        .map_err(|e| Output::fail(exit::DOCUMENT, format!("error: {e}\n")))?;
    let sys = doc
        .system()
        .map_err(|e| Output::fail(exit::DOCUMENT, format!("error: {e}\n")))?;
    Ok(Loaded { doc, sys, tol })
}

pub fn run(cli: Cli) -> Output {
    let result = match cli.command {
        Command::Zeros { file, json, tol } => load(&file, &tol).map(|l| cmd_zeros(&l, json)),
        Command::Transform { file, json, tol } => {
            load(&file, &tol).map(|l| cmd_transform(&l, json))
        }
        Command::Verify { file, tol } => load(&file, &tol).map(|l| cmd_verify(&l)),
        Command::Corpus => Ok(cmd_corpus()),
    };
    result.unwrap_or_else(|failure| failure)
}

fn cmd_zeros(l: &Loaded, json: bool) -> Output {
    match invariant_zeros(&l.sys, &l.tol) {
        Ok(zs) if json => {
            Output::ok(serde_json::to_string_pretty(&zs).expect("zero sets serialize") + "\n")
        }
        Ok(zs) => Output::ok(report::zeros_text(&l.doc.name, &zs)),
        Err(e) => solver_failure(e),
    }
}

fn cmd_transform(l: &Loaded, json: bool) -> Output {
    let extended = l.sys.has_feedthrough(&l.tol);
    let working = if extended {
        dynamic_extension(&l.sys)
    } else {
        l.sys.clone()
    };
    match transform(&working, &l.tol) {
        Ok(form) if json => Output::ok(
            serde_json::to_string_pretty(&FormView::new(&form, extended)).expect("forms serialize")
                + "\n",
        ),
        Ok(form) => Output::ok(report::transform_text(&l.doc.name, &form, extended)),
        Err(e) => solver_failure(e),
    }
}

/// Zeros from the polynomial or determinant oracle, where one applies.
pub fn oracle_zeros(
    sys: &StateSpace,
    tol: &Tolerances,
) -> Option<(&'static str, zsf_core::Result<CMultiset>)> {
    match zsf_core::classify(sys) {
        SystemShape::Siso => Some((
            "numerator roots",
            siso_numerator(sys).and_then(|n| poly_roots(&n.coeffs, tol)),
        )),
        SystemShape::SquareMimo => Some(("det Z(s) roots", square_mimo_zero_roots(sys, tol))),
        _ => None,
    }
}

/// Same count and greedy pairing within `match_tol` relative to the largest
/// magnitude involved (at least one).
pub fn agrees(computed: &[Complex64], reference: &[Complex64], match_tol: f64) -> Option<f64> {
    let err = pairing_error(computed, reference)?;
    let scale = computed
        .iter()
        .chain(reference)
        .fold(1.0f64, |a, z| a.max(z.norm()));
    (err <= match_tol * scale).then_some(err)
}

fn cmd_verify(l: &Loaded) -> Output {
    let zs = match invariant_zeros(&l.sys, &l.tol) {
        Ok(zs) => zs,
        Err(e) => return solver_failure(e),
    };
    let report = match verify_zero_set(&l.sys, &zs, &l.tol) {
        Ok(r) => r,
        Err(e) => return solver_failure(e),
    };
    let mut out = String::new();
    let mut pass = report.all_confirmed();
    let _ = writeln!(out, "system: {}", l.doc.name);
    let _ = writeln!(out, "zeros: {}", fmt_multiset(&zs.zeros));
    out.push_str("rank checks:\n");
    out.push_str(&report::checks_table(&report.checks));
    if !report.all_confirmed() {
        let list: Vec<String> = report.unconfirmed.iter().map(|z| fmt_complex(*z)).collect();
        let _ = writeln!(out, "unconfirmed: {}", list.join(", "));
    }

    let computed = zs.zeros.expanded();
    match oracle_zeros(&l.sys, &l.tol) {
        Some((label, Ok(roots))) => {
            let verdict = agrees(&computed, &roots.expanded(), l.tol.match_tol);
            pass &= verdict.is_some();
            let _ = writeln!(
                out,
                "oracle ({label}): {}  {}",
                fmt_multiset(&roots),
                verdict.map_or("MISMATCH".to_string(), |e| format!(
                    "ok (max deviation {e:.2e})"
                ))
            );
        }
        Some((label, Err(ZsfError::DegeneratePencil))) => {
            let _ = writeln!(
                out,
                "oracle ({label}): skipped, determinant vanishes identically"
            );
        }
        Some((label, Err(e))) => {
            pass = false;
            let _ = writeln!(out, "oracle ({label}): failed: {e}");
        }
        None => {
            let _ = writeln!(out, "oracle: not available for {} systems", zs.shape);
        }
    }
    if let Some(expected) = l.doc.expected() {
        let verdict = agrees(&computed, &expected, l.tol.match_tol);
        pass &= verdict.is_some();
        let _ = writeln!(
            out,
            "expected zeros: {}",
            if verdict.is_some() { "ok" } else { "MISMATCH" }
        );
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: {n}");
    }
    let _ = writeln!(out, "result: {}", if pass { "pass" } else { "FAIL" });
    Output {
        code: if pass { exit::OK } else { exit::CHECK_FAILED },
        stdout: out,
        stderr: String::new(),
    }
}

/// One row of the corpus summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusRow {
    pub name: String,
    pub shape: Option<SystemShape>,
    pub expected: Vec<Complex64>,
    pub computed: Result<CMultiset, String>,
    pub pass: bool,
}

pub fn corpus_rows() -> Vec<CorpusRow> {
    corpus::documents()
        .into_iter()
        .map(|doc| {
            let tol = doc.tolerances(&ToleranceOverrides::default());
            let expected = doc.expected().unwrap_or_default();
            let sys = doc.system().expect("bundled documents are valid");
            let computed = invariant_zeros(&sys, &tol).map_err(|e| e.to_string());
            let pass = computed
                .as_ref()
                .is_ok_and(|zs| agrees(&zs.zeros.expanded(), &expected, tol.match_tol).is_some());
            CorpusRow {
                name: doc.name.clone(),
                shape: computed.as_ref().ok().map(|zs| zs.shape),
                expected,
                computed: computed.map(|zs| zs.zeros),
                pass,
            }
        })
        .collect()
}

fn cmd_corpus() -> Output {
    let rows = corpus_rows();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:<12} {:<24} {:<24} result",
        "example", "shape", "expected", "computed"
    );
    for row in &rows {
        let expected: Vec<String> = row.expected.iter().map(|z| fmt_complex(*z)).collect();
        let computed = match &row.computed {
            Ok(set) => fmt_multiset(set),
            Err(e) => format!("error: {e}"),
        };
        let _ = writeln!(
            out,
            "{:<10} {:<12} {:<24} {:<24} {}",
            row.name,
            row.shape.map_or("-".to_string(), |s| s.to_string()),
            expected.join(", "),
            computed,
            if row.pass { "pass" } else { "FAIL" }
        );
    }
    let passed = rows.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} passed", rows.len());
    Output {
        code: if passed == rows.len() {
            exit::OK
        } else {
            exit::CHECK_FAILED
        },
        stdout: out,
        stderr: String::new(),
    }
}
