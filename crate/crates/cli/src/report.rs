//! Text and JSON rendering of solver results.

use std::fmt::Write;

use serde::{Deserialize, Serialize};
use zsf_core::{
    CMultiset, Complex64, FormWarning, Mat, RelativeDegree, SelectionMethod, StructureResiduals,
    ZeroSet, ZeroSubspaceForm,
};

/// Shortest decimal rendering with at most nine fractional digits.
pub fn fmt_real(x: f64) -> String {
    let s = format!("{x:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    let im = fmt_real(z.im.abs());
    if im == "0" {
        return fmt_real(z.re);
    }
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {im}i", fmt_real(z.re))
}

/// Values with multiplicity expanded, comma separated.
pub fn fmt_multiset(set: &CMultiset) -> String {
    if set.is_empty() {
        return "(none)".to_string();
    }
    set.expanded()
        .into_iter()
        .map(fmt_complex)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn fmt_matrix(name: &str, m: &Mat) -> String {
    let mut out = format!("{name} ({}x{}):\n", m.nrows(), m.ncols());
    if m.is_empty() {
        out.push_str("  (empty)\n");
        return out;
    }
    let cells: Vec<Vec<String>> = m
        .row_iter()
        .map(|r| r.iter().map(|&v| fmt_real(round_small(v))).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    for row in cells {
        out.push(' ');
        for cell in row {
            let _ = write!(out, " {cell:>width$}");
        }
        out.push('\n');
    }
    out
}

fn round_small(v: f64) -> f64 {
    if v.abs() < 5e-13 {
        0.0
    } else {
        (v * 1e6).round() / 1e6
    }
}

fn fmt_rho(rho: &RelativeDegree) -> String {
    let per: Vec<String> = rho.per_output.iter().map(usize::to_string).collect();
    format!("{} (per output: {})", rho.total, per.join(", "))
}

fn fmt_warning(w: &FormWarning) -> String {
    match w {
        FormWarning::IllConditioned { cond } => {
            format!("transformation is ill-conditioned (cond {cond:.3e})")
        }
    }
}

pub fn zeros_text(name: &str, zs: &ZeroSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system: {name}");
    let _ = writeln!(out, "shape: {}", zs.shape);
    let _ = writeln!(out, "relative degree: {}", fmt_rho(&zs.relative_degree));
    let _ = writeln!(out, "extended: {}", if zs.extended { "yes" } else { "no" });
    let _ = writeln!(out, "zeros: {}", fmt_multiset(&zs.zeros));
    if zs.zeros != zs.candidates {
        let _ = writeln!(out, "candidates: {}", fmt_multiset(&zs.candidates));
    }
    if zs.shape == zsf_core::SystemShape::WideMimo {
        out.push_str(&checks_table(&zs.checks));
    }
    for w in &zs.warnings {
        let _ = writeln!(out, "warning: {}", fmt_warning(w));
    }
    for n in &zs.notes {
        let _ = writeln!(out, "note: {n}");
    }
    out
}

pub fn checks_table(checks: &[zsf_core::ZeroCheck]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "  {:<24} {:>4} {:>6} {:>8}  confirmed",
        "value", "mult", "rank", "generic"
    );
    for c in checks {
        let _ = writeln!(
            out,
            "  {:<24} {:>4} {:>6} {:>8}  {}",
            fmt_complex(c.value),
            c.multiplicity,
            c.rank_at_zero,
            c.rank_nominal,
            if c.confirmed { "yes" } else { "no" }
        );
    }
    out
}

fn rows(m: &Mat) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// JSON shape of [`ZeroSubspaceForm`]; matrices are arrays of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormView {
    pub t: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub a_eta: Vec<Vec<f64>>,
    pub a_eta_xi: Vec<Vec<f64>>,
    pub a_xi_eta: Vec<Vec<f64>>,
    pub a_xi: Vec<Vec<f64>>,
    pub b_xi: Vec<Vec<f64>>,
    pub c_xi: Vec<Vec<f64>>,
    pub l_z: usize,
    pub relative_degree: RelativeDegree,
    pub cond_t: f64,
    pub inverse_residual: f64,
    pub selection: SelectionView,
    pub warnings: Vec<FormWarning>,
    pub residuals: StructureResiduals,
    /// Set when input integrators were appended before transforming.
    pub extended: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionView {
    pub b_z: Vec<Vec<f64>>,
    pub method: SelectionMethod,
    pub null_rows: usize,
    pub residual: f64,
}

impl FormView {
    pub fn new(form: &ZeroSubspaceForm, extended: bool) -> Self {
        FormView {
            t: rows(&form.t),
            s: rows(&form.s),
            a: rows(&form.a),
            b: rows(&form.b),
            c: rows(&form.c),
            a_eta: rows(&form.a_eta),
            a_eta_xi: rows(&form.a_eta_xi),
            a_xi_eta: rows(&form.a_xi_eta),
            a_xi: rows(&form.a_xi),
            b_xi: rows(&form.b_xi),
            c_xi: rows(&form.c_xi),
            l_z: form.l_z,
            relative_degree: form.rho.clone(),
            cond_t: form.cond_t,
            inverse_residual: form.inverse_residual,
            selection: SelectionView {
                b_z: rows(&form.selection.b_z),
                method: form.selection.method,
                null_rows: form.selection.null_rows,
                residual: form.selection.residual,
            },
            warnings: form.warnings.clone(),
            residuals: form.structure_residuals(),
            extended,
        }
    }
}

fn method_name(m: SelectionMethod) -> &'static str {
    match m {
        SelectionMethod::FullNullSpace => "full null space",
        SelectionMethod::RankGreedy => "rank-greedy",
        SelectionMethod::OrthogonalCompletion => "orthogonal completion",
    }
}

pub fn transform_text(name: &str, form: &ZeroSubspaceForm, extended: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "system: {name}");
    if extended {
        out.push_str("note: dynamic extension applied before transforming\n");
    }
    let _ = writeln!(out, "relative degree: {}", fmt_rho(&form.rho));
    let _ = writeln!(out, "l_z: {}", form.l_z);
    let _ = writeln!(
        out,
        "B_z: {} ({} null-space row(s))",
        method_name(form.selection.method),
        form.selection.null_rows
    );
    let _ = writeln!(out, "cond(T): {:.3e}", form.cond_t);
    let _ = writeln!(out, "max |TS - I|: {:.3e}", form.inverse_residual);
    for (label, m) in [
        ("T", &form.t),
        ("S", &form.s),
        ("A_eta", &form.a_eta),
        ("A_eta_xi", &form.a_eta_xi),
        ("A_xi_eta", &form.a_xi_eta),
        ("A_xi", &form.a_xi),
        ("B_form", &form.b),
        ("C_form", &form.c),
    ] {
        out.push_str(&fmt_matrix(label, m));
    }
    let r = form.structure_residuals();
    out.push_str("structure residuals:\n");
    for (label, v) in [
        ("B eta rows", r.b_eta),
        ("B chain rows", r.b_chain),
        ("A_xi_eta chain rows", r.a_xi_eta),
        ("A_xi shift rows", r.a_xi_shift),
        ("C selector", r.c_selector),
    ] {
        let _ = writeln!(out, "  {label:<20} {v:.3e}");
    }
    let _ = writeln!(out, "  {:<20} {:.3e}", "max / |A|", r.max_relative());
    for w in &form.warnings {
        let _ = writeln!(out, "warning: {}", fmt_warning(w));
    }
    out
}
