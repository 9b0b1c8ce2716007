//! Linear state-space model `λx = Ax + Bu, y = Cx + Du`.
//!
//! `λ` is either differentiation or the forward shift; nothing in this crate
//! depends on which.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZsfError};
use crate::matcore::{Mat, Tolerances};

/// A real LTI system with `l_x` states, `l_u` inputs and `l_y` outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
}

fn check_finite(what: &'static str, m: &Mat) -> Result<()> {
    for (col, column) in m.column_iter().enumerate() {
        for (row, v) in column.iter().enumerate() {
            if !v.is_finite() {
                return Err(ZsfError::NonFinite { what, row, col });
            }
        }
    }
    Ok(())
}

fn check_shape(what: &'static str, m: &Mat, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(ZsfError::Dimension {
            what,
            expected: format!("{rows}x{cols}"),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }
    Ok(())
}

impl StateSpace {
    pub fn new(a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        let nx = a.nrows();
        if nx == 0 {
            return Err(ZsfError::Empty);
        }
        check_shape("A", &a, nx, nx)?;
        let nu = b.ncols();
        let ny = c.nrows();
        if nu == 0 || ny == 0 {
            return Err(ZsfError::Empty);
        }
        check_shape("B", &b, nx, nu)?;
        check_shape("C", &c, ny, nx)?;
        check_shape("D", &d, ny, nu)?;
        check_finite("A", &a)?;
        check_finite("B", &b)?;
        check_finite("C", &c)?;
        check_finite("D", &d)?;
        Ok(Self { a, b, c, d })
    }

    /// Strictly proper system (`D = 0`).
    pub fn strictly_proper(a: Mat, b: Mat, c: Mat) -> Result<Self> {
        let d = Mat::zeros(c.nrows(), b.ncols());
        Self::new(a, b, c, d)
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }
    pub fn b(&self) -> &Mat {
        &self.b
    }
    pub fn c(&self) -> &Mat {
        &self.c
    }
    pub fn d(&self) -> &Mat {
        &self.d
    }

    pub fn nx(&self) -> usize {
        self.a.nrows()
    }
    pub fn nu(&self) -> usize {
        self.b.ncols()
    }
    pub fn ny(&self) -> usize {
        self.c.nrows()
    }

    /// Index of the first output row of `D` with an entry above `zero_atol`.
    pub fn feedthrough_row(&self, tol: &Tolerances) -> Option<usize> {
        (0..self.ny()).find(|&i| self.d.row(i).amax() > tol.zero_atol)
    }

    pub fn has_feedthrough(&self, tol: &Tolerances) -> bool {
        self.feedthrough_row(tol).is_some()
    }

    /// Markov parameter `C A^(k-1) B` for `k ≥ 1`.
    pub fn markov(&self, k: usize) -> Mat {
        assert!(k >= 1, "Markov parameters start at k = 1");
        let mut row = self.c.clone();
        for _ in 1..k {
            row = &row * &self.a;
        }
        row * &self.b
    }

    /// State similarity `x' = P x`: returns `(PAP⁻¹, PB, CP⁻¹, D)`.
    pub fn similarity(&self, p: &Mat, tol: &Tolerances) -> Result<Self> {
        let inv = crate::matcore::solve_linear(p, &Mat::identity(self.nx(), self.nx()), tol)?.x;
        Self::new(
            p * &self.a * &inv,
            p * &self.b,
            &self.c * &inv,
            self.d.clone(),
        )
    }
}

/// Per-output relative degrees and their sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelativeDegree {
    pub per_output: Vec<usize>,
    pub total: usize,
}

impl RelativeDegree {
    pub fn new(per_output: Vec<usize>) -> Self {
        let total = per_output.iter().sum();
        Self { per_output, total }
    }

    /// Offset of output `i`'s chain inside the stacked `C̄`.
    pub fn offset(&self, i: usize) -> usize {
        self.per_output[..i].iter().sum()
    }
}

/// Input/output shape of a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemShape {
    Siso,
    SquareMimo,
    WideMimo,
    TallMimo,
}

impl std::fmt::Display for SystemShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SystemShape::Siso => "SISO",
            SystemShape::SquareMimo => "square MIMO",
            SystemShape::WideMimo => "wide MIMO",
            SystemShape::TallMimo => "tall MIMO",
        })
    }
}

pub fn classify(sys: &StateSpace) -> SystemShape {
    use std::cmp::Ordering::*;
    match (sys.nu(), sys.ny()) {
        (1, 1) => SystemShape::Siso,
        (u, y) => match u.cmp(&y) {
            Equal => SystemShape::SquareMimo,
            Greater => SystemShape::WideMimo,
            Less => SystemShape::TallMimo,
        },
    }
}

/// Relative degree of each output row.
///
/// `ρ_i` is the smallest `k` for which `C_i A^(k-1) B` is nonzero. The zero
/// test is `‖C_i A^(k-1) B‖_∞ ≤ zero_atol · ‖C_i A^(k-1)‖ · ‖B‖`, and the
/// search stops after `l_x` powers.
pub fn relative_degree(sys: &StateSpace, tol: &Tolerances) -> Result<RelativeDegree> {
    if let Some(output) = sys.feedthrough_row(tol) {
        return Err(ZsfError::NonzeroFeedthrough { output });
    }
    let b_norm = sys.b().norm();
    let mut per_output = Vec::with_capacity(sys.ny());
    for i in 0..sys.ny() {
        let mut chain = sys.c().row(i).into_owned();
        let mut found = None;
        for k in 1..=sys.nx() {
            if k > 1 {
                chain = &chain * sys.a();
            }
            let scale = chain.norm() * b_norm;
            let markov = &chain * sys.b();
            let size = markov.amax();
            if size > 0.0 && size > tol.zero_atol * scale {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => per_output.push(k),
            None => {
                return Err(ZsfError::NoRelativeDegree {
                    output: i,
                    bound: sys.nx(),
                })
            }
        }
    }
    Ok(RelativeDegree::new(per_output))
}

/// Append one integrator per input, realizing `G(s)/s` with zero feedthrough.
///
/// `A' = [A B; 0 0]`, `B' = [0; I]`, `C' = [C D]`, `D' = 0`.
pub fn dynamic_extension(sys: &StateSpace) -> StateSpace {
    let (nx, nu, ny) = (sys.nx(), sys.nu(), sys.ny());
    let n = nx + nu;
    let mut a = Mat::zeros(n, n);
    a.view_mut((0, 0), (nx, nx)).copy_from(sys.a());
    a.view_mut((0, nx), (nx, nu)).copy_from(sys.b());
    let mut b = Mat::zeros(n, nu);
    b.view_mut((nx, 0), (nu, nu)).fill_with_identity();
    let mut c = Mat::zeros(ny, n);
    c.view_mut((0, 0), (ny, nx)).copy_from(sys.c());
    c.view_mut((0, nx), (ny, nu)).copy_from(sys.d());
    StateSpace::strictly_proper(a, b, c).expect("extension of a valid system is valid")
}

fn strip_leading_zeros(p: &[f64]) -> &[f64] {
    let start = p.iter().position(|&c| c != 0.0).unwrap_or(p.len());
    &p[start..]
}

/// Controllable canonical realization of `num(s)/den(s)` (coefficients in
/// descending powers). `A` is the companion matrix of the monic denominator
/// with its coefficients on the bottom row and `B = e_n`.
pub fn controllable_canonical(num: &[f64], den: &[f64]) -> Result<StateSpace> {
    let den = strip_leading_zeros(den);
    let num = strip_leading_zeros(num);
    if den.is_empty() {
        return Err(ZsfError::ZeroPolynomial);
    }
    let n = den.len() - 1;
    if n == 0 {
        return Err(ZsfError::Dimension {
            what: "denominator degree",
            expected: ">= 1".into(),
            actual: "0".into(),
        });
    }
    let num_deg = num.len().saturating_sub(1);
    if num_deg > n {
        return Err(ZsfError::ImproperTransferFunction {
            num: num_deg,
            den: n,
        });
    }
    let lead = den[0];
    let a_coef: Vec<f64> = den.iter().map(|c| c / lead).collect();
    // Numerator padded to n + 1 descending coefficients.
    let mut b_coef = vec![0.0; n + 1 - num.len()];
    b_coef.extend(num.iter().map(|c| c / lead));

    let d = b_coef[0];
    let rem: Vec<f64> = (1..=n).map(|j| b_coef[j] - d * a_coef[j]).collect();

    let mut a = Mat::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        // power s^j sits at index n - j of the descending list
        a[(n - 1, j)] = -a_coef[n - j];
    }
    let mut b = Mat::zeros(n, 1);
    b[(n - 1, 0)] = 1.0;
    let mut c = Mat::zeros(1, n);
    for j in 0..n {
        c[(0, j)] = rem[n - 1 - j];
    }
    StateSpace::new(a, b, c, Mat::from_element(1, 1, d))
}
