//! Dense matrix utilities: numerical rank, null spaces, eigenvalues,
//! polynomial roots and linear solves.
//!
//! Everything here works on `nalgebra` dynamic matrices. Rank decisions use
//! singular values sorted in decreasing order and a relative cutoff taken
//! from [`Tolerances`].

use std::cmp::Ordering;

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZsfError};

/// Real dense matrix.
pub type Mat = DMatrix<f64>;
/// Complex dense matrix.
pub type CMat = DMatrix<Complex64>;

/// Numerical thresholds shared by every stage of the computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions. The effective
    /// cutoff never drops below `max(rows, cols) * f64::EPSILON`.
    pub rank_rtol: f64,
    /// Absolute threshold for treating Markov parameters and feedthrough
    /// entries as zero (scaled by the relevant matrix norms where noted).
    pub zero_atol: f64,
    /// Tolerance used to pair and merge complex values.
    pub match_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank_rtol: 1e-10,
            zero_atol: 1e-9,
            match_tol: 1e-6,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rank_rtol) || !ok(self.zero_atol) || !ok(self.match_tol) {
            return Err(ZsfError::InvalidTolerances(format!(
                "all tolerances must be finite and positive: {self:?}"
            )));
        }
        if self.rank_rtol >= 1.0 {
            return Err(ZsfError::InvalidTolerances(format!(
                "rank_rtol must be < 1, got {}",
                self.rank_rtol
            )));
        }
        Ok(())
    }

    /// Relative singular-value cutoff for a `rows x cols` matrix.
    pub fn rank_cutoff(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rtol.max(rows.max(cols) as f64 * f64::EPSILON)
    }
}

fn svd_real(m: &Mat, compute_u: bool) -> Result<SVD<f64, nalgebra::Dyn, nalgebra::Dyn>> {
    SVD::try_new(m.clone(), compute_u, false, f64::EPSILON, 0).ok_or(ZsfError::EigenFailure)
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd = svd_real(m, false)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Singular values of a complex matrix in decreasing order.
pub fn complex_singular_values(m: &CMat) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let svd =
        SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).ok_or(ZsfError::EigenFailure)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn rank_from_sv(sv: &[f64], cutoff: f64) -> usize {
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s > cutoff * smax).count(),
        _ => 0,
    }
}

/// Number of singular values above `rank_cutoff * sigma_max`.
pub fn numerical_rank(m: &Mat, tol: &Tolerances) -> Result<usize> {
    let sv = singular_values(m)?;
    Ok(rank_from_sv(&sv, tol.rank_cutoff(m.nrows(), m.ncols())))
}

/// Complex counterpart of [`numerical_rank`], same cutoff rule.
pub fn complex_rank(m: &CMat, tol: &Tolerances) -> Result<usize> {
    let sv = complex_singular_values(m)?;
    Ok(rank_from_sv(&sv, tol.rank_cutoff(m.nrows(), m.ncols())))
}

/// 2-norm condition number; infinite for singular input.
pub fn condition_number(m: &Mat) -> Result<f64> {
    let sv = singular_values(m)?;
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => Ok(hi / lo),
        (Some(_), Some(_)) => Ok(f64::INFINITY),
        _ => Ok(1.0),
    }
}

/// Orthonormal basis (as rows) of the left null space of `m`.
///
/// For an `n x k` matrix of rank `r` this returns `(n - r) x n` with
/// `N * m ≈ 0` and `N * N^T = I`.
pub fn left_null_basis(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    let n = m.nrows();
    if n == 0 {
        return Err(ZsfError::Empty);
    }
    // Pad to at least square so the SVD hands back a full n x n U.
    let padded = if m.ncols() < n {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (n, m.ncols())).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = svd_real(&padded, true)?;
    let u = svd.u.as_ref().ok_or(ZsfError::EigenFailure)?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sorted: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let rank = rank_from_sv(&sorted, tol.rank_cutoff(m.nrows(), m.ncols()));
    if rank == n {
        return Err(ZsfError::EmptyNullSpace {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    // U may have more than n columns only if m was wide; the trailing
    // left singular vectors in the first n are what we want.
    let null_cols: Vec<usize> = order[rank..]
        .iter()
        .copied()
        .filter(|&i| i < u.ncols())
        .collect();
    let mut basis = Mat::zeros(null_cols.len(), n);
    for (row, &col) in null_cols.iter().enumerate() {
        basis.row_mut(row).copy_from(&u.column(col).transpose());
    }
    Ok(basis)
}

/// Orthonormal basis (as rows) of the orthogonal complement of the row
/// space of `m`, i.e. of `{x : m x = 0}`. Returns a `0 x n` matrix when
/// `m` already has full column rank.
pub fn row_space_complement(m: &Mat, tol: &Tolerances) -> Result<Mat> {
    match left_null_basis(&m.transpose(), tol) {
        Ok(b) => Ok(b),
        Err(ZsfError::EmptyNullSpace { .. }) => Ok(Mat::zeros(0, m.ncols())),
        Err(e) => Err(e),
    }
}

/// One value of a [`CMultiset`] together with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiValue {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// A multiset of complex numbers, sorted by real then imaginary part.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CMultiset {
    entries: Vec<MultiValue>,
}

/// Total order on complex numbers: real part first, then imaginary part.
pub fn complex_order(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

impl CMultiset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Snap near-real values onto the real axis, then merge values that sit
    /// within `match_tol` of each other. Each merged entry is the mean of
    /// its members.
    pub fn from_values(values: &[Complex64], match_tol: f64) -> Self {
        let mut snapped: Vec<Complex64> = values
            .iter()
            .map(|&v| {
                if v.im.abs() < match_tol * (1.0 + v.re.abs()) {
                    Complex64::new(v.re, 0.0)
                } else {
                    v
                }
            })
            .collect();
        snapped.sort_by(complex_order);

        let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
        for v in snapped {
            match clusters.iter_mut().find(|(c, _)| close(*c, v, match_tol)) {
                Some((centre, members)) => {
                    members.push(v);
                    *centre = members.iter().sum::<Complex64>() / members.len() as f64;
                }
                None => clusters.push((v, vec![v])),
            }
        }

        let mut entries: Vec<MultiValue> = clusters
            .into_iter()
            .map(|(value, members)| MultiValue {
                value,
                multiplicity: members.len(),
            })
            .collect();

        // Make conjugate partners exact mirrors of each other.
        for i in 0..entries.len() {
            if entries[i].value.im > 0.0 {
                let target = entries[i].value.conj();
                let mult = entries[i].multiplicity;
                if let Some(j) = entries.iter().position(|e| {
                    e.value.im < 0.0 && e.multiplicity == mult && close(e.value, target, match_tol)
                }) {
                    entries[j].value = target;
                }
            }
        }
        entries.sort_by(|a, b| complex_order(&a.value, &b.value));
        Self { entries }
    }

    pub fn from_entries(mut entries: Vec<MultiValue>) -> Self {
        entries.retain(|e| e.multiplicity > 0);
        entries.sort_by(|a, b| complex_order(&a.value, &b.value));
        Self { entries }
    }

    pub fn entries(&self) -> &[MultiValue] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total count including multiplicities.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Every value repeated by its multiplicity, in sorted order.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::repeat_n(e.value, e.multiplicity))
            .collect()
    }

    /// Largest distance in a nearest-neighbour pairing of the expanded
    /// values against `reference`; `None` when the counts differ.
    pub fn pairing_error(&self, reference: &[Complex64]) -> Option<f64> {
        pairing_error(&self.expanded(), reference)
    }

    pub fn matches(&self, reference: &[Complex64], tol: f64) -> bool {
        self.pairing_error(reference).is_some_and(|e| e <= tol)
    }
}

/// Greedy nearest-neighbour pairing between two lists of equal length.
/// Returns the worst pair distance, or `None` on a length mismatch.
pub fn pairing_error(computed: &[Complex64], reference: &[Complex64]) -> Option<f64> {
    if computed.len() != reference.len() {
        return None;
    }
    let mut used = vec![false; computed.len()];
    let mut worst = 0.0f64;
    let mut refs = reference.to_vec();
    refs.sort_by(complex_order);
    for r in refs {
        let (idx, dist) = computed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, c)| (i, (c - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        used[idx] = true;
        worst = worst.max(dist);
    }
    Some(worst)
}

/// Diagonal similarity with powers of two that equalises row and column
/// norms. Leaves the spectrum untouched.
fn balance(m: &mut Mat) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            while cc < r / radix {
                cc *= radix;
                f *= radix;
            }
            while cc > r * radix {
                cc /= radix;
                f /= radix;
            }
            if (c * f + r / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Raw eigenvalues of a square real matrix, unsorted and unmerged.
pub fn eigenvalues_raw(m: &Mat) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(ZsfError::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.is_empty() {
        return Ok(Vec::new());
    }
    if m.nrows() == 1 {
        return Ok(vec![Complex64::new(m[(0, 0)], 0.0)]);
    }
    let mut work = m.clone();
    balance(&mut work);
    let schur = Schur::try_new(work, f64::EPSILON, 0).ok_or(ZsfError::EigenFailure)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a square real matrix as a multiset merged at `match_tol`.
pub fn eigenvalues(m: &Mat, tol: &Tolerances) -> Result<CMultiset> {
    Ok(CMultiset::from_values(&eigenvalues_raw(m)?, tol.match_tol))
}

/// Strip leading coefficients below `zero_atol * max|c|`.
pub fn trim_leading(coeffs: &[f64], rel: f64) -> Vec<f64> {
    let max = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    if max == 0.0 {
        return Vec::new();
    }
    let start = coeffs
        .iter()
        .position(|c| c.abs() > rel * max)
        .unwrap_or(coeffs.len());
    coeffs[start..].to_vec()
}

/// Companion matrix of a polynomial given in descending order with a
/// nonzero leading coefficient.
pub fn companion(coeffs: &[f64]) -> Mat {
    let n = coeffs.len() - 1;
    let lead = coeffs[0];
    let mut m = Mat::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m
}

/// Roots of a real polynomial, coefficients in descending degree.
pub fn poly_roots(coeffs: &[f64], tol: &Tolerances) -> Result<CMultiset> {
    let trimmed = trim_leading(coeffs, tol.zero_atol);
    if trimmed.is_empty() {
        return Err(ZsfError::ZeroPolynomial);
    }
    if trimmed.len() == 1 {
        return Ok(CMultiset::new());
    }
    eigenvalues(&companion(&trimmed), tol)
}

/// Result of [`solve_linear`].
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Mat,
    /// `‖aX − b‖_F / ‖b‖_F` (zero when `b` vanishes).
    pub residual: f64,
    pub cond: f64,
}

/// Solve `a X = b` for square, numerically nonsingular `a`.
pub fn solve_linear(a: &Mat, b: &Mat, tol: &Tolerances) -> Result<LinearSolution> {
    if !a.is_square() {
        return Err(ZsfError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.nrows() != b.nrows() {
        return Err(ZsfError::Dimension {
            what: "solve_linear rhs rows",
            expected: a.nrows().to_string(),
            actual: b.nrows().to_string(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(LinearSolution {
            x: Mat::zeros(0, b.ncols()),
            residual: 0.0,
            cond: 1.0,
        });
    }
    let sv = singular_values(a)?;
    let rank = rank_from_sv(&sv, tol.rank_cutoff(n, n));
    let cond = match sv.last() {
        Some(&lo) if lo > 0.0 => sv[0] / lo,
        _ => f64::INFINITY,
    };
    if rank < n {
        return Err(ZsfError::Singular { rank, dim: n, cond });
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or(ZsfError::Singular { rank, dim: n, cond })?;
    let bn = b.norm();
    let residual = if bn > 0.0 {
        (a * &x - b).norm() / bn
    } else {
        (a * &x).norm()
    };
    Ok(LinearSolution { x, residual, cond })
}
