//! Zero-subspace form.
//!
//! The state transformation is `T = [B_z; C̄]`, where `C̄` stacks the output
//! chains `C_i, C_i A, …, C_i A^(ρ_i − 1)` in output order and `B_z` is an
//! `l_z × l_x` block (`l_z = l_x − ρ`) taken from the left null space of `B`.
//! In the coordinates `[η; ξ] = T x` the invariant zeros are the eigenvalues
//! of the upper-left `l_z × l_z` block `𝒜_η` of `𝒜 = T A T⁻¹`.
//!
//! The remaining blocks are sparse: within each output chain the
//! non-terminal rows of `𝒜_ξη` and `ℬ` vanish, the non-terminal rows of
//! `𝒜_ξ` are shifted unit rows, and `𝒞` selects the head of every chain.
//! [`ZeroSubspaceForm::structure_residuals`] measures how far a computed
//! form is from that pattern.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZsfError};
use crate::matcore::{
    left_null_basis, numerical_rank, row_space_complement, solve_linear, Mat, Tolerances,
};
use crate::sysmodel::{classify, relative_degree, RelativeDegree, StateSpace, SystemShape};

/// Condition number of the (row-scaled) transformation above which the form
/// carries an [`FormWarning::IllConditioned`] warning.
pub const ILL_CONDITIONED: f64 = 1e12;

/// How the rows of `B_z` were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionMethod {
    /// The null space of `Bᵀ` has exactly `l_z` dimensions; all of it is used.
    FullNullSpace,
    /// The null space is larger than `l_z`; directions are picked one at a
    /// time by largest component outside the current stack.
    RankGreedy,
    /// Wide systems whose null space is smaller than `l_z`: the missing rows
    /// span the orthogonal complement of `[null(Bᵀ)ᵀ; C̄]`.
    OrthogonalCompletion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BzSelection {
    pub b_z: Mat,
    pub method: SelectionMethod,
    /// Leading rows of `b_z` that lie in the left null space of `B`.
    pub null_rows: usize,
    /// `max |B_z B|` over those null-space rows.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FormWarning {
    IllConditioned { cond: f64 },
}

/// The transformed realization `(𝒜, ℬ, 𝒞)` with its η/ξ partitions.
#[derive(Debug, Clone)]
pub struct ZeroSubspaceForm {
    pub t: Mat,
    pub s: Mat,
    pub a: Mat,
    pub b: Mat,
    pub c: Mat,
    pub a_eta: Mat,
    pub a_eta_xi: Mat,
    pub a_xi_eta: Mat,
    pub a_xi: Mat,
    pub b_xi: Mat,
    pub c_xi: Mat,
    pub l_z: usize,
    pub rho: RelativeDegree,
    /// Condition number of `T` after unit-norm scaling of the `C̄` rows.
    pub cond_t: f64,
    /// `max |T S − I|`.
    pub inverse_residual: f64,
    pub selection: BzSelection,
    pub warnings: Vec<FormWarning>,
}

/// Deviation of a computed form from the sparse pattern, entrywise maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureResiduals {
    /// η rows of `ℬ` that come from the null space of `Bᵀ`.
    pub b_eta: f64,
    /// Non-terminal chain rows of `ℬ`.
    pub b_chain: f64,
    /// Non-terminal chain rows of `𝒜_ξη`.
    pub a_xi_eta: f64,
    /// Non-terminal chain rows of `𝒜_ξ` against their shifted unit rows.
    pub a_xi_shift: f64,
    /// `𝒞` against the chain-head selector.
    pub c_selector: f64,
    /// Frobenius norm of `𝒜`.
    pub a_norm: f64,
}

impl StructureResiduals {
    pub fn max_abs(&self) -> f64 {
        self.b_eta
            .max(self.b_chain)
            .max(self.a_xi_eta)
            .max(self.a_xi_shift)
            .max(self.c_selector)
    }

    /// Largest residual divided by `‖𝒜‖_F`.
    pub fn max_relative(&self) -> f64 {
        if self.a_norm > 0.0 {
            self.max_abs() / self.a_norm
        } else {
            self.max_abs()
        }
    }
}

/// Stack `[C_1; C_1 A; …; C_1 A^(ρ_1−1); C_2; …]`.
pub fn build_cbar(sys: &StateSpace, rho: &RelativeDegree) -> Mat {
    let mut cbar = Mat::zeros(rho.total, sys.nx());
    let mut row = 0;
    for (i, &rho_i) in rho.per_output.iter().enumerate() {
        let mut chain = sys.c().row(i).into_owned();
        for k in 0..rho_i {
            if k > 0 {
                chain = &chain * sys.a();
            }
            cbar.row_mut(row).copy_from(&chain);
            row += 1;
        }
    }
    cbar
}

fn vstack(top: &Mat, bottom: &Mat) -> Mat {
    let cols = top.ncols().max(bottom.ncols());
    let mut out = Mat::zeros(top.nrows() + bottom.nrows(), cols);
    out.view_mut((0, 0), top.shape()).copy_from(top);
    out.view_mut((top.nrows(), 0), bottom.shape())
        .copy_from(bottom);
    out
}

fn unit_rows(cbar: &Mat) -> (Mat, Vec<f64>) {
    let mut scaled = cbar.clone();
    let mut scales = Vec::with_capacity(cbar.nrows());
    for mut row in scaled.row_iter_mut() {
        let n = row.norm();
        let s = if n > 0.0 { 1.0 / n } else { 1.0 };
        row *= s;
        scales.push(s);
    }
    (scaled, scales)
}

/// Greedy pivoted Gram–Schmidt over the rows of `candidates`, measured in
/// the complement of `fixed`'s row space. Returns the chosen row indices.
fn greedy_rows(
    candidates: &Mat,
    fixed: &Mat,
    count: usize,
    tol: &Tolerances,
) -> Result<Vec<usize>> {
    let complement = row_space_complement(fixed, tol)?;
    // Coordinates of every candidate in the complement.
    let mut resid = candidates * complement.transpose();
    let mut chosen = Vec::with_capacity(count);
    for _ in 0..count {
        let (best, norm) = (0..resid.nrows())
            .filter(|i| !chosen.contains(i))
            .map(|i| (i, resid.row(i).norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or(ZsfError::DegenerateStack {
                rank: chosen.len(),
                required: count,
            })?;
        if norm == 0.0 {
            break;
        }
        chosen.push(best);
        let dir = resid.row(best) / norm;
        for i in 0..resid.nrows() {
            let proj = resid.row(i).dot(&dir);
            let update = &dir * proj;
            let mut r = resid.row_mut(i);
            r -= update;
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Choose `l_z` rows spanning part of the left null space of `B` such that
/// `[B_z; C̄]` is nonsingular.
pub fn select_bz(
    sys: &StateSpace,
    cbar: &Mat,
    l_z: usize,
    tol: &Tolerances,
) -> Result<BzSelection> {
    let nx = sys.nx();
    let null = match left_null_basis(sys.b(), tol) {
        Ok(n) => n,
        Err(ZsfError::EmptyNullSpace { .. }) => Mat::zeros(0, nx),
        Err(e) => return Err(e),
    };
    let k = null.nrows();
    let (scaled_cbar, _) = unit_rows(cbar);

    let (b_z, method, null_rows) = if k == l_z {
        (null, SelectionMethod::FullNullSpace, l_z)
    } else if k > l_z {
        let picks = greedy_rows(&null, &scaled_cbar, l_z, tol)?;
        let mut b_z = Mat::zeros(picks.len(), nx);
        for (r, &i) in picks.iter().enumerate() {
            b_z.row_mut(r).copy_from(&null.row(i));
        }
        (b_z, SelectionMethod::RankGreedy, picks.len())
    } else if classify(sys) == SystemShape::WideMimo {
        let extra = row_space_complement(&vstack(&null, &scaled_cbar), tol)?;
        if extra.nrows() != l_z - k {
            return Err(ZsfError::DegenerateStack {
                rank: nx - extra.nrows(),
                required: nx,
            });
        }
        (
            vstack(&null, &extra),
            SelectionMethod::OrthogonalCompletion,
            k,
        )
    } else {
        return Err(ZsfError::TallSystemUnsupported {
            inputs: sys.nu(),
            outputs: sys.ny(),
        });
    };

    let stack = vstack(&b_z, &scaled_cbar);
    let rank = numerical_rank(&stack, tol)?;
    if b_z.nrows() != l_z || rank < nx {
        return Err(ZsfError::DegenerateStack { rank, required: nx });
    }
    let residual = if null_rows > 0 {
        (b_z.rows(0, null_rows) * sys.b()).amax()
    } else {
        0.0
    };
    Ok(BzSelection {
        b_z,
        method,
        null_rows,
        residual,
    })
}

/// `(T, S)` for `T = [B_z; C̄]`, inverting after unit-norm scaling of the
/// `C̄` rows. Returns the condition number of the scaled matrix as well.
pub(crate) fn invert_transform(b_z: &Mat, cbar: &Mat, tol: &Tolerances) -> Result<(Mat, Mat, f64)> {
    let n = b_z.ncols().max(cbar.ncols());
    let t = vstack(b_z, cbar);
    if t.nrows() != n {
        return Err(ZsfError::DegenerateStack {
            rank: numerical_rank(&t, tol)?.min(n),
            required: n,
        });
    }
    let (scaled_cbar, scales) = unit_rows(cbar);
    let t_scaled = vstack(b_z, &scaled_cbar);
    let sol = solve_linear(&t_scaled, &Mat::identity(n, n), tol).map_err(|e| match e {
        ZsfError::Singular { rank, dim, .. } => ZsfError::DegenerateStack {
            rank,
            required: dim,
        },
        other => other,
    })?;
    let mut s = sol.x;
    let l_z = b_z.nrows();
    for (j, scale) in scales.iter().enumerate() {
        let mut col = s.column_mut(l_z + j);
        col *= *scale;
    }
    Ok((t, s, sol.cond))
}

/// Build the zero-subspace form using a given `B_z` selection.
pub fn transform_with(
    sys: &StateSpace,
    rho: &RelativeDegree,
    selection: BzSelection,
    tol: &Tolerances,
) -> Result<ZeroSubspaceForm> {
    let cbar = build_cbar(sys, rho);
    let (t, s, cond_t) = invert_transform(&selection.b_z, &cbar, tol)?;
    let n = sys.nx();
    let l_z = selection.b_z.nrows();
    let r = rho.total;

    let inverse_residual = (&t * &s - Mat::identity(n, n)).amax();
    let a = &t * sys.a() * &s;
    let b = &t * sys.b();
    let c = sys.c() * &s;

    let mut warnings = Vec::new();
    if cond_t > ILL_CONDITIONED {
        warnings.push(FormWarning::IllConditioned { cond: cond_t });
    }

    Ok(ZeroSubspaceForm {
        a_eta: a.view((0, 0), (l_z, l_z)).into_owned(),
        a_eta_xi: a.view((0, l_z), (l_z, r)).into_owned(),
        a_xi_eta: a.view((l_z, 0), (r, l_z)).into_owned(),
        a_xi: a.view((l_z, l_z), (r, r)).into_owned(),
        b_xi: b.view((l_z, 0), (r, sys.nu())).into_owned(),
        c_xi: c.view((0, l_z), (sys.ny(), r)).into_owned(),
        t,
        s,
        a,
        b,
        c,
        l_z,
        rho: rho.clone(),
        cond_t,
        inverse_residual,
        selection,
        warnings,
    })
}

/// Transform a strictly proper, non-tall system into its zero-subspace form.
pub fn transform(sys: &StateSpace, tol: &Tolerances) -> Result<ZeroSubspaceForm> {
    tol.validate()?;
    if classify(sys) == SystemShape::TallMimo {
        return Err(ZsfError::TallSystemUnsupported {
            inputs: sys.nu(),
            outputs: sys.ny(),
        });
    }
    let rho = relative_degree(sys, tol)?;
    let cbar = build_cbar(sys, &rho);
    if rho.total > sys.nx() {
        return Err(ZsfError::DegenerateStack {
            rank: numerical_rank(&cbar, tol)?,
            required: sys.nx(),
        });
    }
    let l_z = sys.nx() - rho.total;
    let selection = select_bz(sys, &cbar, l_z, tol)?;
    transform_with(sys, &rho, selection, tol)
}

impl ZeroSubspaceForm {
    /// First `l_z` columns of `S`.
    pub fn s_eta(&self) -> Mat {
        self.s.columns(0, self.l_z).into_owned()
    }

    /// Last `ρ` columns of `S`.
    pub fn s_xi(&self) -> Mat {
        self.s.columns(self.l_z, self.rho.total).into_owned()
    }

    pub fn is_ill_conditioned(&self) -> bool {
        self.warnings
            .iter()
            .any(|w| matches!(w, FormWarning::IllConditioned { .. }))
    }

    pub fn structure_residuals(&self) -> StructureResiduals {
        let l_z = self.l_z;
        let r = self.rho.total;
        let b_eta = if self.selection.null_rows > 0 {
            self.b.rows(0, self.selection.null_rows).amax()
        } else {
            0.0
        };

        let mut b_chain = 0.0f64;
        let mut a_xi_eta = 0.0f64;
        let mut a_xi_shift = 0.0f64;
        let mut selector = Mat::zeros(self.c.nrows(), self.c.ncols());
        for (i, &rho_i) in self.rho.per_output.iter().enumerate() {
            let off = self.rho.offset(i);
            selector[(i, l_z + off)] = 1.0;
            for j in 0..rho_i.saturating_sub(1) {
                let row = off + j;
                b_chain = b_chain.max(self.b_xi.row(row).amax());
                a_xi_eta = a_xi_eta.max(self.a_xi_eta.row(row).amax());
                let mut expect = Mat::zeros(1, r);
                expect[(0, row + 1)] = 1.0;
                a_xi_shift = a_xi_shift.max((self.a_xi.row(row) - expect).amax());
            }
        }
        let c_selector = (&self.c - selector).amax();

        StructureResiduals {
            b_eta,
            b_chain,
            a_xi_eta,
            a_xi_shift,
            c_selector,
            a_norm: self.a.norm(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::eigenvalues;
    use crate::sysmodel::controllable_canonical;
    use nalgebra::dmatrix;
    use num_complex::Complex64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    #[test]
    fn cbar_stacks_output_chains() {
        let ex3 = controllable_canonical(&[1.0, 5.0], &[1.0, 10.0, 31.0, 30.0]).unwrap();
        let rho = relative_degree(&ex3, &tol()).unwrap();
        assert_eq!(
            build_cbar(&ex3, &rho),
            dmatrix![5.0, 1.0, 0.0; 0.0, 5.0, 1.0]
        );

        let ex1 = controllable_canonical(&[1.0, -9.0, 8.0], &[1.0, 11.0, 36.0, 36.0]).unwrap();
        let rho = relative_degree(&ex1, &tol()).unwrap();
        assert_eq!(build_cbar(&ex1, &rho), dmatrix![8.0, -9.0, 1.0]);

        let sys = StateSpace::strictly_proper(
            Mat::identity(3, 3),
            dmatrix![1.0; 0.0; 0.0],
            dmatrix![1.0, 0.0, 0.0],
        )
        .unwrap();
        assert_eq!(
            build_cbar(&sys, &RelativeDegree::new(vec![1])),
            dmatrix![1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn first_example_selection_spans_leading_coordinates() {
        let ex1 = controllable_canonical(&[1.0, -9.0, 8.0], &[1.0, 11.0, 36.0, 36.0]).unwrap();
        let rho = relative_degree(&ex1, &tol()).unwrap();
        let cbar = build_cbar(&ex1, &rho);
        let sel = select_bz(&ex1, &cbar, 2, &tol()).unwrap();
        assert_eq!(sel.method, SelectionMethod::FullNullSpace);
        assert!(sel.b_z.column(2).amax() < 1e-14);
        assert!(sel.residual < 1e-14);
    }

    #[test]
    fn greedy_selection_when_null_space_is_larger() {
        // Two outputs with relative degree 2 each: null space 4, l_z 2.
        let ex4 = StateSpace::strictly_proper(
            dmatrix![
                -24.0, -11.0, -6.0, 0.0, 0.0, 0.0;
                16.0, 0.0, 0.0, 0.0, 0.0, 0.0;
                0.0, 4.0, 0.0, 0.0, 0.0, 0.0;
                0.0, 0.0, 0.0, -24.0, -11.0, -6.0;
                0.0, 0.0, 0.0, 16.0, 0.0, 0.0;
                0.0, 0.0, 0.0, 0.0, 4.0, 0.0
            ],
            dmatrix![2.0, 0.0; 0.0, 0.0; 0.0, 0.0; 0.0, 4.0; 0.0, 0.0; 0.0, 0.0],
            dmatrix![0.0, 0.0, 0.5, 0.0, 1.0, 1.0; 0.0, 2.0, -1.0, 0.0, 1.0, -2.0],
        )
        .unwrap();
        let form = transform(&ex4, &tol()).unwrap();
        assert_eq!(form.selection.method, SelectionMethod::RankGreedy);
        assert_eq!(form.l_z, 2);
        assert!(eigenvalues(&form.a_eta, &tol())
            .unwrap()
            .matches(&re(&[-1.0, 0.0]), 1e-9));
    }

    #[test]
    fn tall_selection_is_rejected() {
        let sys = StateSpace::strictly_proper(
            dmatrix![-1.0, 0.0, 0.0; 0.0, -2.0, 0.0; 0.0, 0.0, -3.0],
            dmatrix![1.0; 1.0; 1.0],
            dmatrix![1.0, 0.0, 0.0; 0.0, 1.0, 0.0],
        )
        .unwrap();
        let cbar = sys.c().clone();
        // Null dimension is 2; asking for 3 rows on a tall system cannot work.
        assert_eq!(
            select_bz(&sys, &cbar, 3, &tol()),
            Err(ZsfError::TallSystemUnsupported {
                inputs: 1,
                outputs: 2
            })
        );
        assert!(matches!(
            transform(&sys, &tol()),
            Err(ZsfError::TallSystemUnsupported { .. })
        ));
    }

    #[test]
    fn cancellation_example_blocks() {
        let ex3 = controllable_canonical(&[1.0, 5.0], &[1.0, 10.0, 31.0, 30.0]).unwrap();
        let form = transform(&ex3, &tol()).unwrap();
        assert_eq!(form.l_z, 1);
        assert!((form.a_eta[(0, 0)] + 5.0).abs() < 1e-12);
        assert!(eigenvalues(&form.a_xi, &tol())
            .unwrap()
            .matches(&re(&[-2.0, -3.0]), 1e-9));
        let res = form.structure_residuals();
        assert!(res.max_relative() < 1e-12, "{res:?}");
        // ℬ = [0; 0; CAB] with CAB = 1
        assert!((form.b[(2, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_relative_degree_gives_empty_eta() {
        let sys = controllable_canonical(&[1.0], &[1.0, 3.0, 2.0]).unwrap();
        let form = transform(&sys, &tol()).unwrap();
        assert_eq!(form.l_z, 0);
        assert_eq!(form.a_eta.shape(), (0, 0));
        assert_eq!(form.a_xi.shape(), (2, 2));
    }

    #[test]
    fn feedthrough_is_rejected() {
        let sys = controllable_canonical(&[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert_eq!(
            transform(&sys, &tol()).unwrap_err(),
            ZsfError::NonzeroFeedthrough { output: 0 }
        );
    }

    #[test]
    fn singular_decoupling_is_degenerate() {
        // Both outputs read the same state: C̄ has two identical rows.
        let sys = StateSpace::strictly_proper(
            dmatrix![-1.0, 0.0, 0.0; 0.0, -2.0, 0.0; 0.0, 0.0, -3.0],
            dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0],
            dmatrix![1.0, 0.0, 0.0; 1.0, 0.0, 0.0],
        )
        .unwrap();
        assert!(matches!(
            transform(&sys, &tol()),
            Err(ZsfError::DegenerateStack { .. })
        ));
    }
}
