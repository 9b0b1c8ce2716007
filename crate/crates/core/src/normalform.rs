//! Linear normal form and zero dynamics.
//!
//! With `x = R_η η + R_ξ ξ`, where `[R_η R_ξ] = [B_n; C̄]⁻¹` and `B_n B = 0`,
//! the state splits into
//!
//! ```text
//! η' = B_n A R_η η + B_n A R_ξ ξ
//! ξ' = A_c ξ + B_c (α x + β u)
//! ```
//!
//! with `α` the stacked rows `C_i A^ρ_i` and `β` the stacked `C_i A^(ρ_i−1) B`.
//! This is the affine normal form with Lie derivatives reduced to matrix
//! powers. `A_c`/`B_c` are block-diagonal over outputs, one shift chain per
//! output.

use crate::error::{Result, ZsfError};
use crate::matcore::{numerical_rank, Mat, Tolerances};
use crate::sysmodel::{classify, relative_degree, RelativeDegree, StateSpace, SystemShape};
use crate::zsform::{build_cbar, invert_transform, select_bz};

#[derive(Debug, Clone)]
pub struct NormalForm {
    pub b_n: Mat,
    pub r_eta: Mat,
    pub r_xi: Mat,
    /// `B_n A R_η`.
    pub zero_dynamics_a: Mat,
    /// `B_n A R_ξ`.
    pub coupling: Mat,
    /// `B_n B`; zero unless `B_n` was completed outside the null space of `Bᵀ`.
    pub input_coupling: Mat,
    pub a_c: Mat,
    pub b_c: Mat,
    pub alpha_row: Mat,
    pub beta: Mat,
    pub rho: RelativeDegree,
}

/// Dynamics matrix of the zero dynamics and its coupling to `ξ`.
#[derive(Debug, Clone)]
pub struct ZeroDynamics {
    pub a: Mat,
    pub coupling: Mat,
}

fn chain_matrices(rho: &RelativeDegree) -> (Mat, Mat) {
    let r = rho.total;
    let ny = rho.per_output.len();
    let mut a_c = Mat::zeros(r, r);
    let mut b_c = Mat::zeros(r, ny);
    for (i, &rho_i) in rho.per_output.iter().enumerate() {
        let off = rho.offset(i);
        for j in 0..rho_i.saturating_sub(1) {
            a_c[(off + j, off + j + 1)] = 1.0;
        }
        b_c[(off + rho_i - 1, i)] = 1.0;
    }
    (a_c, b_c)
}

fn terminal_rows(sys: &StateSpace, rho: &RelativeDegree) -> (Mat, Mat) {
    let mut alpha = Mat::zeros(sys.ny(), sys.nx());
    let mut beta = Mat::zeros(sys.ny(), sys.nu());
    for (i, &rho_i) in rho.per_output.iter().enumerate() {
        let mut chain = sys.c().row(i).into_owned();
        for _ in 1..rho_i {
            chain = &chain * sys.a();
        }
        beta.row_mut(i).copy_from(&(&chain * sys.b()));
        alpha.row_mut(i).copy_from(&(&chain * sys.a()));
    }
    (alpha, beta)
}

/// Assemble the normal form. Without `b_n` the rows chosen for the
/// zero-subspace form are reused, so the zero dynamics coincide with `𝒜_η`.
pub fn normal_form(sys: &StateSpace, b_n: Option<&Mat>, tol: &Tolerances) -> Result<NormalForm> {
    tol.validate()?;
    if classify(sys) == SystemShape::TallMimo {
        return Err(ZsfError::TallSystemUnsupported {
            inputs: sys.nu(),
            outputs: sys.ny(),
        });
    }
    let rho = relative_degree(sys, tol)?;
    let cbar = build_cbar(sys, &rho);
    let nx = sys.nx();
    if rho.total > nx {
        return Err(ZsfError::DegenerateStack {
            rank: numerical_rank(&cbar, tol)?,
            required: nx,
        });
    }
    let l_z = nx - rho.total;

    let b_n = match b_n {
        None => select_bz(sys, &cbar, l_z, tol)?.b_z,
        Some(m) => {
            if m.shape() != (l_z, nx) {
                return Err(ZsfError::InvalidNormalBasis(format!(
                    "expected {l_z}x{nx}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let leak = (m * sys.b()).amax();
            let scale = (m.norm() * sys.b().norm()).max(1.0);
            if leak > tol.zero_atol * scale {
                return Err(ZsfError::InvalidNormalBasis(format!(
                    "B_n B is not zero (max entry {leak:.3e})"
                )));
            }
            m.clone()
        }
    };

    let (_, r, _) = invert_transform(&b_n, &cbar, tol)?;
    let r_eta = r.columns(0, l_z).into_owned();
    let r_xi = r.columns(l_z, rho.total).into_owned();
    let ba = &b_n * sys.a();
    let (a_c, b_c) = chain_matrices(&rho);
    let (alpha_row, beta) = terminal_rows(sys, &rho);

    Ok(NormalForm {
        zero_dynamics_a: &ba * &r_eta,
        coupling: &ba * &r_xi,
        input_coupling: &b_n * sys.b(),
        b_n,
        r_eta,
        r_xi,
        a_c,
        b_c,
        alpha_row,
        beta,
        rho,
    })
}

/// The η-subsystem of the normal form.
pub fn zero_dynamics(sys: &StateSpace, tol: &Tolerances) -> Result<ZeroDynamics> {
    let nf = normal_form(sys, None, tol)?;
    Ok(ZeroDynamics {
        a: nf.zero_dynamics_a,
        coupling: nf.coupling,
    })
}

impl NormalForm {
    pub fn l_z(&self) -> usize {
        self.b_n.nrows()
    }

    /// ξ-subsystem blocks rebuilt from `A_c`, `B_c`, `α` and `β`:
    /// `(B_c α R_η, A_c + B_c α R_ξ, B_c β)`.
    pub fn xi_blocks(&self) -> (Mat, Mat, Mat) {
        let bc_alpha = &self.b_c * &self.alpha_row;
        (
            &bc_alpha * &self.r_eta,
            &self.a_c + &bc_alpha * &self.r_xi,
            &self.b_c * &self.beta,
        )
    }
}
