//! Invariant zeros of linear state-space systems through the zero-subspace
//! form.
//!
//! A strictly proper realization `(A, B, C)` is transformed by
//! `T = [B_z; C̄]` into `(𝒜, ℬ, 𝒞)`; the invariant zeros are then the
//! eigenvalues of the `l_z × l_z` block `𝒜_η`, an ordinary eigenvalue
//! problem. Systems with feedthrough are handled by appending input
//! integrators, and wide systems by filtering the eigenvalues with a
//! Rosenbrock rank test.
//!
//! ```
//! use zsf_core::{controllable_canonical, invariant_zeros, Tolerances};
//!
//! // (s^2 - 9s + 8) / (s^3 + 11s^2 + 36s + 36)
//! let sys = controllable_canonical(&[1.0, -9.0, 8.0], &[1.0, 11.0, 36.0, 36.0]).unwrap();
//! let zs = invariant_zeros(&sys, &Tolerances::default()).unwrap();
//! let zeros: Vec<f64> = zs.zeros.expanded().iter().map(|z| z.re).collect();
//! assert!((zeros[0] - 1.0).abs() < 1e-9 && (zeros[1] - 8.0).abs() < 1e-9);
//! ```

pub mod error;
pub mod matcore;
pub mod normalform;
pub mod oracle;
pub mod sysmodel;
pub mod zerosolver;
pub mod zsform;

pub use error::{Result, ZsfError};
pub use matcore::{CMultiset, Mat, MultiValue, Tolerances};
pub use normalform::{normal_form, zero_dynamics, NormalForm, ZeroDynamics};
pub use sysmodel::{
    classify, controllable_canonical, dynamic_extension, relative_degree, RelativeDegree,
    StateSpace, SystemShape,
};
pub use zerosolver::{
    invariant_zeros, rank_drop_test, verify_zero_set, RankDrop, RosenbrockPencil,
    VerificationReport, ZeroCheck, ZeroSet,
};
pub use zsform::{
    build_cbar, select_bz, transform, transform_with, BzSelection, FormWarning, SelectionMethod,
    StructureResiduals, ZeroSubspaceForm,
};

pub use num_complex::Complex64;
