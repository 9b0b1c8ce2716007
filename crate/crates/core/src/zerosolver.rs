//! Invariant zeros as the spectrum of `𝒜_η`, with Rosenbrock rank checks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ZsfError};
use crate::matcore::{complex_rank, eigenvalues_raw, CMat, CMultiset, MultiValue, Tolerances};
use crate::sysmodel::{classify, dynamic_extension, RelativeDegree, StateSpace, SystemShape};
use crate::zsform::{transform, FormWarning};

/// Number of random points used to estimate the normal rank of the pencil.
pub const GENERIC_RANK_PROBES: usize = 3;
const PROBE_SEED: u64 = 0x5a_f0_2e_70;

/// The Rosenbrock system matrix `Z(λ) = [λI − A, B; C, −D]`.
#[derive(Debug, Clone)]
pub struct RosenbrockPencil {
    sys: StateSpace,
}

impl RosenbrockPencil {
    pub fn new(sys: StateSpace) -> Self {
        Self { sys }
    }

    pub fn system(&self) -> &StateSpace {
        &self.sys
    }

    /// `(l_x + l_y) × (l_x + l_u)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.sys.nx() + self.sys.ny(), self.sys.nx() + self.sys.nu())
    }

    pub fn evaluate(&self, lambda: Complex64) -> CMat {
        let nx = self.sys.nx();
        let (rows, cols) = self.shape();
        CMat::from_fn(rows, cols, |i, j| {
            let v = match (i < nx, j < nx) {
                (true, true) => {
                    let a = -self.sys.a()[(i, j)];
                    if i == j {
                        return lambda + a;
                    }
                    a
                }
                (true, false) => self.sys.b()[(i, j - nx)],
                (false, true) => self.sys.c()[(i - nx, j)],
                (false, false) => -self.sys.d()[(i - nx, j - nx)],
            };
            Complex64::new(v, 0.0)
        })
    }

    pub fn rank_at(&self, lambda: Complex64, tol: &Tolerances) -> Result<usize> {
        complex_rank(&self.evaluate(lambda), tol)
    }

    /// Maximum rank over [`GENERIC_RANK_PROBES`] pseudo-random points with
    /// moduli log-spaced over `[1, 10·max(‖A‖, 1)]`. Points falling near any
    /// value in `avoid` are redrawn. The generator is seeded, so results are
    /// reproducible.
    pub fn generic_rank(&self, avoid: &[Complex64], tol: &Tolerances) -> Result<usize> {
        let mut rng = StdRng::seed_from_u64(PROBE_SEED);
        let upper = 10.0 * self.sys.a().norm().max(1.0);
        let mut best = 0;
        for k in 0..GENERIC_RANK_PROBES {
            let frac = (k as f64 + 0.5) / GENERIC_RANK_PROBES as f64;
            let modulus = upper.powf(frac);
            let probe = loop {
                let p = Complex64::from_polar(modulus, rng.random::<f64>() * TAU);
                let clear = avoid
                    .iter()
                    .all(|a| (a - p).norm() > 1e-3 * modulus.max(a.norm()));
                if clear {
                    break p;
                }
            };
            best = best.max(self.rank_at(probe, tol)?);
        }
        Ok(best)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDrop {
    pub rank_at_lambda: usize,
    pub generic_rank: usize,
    pub drops: bool,
}

/// Compare the rank of `Z(λ)` with the pencil's normal rank.
pub fn rank_drop_test(
    pencil: &RosenbrockPencil,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<RankDrop> {
    let generic_rank = pencil.generic_rank(&[lambda], tol)?;
    let rank_at_lambda = pencil.rank_at(lambda, tol)?;
    Ok(RankDrop {
        rank_at_lambda,
        generic_rank,
        drops: rank_at_lambda < generic_rank,
    })
}

/// Rank check of one value against the Rosenbrock pencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCheck {
    pub value: Complex64,
    pub multiplicity: usize,
    pub rank_nominal: usize,
    pub rank_at_zero: usize,
    pub confirmed: bool,
}

/// Output of [`invariant_zeros`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    /// Reported invariant zeros.
    pub zeros: CMultiset,
    /// `mspec(𝒜_η)` before any filtering.
    pub candidates: CMultiset,
    /// One rank check per distinct candidate.
    pub checks: Vec<ZeroCheck>,
    pub shape: SystemShape,
    /// Set when input integrators were appended to remove feedthrough.
    pub extended: bool,
    /// Relative degree of the (possibly extended) system.
    pub relative_degree: RelativeDegree,
    pub l_z: usize,
    pub warnings: Vec<FormWarning>,
    pub notes: Vec<String>,
}

const WIDE_NOTE: &str = "wide system: candidates are filtered by Rosenbrock rank drop; \
a spurious candidate that coincides with a rank-drop point would be reported as confirmed";

fn check_values(
    pencil: &RosenbrockPencil,
    values: &[MultiValue],
    tol: &Tolerances,
) -> Result<Vec<ZeroCheck>> {
    let avoid: Vec<Complex64> = values.iter().map(|v| v.value).collect();
    let nominal = pencil.generic_rank(&avoid, tol)?;
    values
        .iter()
        .map(|v| {
            let at = pencil.rank_at(v.value, tol)?;
            Ok(ZeroCheck {
                value: v.value,
                multiplicity: v.multiplicity,
                rank_nominal: nominal,
                rank_at_zero: at,
                confirmed: at < nominal,
            })
        })
        .collect()
}

/// Finite invariant zeros of a SISO, square or wide system.
///
/// Systems with feedthrough are first extended with input integrators. The
/// zeros are the eigenvalues of `𝒜_η`; for wide systems only candidates at
/// which the Rosenbrock matrix loses rank are kept, each with the
/// multiplicity it had as an eigenvalue.
pub fn invariant_zeros(sys: &StateSpace, tol: &Tolerances) -> Result<ZeroSet> {
    tol.validate()?;
    let shape = classify(sys);
    if shape == SystemShape::TallMimo {
        return Err(ZsfError::TallSystemUnsupported {
            inputs: sys.nu(),
            outputs: sys.ny(),
        });
    }
    let extended = sys.has_feedthrough(tol);
    let working = if extended {
        dynamic_extension(sys)
    } else {
        sys.clone()
    };
    let form = transform(&working, tol)?;
    let candidates = CMultiset::from_values(&eigenvalues_raw(&form.a_eta)?, tol.match_tol);

    let pencil = RosenbrockPencil::new(sys.clone());
    let checks = check_values(&pencil, candidates.entries(), tol)?;

    let mut notes = Vec::new();
    if extended {
        notes.push(format!(
            "dynamic extension applied: {} input integrator(s) appended",
            sys.nu()
        ));
    }
    let zeros = if shape == SystemShape::WideMimo {
        notes.push(WIDE_NOTE.to_string());
        CMultiset::from_entries(
            checks
                .iter()
                .filter(|c| c.confirmed)
                .map(|c| MultiValue {
                    value: c.value,
                    multiplicity: c.multiplicity,
                })
                .collect(),
        )
    } else {
        candidates.clone()
    };

    Ok(ZeroSet {
        zeros,
        candidates,
        checks,
        shape,
        extended,
        relative_degree: form.rho.clone(),
        l_z: form.l_z,
        warnings: form.warnings.clone(),
        notes,
    })
}

/// Rosenbrock cross-check of every reported zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<ZeroCheck>,
    pub unconfirmed: Vec<Complex64>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn all_confirmed(&self) -> bool {
        self.unconfirmed.is_empty()
    }
}

pub fn verify_zero_set(
    sys: &StateSpace,
    zs: &ZeroSet,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let pencil = RosenbrockPencil::new(sys.clone());
    let checks = check_values(&pencil, zs.zeros.entries(), tol)?;
    let unconfirmed = checks
        .iter()
        .filter(|c| !c.confirmed)
        .map(|c| c.value)
        .collect();
    let mut notes = Vec::new();
    if zs.shape == SystemShape::WideMimo {
        notes.push(WIDE_NOTE.to_string());
    }
    Ok(VerificationReport {
        checks,
        unconfirmed,
        notes,
    })
}
