//! Independent reference computations for checking the main solver.
//!
//! Neither routine uses the zero-subspace form. The SISO route builds the
//! numerator `C adj(sI − A) B + D det(sI − A)` with the Faddeev–LeVerrier
//! recursion; the square MIMO route interpolates `det Z(λ)` on a circle.
//! Both degrade for large state dimension and are meant for desk-sized
//! systems only.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, ZsfError};
use crate::matcore::{companion, eigenvalues_raw, trim_leading, CMultiset, Mat, Tolerances};
use crate::sysmodel::StateSpace;
use crate::zerosolver::RosenbrockPencil;

/// Relative size below which leading coefficients are dropped.
pub const TRIM_RTOL: f64 = 1e-10;

/// Output of the Faddeev–LeVerrier recursion for an `n × n` matrix.
#[derive(Debug, Clone)]
pub struct FaddeevLeverrier {
    /// `det(sI − A)`, descending, monic, length `n + 1`.
    pub char_poly: Vec<f64>,
    /// `M_1 … M_n` with `adj(sI − A) = Σ M_k s^(n−k)`.
    pub adjugate: Vec<Mat>,
    /// `max |A M_n + c_0 I|`, zero in exact arithmetic.
    pub closure_residual: f64,
}

pub fn faddeev_leverrier(a: &Mat) -> Result<FaddeevLeverrier> {
    if !a.is_square() {
        return Err(ZsfError::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    let eye = Mat::identity(n, n);
    let mut char_poly = vec![0.0; n + 1];
    char_poly[0] = 1.0;
    let mut adjugate = Vec::with_capacity(n);
    let mut m = eye.clone();
    for k in 1..=n {
        if k > 1 {
            m = a * &m + &eye * char_poly[k - 1];
        }
        let am = a * &m;
        char_poly[k] = -am.trace() / k as f64;
        adjugate.push(m.clone());
    }
    let closure_residual = if n == 0 {
        0.0
    } else {
        (a * &m + &eye * char_poly[n]).amax()
    };
    Ok(FaddeevLeverrier {
        char_poly,
        adjugate,
        closure_residual,
    })
}

/// Numerator of a SISO transfer function.
#[derive(Debug, Clone, PartialEq)]
pub struct NumeratorPoly {
    /// Descending coefficients with negligible leading terms removed.
    pub coeffs: Vec<f64>,
    /// Leading coefficient: `D` if nonzero, otherwise `C A^(ρ−1) B`.
    pub scale: f64,
}

impl NumeratorPoly {
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }
}

pub fn siso_numerator(sys: &StateSpace) -> Result<NumeratorPoly> {
    if sys.nu() != 1 || sys.ny() != 1 {
        return Err(ZsfError::Dimension {
            what: "siso_numerator input/output count",
            expected: "1x1".into(),
            actual: format!("{}x{}", sys.ny(), sys.nu()),
        });
    }
    let n = sys.nx();
    let fl = faddeev_leverrier(sys.a())?;
    let d = sys.d()[(0, 0)];
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(d);
    for (k, m) in fl.adjugate.iter().enumerate() {
        let cmb = (sys.c() * m * sys.b())[(0, 0)];
        coeffs.push(cmb + d * fl.char_poly[k + 1]);
    }
    let coeffs = trim_leading(&coeffs, TRIM_RTOL);
    let scale = coeffs.first().copied().unwrap_or(0.0);
    Ok(NumeratorPoly { coeffs, scale })
}

fn complex_det(m: DMatrix<Complex64>) -> Complex64 {
    m.lu().determinant()
}

/// Roots of `det Z(λ)` for a square pencil.
///
/// The determinant has degree at most `l_x`. It is sampled at the `l_x + 1`
/// roots of unity scaled to radius `2(1 + ‖A‖)`, fitted in the normalized
/// variable `λ / radius` through the Vandermonde system, and its roots are
/// found by companion eigenvalues.
pub fn square_mimo_zero_roots(sys: &StateSpace, tol: &Tolerances) -> Result<CMultiset> {
    if sys.nu() != sys.ny() {
        return Err(ZsfError::Dimension {
            what: "square pencil",
            expected: format!("{} inputs", sys.ny()),
            actual: format!("{} inputs", sys.nu()),
        });
    }
    let pencil = RosenbrockPencil::new(sys.clone());
    let d = sys.nx();
    let samples = d + 1;
    let radius = 2.0 * (1.0 + sys.a().norm());

    let nodes: Vec<Complex64> = (0..samples)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / samples as f64))
        .collect();
    let mut values = Vec::with_capacity(samples);
    let mut bound = 0.0f64;
    for w in &nodes {
        let z = pencil.evaluate(w * radius);
        let hadamard: f64 = z.column_iter().map(|c| c.norm()).product();
        bound = bound.max(hadamard);
        values.push(complex_det(z));
    }
    let peak = values.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if peak <= 1e-12 * bound {
        return Err(ZsfError::DegeneratePencil);
    }

    let vander = DMatrix::from_fn(samples, samples, |i, j| nodes[i].powu(j as u32));
    let rhs = DMatrix::from_column_slice(samples, 1, &values);
    let fit = vander.lu().solve(&rhs).ok_or(ZsfError::DegeneratePencil)?;

    // Ascending in w; flip to descending real coefficients.
    let descending: Vec<f64> = fit.iter().rev().map(|c| c.re).collect();
    let trimmed = trim_leading(&descending, TRIM_RTOL);
    if trimmed.len() <= 1 {
        return Ok(CMultiset::new());
    }
    let roots: Vec<Complex64> = eigenvalues_raw(&companion(&trimmed))?
        .into_iter()
        .map(|w| w * radius)
        .collect();
    Ok(CMultiset::from_values(&roots, tol.match_tol))
}
