#![allow(dead_code)]

use nalgebra::{dmatrix, DMatrix};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zsf_core::{controllable_canonical, Complex64, Mat, StateSpace};

pub fn re(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}

/// (s² − 9s + 8) / (s³ + 11s² + 36s + 36), controllable canonical form.
pub fn example1() -> StateSpace {
    StateSpace::strictly_proper(
        dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 1.0; -36.0, -36.0, -11.0],
        dmatrix![0.0; 0.0; 1.0],
        dmatrix![8.0, -9.0, 1.0],
    )
    .unwrap()
}

/// (s³ + 21s² + 116s + 96) / (s³ + 11s² + 38s + 40) with its feedthrough.
pub fn example2() -> StateSpace {
    controllable_canonical(&[1.0, 21.0, 116.0, 96.0], &[1.0, 11.0, 38.0, 40.0]).unwrap()
}

/// The same transfer function divided by s, as printed in canonical form.
pub fn example2_over_s() -> StateSpace {
    StateSpace::strictly_proper(
        dmatrix![
            0.0, 1.0, 0.0, 0.0;
            0.0, 0.0, 1.0, 0.0;
            0.0, 0.0, 0.0, 1.0;
            0.0, -40.0, -38.0, -11.0
        ],
        dmatrix![0.0; 0.0; 0.0; 1.0],
        dmatrix![96.0, 116.0, 21.0, 1.0],
    )
    .unwrap()
}

/// (s + 5) / (s³ + 10s² + 31s + 30): the zero cancels the pole at −5.
pub fn example3() -> StateSpace {
    StateSpace::strictly_proper(
        dmatrix![0.0, 1.0, 0.0; 0.0, 0.0, 1.0; -30.0, -31.0, -10.0],
        dmatrix![0.0; 0.0; 1.0],
        dmatrix![5.0, 1.0, 0.0],
    )
    .unwrap()
}

/// Two-input, two-output system with zeros {−1, 0}.
pub fn example4() -> StateSpace {
    StateSpace::strictly_proper(
        dmatrix![
            -24.0, -11.0, -6.0, 0.0, 0.0, 0.0;
            16.0, 0.0, 0.0, 0.0, 0.0, 0.0;
            0.0, 4.0, 0.0, 0.0, 0.0, 0.0;
            0.0, 0.0, 0.0, -24.0, -11.0, -6.0;
            0.0, 0.0, 0.0, 16.0, 0.0, 0.0;
            0.0, 0.0, 0.0, 0.0, 4.0, 0.0
        ],
        dmatrix![2.0, 0.0; 0.0, 0.0; 0.0, 0.0; 0.0, 4.0; 0.0, 0.0; 0.0, 0.0],
        dmatrix![
            0.0, 0.0, 0.5, 0.0, 1.0, 1.0;
            0.0, 2.0, -1.0, 0.0, 1.0, -2.0
        ],
    )
    .unwrap()
}

/// Three-input, two-output system with a double zero at 1.
pub fn example5() -> StateSpace {
    StateSpace::strictly_proper(
        dmatrix![
            0.0, 0.0, 2.0, 0.0, 0.0, 0.0;
            1.0, 0.0, 1.0, 0.0, 0.0, 0.0;
            0.0, 1.0, -2.0, 0.0, 0.0, 0.0;
            0.0, 0.0, 0.0, 0.0, 0.0, 2.0;
            0.0, 0.0, 0.0, 1.0, 0.0, 1.0;
            0.0, 0.0, 0.0, 0.0, 1.0, -2.0
        ],
        dmatrix![
            -2.0, 0.0, 1.0;
            1.0, 0.0, -2.0;
            1.0, 0.0, 1.0;
            2.0, -1.0, -1.0;
            -3.0, 0.0, 0.0;
            1.0, 1.0, 1.0
        ],
        dmatrix![
            0.0, 0.0, 1.0, 0.0, 0.0, 0.0;
            0.0, 0.0, 0.0, 0.0, 0.0, 1.0
        ],
    )
    .unwrap()
}

pub fn corpus() -> Vec<(&'static str, StateSpace)> {
    vec![
        ("example1", example1()),
        ("example2", example2()),
        ("example2_over_s", example2_over_s()),
        ("example3", example3()),
        ("example4", example4()),
        ("example5", example5()),
    ]
}

/// Monic polynomial with the given roots, descending coefficients.
pub fn poly_from_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut p = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        p = next;
    }
    p.iter().map(|c| c.re).collect()
}

/// `count` roots (conjugate-closed) whose pairwise distance and distance to
/// every root in `avoid` is at least `sep`.
pub fn separated_roots(
    rng: &mut StdRng,
    count: usize,
    avoid: &[Complex64],
    sep: f64,
) -> Vec<Complex64> {
    loop {
        let mut out: Vec<Complex64> = Vec::with_capacity(count);
        while out.len() < count {
            if count - out.len() >= 2 && rng.random_bool(0.3) {
                let z = Complex64::new(rng.random_range(-3.0..1.5), rng.random_range(0.3..2.5));
                out.push(z);
                out.push(z.conj());
            } else {
                out.push(Complex64::new(rng.random_range(-3.0..1.5), 0.0));
            }
        }
        let all: Vec<Complex64> = out.iter().chain(avoid).copied().collect();
        let ok = (0..all.len()).all(|i| (0..i).all(|j| (all[i] - all[j]).norm() >= sep));
        if ok {
            return out;
        }
    }
}

/// A random coprime SISO transfer function. Returns the realization and the
/// exact zeros used to build it.
pub fn random_siso(rng: &mut StdRng, nx: usize, deg_num: usize) -> (StateSpace, Vec<Complex64>) {
    let poles = separated_roots(rng, nx, &[], 0.25);
    let zeros = separated_roots(rng, deg_num, &poles, 0.25);
    let gain = rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let num: Vec<f64> = poly_from_roots(&zeros).iter().map(|c| c * gain).collect();
    let den = poly_from_roots(&poles);
    (controllable_canonical(&num, &den).unwrap(), zeros)
}

pub fn gaussian(rng: &mut StdRng, rows: usize, cols: usize) -> Mat {
    DMatrix::from_fn(rows, cols, |_, _| {
        // Box–Muller
        let u: f64 = rng.random_range(f64::EPSILON..1.0);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    })
}

pub fn random_orthogonal(rng: &mut StdRng, n: usize) -> Mat {
    gaussian(rng, n, n).qr().q()
}

/// `Q1 diag(σ) Q2` with σ log-uniform in `[1, max_cond]`.
pub fn random_similarity(rng: &mut StdRng, n: usize, max_cond: f64) -> Mat {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let mut sigma = Mat::zeros(n, n);
    for i in 0..n {
        sigma[(i, i)] = max_cond.powf(rng.random::<f64>());
    }
    sigma[(0, 0)] = 1.0;
    q1 * sigma * q2
}

/// Dense random square system with outputs of relative degree one or two.
pub fn random_square(rng: &mut StdRng, nx: usize, m: usize, second_order: bool) -> StateSpace {
    let a = gaussian(rng, nx, nx);
    let b = gaussian(rng, nx, m);
    let c = if second_order {
        // rows in the left null space of B give C B = 0
        let null = zsf_core::matcore::left_null_basis(&b, &Default::default()).unwrap();
        let mix = gaussian(rng, m, null.nrows());
        mix * null
    } else {
        gaussian(rng, m, nx)
    };
    StateSpace::strictly_proper(a, b, c).unwrap()
}

pub fn seeded(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
