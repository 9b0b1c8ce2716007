//! Fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zsf_core::{controllable_canonical, StateSpace};

/// Random strictly proper SISO system of order `n` with `n - rho` zeros,
/// realized in controllable canonical form from real roots in `[-4, -0.5]`.
pub fn random_siso(n: usize, rho: usize, seed: u64) -> StateSpace {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut roots =
        |k: usize| -> Vec<f64> { (0..k).map(|_| rng.random_range(-4.0..-0.5)).collect() };
    let den = expand(&roots(n));
    let num = expand(&roots(n - rho));
    controllable_canonical(&num, &den).expect("valid polynomials")
}

/// Random square MIMO system with dense `A`, `B`, `C`.
pub fn random_square(n: usize, m: usize, seed: u64) -> StateSpace {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut dense = |r: usize, c: usize| DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
    let a = dense(n, n);
    let b = dense(n, m);
    let c = dense(m, n);
    StateSpace::strictly_proper(a, b, c).expect("valid dimensions")
}

fn expand(roots: &[f64]) -> Vec<f64> {
    let mut p = vec![1.0];
    for r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * r;
        }
        p = next;
    }
    p
}
