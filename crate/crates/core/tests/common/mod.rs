#![allow(dead_code)]

use std::sync::Arc;

use mtlab_core::{normalize, RadialFunction, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Σ a_k (1 - r^k) + Σ b_k min(ln(1/r), L_k)`, normalized to unit energy.
/// The logarithmic terms give Moser-like concentration at the origin.
pub fn mixed_profile(
    grid: &Arc<RadialGrid>,
    n: usize,
    smooth: &[f64],
    logs: &[(f64, f64)],
) -> RadialFunction {
    let u = RadialFunction::from_fn(grid.clone(), n, |r| {
        let s: f64 = smooth
            .iter()
            .enumerate()
            .map(|(k, a)| a * (1.0 - r.powi(k as i32 + 1)))
            .sum();
        let l: f64 = logs
            .iter()
            .map(|&(b, cap)| if r > 0.0 { b * (-r.ln()).min(cap) } else { b * cap })
            .sum();
        s + l
    })
    .unwrap();
    normalize(&u).unwrap()
}

/// Random unit-energy grid function; alternates between rough nodal noise
/// and mixed smooth/logarithmic profiles.
pub fn random_unit(rng: &mut ChaCha8Rng, grid: &Arc<RadialGrid>, n: usize) -> RadialFunction {
    if rng.random_bool(0.3) {
        let m = grid.len();
        let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        v[m - 1] = 0.0;
        normalize(&RadialFunction::new(grid.clone(), v, n).unwrap()).unwrap()
    } else {
        let smooth: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let logs: Vec<(f64, f64)> = (0..3)
            .map(|_| (rng.random_range(-0.5..1.0), rng.random_range(0.0..30.0)))
            .collect();
        mixed_profile(grid, n, &smooth, &logs)
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Largest relative violation of `|u(r)| ≤ bound(r)` over interior nodes;
/// non-positive means the bound holds everywhere.
pub fn worst_bound_excess(u: &RadialFunction) -> f64 {
    let nodes = u.grid().nodes();
    let last = nodes.len() - 1;
    (1..last)
        .map(|k| {
            let b = mtlab_core::pointwise_bound(nodes[k], u.dim()).unwrap();
            (u.values()[k].abs() - b) / b.max(1e-300)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
