#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refpref::{find_min_matrix, Bundle, GroupSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| rel(*x, *y)).fold(0.0, f64::max)
}

pub fn group(rows: &[&[f64]]) -> GroupSpec {
    GroupSpec::new(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

pub fn bundle(v: &[f64]) -> Bundle {
    Bundle::new(v.to_vec()).unwrap()
}

/// Log-uniform positive vector with coordinates in `[10^lo, 10^hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, l: usize, lo: f64, hi: f64) -> Bundle {
    Bundle::new((0..l).map(|_| 10f64.powf(rng.random_range(lo..=hi))).collect()).unwrap()
}

/// Any valid (not necessarily coercive) group with entries in `[-bound, bound]`.
pub fn random_spec(rng: &mut ChaCha8Rng, l: usize, bound: f64) -> GroupSpec {
    loop {
        let rows: Vec<Vec<f64>> = (0..l)
            .map(|_| (0..l - 1).map(|_| rng.random_range(-bound..=bound)).collect())
            .collect();
        if let Ok(g) = GroupSpec::new(&rows) {
            if g.scaled_determinant() > 1e-2 {
                return g;
            }
        }
    }
}

/// A coercive group built from positive barycentric weights: the last row
/// is chosen so that the origin is a positive combination of all rows.
/// Entries stay within `[-bound, bound]`; the minimizer lies in the cube of
/// half-width `s_limit`.
pub fn random_coercive_spec(rng: &mut ChaCha8Rng, l: usize, bound: f64, s_limit: f64) -> GroupSpec {
    loop {
        let weights: Vec<f64> = (0..l).map(|_| rng.random_range(0.2..=1.0)).collect();
        let mut rows: Vec<Vec<f64>> = (0..l - 1)
            .map(|_| (0..l - 1).map(|_| rng.random_range(-bound..=bound)).collect())
            .collect();
        let last: Vec<f64> = (0..l - 1)
            .map(|j| -(0..l - 1).map(|i| weights[i] * rows[i][j]).sum::<f64>() / weights[l - 1])
            .collect();
        if last.iter().any(|v| v.abs() > bound) {
            continue;
        }
        rows.push(last);
        let Ok(g) = GroupSpec::new(&rows) else { continue };
        if g.scaled_determinant() < 1e-2 || !g.is_coercive() {
            continue;
        }
        match find_min_matrix(&g) {
            Ok(m) if m.element.params().iter().all(|s| s.abs() < s_limit) => return g,
            _ => continue,
        }
    }
}
