//! Brute-force checks that share no code with the Newton solvers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::group::{Bundle, GroupSpec};

pub const MAX_GRID_POINTS: f64 = 1e8;
pub const DEFAULT_HALF_WIDTH: f64 = 10.0;
pub const DEFAULT_GRID_POINTS: usize = 10_000_000;

/// Axis-aligned parameter box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox(pub Vec<(f64, f64)>);

impl GridBox {
    pub fn cube(dim: usize, half_width: f64) -> Self {
        GridBox(vec![(-half_width, half_width); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMinimum {
    pub s: Vec<f64>,
    pub value: f64,
    pub step: f64,
    pub points: usize,
    /// Bound on `value - min` over the searched box, assuming the true
    /// minimizer lies in it.
    pub error_bound: f64,
}

fn weighted_sum(rows: &[Vec<f64>], weights: &[f64], s: &[f64]) -> f64 {
    rows.iter()
        .zip(weights)
        .map(|(a, w)| w * a.iter().zip(s).map(|(ai, si)| ai * si).sum::<f64>().exp())
        .sum()
}

/// For convex `f` with `‖∇f‖ ≤ f · a_max`, the grid point `s_g` nearest the
/// minimizer satisfies `f(s_g) - f* ≤ f(s_g) · a_max · δ` with `δ` the half
/// cell diagonal, hence `f_best - f* ≤ f_best · κ`, `κ = a_max δ / (1 - a_max δ)`.
fn lipschitz_bound(rows: &[Vec<f64>], step: f64, dim: usize, value: f64) -> f64 {
    let a_max = rows
        .iter()
        .map(|a| a.iter().map(|v| v * v).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let reach = a_max * 0.5 * step * (dim as f64).sqrt();
    if reach >= 1.0 {
        f64::INFINITY
    } else {
        value * reach / (1.0 - reach)
    }
}

fn check_weights(spec: &GroupSpec, weights: &[f64]) -> Result<()> {
    if weights.len() != spec.commodities() {
        return Err(Error::BadShape(format!(
            "{} weights for {} commodities",
            weights.len(),
            spec.commodities()
        )));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::InvalidParameter("grid weights must be positive".into()));
    }
    Ok(())
}

/// Exhaustively evaluates `Σ_i w_i exp(⟨a_i, s⟩)` on a regular grid with
/// spacing `step` and returns the best point.
pub fn grid_min(spec: &GroupSpec, weights: &[f64], bounds: &GridBox, step: f64) -> Result<GridMinimum> {
    check_weights(spec, weights)?;
    if bounds.dim() != spec.dim() {
        return Err(Error::BadShape(format!(
            "box has {} axes, group has dimension {}",
            bounds.dim(),
            spec.dim()
        )));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step must be positive, got {step}"
        )));
    }
    let counts: Vec<usize> = bounds
        .0
        .iter()
        .map(|(lo, hi)| ((hi - lo) / step).floor().max(0.0) as usize + 1)
        .collect();
    let total: f64 = counts.iter().map(|c| *c as f64).product();
    if total > MAX_GRID_POINTS {
        return Err(Error::BoxTooLarge {
            points: total,
            limit: MAX_GRID_POINTS,
        });
    }
    let total = total as usize;
    let rows = spec.exponent_rows();
    let point = |mut k: usize| -> Vec<f64> {
        counts
            .iter()
            .zip(&bounds.0)
            .map(|(n, (lo, _))| {
                let i = k % n;
                k /= n;
                lo + i as f64 * step
            })
            .collect()
    };
    let (best, value) = (0..total)
        .into_par_iter()
        .map(|k| (k, weighted_sum(&rows, weights, &point(k))))
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    Ok(GridMinimum {
        s: point(best),
        value,
        step,
        points: total,
        error_bound: lipschitz_bound(&rows, step, spec.dim(), value),
    })
}

/// Two-stage search: a coarse grid over `bounds`, then a fine grid over the
/// two coarse cells around the best coarse point. Each stage uses at most
/// `points_per_stage` points.
pub fn grid_min_refined(
    spec: &GroupSpec,
    weights: &[f64],
    bounds: &GridBox,
    points_per_stage: usize,
) -> Result<GridMinimum> {
    let d = spec.dim();
    let per_axis = ((points_per_stage as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let widest = bounds.0.iter().map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let coarse = grid_min(spec, weights, bounds, widest / (per_axis - 1) as f64)?;

    let reach = 2.0 * coarse.step;
    let fine_box = GridBox(
        coarse
            .s
            .iter()
            .zip(&bounds.0)
            .map(|(c, (lo, hi))| ((c - reach).max(*lo), (c + reach).min(*hi)))
            .collect(),
    );
    let fine = grid_min(spec, weights, &fine_box, 2.0 * reach / (per_axis - 1) as f64)?;
    let best = if fine.value <= coarse.value {
        fine.clone()
    } else {
        coarse.clone()
    };
    Ok(GridMinimum {
        points: coarse.points + fine.points,
        ..best
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerReport {
    pub samples: usize,
    pub seed: u64,
    pub max_value: f64,
    pub passed: bool,
}

/// Draws bundles uniformly from the positive part of the budget plane
/// `⟨p, x⟩ = w` and checks that none is worth more than `v_claimed`.
pub fn budget_sampler_check(
    spec: &GroupSpec,
    p: &Bundle,
    w: f64,
    r: &Bundle,
    v_claimed: f64,
    samples: usize,
    seed: u64,
) -> Result<SamplerReport> {
    spec.check_bundle(p)?;
    let l = spec.commodities();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_value = 0.0f64;
    let mut exceeded = false;
    for _ in 0..samples {
        let u: Vec<f64> = (0..l).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = u.iter().sum();
        let x: Vec<f64> = u.iter().zip(p.as_slice()).map(|(ui, pi)| w * ui / total / pi).collect();
        let Ok(x) = Bundle::new(x) else {
            continue;
        };
        let v = decompose(spec, &x, r)?.value;
        max_value = max_value.max(v);
        exceeded |= v > v_claimed * (1.0 + 1e-9);
    }
    Ok(SamplerReport {
        samples,
        seed,
        max_value,
        passed: !exceeded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(rows: &[&[f64]]) -> GroupSpec {
        GroupSpec::new(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn symmetric_grid() {
        let g = group(&[&[1.0], &[-1.0]]);
        let m = grid_min(&g, &[1.0, 1.0], &GridBox::cube(1, 5.0), 1e-4).unwrap();
        assert!(m.s[0].abs() < 1e-4);
        assert!((m.value - 2.0).abs() < 1e-8);
        assert!(m.value - 2.0 <= m.error_bound);
    }

    #[test]
    fn cube_root_grid() {
        let g = group(&[&[1.0], &[-2.0]]);
        let m = grid_min(&g, &[1.0, 1.0], &GridBox::cube(1, 5.0), 1e-4).unwrap();
        assert!((m.s[0] - 0.231049).abs() < 1e-4);
        assert!((m.value - 1.889882).abs() < 1e-6);
    }

    #[test]
    fn consumer_one_weights() {
        let g = group(&[&[1.0], &[-1.0]]);
        let m = grid_min(&g, &[0.5, 0.75], &GridBox::cube(1, 5.0), 1e-4).unwrap();
        assert!((m.value - 1.224745).abs() < 1e-6);
        assert!((200.0 / m.value - 163.299316).abs() < 1e-3);
    }

    #[test]
    fn refined_grid_tightens() {
        let g = group(&[&[1.0], &[-2.0]]);
        let m = grid_min_refined(&g, &[1.0, 1.0], &GridBox::cube(1, 10.0), 1000).unwrap();
        assert!(m.step < 1e-4);
        assert!((m.value - 3.0 * 2f64.powf(-2.0 / 3.0)).abs() <= m.error_bound);
    }

    #[test]
    fn oversized_box() {
        let g = group(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        assert!(matches!(
            grid_min(&g, &[1.0; 3], &GridBox::cube(2, 10.0), 1e-3),
            Err(Error::BoxTooLarge { .. })
        ));
    }

    #[test]
    fn sampler_accepts_true_optimum_and_rejects_deflated_one() {
        let g = group(&[&[1.0], &[-1.0]]);
        let p = Bundle::new(vec![0.25, 0.75]).unwrap();
        let r = Bundle::new(vec![2.0, 1.0]).unwrap();
        let v = 200.0 / 1.5f64.sqrt();
        let ok = budget_sampler_check(&g, &p, 200.0, &r, v, 10_000, 7).unwrap();
        assert!(ok.passed);
        assert!(ok.max_value <= v * (1.0 + 1e-9));
        let bad = budget_sampler_check(&g, &p, 200.0, &r, 0.99 * v, 10_000, 7).unwrap();
        assert!(!bad.passed);
    }
}
