//! Damped Newton minimization of `h(s) = Σ_i w_i exp(⟨a_i, s⟩)`.
//!
//! The iteration runs on `F(s) = ln h(s)`, a log-sum-exp of affine forms.
//! `F` has the same minimizer as `h`, its gradient is the softmax-weighted
//! mean of the rows `a_i`, and its Hessian is the corresponding covariance.
//! Working with `F` makes the stopping rule independent of the weight scale
//! and keeps every evaluation free of overflow.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const GRADIENT_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100;
/// Runtime divergence guard on `‖s‖∞`.
pub const PARAMETER_LIMIT: f64 = 1e3;
/// Runtime divergence guard on `h(s) / min_i w_i`. When a minimizer exists
/// it equals `Π_i (w_i / λ_i)^λ_i ≥ min_i w_i` (weighted AM-GM with the
/// barycentric weights `λ`), so dropping below this ratio proves divergence.
pub const COLLAPSE_RATIO: f64 = 1e-12;
/// Largest Newton step, in `‖·‖∞`. `F` is Lipschitz, so a bounded step keeps
/// the line search meaningful when the Hessian is nearly singular.
pub const MAX_STEP: f64 = 50.0;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSumMinimum {
    pub s: Vec<f64>,
    /// `ln h(s)`.
    pub log_value: f64,
    /// Softmax weights `w_i exp(⟨a_i, s⟩) / h(s)`; they sum to one.
    pub shares: Vec<f64>,
    /// `‖∇F(s)‖∞`; the gradient of `h` itself is `h(s)` times this.
    pub log_gradient: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl ExpSumMinimum {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }

    pub fn gradient(&self) -> f64 {
        self.value() * self.log_gradient
    }
}

struct Eval {
    log_value: f64,
    shares: DVector<f64>,
    /// `max_i Σ_j |a_ij s_j| + |ln w_i|`; sets the rounding level of
    /// `log_value`.
    magnitude: f64,
}

fn evaluate(a: &DMatrix<f64>, log_w: &DVector<f64>, s: &DVector<f64>) -> Eval {
    let z = a * s + log_w;
    let m = z.max();
    let exps = z.map(|zi| (zi - m).exp());
    let sum = exps.sum();
    Eval {
        log_value: m + sum.ln(),
        shares: exps / sum,
        magnitude: (a.abs() * s.abs() + log_w.abs()).amax(),
    }
}

/// Minimizes `Σ_i w_i exp(⟨a_i, s⟩)` starting from `s = 0`.
///
/// `a` is `l × d`, `log_w` holds `ln w_i`. Errors with [`Error::NotCoercive`]
/// when a divergence guard trips; a run that merely exhausts the iteration
/// budget is returned with `converged = false`.
pub fn minimize(a: &DMatrix<f64>, log_w: &[f64]) -> Result<ExpSumMinimum> {
    let l = a.nrows();
    let d = a.ncols();
    if log_w.len() != l {
        return Err(Error::BadShape(format!(
            "{} weights for {l} exponent rows",
            log_w.len()
        )));
    }
    let log_w = DVector::from_column_slice(log_w);
    let mut s = DVector::zeros(d);
    let mut eval = evaluate(a, &log_w, &s);
    let log_floor = log_w.min() + COLLAPSE_RATIO.ln();
    let mut iterations = 0;

    loop {
        let grad = a.transpose() * &eval.shares;
        let grad_norm = grad.amax();
        let finish = |s: &DVector<f64>, eval: Eval, iterations, converged| ExpSumMinimum {
            s: s.iter().copied().collect(),
            log_value: eval.log_value,
            shares: eval.shares.iter().copied().collect(),
            log_gradient: grad_norm,
            iterations,
            converged,
        };

        if grad_norm <= GRADIENT_TOLERANCE * 1e-3 {
            return Ok(finish(&s, eval, iterations, true));
        }
        if eval.log_value < log_floor {
            return Err(Error::NotCoercive);
        }
        if iterations >= MAX_ITERATIONS {
            let ok = grad_norm <= GRADIENT_TOLERANCE;
            return Ok(finish(&s, eval, iterations, ok));
        }

        // Hessian of F: Aᵀ diag(π) A - ∇F ∇Fᵀ.
        let weighted = DMatrix::from_fn(l, d, |i, j| a[(i, j)] * eval.shares[i]);
        let hessian = a.transpose() * weighted - &grad * grad.transpose();
        let mut direction = newton_direction(&hessian, &grad);
        let length = direction.amax();
        if length > MAX_STEP {
            direction *= MAX_STEP / length;
        }

        let slope = grad.dot(&direction);
        // Once the predicted decrease is below the rounding level of F the
        // line search only sees noise; take the full step.
        let noise = 8.0 * f64::EPSILON * eval.magnitude.max(eval.log_value.abs()).max(1.0);
        let negligible = -slope <= noise;
        let mut t = 1.0;
        let accepted = loop {
            let trial = &s + &direction * t;
            let trial_eval = evaluate(a, &log_w, &trial);
            if trial_eval.log_value.is_finite()
                && (negligible || trial_eval.log_value <= eval.log_value + ARMIJO * t * slope)
            {
                break Some((trial, trial_eval));
            }
            t *= 0.5;
            if t < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some((trial, trial_eval)) => {
                s = trial;
                eval = trial_eval;
            }
            None => {
                // No further decrease is representable.
                let ok = grad_norm <= GRADIENT_TOLERANCE;
                return Ok(finish(&s, eval, iterations, ok));
            }
        }
        if s.amax() > PARAMETER_LIMIT {
            return Err(Error::NotCoercive);
        }
    }
}

/// Solves `H d = -g`, adding Levenberg damping if `H` is not numerically
/// positive definite.
fn newton_direction(hessian: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let scale = hessian.diagonal().amax().max(f64::MIN_POSITIVE);
    let mut mu = 0.0;
    loop {
        let mut h = hessian.clone();
        for i in 0..h.nrows() {
            h[(i, i)] += mu;
        }
        if let Some(chol) = h.cholesky() {
            return chol.solve(&(-grad));
        }
        mu = if mu == 0.0 { scale * 1e-12 + 1e-300 } else { mu * 10.0 };
        if mu > scale * 1e6 + 1.0 {
            return -grad;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(values: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(values.len(), 1, values)
    }

    #[test]
    fn symmetric_pair_minimum_at_origin() {
        let m = minimize(&column(&[1.0, -1.0]), &[0.0, 0.0]).unwrap();
        assert!(m.converged);
        assert!(m.s[0].abs() < 1e-14);
        assert!((m.value() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_pair_matches_calculus() {
        // min t/2 + 3/(4t) at t = sqrt(3/2), value sqrt(3/2).
        let m = minimize(&column(&[1.0, -1.0]), &[0.5f64.ln(), 0.75f64.ln()]).unwrap();
        assert!((m.s[0].exp() - 1.5f64.sqrt()).abs() < 1e-13);
        assert!((m.value() - 1.5f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn weight_scale_does_not_change_argmin() {
        let a = column(&[2.0, -3.0]);
        let m1 = minimize(&a, &[0.0, 0.0]).unwrap();
        let m2 = minimize(&a, &[40.0, 40.0]).unwrap();
        assert!((m1.s[0] - m2.s[0]).abs() < 1e-13);
        assert!((m2.log_value - m1.log_value - 40.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_guard_flags_monotone_direction() {
        assert_eq!(minimize(&column(&[1.0, 2.0]), &[0.0, 0.0]), Err(Error::NotCoercive));
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        assert_eq!(minimize(&a, &[0.0; 3]), Err(Error::NotCoercive));
    }

    #[test]
    fn bounded_but_unattained_infimum_needs_the_precheck() {
        // exp(0) + exp(-s): infimum 1 approached as s → ∞. The gradient
        // vanishes numerically, so only the barycentric precheck sees it.
        let m = minimize(&column(&[0.0, -1.0]), &[0.0, 0.0]).unwrap();
        assert!(m.shares[1] < 1e-12);
        let g = crate::group::GroupSpec::new(&[vec![0.0], vec![-1.0]]).unwrap();
        assert_eq!(crate::demand::find_min_matrix(&g), Err(Error::NotCoercive));
    }

    #[test]
    fn large_exponents_converge() {
        let a = DMatrix::from_row_slice(4, 3, &[8.0, -1.0, 0.5, -7.5, 2.0, 3.0, 0.5, -8.0, 1.0, -1.0, 6.0, -7.0]);
        let m = minimize(&a, &[0.0; 4]).unwrap();
        assert!(m.converged);
        assert!(m.iterations <= 50);
        assert!(m.gradient() <= GRADIENT_TOLERANCE);
    }
}
