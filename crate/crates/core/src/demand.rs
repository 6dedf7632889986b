//! Consumer demand under referential preferences.
//!
//! The consumer maximizes the value `v` of `x = v · (M × R)` subject to
//! `⟨p, x⟩ = w`. Writing the budget as `v · Σ_i p_i R_i exp(⟨a_i, s⟩) = w`
//! turns the problem into minimizing a weighted sum of exponentials over
//! the group parameter, which [`demand_direct`] does for the given
//! reference. [`demand_closed_form`] instead uses the minimizing matrix `M̄`
//! of the unweighted sum and the formula
//! `f(p) = ⟨p, e⟩ / ⟨I, M̄ I⟩ · P⁻¹ M̄ I`, which involves no reference at all.

use crate::decompose::decompose_price;
use crate::error::{Error, Result};
use crate::expsum;
use crate::group::{Bundle, GroupElement, GroupSpec};

/// The minimizing matrix `M̄` of `g(s) = Σ_i exp(⟨a_i, s⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMatrixResult {
    pub element: GroupElement,
    /// `g_min = ⟨I, M̄ I⟩`.
    pub g_min: f64,
    /// `‖∇g‖∞` at `element`.
    pub gradient: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl MinMatrixResult {
    /// Diagonal of `M̄`.
    pub fn diagonal(&self, spec: &GroupSpec) -> Result<Vec<f64>> {
        spec.diagonal(&self.element)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandResult {
    pub bundle: Bundle,
    /// Value of the demanded bundle against the reference used.
    pub max_value: f64,
    /// The optimizing `M_x`.
    pub element: GroupElement,
    pub wealth: f64,
    pub budget_spent: f64,
}

/// How the consumer's wealth is given.
#[derive(Debug, Clone, PartialEq)]
pub enum Income {
    Budget(f64),
    Endowment(Vec<f64>),
}

impl Income {
    pub fn wealth(&self, p: &Bundle) -> Result<f64> {
        let w = match self {
            Income::Budget(w) => *w,
            Income::Endowment(e) => {
                if e.len() != p.len() {
                    return Err(Error::BadShape(format!(
                        "endowment has {} coordinates, prices have {}",
                        e.len(),
                        p.len()
                    )));
                }
                for (index, v) in e.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFinite("endowment"));
                    }
                    if *v < 0.0 {
                        return Err(Error::NegativeCoordinate {
                            what: "endowment",
                            index,
                        });
                    }
                }
                e.iter().zip(p.as_slice()).map(|(ei, pi)| ei * pi).sum()
            }
        };
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::ZeroWealth(w));
        }
        Ok(w)
    }
}

impl From<f64> for Income {
    fn from(w: f64) -> Self {
        Income::Budget(w)
    }
}

/// Builds a strictly positive price vector.
pub fn price_vector(p: Vec<f64>) -> Result<Bundle> {
    Bundle::labelled(p, "price vector").map_err(|e| match e {
        Error::NonPositiveBundle { index, .. } => Error::NonPositivePrice { index },
        other => other,
    })
}

fn minimize_weighted(spec: &GroupSpec, weights: impl Iterator<Item = f64>) -> Result<expsum::ExpSumMinimum> {
    if !spec.is_coercive() {
        return Err(Error::NotCoercive);
    }
    let log_w: Vec<f64> = weights.map(f64::ln).collect();
    let m = expsum::minimize(spec.exponents(), &log_w)?;
    if !m.converged {
        return Err(Error::NotConverged {
            iterations: m.iterations,
            gradient: m.gradient(),
        });
    }
    Ok(m)
}

/// Finds `M̄` by damped Newton from `s = 0`. The result is cached on the `GroupSpec`.
pub fn find_min_matrix(spec: &GroupSpec) -> Result<MinMatrixResult> {
    spec.min_matrix_cache()
        .get_or_init(|| {
            let m = minimize_weighted(spec, std::iter::repeat_n(1.0, spec.commodities()))?;
            Ok(MinMatrixResult {
                g_min: m.value(),
                gradient: m.gradient(),
                element: GroupElement::new(m.s),
                iterations: m.iterations,
                converged: m.converged,
            })
        })
        .clone()
}

/// Maximizes the value against `r` over the budget plane by minimizing
/// `h(s) = Σ_i p_i R_i exp(⟨a_i, s⟩)`; then `v_max = w / h_min`.
pub fn demand_direct(spec: &GroupSpec, p: &Bundle, income: &Income, r: &Bundle) -> Result<DemandResult> {
    spec.check_bundle(p)?;
    spec.check_bundle(r)?;
    let w = income.wealth(p)?;
    let m = minimize_weighted(spec, p.as_slice().iter().zip(r.as_slice()).map(|(pi, ri)| pi * ri))?;
    // x_i = v_max R_i exp(⟨a_i, s⟩) = w · share_i / p_i.
    let x: Vec<f64> = m
        .shares
        .iter()
        .zip(p.as_slice())
        .map(|(share, pi)| w * share / pi)
        .collect();
    let max_value = (w.ln() - m.log_value).exp();
    Ok(finish(x, max_value, GroupElement::new(m.s), w, p))
}

/// `f(p) = ⟨p, e⟩ / g_min · P⁻¹ M̄ I`.
///
/// The reported value and element are those against `I`.
pub fn demand_closed_form(spec: &GroupSpec, p: &Bundle, income: &Income) -> Result<DemandResult> {
    spec.check_bundle(p)?;
    let w = income.wealth(p)?;
    let min = find_min_matrix(spec)?;
    let m_bar = min.diagonal(spec)?;
    let scale = w / min.g_min;
    let x: Vec<f64> = m_bar.iter().zip(p.as_slice()).map(|(mi, pi)| scale * mi / pi).collect();
    let dp = decompose_price(spec, p)?;
    let max_value = scale / dp.value;
    let element = min.element.compose(&dp.element.inverse())?;
    Ok(finish(x, max_value, element, w, p))
}

fn finish(x: Vec<f64>, max_value: f64, element: GroupElement, wealth: f64, p: &Bundle) -> DemandResult {
    let budget_spent = x.iter().zip(p.as_slice()).map(|(xi, pi)| xi * pi).sum();
    DemandResult {
        bundle: Bundle::from_positive_unchecked(x),
        max_value,
        element,
        wealth,
        budget_spent,
    }
}

/// The maximal attainable value `v_max` against `r`.
pub fn satisfaction(spec: &GroupSpec, p: &Bundle, income: &Income, r: &Bundle) -> Result<f64> {
    Ok(demand_direct(spec, p, income, r)?.max_value)
}

/// The pieces of `v_max = w / (v_p · v_r · g_min)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SatisfactionFactors {
    pub price_value: f64,
    pub price_element: GroupElement,
    pub reference_value: f64,
    pub reference_element: GroupElement,
    pub min_matrix: MinMatrixResult,
}

impl SatisfactionFactors {
    pub fn new(spec: &GroupSpec, p: &Bundle, r: &Bundle) -> Result<Self> {
        let dp = decompose_price(spec, p)?;
        let dr = decompose_price(spec, r)?;
        Ok(SatisfactionFactors {
            price_value: dp.value,
            price_element: dp.element,
            reference_value: dr.value,
            reference_element: dr.element,
            min_matrix: find_min_matrix(spec)?,
        })
    }

    pub fn satisfaction(&self, wealth: f64) -> f64 {
        wealth / (self.price_value * self.reference_value * self.min_matrix.g_min)
    }

    /// `M_p⁻¹ M̄ M_r⁻¹`, the optimizing element of the direct problem.
    pub fn optimizing_element(&self) -> Result<GroupElement> {
        self.min_matrix
            .element
            .compose(&self.price_element.inverse())?
            .compose(&self.reference_element.inverse())
    }
}
