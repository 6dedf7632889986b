//! Unique decomposition `x = v · (M × R)` of an interior bundle against a
//! reference vector.
//!
//! In log coordinates the decomposition is the square linear system
//! `ln(x_i / R_i) = ln v + ⟨a_i, s⟩`, solved with the LU factorization of
//! `[1 | A]` cached on the [`GroupSpec`].

use nalgebra::DVector;

use crate::error::Result;
use crate::group::{Bundle, GroupElement, GroupSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// The bundle's value, in multiples of the reference.
    pub value: f64,
    /// `ln value`, kept so that values beyond the `f64` range still
    /// recompose exactly.
    pub log_value: f64,
    /// The group element carrying the reference onto the bundle's ray.
    pub element: GroupElement,
}

impl Decomposition {
    pub fn new(value: f64, element: GroupElement) -> Self {
        Self::from_log(value.ln(), element)
    }

    pub fn from_log(log_value: f64, element: GroupElement) -> Self {
        Decomposition {
            value: log_value.exp(),
            log_value,
            element,
        }
    }

    /// Every bundle decomposes against itself as `(1, identity)`.
    pub fn trivial(dim: usize) -> Self {
        Self::from_log(0.0, GroupElement::identity(dim))
    }
}

/// Decomposes `x` against the reference `r`.
pub fn decompose(spec: &GroupSpec, x: &Bundle, r: &Bundle) -> Result<Decomposition> {
    spec.check_bundle(x)?;
    spec.check_bundle(r)?;
    let rhs = DVector::from_iterator(
        x.len(),
        x.as_slice().iter().zip(r.as_slice()).map(|(xi, ri)| xi.ln() - ri.ln()),
    );
    let sol = spec
        .factor()
        .solve(&rhs)
        .expect("validated group has a nonsingular system");
    Ok(Decomposition::from_log(
        sol[0],
        GroupElement::new(sol.iter().skip(1).copied().collect()),
    ))
}

/// Rebuilds `v · (M × R)`.
pub fn recompose(spec: &GroupSpec, d: &Decomposition, r: &Bundle) -> Result<Bundle> {
    spec.check_bundle(r)?;
    let log_v = d.log_value;
    let logs = spec.log_scales(&d.element)?;
    let out = r
        .as_slice()
        .iter()
        .zip(logs)
        .map(|(ri, li)| (ri.ln() + log_v + li).exp())
        .collect();
    Bundle::new(out)
}

/// Given decompositions of `X` and `Y` against a common reference, returns
/// the decomposition of `Y` against `X`: value `v_y / v_x`, element
/// `M_y · M_x⁻¹`.
pub fn change_reference(d_x: &Decomposition, d_y: &Decomposition) -> Result<Decomposition> {
    Ok(Decomposition::from_log(
        d_y.log_value - d_x.log_value,
        d_y.element.compose(&d_x.element.inverse())?,
    ))
}

/// Decomposes a price vector against `I`.
pub fn decompose_price(spec: &GroupSpec, p: &Bundle) -> Result<Decomposition> {
    decompose(spec, p, &Bundle::ones(spec.commodities()))
}
