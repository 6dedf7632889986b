//! The preference preorder induced by decomposition values.

use crate::decompose::decompose;
use crate::error::{Error, Result};
use crate::group::{Bundle, GroupElement, GroupSpec};

/// Relative tolerance under which two values count as equal.
pub const INDIFFERENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    FirstPreferred,
    SecondPreferred,
    Indifferent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceVerdict {
    pub ordering: Ordering,
    /// Values of the two bundles; `None` when the boundary rule decided.
    pub values: Option<(f64, f64)>,
}

/// The value `v_x` of `x` against the reference `r`.
pub fn value(spec: &GroupSpec, x: &Bundle, r: &Bundle) -> Result<f64> {
    Ok(decompose(spec, x, r)?.value)
}

fn values_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= INDIFFERENCE_TOLERANCE * a.max(b)
}

fn interior(spec: &GroupSpec, x: &[f64], what: &'static str) -> Result<Option<Bundle>> {
    if x.len() != spec.commodities() {
        return Err(Error::BadShape(format!(
            "{what} has {} coordinates, group acts on {}",
            x.len(),
            spec.commodities()
        )));
    }
    for (index, v) in x.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite(what));
        }
        if *v < 0.0 {
            return Err(Error::NegativeCoordinate { what, index });
        }
    }
    if x.contains(&0.0) {
        Ok(None)
    } else {
        Bundle::labelled(x.to_vec(), what).map(Some)
    }
}

/// Compares two nonnegative bundles.
///
/// Interior bundles are ranked by value. An interior bundle beats any
/// bundle on the boundary; two boundary bundles are not comparable.
pub fn prefer(spec: &GroupSpec, x: &[f64], y: &[f64], r: &Bundle) -> Result<PreferenceVerdict> {
    let x = interior(spec, x, "first bundle")?;
    let y = interior(spec, y, "second bundle")?;
    match (x, y) {
        (Some(x), Some(y)) => {
            let vx = value(spec, &x, r)?;
            let vy = value(spec, &y, r)?;
            let ordering = if values_tied(vx, vy) {
                Ordering::Indifferent
            } else if vx > vy {
                Ordering::FirstPreferred
            } else {
                Ordering::SecondPreferred
            };
            Ok(PreferenceVerdict {
                ordering,
                values: Some((vx, vy)),
            })
        }
        (Some(_), None) => Ok(PreferenceVerdict {
            ordering: Ordering::FirstPreferred,
            values: None,
        }),
        (None, Some(_)) => Ok(PreferenceVerdict {
            ordering: Ordering::SecondPreferred,
            values: None,
        }),
        (None, None) => Err(Error::BothBoundary),
    }
}

/// Returns the witness `M` with `M × x = y` when `x ∼ y`, `None` otherwise.
///
/// Values are compared against `I`; the witness is checked by applying it.
pub fn indifference_witness(spec: &GroupSpec, x: &Bundle, y: &Bundle) -> Result<Option<GroupElement>> {
    let i = Bundle::ones(spec.commodities());
    let dx = decompose(spec, x, &i)?;
    let dy = decompose(spec, y, &i)?;
    if !values_tied(dx.value, dy.value) {
        return Ok(None);
    }
    let witness = dy.element.compose(&dx.element.inverse())?;
    let moved = spec.apply(&witness, x)?;
    let on_orbit = moved
        .as_slice()
        .iter()
        .zip(y.as_slice())
        .all(|(a, b)| (a - b).abs() <= INDIFFERENCE_TOLERANCE * a.abs().max(b.abs()));
    Ok(on_orbit.then_some(witness))
}

/// `x ∼ y`: both bundles lie on one orbit of the group.
pub fn indifferent(spec: &GroupSpec, x: &Bundle, y: &Bundle) -> Result<bool> {
    Ok(indifference_witness(spec, x, y)?.is_some())
}
