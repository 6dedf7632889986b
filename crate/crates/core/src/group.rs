//! Diagonal exponential matrix groups acting on the positive orthant.
//!
//! A group over `l` commodities is described by an `l × (l-1)` exponent
//! matrix `A`. The element with parameter `s ∈ R^(l-1)` is the diagonal
//! matrix `diag(exp(⟨a_1, s⟩), …, exp(⟨a_l, s⟩))`, where `a_i` is row `i`
//! of `A`. The group is abelian and composition is parameter addition.
//!
//! `diag(t, 1/t)` is `A = (1, -1)ᵀ` with `t = exp(s)`; `diag(t, 1/t²)` is
//! `A = (1, -2)ᵀ`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::demand::MinMatrixResult;
use crate::error::{Error, Result};

/// Threshold on the row-norm-scaled absolute determinant of `[1 | A]`.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

/// A strictly positive, finite vector of commodity quantities (or prices).
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle(Vec<f64>);

impl Bundle {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::labelled(values, "bundle")
    }

    /// Like [`Bundle::new`], naming the vector in the error message.
    pub fn labelled(values: Vec<f64>, what: &'static str) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::BadShape(format!("{what} is empty")));
        }
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite(what));
            }
            if v <= 0.0 {
                return Err(Error::NonPositiveBundle { what, index });
            }
        }
        Ok(Bundle(values))
    }

    /// The all-ones vector `I`.
    pub fn ones(l: usize) -> Self {
        Bundle(vec![1.0; l])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Multiplies every coordinate by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Bundle::new(self.0.iter().map(|v| v * c).collect())
    }

    pub(crate) fn from_positive_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| *v > 0.0 && v.is_finite()));
        Bundle(values)
    }
}

impl std::ops::Index<usize> for Bundle {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Bundle {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        Bundle::new(values)
    }
}

/// A group element, stored by its parameter vector `s ∈ R^(l-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement(Vec<f64>);

impl GroupElement {
    pub fn new(params: Vec<f64>) -> Self {
        GroupElement(params)
    }

    pub fn identity(dim: usize) -> Self {
        GroupElement(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.0
    }

    pub fn into_params(self) -> Vec<f64> {
        self.0
    }

    /// Group product; for this abelian group it is parameter addition.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        if self.dim() != other.dim() {
            return Err(Error::SpecMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(GroupElement(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.iter().map(|v| -v).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Whether the sum of exponentials over the group attains a minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coercivity {
    Coercive,
    NotCoercive,
}

/// A validated diagonal exponential subgroup of `GL(l, R)`.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    exponents: DMatrix<f64>,
    factor: LU<f64, Dyn, Dyn>,
    scaled_det: f64,
    barycentric: Vec<f64>,
    coercivity: Coercivity,
    min_matrix: OnceLock<Result<MinMatrixResult>>,
}

impl GroupSpec {
    /// Validates an exponent matrix given as `l` rows of `l - 1` entries.
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let l = rows.len();
        validate_group(l, rows)
    }

    /// Commodity count `l`.
    pub fn commodities(&self) -> usize {
        self.exponents.nrows()
    }

    /// Group dimension, always `l - 1`.
    pub fn dim(&self) -> usize {
        self.exponents.ncols()
    }

    pub fn exponents(&self) -> &DMatrix<f64> {
        &self.exponents
    }

    pub fn exponent_rows(&self) -> Vec<Vec<f64>> {
        self.exponents.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    /// Row-norm-scaled absolute determinant of `[1 | A]`.
    pub fn scaled_determinant(&self) -> f64 {
        self.scaled_det
    }

    /// Advisory flag: does a minimizing matrix exist?
    pub fn coercivity(&self) -> Coercivity {
        self.coercivity
    }

    pub fn is_coercive(&self) -> bool {
        self.coercivity == Coercivity::Coercive
    }

    /// Barycentric coordinates of the origin with respect to the rows of `A`.
    ///
    /// The rows are `l` affinely independent points in `R^(l-1)`, so they span
    /// a simplex; the group is coercive iff every coordinate is positive.
    pub fn origin_barycentric(&self) -> &[f64] {
        &self.barycentric
    }

    /// LU factorization of `[1 | A]`, shared by every decomposition.
    pub(crate) fn factor(&self) -> &LU<f64, Dyn, Dyn> {
        &self.factor
    }

    pub(crate) fn min_matrix_cache(&self) -> &OnceLock<Result<MinMatrixResult>> {
        &self.min_matrix
    }

    /// `⟨a_i, s⟩` for every row.
    pub fn log_scales(&self, s: &GroupElement) -> Result<Vec<f64>> {
        self.check_element(s)?;
        let sv = DVector::from_column_slice(s.params());
        Ok((&self.exponents * sv).iter().copied().collect())
    }

    /// Diagonal entries `exp(⟨a_i, s⟩)` of the element.
    pub fn diagonal(&self, s: &GroupElement) -> Result<Vec<f64>> {
        let d: Vec<f64> = self.log_scales(s)?.into_iter().map(f64::exp).collect();
        assert!(d.iter().all(|v| *v > 0.0), "diagonal entry underflowed");
        Ok(d)
    }

    /// The element as an `l × l` matrix. Only meant for display.
    pub fn matrix(&self, s: &GroupElement) -> Result<DMatrix<f64>> {
        Ok(DMatrix::from_diagonal(&DVector::from_vec(self.diagonal(s)?)))
    }

    /// Action of `s` on a bundle: coordinate `i` becomes `x_i · exp(⟨a_i, s⟩)`.
    pub fn apply(&self, s: &GroupElement, x: &Bundle) -> Result<Bundle> {
        self.check_bundle(x)?;
        let logs = self.log_scales(s)?;
        let out: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(logs)
            .map(|(xi, li)| (xi.ln() + li).exp())
            .collect();
        Bundle::new(out)
    }

    pub(crate) fn check_bundle(&self, x: &Bundle) -> Result<()> {
        if x.len() != self.commodities() {
            return Err(Error::BadShape(format!(
                "vector has {} coordinates, group acts on {}",
                x.len(),
                self.commodities()
            )));
        }
        Ok(())
    }

    pub(crate) fn check_element(&self, s: &GroupElement) -> Result<()> {
        if s.dim() != self.dim() {
            return Err(Error::SpecMismatch {
                left: s.dim(),
                right: self.dim(),
            });
        }
        Ok(())
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.exponents == other.exponents
    }
}

/// Validates `l` and the exponent rows, returning a [`GroupSpec`].
///
/// Fails with [`Error::SingularSystem`] when `[1 | A]` is singular: then some
/// interior bundles have no decomposition or more than one.
pub fn validate_group(l: usize, rows: &[Vec<f64>]) -> Result<GroupSpec> {
    if l < 2 {
        return Err(Error::BadShape(format!("need at least 2 commodities, got {l}")));
    }
    if rows.len() != l {
        return Err(Error::BadShape(format!(
            "exponent matrix has {} rows, expected {l}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != l - 1 {
            return Err(Error::BadShape(format!(
                "exponent row {i} has {} entries, expected {}",
                row.len(),
                l - 1
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("exponent matrix"));
        }
    }

    let exponents = DMatrix::from_fn(l, l - 1, |i, j| rows[i][j]);
    let system = DMatrix::from_fn(l, l, |i, j| if j == 0 { 1.0 } else { rows[i][j - 1] });

    let mut scaled = system.clone();
    for mut row in scaled.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let scaled_det = scaled.lu().determinant().abs();
    if !(scaled_det > SINGULARITY_THRESHOLD) {
        return Err(Error::SingularSystem { scaled_det });
    }

    // Σ λ_i = 1 and Σ λ_i a_i = 0.
    let mut rhs = DVector::zeros(l);
    rhs[0] = 1.0;
    let barycentric: Vec<f64> = system
        .transpose()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularSystem { scaled_det })?
        .iter()
        .copied()
        .collect();
    let coercivity = if barycentric.iter().all(|v| *v > 0.0) {
        Coercivity::Coercive
    } else {
        Coercivity::NotCoercive
    };

    Ok(GroupSpec {
        exponents,
        factor: system.lu(),
        scaled_det,
        barycentric,
        coercivity,
        min_matrix: OnceLock::new(),
    })
}
