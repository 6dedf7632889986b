//! Referential preferences over diagonal exponential matrix groups.
//!
//! A consumer ranks bundles `x` by the scalar `v` in the unique
//! decomposition `x = v · (M × R)`, where `M` ranges over a matrix group
//! acting on the positive orthant and `R` is a fixed reference vector.
//! This crate computes those decompositions, the induced preference
//! preorder, the consumer's demand (both by direct optimization against
//! `R` and by the reference-free closed form), and market-clearing prices
//! for exchange economies of such consumers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decompose;
pub mod demand;
pub mod economy;
pub mod error;
pub mod expsum;
pub mod group;
pub mod oracle;
pub mod preference;
pub mod scenario;

pub use decompose::{change_reference, decompose, decompose_price, recompose, Decomposition};
pub use demand::{
    demand_closed_form, demand_direct, find_min_matrix, price_vector, satisfaction, DemandResult, Income,
    MinMatrixResult, SatisfactionFactors,
};
pub use economy::{excess_demand, tatonnement, Agent, DemandMethod, EquilibriumResult, TatonnementConfig};
pub use error::{Error, Result};
pub use group::{validate_group, Bundle, Coercivity, GroupElement, GroupSpec};
pub use preference::{indifferent, prefer, value, Ordering, PreferenceVerdict};
