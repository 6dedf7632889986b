//! Pure-exchange economy of referential-preference consumers and a
//! tâtonnement search for market-clearing prices.

use std::sync::Arc;

use crate::demand::{demand_closed_form, demand_direct, price_vector, Income};
use crate::error::{Error, Result};
use crate::group::{Bundle, GroupSpec};

/// Lower bound applied to every price before renormalization.
pub const PRICE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Agent {
    spec: Arc<GroupSpec>,
    reference: Bundle,
    endowment: Vec<f64>,
}

impl Agent {
    pub fn new(spec: Arc<GroupSpec>, reference: Bundle, endowment: Vec<f64>) -> Result<Self> {
        if !spec.is_coercive() {
            return Err(Error::NotCoercive);
        }
        let l = spec.commodities();
        if reference.len() != l || endowment.len() != l {
            return Err(Error::BadShape(format!("agent vectors must have {l} coordinates")));
        }
        for (index, v) in endowment.iter().enumerate() {
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
        Ok(Agent {
            spec,
            reference,
            endowment,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn reference(&self) -> &Bundle {
        &self.reference
    }

    pub fn endowment(&self) -> &[f64] {
        &self.endowment
    }

    pub fn with_reference(&self, reference: Bundle) -> Result<Self> {
        Agent::new(self.spec.clone(), reference, self.endowment.clone())
    }

    pub fn wealth(&self, p: &Bundle) -> Result<f64> {
        Income::Endowment(self.endowment.clone()).wealth(p)
    }

    pub fn demand(&self, p: &Bundle, method: DemandMethod) -> Result<Bundle> {
        let income = Income::Endowment(self.endowment.clone());
        let d = match method {
            DemandMethod::ClosedForm => demand_closed_form(&self.spec, p, &income)?,
            DemandMethod::Direct => demand_direct(&self.spec, p, &income, &self.reference)?,
        };
        Ok(d.bundle)
    }
}

/// Which demand routine the market layer calls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DemandMethod {
    #[default]
    ClosedForm,
    /// Solves each agent's problem against its own reference.
    Direct,
}

fn check_agents(agents: &[Agent]) -> Result<usize> {
    let first = agents
        .first()
        .ok_or_else(|| Error::InvalidParameter("economy has no agents".into()))?;
    let l = first.spec.commodities();
    if let Some(index) = agents.iter().position(|a| a.spec.commodities() != l) {
        return Err(Error::Agent {
            index,
            source: Box::new(Error::BadShape(format!("expected {l} commodities"))),
        });
    }
    Ok(l)
}

/// `z(p) = Σ_i f_i(p) - Σ_i e_i`, using the closed-form demand.
pub fn excess_demand(agents: &[Agent], p: &Bundle) -> Result<Vec<f64>> {
    excess_demand_with(agents, p, DemandMethod::ClosedForm)
}

pub fn excess_demand_with(agents: &[Agent], p: &Bundle, method: DemandMethod) -> Result<Vec<f64>> {
    let l = check_agents(agents)?;
    if p.len() != l {
        return Err(Error::BadShape(format!(
            "price vector has {} coordinates, economy has {l}",
            p.len()
        )));
    }
    let mut z = vec![0.0; l];
    for (index, agent) in agents.iter().enumerate() {
        let x = agent.demand(p, method).map_err(|e| Error::Agent {
            index,
            source: Box::new(e),
        })?;
        for k in 0..l {
            z[k] += x[k] - agent.endowment[k];
        }
    }
    Ok(z)
}

pub fn total_wealth(agents: &[Agent], p: &Bundle) -> f64 {
    agents
        .iter()
        .map(|a| a.endowment.iter().zip(p.as_slice()).map(|(e, q)| e * q).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TatonnementConfig {
    /// Starting prices; the uniform simplex point when `None`.
    pub initial_prices: Option<Vec<f64>>,
    pub step: f64,
    pub tolerance: f64,
    pub max_iters: usize,
    pub method: DemandMethod,
}

impl Default for TatonnementConfig {
    fn default() -> Self {
        TatonnementConfig {
            initial_prices: None,
            step: 0.1,
            tolerance: 1e-8,
            max_iters: 100_000,
            method: DemandMethod::ClosedForm,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    /// Prices on the unit simplex.
    pub prices: Vec<f64>,
    pub excess: Vec<f64>,
    /// `‖z(p)‖∞` at the returned prices.
    pub excess_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest `|⟨p, z(p)⟩| / Σ wealth` over every evaluated price vector.
    pub max_walras_residual: f64,
    pub final_step: f64,
}

impl EquilibriumResult {
    /// `⟨p*, z(p*)⟩`.
    pub fn walras_value(&self) -> f64 {
        self.prices.iter().zip(&self.excess).map(|(p, z)| p * z).sum()
    }
}

fn normalize(p: &mut [f64]) {
    for v in p.iter_mut() {
        *v = v.max(PRICE_FLOOR);
    }
    let sum: f64 = p.iter().sum();
    for v in p.iter_mut() {
        *v /= sum;
    }
}

fn inf_norm(z: &[f64]) -> f64 {
    z.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Price adjustment `p ← normalize(max(p + step · z(p), ε))`.
///
/// A step that increases `‖z‖∞` is rejected and the step size halved.
/// Failing to reach the tolerance is reported through `converged`, not as
/// an error.
pub fn tatonnement(agents: &[Agent], config: &TatonnementConfig) -> Result<EquilibriumResult> {
    let l = check_agents(agents)?;
    if !(config.step > 0.0 && config.step.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {}",
            config.step
        )));
    }
    if !(config.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            config.tolerance
        )));
    }
    let mut p = match &config.initial_prices {
        Some(p0) => {
            if p0.len() != l {
                return Err(Error::BadShape(format!(
                    "initial prices have {} coordinates, economy has {l}",
                    p0.len()
                )));
            }
            price_vector(p0.clone())?.into_vec()
        }
        None => vec![1.0; l],
    };
    normalize(&mut p);

    let mut max_walras = 0.0f64;
    let mut evaluate = |p: &[f64]| -> Result<Vec<f64>> {
        let pb = Bundle::new(p.to_vec())?;
        let z = excess_demand_with(agents, &pb, config.method)?;
        let walras: f64 = p.iter().zip(&z).map(|(a, b)| a * b).sum();
        max_walras = max_walras.max(walras.abs() / total_wealth(agents, &pb));
        Ok(z)
    };

    let mut z = evaluate(&p)?;
    let mut norm = inf_norm(&z);
    let mut step = config.step;
    let mut iterations = 0;
    while norm > config.tolerance && iterations < config.max_iters {
        iterations += 1;
        let mut candidate: Vec<f64> = p.iter().zip(&z).map(|(pi, zi)| pi + step * zi).collect();
        normalize(&mut candidate);
        let zc = evaluate(&candidate)?;
        let nc = inf_norm(&zc);
        if nc > norm {
            step *= 0.5;
            if step < f64::EPSILON * 1e-3 {
                break;
            }
            continue;
        }
        p = candidate;
        z = zc;
        norm = nc;
    }

    Ok(EquilibriumResult {
        converged: norm <= config.tolerance,
        prices: p,
        excess: z,
        excess_norm: norm,
        iterations,
        max_walras_residual: max_walras,
        final_step: step,
    })
}
