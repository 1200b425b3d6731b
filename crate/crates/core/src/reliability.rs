//! Default-risk estimates implied by bids and fines, and the binomial
//! approximation of how much accepted energy actually arrives at an hhp.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

use crate::clearing::Allocation;
use crate::model::{ContractBook, ContractId, EnergyQty, ModelError, Money};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReliabilityError {
    #[error("unbounded: fine is zero")]
    ZeroFine,
    #[error("no active contracts")]
    NoActiveContracts,
    #[error("no active contracts at hhp {0}")]
    EmptyHhp(usize),
    #[error("supply {y} kWh exceeds the {x_max} kWh deliverable at hhp {hhp}")]
    SupplyAboveMax { y: u64, x_max: u64, hhp: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// Lower bound on the success probability of a contract with total fine
/// `fine` and total bid `bid_total`: `(f − b)/f` clamped to `[0, 1]`.
pub fn prob_lower_bound(fine: Money, bid_total: Money) -> Result<f64, ReliabilityError> {
    if fine == Money::ZERO {
        return Err(ReliabilityError::ZeroFine);
    }
    let f = fine.as_f64();
    Ok(clamp01((f - bid_total.as_f64()) / f))
}

/// Minimum success probability at which a fleet with attempt cost `cost`
/// would rationally offer: `(f + c − b)/f` clamped to `[0, 1]`.
pub fn min_offer_probability(fine: Money, cost: Money, bid_total: Money) -> Result<f64, ReliabilityError> {
    if fine == Money::ZERO {
        return Err(ReliabilityError::ZeroFine);
    }
    let f = fine.as_f64();
    Ok(clamp01((f + cost.as_f64() - bid_total.as_f64()) / f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveContract {
    pub id: ContractId,
    pub hhp: usize,
    pub size: EnergyQty,
    /// Assessed lower bound on the probability the contract is honored.
    pub p_hat: f64,
}

/// How to treat contracts with a zero fine, for which no bound exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroFinePolicy {
    Reject,
    /// Use the trivial bound 0.
    AssumeZero,
}

/// Accepted, not-yet-defaulted contracts with their assessed probabilities.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ActiveSet {
    pub contracts: Vec<ActiveContract>,
}

impl ActiveSet {
    pub fn new(contracts: Vec<ActiveContract>) -> ActiveSet {
        for c in &contracts {
            assert!((0.0..=1.0).contains(&c.p_hat), "p_hat outside [0,1]");
        }
        ActiveSet { contracts }
    }

    /// Active set for an allocation, with bounds derived from each contract's bid and fine.
    pub fn from_allocation(
        allocation: &Allocation,
        book: &ContractBook,
        policy: ZeroFinePolicy,
    ) -> Result<ActiveSet, ReliabilityError> {
        let mut out = Vec::with_capacity(allocation.accepted.len());
        for &id in &allocation.accepted {
            let c = book.get(id)?;
            let size = book.size_of(id)?;
            let p_hat = match (prob_lower_bound(c.fine, c.bid.times_kwh(size)), policy) {
                (Ok(p), _) => p,
                (Err(ReliabilityError::ZeroFine), ZeroFinePolicy::AssumeZero) => 0.0,
                (Err(e), _) => return Err(e),
            };
            out.push(ActiveContract { id, hhp: c.hhp, size, p_hat });
        }
        Ok(ActiveSet { contracts: out })
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    pub fn at_hhp(&self, hhp: usize) -> ActiveSet {
        ActiveSet { contracts: self.contracts.iter().filter(|c| c.hhp == hhp).cloned().collect() }
    }

    /// Contracts grouped by hhp.
    pub fn by_hhp(&self) -> BTreeMap<usize, Vec<&ActiveContract>> {
        let mut out: BTreeMap<usize, Vec<&ActiveContract>> = BTreeMap::new();
        for c in &self.contracts {
            out.entry(c.hhp).or_default().push(c);
        }
        out
    }
}

/// Energy-weighted mean of the assessed probabilities.
pub fn mean_success_prob(active: &ActiveSet) -> Result<f64, ReliabilityError> {
    if active.is_empty() {
        return Err(ReliabilityError::NoActiveContracts);
    }
    let (num, den) = active
        .contracts
        .iter()
        .fold((0.0, 0.0), |(n, d), c| (n + c.size.kwh() as f64 * c.p_hat, d + c.size.kwh() as f64));
    Ok(num / den)
}

pub fn mean_bundle_size(active: &ActiveSet) -> Result<f64, ReliabilityError> {
    if active.is_empty() {
        return Err(ReliabilityError::NoActiveContracts);
    }
    let total: u64 = active.contracts.iter().map(|c| c.size.kwh()).sum();
    Ok(total as f64 / active.contracts.len() as f64)
}

/// Energy delivered at `hhp` if every active contract there is honored.
pub fn x_max(active: &ActiveSet, hhp: usize) -> EnergyQty {
    active.contracts.iter().filter(|c| c.hhp == hhp).map(|c| c.size).sum()
}

/// Round to nearest, ties up.
fn round_index(x: f64) -> u64 {
    (x + 0.5).floor().max(0.0) as u64
}

/// `C(n, k)·p^k·(1 − p)^(n − k)`, evaluated in log space.
pub fn binomial_pmf(n: u64, k: u64, p: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
}

/// Binomial approximation of the supply at one hhp: `n = X_max/ℓ̄` identical
/// contracts of size `ℓ̄`, each honored with probability `p̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupplyDistribution {
    pub hhp: usize,
    pub mean_size: f64,
    pub mean_prob: f64,
    pub x_max: EnergyQty,
    pub trials: u64,
    /// Supply levels `0, ℓ̄, 2ℓ̄, …`.
    pub support: Vec<f64>,
    pub pmf: Vec<f64>,
}

/// One point of a distribution measured against demand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupplyPoint {
    pub supply: f64,
    pub probability: f64,
    pub deficit: f64,
    pub excess: f64,
}

impl SupplyDistribution {
    pub fn build(active: &ActiveSet, hhp: usize) -> Result<SupplyDistribution, ReliabilityError> {
        let here = active.at_hhp(hhp);
        if here.is_empty() {
            return Err(ReliabilityError::EmptyHhp(hhp));
        }
        let mean_size = mean_bundle_size(&here)?;
        let mean_prob = mean_success_prob(&here)?;
        let x_max = x_max(&here, hhp);
        let trials = round_index(x_max.kwh() as f64 / mean_size);
        let support = (0..=trials).map(|k| k as f64 * mean_size).collect();
        let pmf = (0..=trials).map(|k| binomial_pmf(trials, k, mean_prob)).collect();
        Ok(SupplyDistribution { hhp, mean_size, mean_prob, x_max, trials, support, pmf })
    }

    /// Probability assigned to supply `y`, snapped to the nearest grid point.
    pub fn probability(&self, y: EnergyQty) -> Result<f64, ReliabilityError> {
        if y > self.x_max {
            return Err(ReliabilityError::SupplyAboveMax { y: y.kwh(), x_max: self.x_max.kwh(), hhp: self.hhp });
        }
        let k = round_index(y.kwh() as f64 / self.mean_size).min(self.trials);
        Ok(self.pmf[k as usize])
    }

    /// Deficit and excess relative to `demand` at every grid point.
    pub fn against_demand(&self, demand: EnergyQty) -> Vec<SupplyPoint> {
        let d = demand.kwh() as f64;
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&y, &p)| SupplyPoint { supply: y, probability: p, deficit: (d - y).max(0.0), excess: (y - d).max(0.0) })
            .collect()
    }
}

/// Approximate probability that exactly `y` kWh arrive at `hhp`.
pub fn supply_probability(y: EnergyQty, active: &ActiveSet, hhp: usize) -> Result<f64, ReliabilityError> {
    SupplyDistribution::build(active, hhp)?.probability(y)
}

/// Empirical distribution of delivered energy when each contract of size
/// `ℓ` is honored independently with its own probability.
pub fn monte_carlo_supply(contracts: &[(EnergyQty, f64)], samples: u64, seed: u64) -> BTreeMap<u64, u64> {
    let mut r = rng::stream(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..samples {
        let y: u64 = contracts.iter().filter(|&&(_, p)| rng::bernoulli(&mut r, p)).map(|(s, _)| s.kwh()).sum();
        *counts.entry(y).or_insert(0) += 1;
    }
    counts
}
