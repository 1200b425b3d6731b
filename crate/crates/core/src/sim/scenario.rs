use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fr::{EvFrState, FrConfig, FrError};
use crate::model::{
    Bundle, BundleId, Contract, ContractBook, ContractId, DemandVector, EnergyQty, EvId, FleetId, FleetPrivate, Market,
    ModelError, Money, PriceVector, Timeline,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("{what} has {got} entries, expected {expected}")]
    Length { what: String, got: usize, expected: usize },
    #[error("duplicate fleet id {0}")]
    DuplicateFleet(FleetId),
    #[error("duplicate EV id {0}")]
    DuplicateEv(EvId),
    #[error("EV {ev}: plugged hhp {hhp} outside the day")]
    PluggedOutOfRange { ev: EvId, hhp: usize },
    #[error("carbon factors must be non-negative with balancing >= grid")]
    CarbonFactors,
    #[error("FR constants must be finite and non-negative")]
    FrConstants,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fr(#[from] FrError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractSpec {
    pub id: ContractId,
    pub hhp: usize,
    /// Pence per kWh.
    pub bid: Money,
    /// Total pence owed on default.
    pub fine: Money,
    /// The fleet's private probability of honoring the contract.
    pub success_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleSpec {
    pub id: BundleId,
    pub size: EnergyQty,
    #[serde(default)]
    pub contracts: Vec<ContractSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FleetSpec {
    pub id: FleetId,
    pub imported_price: Money,
    pub deterioration_cost: Money,
    pub scheduling_cost: Money,
    #[serde(default)]
    pub bundles: Vec<BundleSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvSpec {
    pub id: EvId,
    pub capacity: EnergyQty,
    pub soc: EnergyQty,
    pub x_min: EnergyQty,
    pub x_max: EnergyQty,
    /// The hhps during which the EV is plugged in.
    #[serde(default)]
    pub plugged: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriceSpec {
    pub day_ahead: Vec<Money>,
    pub balancing: Vec<Money>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intra_day: Option<Vec<Money>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarbonFactors {
    pub grid_g_per_kwh: f64,
    pub balancing_g_per_kwh: f64,
}

impl Default for CarbonFactors {
    /// Illustrative defaults, not measured values.
    fn default() -> Self {
        CarbonFactors { grid_g_per_kwh: 200.0, balancing_g_per_kwh: 600.0 }
    }
}

/// Everything one simulated day needs. This is also the scenario file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub seed: u64,
    pub hhp_count: usize,
    /// Half-open `[start, end)` peak ranges.
    pub peaks: Vec<[usize; 2]>,
    /// Expected demand per hhp, kWh.
    pub demand: Vec<EnergyQty>,
    #[serde(default)]
    pub safety_margin: EnergyQty,
    pub prices: PriceSpec,
    /// Exogenous signed imbalance per hhp, kWh; empty means zero.
    #[serde(default)]
    pub imbalance: Vec<i64>,
    #[serde(default)]
    pub fr: FrConfig,
    #[serde(default)]
    pub carbon: CarbonFactors,
    #[serde(default)]
    pub fleets: Vec<FleetSpec>,
    #[serde(default)]
    pub evs: Vec<EvSpec>,
}

impl Scenario {
    pub fn timeline(&self) -> Result<Timeline, ModelError> {
        let ranges: Vec<Range<usize>> = self.peaks.iter().map(|&[a, b]| a..b).collect();
        Timeline::build(self.hhp_count, &ranges)
    }

    pub fn demand_vector(&self) -> DemandVector {
        DemandVector::new(self.demand.clone(), self.safety_margin)
    }

    pub fn adjusted_demand(&self) -> Vec<EnergyQty> {
        self.demand_vector().adjusted()
    }

    pub fn prices(&self, market: Market) -> Option<PriceVector> {
        let v = match market {
            Market::DayAhead => Some(&self.prices.day_ahead),
            Market::Balancing => Some(&self.prices.balancing),
            Market::IntraDay => self.prices.intra_day.as_ref(),
        };
        v.map(|p| PriceVector::new(market, p.clone()))
    }

    pub fn imbalance_at(&self, hhp: usize) -> i64 {
        self.imbalance.get(hhp).copied().unwrap_or(0)
    }

    pub fn book(&self) -> Result<ContractBook, ModelError> {
        let timeline = self.timeline()?;
        let mut bundles = Vec::new();
        let mut contracts = Vec::new();
        for f in &self.fleets {
            for b in &f.bundles {
                bundles.push(Bundle { id: b.id, owner: f.id, size: b.size });
                for c in &b.contracts {
                    contracts.push(Contract { id: c.id, fleet: f.id, bid: c.bid, hhp: c.hhp, bundle: b.id, fine: c.fine });
                }
            }
        }
        ContractBook::validate(contracts, bundles, &timeline)
    }

    pub fn privates(&self) -> BTreeMap<FleetId, FleetPrivate> {
        self.fleets
            .iter()
            .map(|f| {
                let success_prob = f
                    .bundles
                    .iter()
                    .flat_map(|b| b.contracts.iter().map(|c| (c.id, c.success_prob)))
                    .collect();
                (
                    f.id,
                    FleetPrivate {
                        success_prob,
                        imported_price: f.imported_price,
                        deterioration_cost: f.deterioration_cost,
                        scheduling_cost: f.scheduling_cost,
                    },
                )
            })
            .collect()
    }

    /// EV states at the start of the day, all unplugged.
    pub fn initial_evs(&self) -> Vec<EvFrState> {
        let mut evs: Vec<EvFrState> = self
            .evs
            .iter()
            .map(|e| EvFrState { ev_id: e.id, soc: e.soc, x_min: e.x_min, x_max: e.x_max, plugged: false, capacity: e.capacity })
            .collect();
        evs.sort_by_key(|e| e.ev_id);
        evs
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Schema(self.schema_version));
        }
        let n = self.hhp_count;
        let check = |what: &str, got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(ScenarioError::Length { what: what.to_string(), got, expected: n })
            }
        };
        check("demand", self.demand.len())?;
        check("prices.day_ahead", self.prices.day_ahead.len())?;
        check("prices.balancing", self.prices.balancing.len())?;
        if let Some(p) = &self.prices.intra_day {
            check("prices.intra_day", p.len())?;
        }
        if !self.imbalance.is_empty() {
            check("imbalance", self.imbalance.len())?;
        }
        self.book()?;
        let mut fleets = BTreeSet::new();
        for f in &self.fleets {
            if !fleets.insert(f.id) {
                return Err(ScenarioError::DuplicateFleet(f.id));
            }
        }
        for p in self.privates().values() {
            p.validate()?;
        }
        let mut evs = BTreeSet::new();
        for e in &self.evs {
            if !evs.insert(e.id) {
                return Err(ScenarioError::DuplicateEv(e.id));
            }
            if let Some(&hhp) = e.plugged.iter().find(|&&h| h >= n) {
                return Err(ScenarioError::PluggedOutOfRange { ev: e.id, hhp });
            }
        }
        for e in self.initial_evs() {
            e.validate()?;
        }
        let c = &self.carbon;
        if !(c.grid_g_per_kwh >= 0.0 && c.balancing_g_per_kwh >= c.grid_g_per_kwh) {
            return Err(ScenarioError::CarbonFactors);
        }
        let fr = &self.fr;
        if !(fr.const_ex.is_finite() && fr.const_im.is_finite() && fr.const_ex >= 0.0 && fr.const_im >= 0.0) {
            return Err(ScenarioError::FrConstants);
        }
        Ok(())
    }
}
