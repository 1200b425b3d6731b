//! Seeded end-to-end runs: clear, pay upfront, draw defaults, levy fines,
//! run frequency regulation on the residual imbalance, and report.

mod generate;
mod scenario;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clearing::{Allocation, Auction, ClearingConfig, ClearingError, Method};
use crate::fr::{fr_tick, QuoteContext};
use crate::model::{ContractId, EnergyQty, EvId, FleetId, Market, Money};
use crate::reliability::{ActiveSet, ReliabilityError, SupplyDistribution, ZeroFinePolicy};
use crate::rng;
use crate::vcg::payment_schedule;

pub use generate::GeneratorParams;
pub use scenario::{
    BundleSpec, CarbonFactors, ContractSpec, EvSpec, FleetSpec, PriceSpec, Scenario, ScenarioError, SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("[validate] {0}")]
    Validate(#[from] ScenarioError),
    #[error("[clear] {0}")]
    Clear(#[from] ClearingError),
    #[error("[reliability] {0}")]
    Reliability(#[from] ReliabilityError),
    #[error("[sweep] unknown axis {0:?}")]
    UnknownAxis(String),
    #[error("[sweep] invalid value {value} for axis {axis}")]
    BadAxisValue { axis: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub method: Method,
    pub clearing: ClearingConfig,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { method: Method::Dp, clearing: ClearingConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FleetAmount {
    pub fleet: FleetId,
    pub amount: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvAmount {
    pub ev: EvId,
    pub amount: Money,
}

/// Headline numbers of one run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Kpis {
    pub social_savings: Money,
    pub total_payments: Money,
    pub fines_collected: Money,
    pub served_value: Money,
    pub balancing_cost: Money,
    pub fr_payments: Money,
    pub platform_utility: Money,
    pub contracted_kwh: u64,
    pub delivered_kwh: u64,
    pub unmet_demand_kwh: u64,
    pub fr_export_kwh: u64,
    pub fr_import_kwh: u64,
    pub balancing_kwh: u64,
    pub curtailed_kwh: u64,
    pub grid_kwh: u64,
    pub carbon_g: f64,
}

/// Outcome of one simulated day. Serialized as the machine record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settlement {
    pub schema_version: u32,
    pub seed: u64,
    pub allocation: Allocation,
    /// Upfront VCG payments per fleet with at least one offer.
    pub payments: Vec<FleetAmount>,
    pub honored: Vec<ContractId>,
    pub defaulted: Vec<ContractId>,
    /// Fines levied per fleet with at least one default.
    pub fines: Vec<FleetAmount>,
    /// Energy delivered by honored contracts, per hhp.
    pub realized_supply: Vec<EnergyQty>,
    /// `max(0, D̂ − realized supply)` per hhp.
    pub unmet_demand: Vec<EnergyQty>,
    /// Signed frequency-regulation dispatch per hhp; positive is EV export.
    pub fr_dispatch: Vec<i64>,
    pub balancing_kwh: Vec<u64>,
    pub curtailed_kwh: Vec<u64>,
    pub fr_payments: Vec<EvAmount>,
    pub fleet_utilities: Vec<FleetAmount>,
    pub kpis: Kpis,
}

impl Settlement {
    pub fn empty(hhp_count: usize) -> Settlement {
        Settlement {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            allocation: Allocation::empty(hhp_count),
            payments: Vec::new(),
            honored: Vec::new(),
            defaulted: Vec::new(),
            fines: Vec::new(),
            realized_supply: vec![EnergyQty::ZERO; hhp_count],
            unmet_demand: vec![EnergyQty::ZERO; hhp_count],
            fr_dispatch: vec![0; hhp_count],
            balancing_kwh: vec![0; hhp_count],
            curtailed_kwh: vec![0; hhp_count],
            fr_payments: Vec::new(),
            fleet_utilities: Vec::new(),
            kpis: Kpis::default(),
        }
    }

    /// Platform outflow minus inflow; equals the negated platform utility.
    pub fn net_outflow(&self) -> Money {
        let k = &self.kpis;
        (k.total_payments + k.balancing_cost + k.fr_payments) - (k.fines_collected + k.served_value)
    }
}

/// Emissions: balancing energy at the balancing factor plus V2X-delivered
/// energy (charged off-peak from the grid) at the grid factor.
pub fn carbon_proxy(balancing_kwh: u64, grid_kwh: u64, factors: &CarbonFactors) -> f64 {
    factors.balancing_g_per_kwh * balancing_kwh as f64 + factors.grid_g_per_kwh * grid_kwh as f64
}

pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<Settlement, SimError> {
    s.validate()?;
    let timeline = s.timeline().map_err(ScenarioError::from)?;
    let book = s.book().map_err(ScenarioError::from)?;
    let privates = s.privates();
    let demand = s.adjusted_demand();
    let day_ahead = s.prices(Market::DayAhead).expect("day-ahead prices are mandatory");
    let balancing = s.prices(Market::Balancing).expect("balancing prices are mandatory");
    let n = s.hhp_count;

    let auction = Auction { timeline: &timeline, demand: &demand, prices: &day_ahead, config: opts.clearing, method: opts.method };
    let schedule = payment_schedule(&auction, &book)?;
    let allocation = &schedule.allocation;

    // One draw per accepted contract, ascending id.
    let mut stream = rng::stream(s.seed);
    let mut honored = Vec::new();
    let mut defaulted = Vec::new();
    for &id in &allocation.accepted {
        let fleet = book.get(id).map_err(ScenarioError::from)?.fleet;
        if rng::bernoulli(&mut stream, privates[&fleet].prob(id)) {
            honored.push(id);
        } else {
            defaulted.push(id);
        }
    }

    let mut fines: BTreeMap<FleetId, Money> = BTreeMap::new();
    for &id in &defaulted {
        let c = book.get(id).map_err(ScenarioError::from)?;
        *fines.entry(c.fleet).or_default() += c.fine;
    }
    let mut realized = vec![EnergyQty::ZERO; n];
    for &id in &honored {
        let c = book.get(id).map_err(ScenarioError::from)?;
        realized[c.hhp] += book.size_of(id).map_err(ScenarioError::from)?;
    }
    let unmet: Vec<EnergyQty> = demand.iter().zip(&realized).map(|(&d, &r)| d.saturating_sub(r)).collect();

    // Frequency regulation on the residual imbalance of every hhp.
    let active = ActiveSet::from_allocation(allocation, &book, ZeroFinePolicy::AssumeZero)?;
    let dists: BTreeMap<usize, SupplyDistribution> = active
        .by_hhp()
        .keys()
        .map(|&h| SupplyDistribution::build(&active, h).map(|d| (h, d)))
        .collect::<Result<_, _>>()?;
    let mut evs = s.initial_evs();
    let plugged_at: BTreeMap<EvId, Vec<usize>> = s.evs.iter().map(|e| (e.id, e.plugged.clone())).collect();
    let mut ledger = crate::fr::PeakLedger::default();
    let mut fr_dispatch = vec![0i64; n];
    let mut balancing_kwh = vec![0u64; n];
    let mut curtailed_kwh = vec![0u64; n];
    let mut balancing_cost = Money::ZERO;
    let mut fr_pay: BTreeMap<EvId, Money> = BTreeMap::new();
    for h in 0..n {
        for ev in evs.iter_mut() {
            ev.plugged = plugged_at[&ev.ev_id].contains(&h);
        }
        let imbalance = demand[h].kwh() as i64 - realized[h].kwh() as i64 + s.imbalance_at(h);
        let block = timeline.block_of(h).expect("hhp inside the day").hhps.clone();
        let ctx = QuoteContext {
            hhp: h,
            block: &block,
            supply: dists.get(&h),
            demand: demand[h],
            balancing_price: balancing.at(h),
            day_ahead_price: day_ahead.at(h),
        };
        let tick = fr_tick(&ctx, &mut evs, imbalance, &mut ledger, &s.fr);
        fr_dispatch[h] = tick.dispatch.total();
        for q in &tick.quotes {
            *fr_pay.entry(q.ev_id).or_default() += q.payment;
        }
        let residual = tick.dispatch.residual;
        if residual > 0 {
            balancing_kwh[h] = residual as u64;
            balancing_cost += balancing.at(h).times(residual);
        } else {
            curtailed_kwh[h] = residual.unsigned_abs();
        }
    }

    let served_value: Money = (0..n)
        .map(|h| {
            let fr_export = fr_dispatch[h].max(0) as u64;
            let supplied = realized[h].kwh() + fr_export + balancing_kwh[h];
            day_ahead.at(h).times_kwh(EnergyQty(supplied.min(demand[h].kwh())))
        })
        .sum();

    let mut fleet_utilities = Vec::new();
    for (&fleet, &payment) in &schedule.payments {
        let p = &privates[&fleet];
        let mut cost = Money::ZERO;
        for &id in allocation.accepted.iter() {
            let c = book.get(id).map_err(ScenarioError::from)?;
            if c.fleet != fleet {
                continue;
            }
            cost += p.scheduling_cost;
            if honored.binary_search(&id).is_ok() {
                cost += (p.imported_price + p.deterioration_cost).times_kwh(book.size_of(id).map_err(ScenarioError::from)?);
            } else {
                cost += c.fine;
            }
        }
        fleet_utilities.push(FleetAmount { fleet, amount: payment - cost });
    }

    let total_payments = schedule.total();
    let fines_collected: Money = fines.values().copied().sum();
    let fr_payments_total: Money = fr_pay.values().copied().sum();
    let platform_utility = served_value + fines_collected - total_payments - balancing_cost - fr_payments_total;
    let delivered_kwh: u64 = realized.iter().map(|r| r.kwh()).sum();
    let fr_export_kwh: u64 = fr_dispatch.iter().filter(|&&x| x > 0).map(|&x| x as u64).sum();
    let fr_import_kwh: u64 = fr_dispatch.iter().filter(|&&x| x < 0).map(|&x| x.unsigned_abs()).sum();
    let balancing_total: u64 = balancing_kwh.iter().sum();
    let grid_kwh = delivered_kwh + fr_export_kwh;

    let kpis = Kpis {
        social_savings: allocation.value,
        total_payments,
        fines_collected,
        served_value,
        balancing_cost,
        fr_payments: fr_payments_total,
        platform_utility,
        contracted_kwh: allocation.per_hhp_supply.iter().map(|s| s.kwh()).sum(),
        delivered_kwh,
        unmet_demand_kwh: unmet.iter().map(|u| u.kwh()).sum(),
        fr_export_kwh,
        fr_import_kwh,
        balancing_kwh: balancing_total,
        curtailed_kwh: curtailed_kwh.iter().sum(),
        grid_kwh,
        carbon_g: carbon_proxy(balancing_total, grid_kwh, &s.carbon),
    };

    Ok(Settlement {
        schema_version: SCHEMA_VERSION,
        seed: s.seed,
        allocation: schedule.allocation.clone(),
        payments: schedule.payments.iter().map(|(&fleet, &amount)| FleetAmount { fleet, amount }).collect(),
        honored,
        defaulted,
        fines: fines.into_iter().map(|(fleet, amount)| FleetAmount { fleet, amount }).collect(),
        realized_supply: realized,
        unmet_demand: unmet,
        fr_dispatch,
        balancing_kwh,
        curtailed_kwh,
        fr_payments: fr_pay.into_iter().map(|(ev, amount)| EvAmount { ev, amount }).collect(),
        fleet_utilities,
        kpis,
    })
}

/// Scalar scenario fields that [`sweep`] can vary.
pub const SWEEP_AXES: [&str; 6] =
    ["safety_margin", "seed", "fr.const_ex", "fr.const_im", "carbon.grid_g_per_kwh", "carbon.balancing_g_per_kwh"];

fn whole(axis: &str, v: f64) -> Result<u64, SimError> {
    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(SimError::BadAxisValue { axis: axis.to_string(), value: v })
    }
}

/// Copy of `base` with one axis set to `value`.
pub fn with_axis(base: &Scenario, axis: &str, value: f64) -> Result<Scenario, SimError> {
    let mut s = base.clone();
    match axis {
        "safety_margin" => s.safety_margin = EnergyQty(whole(axis, value)?),
        "seed" => s.seed = whole(axis, value)?,
        "fr.const_ex" => s.fr.const_ex = value,
        "fr.const_im" => s.fr.const_im = value,
        "carbon.grid_g_per_kwh" => s.carbon.grid_g_per_kwh = value,
        "carbon.balancing_g_per_kwh" => s.carbon.balancing_g_per_kwh = value,
        other => return Err(SimError::UnknownAxis(other.to_string())),
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub kpis: Kpis,
}

/// One run per value of `axis`, in the order given.
pub fn sweep(base: &Scenario, axis: &str, values: &[f64], opts: &RunOptions) -> Result<Vec<SweepRow>, SimError> {
    if !SWEEP_AXES.contains(&axis) {
        return Err(SimError::UnknownAxis(axis.to_string()));
    }
    values
        .par_iter()
        .map(|&v| {
            let s = with_axis(base, axis, v)?;
            let settlement = run_scenario(&s, opts)?;
            Ok(SweepRow { axis: axis.to_string(), value: v, kpis: settlement.kpis })
        })
        .collect()
}
