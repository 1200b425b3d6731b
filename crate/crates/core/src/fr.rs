//! Frequency regulation: plugged EVs absorb the residual imbalance of each
//! hhp within their announced state-of-charge band and are paid for
//! availability and delivered energy.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EnergyQty, EvId, Money};
use crate::reliability::SupplyDistribution;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrError {
    #[error("EV {ev}: bounds must satisfy x_min <= x_max <= capacity and soc <= capacity")]
    BadBounds { ev: EvId },
    #[error("EV {0} is not plugged in")]
    NotPlugged(EvId),
}

/// One EV as seen by the platform at the start of an hhp.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvFrState {
    pub ev_id: EvId,
    pub soc: EnergyQty,
    /// Announced minimum state of charge at the end of the hhp.
    pub x_min: EnergyQty,
    /// Announced maximum state of charge at the end of the hhp.
    pub x_max: EnergyQty,
    pub plugged: bool,
    pub capacity: EnergyQty,
}

impl EvFrState {
    pub fn validate(&self) -> Result<(), FrError> {
        if self.x_min > self.x_max || self.x_max > self.capacity || self.soc > self.capacity {
            return Err(FrError::BadBounds { ev: self.ev_id });
        }
        Ok(())
    }

    pub fn available_export(&self) -> EnergyQty {
        self.soc.saturating_sub(self.x_min)
    }

    pub fn available_import(&self) -> EnergyQty {
        self.x_max.saturating_sub(self.soc)
    }
}

/// Signed energy moved per EV; positive means the EV exported to the grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrDispatch {
    pub per_ev: Vec<(EvId, i64)>,
    /// Imbalance left for the balancing market.
    pub residual: i64,
}

impl FrDispatch {
    pub fn total(&self) -> i64 {
        self.per_ev.iter().map(|&(_, x)| x).sum()
    }

    pub fn of(&self, ev: EvId) -> i64 {
        self.per_ev.iter().find(|&&(id, _)| id == ev).map_or(0, |&(_, x)| x)
    }
}

/// Splits `amount` in proportion to `weights`, flooring and then handing the
/// leftover units to the largest remainders (ties to the earlier entry).
fn largest_remainder(amount: u64, weights: &[u64]) -> Vec<u64> {
    let total: u128 = weights.iter().map(|&w| w as u128).sum();
    if total == 0 {
        return vec![0; weights.len()];
    }
    let mut out: Vec<u64> = Vec::with_capacity(weights.len());
    let mut rems: Vec<(u128, usize)> = Vec::with_capacity(weights.len());
    for (i, &w) in weights.iter().enumerate() {
        let q = amount as u128 * w as u128;
        out.push((q / total) as u64);
        rems.push((q % total, i));
    }
    let leftover = amount - out.iter().sum::<u64>();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in rems.iter().take(leftover as usize) {
        out[i] += 1;
    }
    out
}

/// Dispatches plugged EVs against `imbalance` (positive: the grid is short
/// and EVs export; negative: surplus and EVs import), proportionally to
/// their availability on the relevant side.
pub fn fr_dispatch(evs: &[EvFrState], imbalance: i64) -> FrDispatch {
    let mut plugged: Vec<&EvFrState> = evs.iter().filter(|e| e.plugged).collect();
    plugged.sort_by_key(|e| e.ev_id);
    let exporting = imbalance > 0;
    let avail: Vec<u64> = plugged
        .iter()
        .map(|e| if exporting { e.available_export().kwh() } else { e.available_import().kwh() })
        .collect();
    let need = imbalance.unsigned_abs();
    let amount = need.min(avail.iter().sum());
    let shares = largest_remainder(amount, &avail);
    let sign = if exporting { 1 } else { -1 };
    let per_ev: Vec<(EvId, i64)> = plugged.iter().zip(shares).map(|(e, s)| (e.ev_id, sign * s as i64)).collect();
    let moved: i64 = per_ev.iter().map(|&(_, x)| x).sum();
    FrDispatch { per_ev, residual: imbalance - moved }
}

/// Moves each EV's state of charge by its dispatched energy.
pub fn apply_dispatch(evs: &mut [EvFrState], dispatch: &FrDispatch) {
    for ev in evs.iter_mut() {
        let x = dispatch.of(ev.ev_id);
        if x > 0 {
            ev.soc = ev.soc.saturating_sub(EnergyQty(x as u64));
        } else if x < 0 {
            ev.soc += EnergyQty(x.unsigned_abs());
        }
    }
}

/// Exported and imported kWh per EV per hhp.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeakLedger {
    entries: BTreeMap<EvId, BTreeMap<usize, (u64, u64)>>,
}

impl PeakLedger {
    pub fn record(&mut self, ev: EvId, hhp: usize, dispatched: i64) {
        let e = self.entries.entry(ev).or_default().entry(hhp).or_insert((0, 0));
        if dispatched >= 0 {
            e.0 += dispatched as u64;
        } else {
            e.1 += dispatched.unsigned_abs();
        }
    }

    /// (exported, imported) by `ev` at `hhp`.
    pub fn at(&self, ev: EvId, hhp: usize) -> (u64, u64) {
        self.entries.get(&ev).and_then(|m| m.get(&hhp)).copied().unwrap_or((0, 0))
    }

    /// (exported, imported) by `ev` over `block`, leaving out `hhp`.
    pub fn excluding(&self, ev: EvId, block: &Range<usize>, hhp: usize) -> (u64, u64) {
        let Some(m) = self.entries.get(&ev) else { return (0, 0) };
        m.range(block.clone()).filter(|(&h, _)| h != hhp).fold((0, 0), |(x, y), (_, &(e, i))| (x + e, y + i))
    }

    pub fn entries(&self) -> impl Iterator<Item = (EvId, usize, u64, u64)> + '_ {
        self.entries.iter().flat_map(|(&ev, m)| m.iter().map(move |(&h, &(e, i))| (ev, h, e, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrConfig {
    pub const_ex: f64,
    pub const_im: f64,
    /// Battery deterioration cost per exported kWh.
    pub deterioration_cost: Money,
}

impl Default for FrConfig {
    fn default() -> Self {
        FrConfig { const_ex: 0.1, const_im: 0.1, deterioration_cost: Money::ZERO }
    }
}

/// Market context for one hhp's quotes.
#[derive(Debug, Clone, Copy)]
pub struct QuoteContext<'a> {
    pub hhp: usize,
    /// The block (peak or valley) holding `hhp`.
    pub block: &'a Range<usize>,
    /// Approximate supply distribution of active contracts; `None` if there are none.
    pub supply: Option<&'a SupplyDistribution>,
    /// Adjusted demand at `hhp`.
    pub demand: EnergyQty,
    pub balancing_price: Money,
    pub day_ahead_price: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrQuote {
    pub ev_id: EvId,
    pub hhp: usize,
    pub payment: Money,
    pub export_term: Money,
    pub import_term: Money,
    pub delivery_term: Money,
    pub export_share: f64,
    pub import_share: f64,
}

/// `Σ p(y)·y` over grid points with `lo ≤ y ≤ hi`.
fn weighted_supply(d: &SupplyDistribution, lo: f64, hi: f64) -> f64 {
    d.support.iter().zip(&d.pmf).filter(|(&y, _)| y >= lo && y <= hi).map(|(&y, &p)| p * y).sum()
}

fn shares(weights: &[u64]) -> Vec<f64> {
    let total: u64 = weights.iter().sum();
    if total == 0 {
        return vec![0.0; weights.len()];
    }
    weights.iter().map(|&w| w as f64 / total as f64).collect()
}

/// Quotes for every plugged EV at one hhp.
///
/// `plugged` are the states before dispatch; `delivered` is what each EV
/// actually exported during the hhp.
pub fn fr_quotes(
    ctx: &QuoteContext<'_>,
    plugged: &[EvFrState],
    ledger: &PeakLedger,
    delivered: &BTreeMap<EvId, u64>,
    config: &FrConfig,
) -> Vec<FrQuote> {
    let evs: Vec<&EvFrState> = plugged.iter().filter(|e| e.plugged).collect();
    let ex_w: Vec<u64> = evs
        .iter()
        .map(|e| e.available_export().kwh() + ledger.excluding(e.ev_id, ctx.block, ctx.hhp).0)
        .collect();
    let im_w: Vec<u64> = evs
        .iter()
        .map(|e| e.available_import().kwh() + ledger.excluding(e.ev_id, ctx.block, ctx.hhp).1)
        .collect();
    let ex_s = shares(&ex_w);
    let im_s = shares(&im_w);

    let demand = ctx.demand.kwh() as f64;
    let (ex_mass, im_mass) = match ctx.supply {
        Some(d) => (weighted_supply(d, 0.0, demand), weighted_supply(d, demand, d.x_max.kwh() as f64)),
        None => (0.0, 0.0),
    };
    let m_b = ctx.balancing_price.as_f64();
    let per_kwh_delivery = config.deterioration_cost + ctx.day_ahead_price;

    evs.iter()
        .enumerate()
        .map(|(i, e)| {
            let export_term = Money::from_f64(config.const_ex * ex_mass * m_b * ex_s[i]);
            let import_term = Money::from_f64(config.const_im * im_mass * m_b * im_s[i]);
            let out = delivered.get(&e.ev_id).copied().unwrap_or(0);
            let delivery_term = per_kwh_delivery.times_kwh(EnergyQty(out));
            FrQuote {
                ev_id: e.ev_id,
                hhp: ctx.hhp,
                payment: export_term + import_term + delivery_term,
                export_term,
                import_term,
                delivery_term,
                export_share: ex_s[i],
                import_share: im_s[i],
            }
        })
        .collect()
}

/// Quote for a single plugged EV.
pub fn fr_payment(
    ev: EvId,
    ctx: &QuoteContext<'_>,
    plugged: &[EvFrState],
    ledger: &PeakLedger,
    delivered: &BTreeMap<EvId, u64>,
    config: &FrConfig,
) -> Result<FrQuote, FrError> {
    fr_quotes(ctx, plugged, ledger, delivered, config)
        .into_iter()
        .find(|q| q.ev_id == ev)
        .ok_or(FrError::NotPlugged(ev))
}

/// What happened at one hhp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TickOutcome {
    pub hhp: usize,
    pub imbalance: i64,
    pub dispatch: FrDispatch,
    pub quotes: Vec<FrQuote>,
}

/// Runs one hhp: read availability, dispatch, quote, then advance the ledger
/// and the EVs' state of charge.
pub fn fr_tick(
    ctx: &QuoteContext<'_>,
    evs: &mut [EvFrState],
    imbalance: i64,
    ledger: &mut PeakLedger,
    config: &FrConfig,
) -> TickOutcome {
    let before: Vec<EvFrState> = evs.iter().filter(|e| e.plugged).cloned().collect();
    let dispatch = fr_dispatch(&before, imbalance);
    let delivered: BTreeMap<EvId, u64> =
        dispatch.per_ev.iter().filter(|&&(_, x)| x > 0).map(|&(id, x)| (id, x as u64)).collect();
    let quotes = fr_quotes(ctx, &before, ledger, &delivered, config);
    for &(ev, x) in &dispatch.per_ev {
        ledger.record(ev, ctx.hhp, x);
    }
    apply_dispatch(evs, &dispatch);
    TickOutcome { hhp: ctx.hhp, imbalance, dispatch, quotes }
}

/// Inputs to the abstention comparison for one fleet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstentionScenario {
    /// Expected utility from the hour-scheduling auction.
    pub auction_utility: Money,
    /// Expected frequency-regulation payments to the fleet's EVs.
    pub fr_payments: Money,
    /// Energy the EVs would export through frequency regulation.
    pub fr_exported: EnergyQty,
    pub deterioration_cost: Money,
    pub imported_price: Money,
}

/// True iff frequency regulation, net of export costs, strictly beats the auction.
pub fn fr_abstention_check(s: &AbstentionScenario) -> bool {
    let net = s.fr_payments - (s.deterioration_cost + s.imported_price).times_kwh(s.fr_exported);
    net > s.auction_utility
}
