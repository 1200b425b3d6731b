//! Winner determination.
//!
//! Each peak is cleared independently by a dynamic program over bundle
//! prefixes and residual demand vectors. An exhaustive search over all
//! feasible subsets serves as the oracle for small books.
//!
//! Ties are broken identically everywhere: higher savings first, then fewer
//! accepted contracts, then the lexicographically smallest sorted id list.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ContractBook, ContractId, EnergyQty, ModelError, Money, PriceVector, Timeline};
use crate::savings::soc_save;

pub const DEFAULT_STATE_BUDGET: u64 = 1 << 24;
pub const DEFAULT_ORACLE_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClearingError {
    #[error("dynamic program needs {required} residual-demand states per bundle layer, budget is {budget}")]
    StateBudgetExceeded { required: u128, budget: u64 },
    #[error("exhaustive search needs {required} subsets, cap is {cap}")]
    OracleCapExceeded { required: u128, cap: u64 },
    #[error("book slice holds contracts from more than one peak")]
    MixedPeaks,
    #[error("demand vector has {got} entries, book has {expected} hhps")]
    DemandLength { got: usize, expected: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClearingConfig {
    /// Maximum number of residual-demand states in one peak's table layer.
    pub state_budget: u64,
    /// Maximum number of subsets the exhaustive oracle enumerates.
    pub oracle_cap: u64,
}

impl Default for ClearingConfig {
    fn default() -> Self {
        ClearingConfig { state_budget: DEFAULT_STATE_BUDGET, oracle_cap: DEFAULT_ORACLE_CAP }
    }
}

/// A feasible accepted set with its savings and per-hhp supply.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    /// Accepted contract ids, ascending.
    pub accepted: Vec<ContractId>,
    pub value: Money,
    pub per_hhp_supply: Vec<EnergyQty>,
}

impl Allocation {
    pub fn empty(hhp_count: usize) -> Allocation {
        Allocation { accepted: Vec::new(), value: Money::ZERO, per_hhp_supply: vec![EnergyQty::ZERO; hhp_count] }
    }

    /// Builds an allocation for `accepted`, recomputing value and supply from scratch.
    pub fn from_accepted(
        accepted: impl IntoIterator<Item = ContractId>,
        book: &ContractBook,
        demand: &[EnergyQty],
        prices: &PriceVector,
    ) -> Result<Allocation, ModelError> {
        let accepted: Vec<ContractId> = accepted.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        let value = soc_save(accepted.iter().copied(), book, demand, prices)?;
        let mut per_hhp_supply = vec![EnergyQty::ZERO; book.hhp_count()];
        for &id in &accepted {
            per_hhp_supply[book.get(id)?.hhp] += book.size_of(id)?;
        }
        Ok(Allocation { accepted, value, per_hhp_supply })
    }

    pub fn contains(&self, id: ContractId) -> bool {
        self.accepted.binary_search(&id).is_ok()
    }
}

/// Total order used to pick among optimal sets; `Less` means `a` is preferred.
pub fn preference(a_value: Money, a: &[ContractId], b_value: Money, b: &[ContractId]) -> Ordering {
    b_value.cmp(&a_value).then(a.len().cmp(&b.len())).then_with(|| a.cmp(b))
}

fn check_demand(book: &ContractBook, demand: &[EnergyQty]) -> Result<(), ClearingError> {
    if demand.len() != book.hhp_count() {
        return Err(ClearingError::DemandLength { got: demand.len(), expected: book.hhp_count() });
    }
    Ok(())
}

/// Fixed-width contract sets for one peak. Bit `i` is the `i`-th contract of
/// the slice in ascending id order, so comparing the lowest differing bit is
/// the same as comparing sorted id lists of equal length.
struct SetStore {
    words: usize,
    bits: Vec<u64>,
}

impl SetStore {
    fn new(states: usize, contracts: usize) -> SetStore {
        let words = contracts.div_ceil(64).max(1);
        SetStore { words, bits: vec![0; states * words] }
    }

    fn get(&self, s: usize) -> &[u64] {
        &self.bits[s * self.words..(s + 1) * self.words]
    }

    fn count(&self, s: usize) -> u32 {
        self.get(s).iter().map(|w| w.count_ones()).sum()
    }

    /// Is `cand` (a set plus one extra bit) preferred over the set at `s`, given equal value?
    fn tie_prefers(&self, cand_src: &[u64], extra: usize, s: usize) -> bool {
        let cur = self.get(s);
        let cand_count: u32 = cand_src.iter().map(|w| w.count_ones()).sum::<u32>() + 1;
        let cur_count: u32 = cur.iter().map(|w| w.count_ones()).sum();
        if cand_count != cur_count {
            return cand_count < cur_count;
        }
        for (w, (&c, &o)) in cand_src.iter().zip(cur).enumerate() {
            let c = if extra / 64 == w { c | (1u64 << (extra % 64)) } else { c };
            let diff = c ^ o;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return c & low != 0;
            }
        }
        false
    }
}

/// One layer of the table: best value and set for every residual demand vector.
struct Layer {
    values: Vec<i64>,
    sets: SetStore,
}

/// Full prefix tables for one peak, kept for inspection.
///
/// Entry `(r, d)` is the best accepted set among the first `r` bundles
/// (ascending bundle id) when `d` kWh remain uncovered at each of the
/// peak's offered hhps.
pub struct DpTables {
    hhps: Vec<usize>,
    caps: Vec<u64>,
    strides: Vec<usize>,
    contract_ids: Vec<ContractId>,
    layers: Vec<Layer>,
}

impl DpTables {
    /// The peak's hhps that carry at least one offer, ascending.
    pub fn hhps(&self) -> &[usize] {
        &self.hhps
    }

    /// Largest residual demand tracked per hhp: `min(D̂[h], offered energy at h)`.
    pub fn caps(&self) -> &[u64] {
        &self.caps
    }

    pub fn bundle_count(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn state_count(&self) -> usize {
        self.layers[0].values.len()
    }

    fn state_index(&self, d: &[u64]) -> usize {
        d.iter().zip(&self.caps).zip(&self.strides).map(|((&x, &cap), &st)| x.min(cap) as usize * st).sum()
    }

    /// Value and set at prefix length `r` and residual demand `d` (one entry per [`DpTables::hhps`]).
    pub fn entry(&self, r: usize, d: &[u64]) -> (Money, Vec<ContractId>) {
        let layer = &self.layers[r];
        let s = self.state_index(d);
        let set = layer.sets.get(s);
        let ids = (0..self.contract_ids.len())
            .filter(|&i| set[i / 64] & (1u64 << (i % 64)) != 0)
            .map(|i| self.contract_ids[i])
            .collect();
        (Money(layer.values[s]), ids)
    }
}

/// Per contract: (bit, dimension, size, price at hhp, total bid).
type DpOption = (usize, usize, u64, i64, i64);

fn run_dp(
    slice: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
    state_budget: u64,
    keep_layers: bool,
) -> Result<DpTables, ClearingError> {
    check_demand(slice, demand)?;
    if let Some(first) = slice.groups().first() {
        if slice.groups().iter().any(|g| g.block != first.block) {
            return Err(ClearingError::MixedPeaks);
        }
    }

    let hhps: Vec<usize> = slice.contracts().iter().map(|c| c.hhp).collect::<BTreeSet<_>>().into_iter().collect();
    let caps: Vec<u64> = hhps
        .iter()
        .map(|&h| {
            let offered: u64 = slice
                .contracts()
                .iter()
                .enumerate()
                .filter(|(_, c)| c.hhp == h)
                .map(|(i, _)| slice.entry(i).1.kwh())
                .sum();
            demand[h].kwh().min(offered)
        })
        .collect();
    let required: u128 = caps.iter().map(|&c| c as u128 + 1).product();
    if required > state_budget as u128 {
        return Err(ClearingError::StateBudgetExceeded { required, budget: state_budget });
    }
    let states = required as usize;
    let mut strides = Vec::with_capacity(caps.len());
    let mut acc = 1usize;
    for &c in &caps {
        strides.push(acc);
        acc *= c as usize + 1;
    }

    let contract_ids: Vec<ContractId> = slice.contracts().iter().map(|c| c.id).collect();
    let n = contract_ids.len();

    let options: Vec<Vec<DpOption>> = slice
        .groups()
        .iter()
        .map(|g| {
            g.contracts
                .iter()
                .map(|&id| {
                    let bit = slice.position(id).expect("group member is in the book");
                    let (c, size) = slice.entry(bit);
                    let dim = hhps.binary_search(&c.hhp).expect("hhp collected above");
                    (bit, dim, size.kwh(), prices.at(c.hhp).millipence(), c.bid.times_kwh(size).millipence())
                })
                .collect()
        })
        .collect();

    let mut layers = Vec::with_capacity(if keep_layers { options.len() + 1 } else { 1 });
    let mut prev = Layer { values: vec![0; states], sets: SetStore::new(states, n) };

    for group in &options {
        // Skipping the bundle is always an option.
        let mut cur = Layer { values: prev.values.clone(), sets: SetStore { words: prev.sets.words, bits: prev.sets.bits.clone() } };
        for &(bit, dim, size, price, bid_total) in group {
            let stride = strides[dim];
            let radix = caps[dim] + 1;
            for s in 0..states {
                let d = (s / stride) as u64 % radix;
                let covered = d.min(size);
                let from = s - covered as usize * stride;
                let cand = prev.values[from]
                    .checked_add(price.checked_mul(covered as i64).expect("money overflow"))
                    .and_then(|v| v.checked_sub(bid_total))
                    .expect("money overflow");
                let better = match cand.cmp(&cur.values[s]) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => cur.sets.tie_prefers(prev.sets.get(from), bit, s),
                };
                if better {
                    cur.values[s] = cand;
                    let w = cur.sets.words;
                    let (dst, src) = (&mut cur.sets.bits[s * w..(s + 1) * w], &prev.sets.bits[from * w..(from + 1) * w]);
                    dst.copy_from_slice(src);
                    dst[bit / 64] |= 1u64 << (bit % 64);
                }
            }
        }
        if keep_layers {
            layers.push(prev);
        }
        prev = cur;
    }
    layers.push(prev);

    Ok(DpTables { hhps, caps, strides, contract_ids, layers })
}

/// Builds and keeps every prefix layer of one peak's table.
pub fn peak_tables(
    slice: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
    state_budget: u64,
) -> Result<DpTables, ClearingError> {
    run_dp(slice, demand, prices, state_budget, true)
}

/// Optimal allocation for a book whose contracts all lie in one peak.
pub fn clear_peak_dp(
    slice: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
    state_budget: u64,
) -> Result<Allocation, ClearingError> {
    if slice.is_empty() {
        check_demand(slice, demand)?;
        return Ok(Allocation::empty(slice.hhp_count()));
    }
    let tables = run_dp(slice, demand, prices, state_budget, false)?;
    let (value, accepted) = tables.entry(tables.bundle_count(), tables.caps());
    let alloc = Allocation::from_accepted(accepted, slice, demand, prices)?;
    debug_assert_eq!(alloc.value, value);
    debug_assert_eq!(tables.layers.last().unwrap().sets.count(tables.state_index(tables.caps())) as usize, alloc.accepted.len());
    Ok(alloc)
}

/// Clears every peak separately and merges the results.
pub fn clear_day(
    book: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
    timeline: &Timeline,
    config: &ClearingConfig,
) -> Result<Allocation, ClearingError> {
    check_demand(book, demand)?;
    let blocks: BTreeSet<usize> = book.groups().iter().map(|g| g.block).collect();
    debug_assert!(blocks.iter().all(|&b| timeline.blocks()[b].kind == crate::model::BlockKind::Peak));
    let parts: Vec<Allocation> = blocks
        .into_par_iter()
        .map(|b| clear_peak_dp(&book.for_block(b), demand, prices, config.state_budget))
        .collect::<Result<_, _>>()?;

    let mut out = Allocation::empty(book.hhp_count());
    for p in parts {
        out.accepted.extend(p.accepted);
        out.value += p.value;
        for (o, s) in out.per_hhp_supply.iter_mut().zip(p.per_hhp_supply) {
            *o += s;
        }
    }
    out.accepted.sort();
    Ok(out)
}

/// Which winner-determination routine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Dp,
    /// Exhaustive search; for cross-checks on small books.
    Oracle,
}

/// Fixed market inputs that a book is cleared against.
#[derive(Debug, Clone, Copy)]
pub struct Auction<'a> {
    pub timeline: &'a Timeline,
    /// Adjusted demand, one entry per hhp.
    pub demand: &'a [EnergyQty],
    pub prices: &'a PriceVector,
    pub config: ClearingConfig,
    pub method: Method,
}

impl Auction<'_> {
    pub fn clear(&self, book: &ContractBook) -> Result<Allocation, ClearingError> {
        match self.method {
            Method::Dp => clear_day(book, self.demand, self.prices, self.timeline, &self.config),
            Method::Oracle => clear_bruteforce(book, self.demand, self.prices, self.config.oracle_cap),
        }
    }
}

/// Exhaustive search over every feasible subset of the whole book.
pub fn clear_bruteforce(
    book: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
    cap: u64,
) -> Result<Allocation, ClearingError> {
    check_demand(book, demand)?;
    let radices: Vec<usize> = book.groups().iter().map(|g| g.contracts.len() + 1).collect();
    let required: u128 = radices.iter().map(|&r| r as u128).product();
    if required > cap as u128 {
        return Err(ClearingError::OracleCapExceeded { required, cap });
    }

    let mut choice = vec![0usize; radices.len()];
    let mut best: Option<(Money, Vec<ContractId>)> = None;
    loop {
        let mut set: Vec<ContractId> = book
            .groups()
            .iter()
            .zip(&choice)
            .filter(|(_, &c)| c > 0)
            .map(|(g, &c)| g.contracts[c - 1])
            .collect();
        set.sort();
        let value = soc_save(set.iter().copied(), book, demand, prices)?;
        let replace = match &best {
            None => true,
            Some((bv, bs)) => preference(value, &set, *bv, bs) == Ordering::Less,
        };
        if replace {
            best = Some((value, set));
        }

        // Mixed-radix increment.
        let mut i = 0;
        while i < choice.len() {
            choice[i] += 1;
            if choice[i] < radices[i] {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
        if i == choice.len() {
            break;
        }
    }
    let (_, accepted) = best.expect("the empty set is always enumerated");
    Ok(Allocation::from_accepted(accepted, book, demand, prices)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bundle, BundleId, Contract, FleetId, Market};

    struct Offer {
        id: u32,
        fleet: u32,
        bundle: u32,
        hhp: usize,
        bid: i64,
        size: u64,
    }

    fn build(offers: &[Offer], timeline: &Timeline) -> ContractBook {
        let mut bundles: Vec<Bundle> = Vec::new();
        let mut contracts = Vec::new();
        for o in offers {
            if !bundles.iter().any(|b| b.id == BundleId(o.bundle)) {
                bundles.push(Bundle { id: BundleId(o.bundle), owner: FleetId(o.fleet), size: EnergyQty(o.size) });
            }
            contracts.push(Contract {
                id: ContractId(o.id),
                fleet: FleetId(o.fleet),
                bid: Money::pence(o.bid),
                hhp: o.hhp,
                bundle: BundleId(o.bundle),
                fine: Money::pence(100),
            });
        }
        ContractBook::validate(contracts, bundles, timeline).unwrap()
    }

    fn prices(v: &[i64]) -> PriceVector {
        PriceVector::new(Market::DayAhead, v.iter().map(|&p| Money::pence(p)).collect())
    }

    fn kwh(v: &[u64]) -> Vec<EnergyQty> {
        v.iter().copied().map(EnergyQty).collect()
    }

    #[test]
    fn picks_the_better_hhp_for_one_bundle() {
        let t = Timeline::build(4, &[1..3]).unwrap();
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 5, size: 10 },
                Offer { id: 2, fleet: 1, bundle: 1, hhp: 2, bid: 5, size: 10 },
            ],
            &t,
        );
        let d = kwh(&[0, 20, 20, 0]);
        let m = prices(&[0, 8, 9, 0]);
        let a = clear_peak_dp(&book, &d, &m, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(a.accepted, vec![ContractId(2)]);
        assert_eq!(a.value, Money::pence(40));
        assert_eq!(clear_bruteforce(&book, &d, &m, DEFAULT_ORACLE_CAP).unwrap(), a);
    }

    #[test]
    fn empty_book_clears_to_nothing() {
        let t = Timeline::build(4, &[1..3]).unwrap();
        let book = ContractBook::validate(vec![], vec![], &t).unwrap();
        let d = kwh(&[0, 5, 5, 0]);
        let m = prices(&[0, 8, 9, 0]);
        assert_eq!(clear_peak_dp(&book, &d, &m, 1).unwrap(), Allocation::empty(4));
        assert_eq!(clear_bruteforce(&book, &d, &m, 1).unwrap(), Allocation::empty(4));
        assert_eq!(clear_day(&book, &d, &m, &t, &ClearingConfig::default()).unwrap(), Allocation::empty(4));
    }

    #[test]
    fn cheaper_of_two_competing_fleets_wins() {
        let t = Timeline::build(3, &[1..2]).unwrap();
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 3, size: 10 },
                Offer { id: 2, fleet: 2, bundle: 2, hhp: 1, bid: 4, size: 10 },
            ],
            &t,
        );
        let d = kwh(&[0, 10, 0]);
        let m = prices(&[0, 8, 0]);
        let a = clear_peak_dp(&book, &d, &m, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(a.accepted, vec![ContractId(1)]);
        assert_eq!(a.value, Money::pence(50));
        let both = soc_save([ContractId(1), ContractId(2)], &book, &d, &m).unwrap();
        assert_eq!(both, Money::pence(10));
    }

    #[test]
    fn unprofitable_contract_is_rejected() {
        let t = Timeline::build(3, &[1..2]).unwrap();
        let book = build(&[Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 9, size: 10 }], &t);
        let d = kwh(&[0, 10, 0]);
        let m = prices(&[0, 8, 0]);
        let a = clear_bruteforce(&book, &d, &m, DEFAULT_ORACLE_CAP).unwrap();
        assert!(a.accepted.is_empty());
        assert_eq!(a.value, Money::ZERO);
        assert_eq!(clear_peak_dp(&book, &d, &m, DEFAULT_STATE_BUDGET).unwrap(), a);
    }

    #[test]
    fn two_peaks_clear_independently() {
        let t = Timeline::build(8, &[1..3, 5..7]).unwrap();
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 5, size: 10 },
                Offer { id: 2, fleet: 1, bundle: 1, hhp: 2, bid: 5, size: 10 },
                Offer { id: 3, fleet: 2, bundle: 2, hhp: 5, bid: 5, size: 10 },
                Offer { id: 4, fleet: 2, bundle: 2, hhp: 6, bid: 5, size: 10 },
            ],
            &t,
        );
        let d = kwh(&[0, 20, 20, 0, 0, 20, 20, 0]);
        let m = prices(&[0, 8, 9, 0, 0, 8, 9, 0]);
        let a = clear_day(&book, &d, &m, &t, &ClearingConfig::default()).unwrap();
        assert_eq!(a.accepted, vec![ContractId(2), ContractId(4)]);
        assert_eq!(a.value, Money::pence(80));
        assert_eq!(a, clear_bruteforce(&book, &d, &m, DEFAULT_ORACLE_CAP).unwrap());
    }

    #[test]
    fn timeline_without_peaks_clears_empty() {
        let t = Timeline::build(4, &[]).unwrap();
        let book = ContractBook::validate(vec![], vec![], &t).unwrap();
        let a = clear_day(&book, &kwh(&[1, 2, 3, 4]), &prices(&[1, 1, 1, 1]), &t, &ClearingConfig::default()).unwrap();
        assert_eq!(a, Allocation::empty(4));
    }

    #[test]
    fn budget_and_cap_errors_name_the_requirement() {
        let t = Timeline::build(4, &[1..3]).unwrap();
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 5, size: 10 },
                Offer { id: 2, fleet: 1, bundle: 1, hhp: 2, bid: 5, size: 10 },
            ],
            &t,
        );
        let d = kwh(&[0, 20, 20, 0]);
        let m = prices(&[0, 8, 9, 0]);
        let err = clear_peak_dp(&book, &d, &m, 100).unwrap_err();
        assert_eq!(err, ClearingError::StateBudgetExceeded { required: 121, budget: 100 });
        assert!(err.to_string().contains("121"));
        let err = clear_bruteforce(&book, &d, &m, 2).unwrap_err();
        assert_eq!(err, ClearingError::OracleCapExceeded { required: 3, cap: 2 });
    }

    #[test]
    fn ties_prefer_fewer_then_smaller_ids() {
        let t = Timeline::build(3, &[1..2]).unwrap();
        // Contract 2 alone equals 1 and 3 together.
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 7, size: 5 },
                Offer { id: 2, fleet: 2, bundle: 2, hhp: 1, bid: 7, size: 10 },
                Offer { id: 3, fleet: 3, bundle: 3, hhp: 1, bid: 7, size: 5 },
                Offer { id: 4, fleet: 4, bundle: 4, hhp: 1, bid: 7, size: 10 },
            ],
            &t,
        );
        let d = kwh(&[0, 10, 0]);
        let m = prices(&[0, 8, 0]);
        let a = clear_peak_dp(&book, &d, &m, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(a.accepted, vec![ContractId(2)]);
        assert_eq!(a, clear_bruteforce(&book, &d, &m, DEFAULT_ORACLE_CAP).unwrap());
    }

    #[test]
    fn table_invariants() {
        let t = Timeline::build(4, &[1..3]).unwrap();
        let book = build(
            &[
                Offer { id: 1, fleet: 1, bundle: 1, hhp: 1, bid: 3, size: 4 },
                Offer { id: 2, fleet: 1, bundle: 1, hhp: 2, bid: 2, size: 4 },
                Offer { id: 3, fleet: 2, bundle: 2, hhp: 1, bid: 5, size: 3 },
                Offer { id: 4, fleet: 3, bundle: 3, hhp: 2, bid: 1, size: 6 },
            ],
            &t,
        );
        let d = kwh(&[0, 6, 8, 0]);
        let m = prices(&[0, 8, 6, 0]);
        let tables = peak_tables(&book, &d, &m, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(tables.hhps(), &[1, 2]);
        assert_eq!(tables.caps(), &[6, 8]);
        for a in 0..=6 {
            for b in 0..=8 {
                let (v0, s0) = tables.entry(0, &[a, b]);
                assert_eq!((v0, s0.len()), (Money::ZERO, 0));
                let mut last = Money::ZERO;
                for r in 1..=tables.bundle_count() {
                    let (v, _) = tables.entry(r, &[a, b]);
                    assert!(v >= last);
                    last = v;
                }
            }
        }
        for r in 0..=tables.bundle_count() {
            assert_eq!(tables.entry(r, &[0, 0]), (Money::ZERO, vec![]));
        }
    }
}
