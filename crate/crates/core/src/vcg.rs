//! VCG payments and the utilities of fleets and the platform.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clearing::{Allocation, Auction, ClearingError};
use crate::model::{Contract, ContractBook, ContractId, EnergyQty, FleetId, FleetPrivate, Money};

/// Payments owed to each fleet with at least one offer, with the allocation they settle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaymentSchedule {
    pub allocation: Allocation,
    pub payments: BTreeMap<FleetId, Money>,
}

impl PaymentSchedule {
    pub fn payment(&self, fleet: FleetId) -> Money {
        self.payments.get(&fleet).copied().unwrap_or(Money::ZERO)
    }

    pub fn total(&self) -> Money {
        self.payments.values().copied().sum()
    }
}

/// Total bid of `fleet`'s accepted contracts.
fn accepted_bid_total(allocation: &Allocation, book: &ContractBook, fleet: FleetId) -> Money {
    allocation
        .accepted
        .iter()
        .filter_map(|&id| {
            let c = book.get(id).ok().filter(|c| c.fleet == fleet)?;
            Some(c.bid.times_kwh(book.size_of(id).ok()?))
        })
        .sum()
}

/// Savings of `allocation` with `fleet`'s own bids added back.
pub fn soc_save_excluding(allocation: &Allocation, fleet: FleetId, book: &ContractBook) -> Money {
    allocation.value + accepted_bid_total(allocation, book, fleet)
}

fn payment_given(
    auction: &Auction<'_>,
    book: &ContractBook,
    allocation: &Allocation,
    fleet: FleetId,
) -> Result<Money, ClearingError> {
    if !book.contracts().iter().any(|c| c.fleet == fleet) {
        return Ok(Money::ZERO);
    }
    let without = auction.clear(&book.without_fleet(fleet))?;
    Ok(soc_save_excluding(allocation, fleet, book) - without.value)
}

/// Clarke-pivot payment to `fleet`: what everyone else saves with the fleet
/// present minus what they could save without it. Zero for fleets with no offers.
pub fn vcg_payment(auction: &Auction<'_>, book: &ContractBook, fleet: FleetId) -> Result<Money, ClearingError> {
    let allocation = auction.clear(book)?;
    payment_given(auction, book, &allocation, fleet)
}

/// Clears once and prices every fleet that offered something.
pub fn payment_schedule(auction: &Auction<'_>, book: &ContractBook) -> Result<PaymentSchedule, ClearingError> {
    let allocation = auction.clear(book)?;
    let payments = book
        .fleets()
        .into_par_iter()
        .map(|n| payment_given(auction, book, &allocation, n).map(|p| (n, p)))
        .collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(PaymentSchedule { allocation, payments })
}

/// Expected cost of attempting `contract`:
/// `p·(m_imported + c_BD)·ℓ + f·(1 − p) + scheduling`.
pub fn fleet_expected_cost(contract: &Contract, size: EnergyQty, private: &FleetPrivate) -> Money {
    let p = private.prob(contract.id);
    let energy = (private.imported_price + private.deterioration_cost).times_kwh(size);
    Money::from_f64(p * energy.as_f64() + (1.0 - p) * contract.fine.as_f64()) + private.scheduling_cost
}

/// Smallest whole milli-pence per-kWh bid that covers the expected cost.
pub fn truthful_bid(contract: &Contract, size: EnergyQty, private: &FleetPrivate) -> Money {
    let cost = fleet_expected_cost(contract, size, private).millipence();
    let kwh = size.kwh() as i64;
    Money(cost.div_euclid(kwh) + i64::from(cost.rem_euclid(kwh) != 0))
}

fn expected_cost_of_accepted(allocation: &Allocation, book: &ContractBook, fleet: FleetId, private: &FleetPrivate) -> Money {
    allocation
        .accepted
        .iter()
        .filter_map(|&id| {
            let c = book.get(id).ok().filter(|c| c.fleet == fleet)?;
            Some(fleet_expected_cost(c, book.size_of(id).ok()?, private))
        })
        .sum()
}

/// Payment minus expected cost of the fleet's accepted contracts, under a known schedule.
pub fn utility_under(schedule: &PaymentSchedule, book: &ContractBook, fleet: FleetId, private: &FleetPrivate) -> Money {
    schedule.payment(fleet) - expected_cost_of_accepted(&schedule.allocation, book, fleet, private)
}

pub fn fleet_utility(
    auction: &Auction<'_>,
    book: &ContractBook,
    fleet: FleetId,
    private: &FleetPrivate,
) -> Result<Money, ClearingError> {
    let allocation = auction.clear(book)?;
    let payment = payment_given(auction, book, &allocation, fleet)?;
    Ok(payment - expected_cost_of_accepted(&allocation, book, fleet, private))
}

/// Value of demand served by accepted supply minus all payments.
pub fn platform_utility(
    allocation: &Allocation,
    demand: &[EnergyQty],
    prices: &crate::model::PriceVector,
    payments: &BTreeMap<FleetId, Money>,
) -> Money {
    let served: Money = allocation
        .per_hhp_supply
        .iter()
        .zip(demand)
        .enumerate()
        .map(|(h, (&s, &d))| prices.at(h).times_kwh(s.min(d)))
        .sum();
    served - payments.values().copied().sum::<Money>()
}

/// A positive rational bid multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub const fn new(num: u32, den: u32) -> Ratio {
        Ratio { num, den }
    }

    /// `bid · num / den`, rounded half up.
    pub fn apply(self, bid: Money) -> Money {
        assert!(self.num > 0 && self.den > 0, "multipliers are positive");
        let v = bid.millipence() as i128 * self.num as i128;
        let den = self.den as i128;
        Money(i64::try_from((2 * v + den).div_euclid(2 * den)).expect("money overflow"))
    }
}

pub const DEFAULT_MULTIPLIERS: [Ratio; 9] = [
    Ratio::new(1, 4),
    Ratio::new(1, 2),
    Ratio::new(3, 4),
    Ratio::new(9, 10),
    Ratio::new(1, 1),
    Ratio::new(11, 10),
    Ratio::new(3, 2),
    Ratio::new(2, 1),
    Ratio::new(4, 1),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Deviation {
    pub multiplier: Ratio,
    /// The deviating fleet's bids after scaling.
    pub bids: Vec<(ContractId, Money)>,
    /// Utility under true costs after re-clearing.
    pub utility: Money,
}

/// Scales all of `fleet`'s bids by each multiplier, re-clears, and evaluates
/// the fleet's utility against its true costs.
pub fn deviation_grid(
    auction: &Auction<'_>,
    book: &ContractBook,
    fleet: FleetId,
    private: &FleetPrivate,
    multipliers: &[Ratio],
) -> Result<Vec<Deviation>, ClearingError> {
    // The counterfactual without the fleet does not depend on its bids.
    let without = if book.contracts().iter().any(|c| c.fleet == fleet) {
        Some(auction.clear(&book.without_fleet(fleet))?.value)
    } else {
        None
    };
    multipliers
        .par_iter()
        .map(|&r| {
            let deviated = book.with_bids(|c| (c.fleet == fleet).then(|| r.apply(c.bid)));
            let bids = deviated.contracts().iter().filter(|c| c.fleet == fleet).map(|c| (c.id, c.bid)).collect();
            let allocation = auction.clear(&deviated)?;
            let payment = match without {
                Some(w) => soc_save_excluding(&allocation, fleet, &deviated) - w,
                None => Money::ZERO,
            };
            let utility = payment - expected_cost_of_accepted(&allocation, &deviated, fleet, private);
            Ok(Deviation { multiplier: r, bids, utility })
        })
        .collect()
}
