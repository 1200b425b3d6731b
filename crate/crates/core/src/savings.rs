//! Society's savings for a set of accepted contracts, and feasibility.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{ContractBook, ContractId, EnergyQty, ModelError, Money, PriceVector};

/// Savings of accepting `accepted` against adjusted demand `demand`:
///
/// `Σ_j (m[h(j)] − b(j))·ℓ(j) − Σ_h m[h]·max(0, supply[h] − demand[h])`.
///
/// Feasibility is not required; duplicate ids count once.
pub fn soc_save(
    accepted: impl IntoIterator<Item = ContractId>,
    book: &ContractBook,
    demand: &[EnergyQty],
    prices: &PriceVector,
) -> Result<Money, ModelError> {
    let accepted: BTreeSet<ContractId> = accepted.into_iter().collect();
    let mut total = Money::ZERO;
    let mut supply: BTreeMap<usize, EnergyQty> = BTreeMap::new();
    for id in accepted {
        let c = book.get(id)?;
        let size = book.size_of(id)?;
        total += prices.at(c.hhp).times_kwh(size) - c.bid.times_kwh(size);
        *supply.entry(c.hhp).or_default() += size;
    }
    for (h, s) in supply {
        let excess = s.saturating_sub(demand[h]);
        total -= prices.at(h).times_kwh(excess);
    }
    Ok(total)
}

/// True iff no bundle appears in more than one accepted contract.
pub fn is_feasible(accepted: &[ContractId], book: &ContractBook) -> Result<bool, ModelError> {
    let mut bundles = BTreeSet::new();
    let mut ids = BTreeSet::new();
    for &id in accepted {
        let c = book.get(id)?;
        if ids.insert(id) && !bundles.insert(c.bundle) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Bundle, BundleId, Contract, FleetId, Market, Timeline};

    // hhp 1 is "A", hhp 2 is "B" inside a single peak.
    fn book(rows: &[(u32, u32, usize, i64, u64)]) -> ContractBook {
        let t = Timeline::build(4, &[1..3]).unwrap();
        let mut bundles = Vec::new();
        let mut contracts = Vec::new();
        for &(id, bundle, hhp, bid, size) in rows {
            if !bundles.iter().any(|b: &Bundle| b.id == BundleId(bundle)) {
                bundles.push(Bundle { id: BundleId(bundle), owner: FleetId(bundle), size: EnergyQty(size) });
            }
            contracts.push(Contract {
                id: ContractId(id),
                fleet: FleetId(bundle),
                bid: Money::pence(bid),
                hhp,
                bundle: BundleId(bundle),
                fine: Money::pence(100),
            });
        }
        ContractBook::validate(contracts, bundles, &t).unwrap()
    }

    fn prices(a: i64, b: i64) -> PriceVector {
        PriceVector::new(Market::DayAhead, vec![Money::ZERO, Money::pence(a), Money::pence(b), Money::ZERO])
    }

    fn demand(a: u64, b: u64) -> Vec<EnergyQty> {
        vec![EnergyQty(0), EnergyQty(a), EnergyQty(b), EnergyQty(0)]
    }

    fn ids(v: &[u32]) -> Vec<ContractId> {
        v.iter().copied().map(ContractId).collect()
    }

    #[test]
    fn single_contract_under_demand() {
        let bk = book(&[(1, 1, 1, 5, 10)]);
        assert_eq!(soc_save(ids(&[1]), &bk, &demand(20, 0), &prices(8, 0)).unwrap(), Money::pence(30));
    }

    #[test]
    fn empty_set_is_zero() {
        let bk = book(&[(1, 1, 1, 5, 10)]);
        assert_eq!(soc_save(ids(&[]), &bk, &demand(20, 0), &prices(8, 0)).unwrap(), Money::ZERO);
    }

    #[test]
    fn excess_is_penalised() {
        let bk = book(&[(1, 1, 1, 5, 10), (2, 2, 1, 5, 10)]);
        assert_eq!(soc_save(ids(&[1, 2]), &bk, &demand(15, 0), &prices(8, 0)).unwrap(), Money::pence(20));
    }

    #[test]
    fn unknown_contract_is_an_error() {
        let bk = book(&[(1, 1, 1, 5, 10)]);
        assert!(matches!(
            soc_save(ids(&[7]), &bk, &demand(20, 0), &prices(8, 0)),
            Err(ModelError::UnknownContract(_))
        ));
    }

    #[test]
    fn feasibility() {
        let bk = book(&[(1, 1, 1, 5, 10), (2, 1, 2, 5, 10), (3, 2, 1, 5, 10)]);
        assert!(is_feasible(&ids(&[1, 3]), &bk).unwrap());
        assert!(!is_feasible(&ids(&[1, 2]), &bk).unwrap());
        assert!(is_feasible(&[], &bk).unwrap());
    }

    #[test]
    fn bids_at_market_price_save_nothing() {
        let bk = book(&[(1, 1, 1, 8, 10), (2, 2, 2, 9, 5)]);
        assert_eq!(soc_save(ids(&[1, 2]), &bk, &demand(10, 5), &prices(8, 9)).unwrap(), Money::ZERO);
    }

    proptest::proptest! {
        #[test]
        fn additive_without_excess_and_monotone_in_demand(
            bids in proptest::collection::vec(0i64..20, 4),
            sizes in proptest::collection::vec(1u64..10, 4),
            ma in 0i64..20, mb in 0i64..20,
            da in 0u64..50, db in 0u64..50, bump in 0u64..10,
        ) {
            let rows: Vec<_> = (0..4u32)
                .map(|i| (i + 1, i + 1, 1 + (i as usize % 2), bids[i as usize], sizes[i as usize]))
                .collect();
            let bk = book(&rows);
            let p = prices(ma, mb);
            let all = ids(&[1, 2, 3, 4]);
            let big = demand(100, 100);
            let whole = soc_save(all.clone(), &bk, &big, &p).unwrap();
            let parts: Money = all.iter().map(|&j| soc_save([j], &bk, &big, &p).unwrap()).sum();
            proptest::prop_assert_eq!(whole, parts);

            let lo = soc_save(all.clone(), &bk, &demand(da, db), &p).unwrap();
            let hi = soc_save(all, &bk, &demand(da + bump, db), &p).unwrap();
            proptest::prop_assert!(lo <= hi);
        }
    }
}
