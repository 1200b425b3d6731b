use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BundleId, ContractId, EnergyQty, FleetId, ModelError, Money, Timeline};

/// An indivisible quantity of stored energy owned by one fleet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bundle {
    pub id: BundleId,
    pub owner: FleetId,
    pub size: EnergyQty,
}

/// An offer to export a bundle at one hhp.
///
/// `bid` is the minimum acceptable payment per kWh; `fine` is the total
/// amount owed if the contract is accepted and not honored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contract {
    pub id: ContractId,
    pub fleet: FleetId,
    pub bid: Money,
    pub hhp: usize,
    pub bundle: BundleId,
    pub fine: Money,
}

/// The contracts offered for a single bundle, sorted by contract id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleGroup {
    pub bundle: BundleId,
    pub owner: FleetId,
    pub size: EnergyQty,
    /// Index of the peak block (in [`Timeline::blocks`]) holding every contract.
    pub block: usize,
    pub contracts: Vec<ContractId>,
}

/// Validated offers, grouped per bundle in ascending bundle id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractBook {
    contracts: Vec<Contract>,
    sizes: Vec<EnergyQty>,
    bundles: Vec<Bundle>,
    groups: Vec<BundleGroup>,
    index: BTreeMap<ContractId, usize>,
    hhp_count: usize,
}

impl ContractBook {
    /// Checks the offer-side rules and groups contracts per bundle.
    pub fn validate(
        contracts: Vec<Contract>,
        bundles: Vec<Bundle>,
        timeline: &Timeline,
    ) -> Result<ContractBook, ModelError> {
        let mut bundle_map: BTreeMap<BundleId, Bundle> = BTreeMap::new();
        for b in bundles {
            if b.size == EnergyQty::ZERO {
                return Err(ModelError::EmptyBundle(b.id));
            }
            if bundle_map.contains_key(&b.id) {
                return Err(ModelError::DuplicateBundle(b.id));
            }
            bundle_map.insert(b.id, b);
        }

        let mut contracts = contracts;
        contracts.sort_by_key(|c| c.id);
        for w in contracts.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateContract(w[0].id));
            }
        }

        let mut grouped: BTreeMap<BundleId, Vec<usize>> = BTreeMap::new();
        let mut seen_slot: BTreeSet<(BundleId, usize)> = BTreeSet::new();
        for (i, c) in contracts.iter().enumerate() {
            if c.bid < Money::ZERO {
                return Err(ModelError::NegativeBid(c.id));
            }
            if c.fine < Money::ZERO {
                return Err(ModelError::NegativeFine(c.id));
            }
            let bundle = bundle_map.get(&c.bundle).ok_or(ModelError::UnknownBundle { contract: c.id, bundle: c.bundle })?;
            if bundle.owner != c.fleet {
                return Err(ModelError::OwnerMismatch { contract: c.id, bundle: c.bundle, owner: bundle.owner, fleet: c.fleet });
            }
            if c.hhp >= timeline.hhp_count() {
                return Err(ModelError::HhpOutOfRange { contract: c.id, hhp: c.hhp });
            }
            if !timeline.is_peak(c.hhp) {
                return Err(ModelError::HhpNotInPeak { contract: c.id, hhp: c.hhp });
            }
            if !seen_slot.insert((c.bundle, c.hhp)) {
                return Err(ModelError::DuplicateBundleHhp { bundle: c.bundle, hhp: c.hhp });
            }
            grouped.entry(c.bundle).or_default().push(i);
        }

        let mut groups = Vec::with_capacity(grouped.len());
        for (bundle_id, members) in grouped {
            let bundle = &bundle_map[&bundle_id];
            let block = timeline.block_index(contracts[members[0]].hhp).expect("hhp checked above");
            if let Some(&other) = members.iter().find(|&&i| timeline.block_index(contracts[i].hhp) != Some(block)) {
                return Err(ModelError::BundleSpansPeaks {
                    bundle: bundle_id,
                    first_hhp: contracts[members[0]].hhp,
                    second_hhp: contracts[other].hhp,
                });
            }
            groups.push(BundleGroup {
                bundle: bundle_id,
                owner: bundle.owner,
                size: bundle.size,
                block,
                contracts: members.iter().map(|&i| contracts[i].id).collect(),
            });
        }

        let sizes = contracts.iter().map(|c| bundle_map[&c.bundle].size).collect();
        let index = contracts.iter().enumerate().map(|(i, c)| (c.id, i)).collect();
        Ok(ContractBook {
            contracts,
            sizes,
            bundles: bundle_map.into_values().collect(),
            groups,
            index,
            hhp_count: timeline.hhp_count(),
        })
    }

    pub fn empty(hhp_count: usize) -> ContractBook {
        ContractBook {
            contracts: Vec::new(),
            sizes: Vec::new(),
            bundles: Vec::new(),
            groups: Vec::new(),
            index: BTreeMap::new(),
            hhp_count,
        }
    }

    pub fn hhp_count(&self) -> usize {
        self.hhp_count
    }

    /// All contracts in ascending id order.
    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn groups(&self) -> &[BundleGroup] {
        &self.groups
    }

    pub fn is_empty(&self) -> bool {
        self.contracts.is_empty()
    }

    pub fn contains(&self, id: ContractId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn get(&self, id: ContractId) -> Result<&Contract, ModelError> {
        self.index.get(&id).map(|&i| &self.contracts[i]).ok_or(ModelError::UnknownContract(id))
    }

    /// Energy of the contract's bundle.
    pub fn size_of(&self, id: ContractId) -> Result<EnergyQty, ModelError> {
        self.index.get(&id).map(|&i| self.sizes[i]).ok_or(ModelError::UnknownContract(id))
    }

    /// Contract together with its bundle size, by position in [`ContractBook::contracts`].
    pub fn entry(&self, pos: usize) -> (&Contract, EnergyQty) {
        (&self.contracts[pos], self.sizes[pos])
    }

    pub fn position(&self, id: ContractId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Fleets with at least one offered contract, ascending.
    pub fn fleets(&self) -> BTreeSet<FleetId> {
        self.contracts.iter().map(|c| c.fleet).collect()
    }

    /// Keeps only the groups whose bundle satisfies `keep`.
    pub fn retain_groups(&self, mut keep: impl FnMut(&BundleGroup) -> bool) -> ContractBook {
        let kept: BTreeSet<BundleId> = self.groups.iter().filter(|g| keep(g)).map(|g| g.bundle).collect();
        let mut out = ContractBook::empty(self.hhp_count);
        for (c, &s) in self.contracts.iter().zip(&self.sizes) {
            if kept.contains(&c.bundle) {
                out.index.insert(c.id, out.contracts.len());
                out.contracts.push(c.clone());
                out.sizes.push(s);
            }
        }
        out.bundles = self.bundles.iter().filter(|b| kept.contains(&b.id)).cloned().collect();
        out.groups = self.groups.iter().filter(|g| kept.contains(&g.bundle)).cloned().collect();
        out
    }

    /// The book restricted to bundles owned by fleets in `fleets`.
    pub fn restrict_to(&self, fleets: &BTreeSet<FleetId>) -> ContractBook {
        self.retain_groups(|g| fleets.contains(&g.owner))
    }

    /// The book with every bundle of `fleet` removed.
    pub fn without_fleet(&self, fleet: FleetId) -> ContractBook {
        self.retain_groups(|g| g.owner != fleet)
    }

    /// The contracts of one peak block.
    pub fn for_block(&self, block: usize) -> ContractBook {
        self.retain_groups(|g| g.block == block)
    }

    /// Same book with bids replaced where `new_bid` returns a value.
    pub fn with_bids(&self, mut new_bid: impl FnMut(&Contract) -> Option<Money>) -> ContractBook {
        let mut out = self.clone();
        for c in &mut out.contracts {
            if let Some(b) = new_bid(c) {
                assert!(b >= Money::ZERO, "bids are non-negative");
                c.bid = b;
            }
        }
        out
    }
}

/// A fleet's private cost parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetPrivate {
    /// Probability of honoring each of the fleet's contracts.
    pub success_prob: BTreeMap<ContractId, f64>,
    /// Price per kWh the fleet originally paid for its stored energy.
    pub imported_price: Money,
    /// Battery deterioration cost per exported kWh.
    pub deterioration_cost: Money,
    /// Fixed cost of scheduling one contract.
    pub scheduling_cost: Money,
}

impl FleetPrivate {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (&id, &p) in &self.success_prob {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::BadProbability { contract: id, p });
            }
        }
        if self.imported_price < Money::ZERO || self.deterioration_cost < Money::ZERO || self.scheduling_cost < Money::ZERO {
            return Err(ModelError::NegativeCost);
        }
        Ok(())
    }

    /// Success probability of `id`; contracts without an entry are assumed certain.
    pub fn prob(&self, id: ContractId) -> f64 {
        self.success_prob.get(&id).copied().unwrap_or(1.0)
    }
}
