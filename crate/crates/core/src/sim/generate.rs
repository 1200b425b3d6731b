use crate::fr::FrConfig;
use crate::model::{BundleId, ContractId, EnergyQty, EvId, FleetId, Money};
use crate::rng::{self, Stream};

use super::scenario::{BundleSpec, CarbonFactors, ContractSpec, EvSpec, FleetSpec, PriceSpec, Scenario, SCHEMA_VERSION};

/// Shape of randomly generated scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub hhp_count: usize,
    pub peaks: Vec<[usize; 2]>,
    pub fleets: u32,
    pub max_bundles_per_fleet: u32,
    pub max_contracts_per_bundle: u32,
    pub max_bundle_kwh: u64,
    /// Offers in a peak are confined to this many of its hhps.
    pub offer_hhps_per_peak: usize,
    pub max_peak_demand_kwh: u64,
    pub evs: u32,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            hhp_count: 48,
            peaks: vec![[0, 1], [16, 24], [34, 48]],
            fleets: 4,
            max_bundles_per_fleet: 3,
            max_contracts_per_bundle: 3,
            max_bundle_kwh: 10,
            offer_hhps_per_peak: 3,
            max_peak_demand_kwh: 30,
            evs: 6,
        }
    }
}

fn below(r: &mut Stream, n: u64) -> u64 {
    ((rng::unit(r) * n as f64) as u64).min(n - 1)
}

fn between(r: &mut Stream, lo: u64, hi: u64) -> u64 {
    lo + below(r, hi - lo + 1)
}

impl Scenario {
    /// A reproducible random day. Bids equal each contract's expected cost per kWh, rounded up.
    pub fn generate(p: &GeneratorParams, seed: u64) -> Scenario {
        let mut r = rng::stream(seed ^ 0x5eed_5eed_5eed_5eed);
        let n = p.hhp_count;
        let is_peak = |h: usize| p.peaks.iter().any(|&[a, b]| (a..b).contains(&h));

        let day_ahead: Vec<Money> = (0..n)
            .map(|h| Money::pence(if is_peak(h) { between(&mut r, 15, 40) } else { between(&mut r, 3, 15) } as i64))
            .collect();
        let balancing: Vec<Money> = day_ahead.iter().map(|m| m.times(3).scale(0.5) + Money::pence(5)).collect();
        let demand: Vec<EnergyQty> = (0..n)
            .map(|h| EnergyQty(if is_peak(h) { between(&mut r, 0, p.max_peak_demand_kwh) } else { between(&mut r, 0, 10) }))
            .collect();

        let offer_hhps: Vec<Vec<usize>> = p
            .peaks
            .iter()
            .map(|&[a, b]| {
                let mut hs: Vec<usize> = (a..b).collect();
                // Partial Fisher-Yates.
                for i in 0..hs.len().min(p.offer_hhps_per_peak) {
                    let j = i + below(&mut r, (hs.len() - i) as u64) as usize;
                    hs.swap(i, j);
                }
                hs.truncate(p.offer_hhps_per_peak);
                hs.sort();
                hs
            })
            .collect();

        let mut next_bundle = 1u32;
        let mut next_contract = 1u32;
        let mut fleets = Vec::new();
        for f in 1..=p.fleets {
            // Costs in multiples of 4 milli-pence keep quarter probabilities exact.
            let imported_price = Money(4 * between(&mut r, 250, 2500) as i64);
            let deterioration_cost = Money(4 * between(&mut r, 0, 500) as i64);
            let scheduling_cost = Money::pence(between(&mut r, 0, 3) as i64);
            let mut bundles = Vec::new();
            for _ in 0..between(&mut r, 1, p.max_bundles_per_fleet as u64) {
                let size = EnergyQty(between(&mut r, 1, p.max_bundle_kwh));
                let peak = below(&mut r, offer_hhps.len() as u64) as usize;
                let mut hs = offer_hhps[peak].clone();
                let k = between(&mut r, 1, (p.max_contracts_per_bundle as u64).min(hs.len() as u64)) as usize;
                for i in 0..k {
                    let j = i + below(&mut r, (hs.len() - i) as u64) as usize;
                    hs.swap(i, j);
                }
                let mut contracts = Vec::new();
                for &hhp in &hs[..k] {
                    let success_prob = between(&mut r, 2, 4) as f64 / 4.0;
                    let fine = Money::pence(size.kwh() as i64 * between(&mut r, 10, 40) as i64);
                    let energy = (imported_price + deterioration_cost).times_kwh(size);
                    let cost = Money::from_f64(success_prob * energy.as_f64() + (1.0 - success_prob) * fine.as_f64())
                        + scheduling_cost;
                    let kwh = size.kwh() as i64;
                    let bid = Money((cost.millipence() + kwh - 1).div_euclid(kwh));
                    contracts.push(ContractSpec { id: ContractId(next_contract), hhp, bid, fine, success_prob });
                    next_contract += 1;
                }
                bundles.push(BundleSpec { id: BundleId(next_bundle), size, contracts });
                next_bundle += 1;
            }
            fleets.push(FleetSpec { id: FleetId(f), imported_price, deterioration_cost, scheduling_cost, bundles });
        }

        let evs = (1..=p.evs)
            .map(|id| {
                let capacity = between(&mut r, 40, 80);
                let x_min = capacity / 5;
                let x_max = capacity * 4 / 5;
                let soc = between(&mut r, x_min, x_max);
                let start = below(&mut r, n as u64) as usize;
                let len = between(&mut r, 1, 16) as usize;
                EvSpec {
                    id: EvId(id),
                    capacity: EnergyQty(capacity),
                    soc: EnergyQty(soc),
                    x_min: EnergyQty(x_min),
                    x_max: EnergyQty(x_max),
                    plugged: (start..(start + len).min(n)).collect(),
                }
            })
            .collect();

        let imbalance = (0..n).map(|_| between(&mut r, 0, 6) as i64 - 3).collect();

        Scenario {
            schema_version: SCHEMA_VERSION,
            seed,
            hhp_count: n,
            peaks: p.peaks.clone(),
            demand,
            safety_margin: EnergyQty(0),
            prices: PriceSpec { day_ahead, balancing, intra_day: None },
            imbalance,
            fr: FrConfig { const_ex: 0.1, const_im: 0.1, deterioration_cost: Money::pence(2) },
            carbon: CarbonFactors::default(),
            fleets,
            evs,
        }
    }
}
