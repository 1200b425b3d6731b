//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::ops::Range;

use v2x_core::model::{
    Bundle, BundleId, Contract, ContractBook, ContractId, EnergyQty, FleetId, FleetPrivate, Market, Money, PriceVector,
    Timeline,
};
use v2x_core::rng::{self, Stream};

pub const HHPS: usize = 48;

pub struct Gen(Stream);

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen(rng::stream(seed))
    }

    /// Uniform on `lo..=hi`.
    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        let span = (hi - lo + 1) as f64;
        lo + ((rng::unit(&mut self.0) * span) as i64).min(hi - lo)
    }

    pub fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.int(0, xs.len() as i64 - 1) as usize]
    }

    /// `k` distinct elements of `xs`, in random order.
    pub fn sample<T: Copy>(&mut self, xs: &[T], k: usize) -> Vec<T> {
        let mut v = xs.to_vec();
        for i in 0..k {
            let j = self.int(i as i64, v.len() as i64 - 1) as usize;
            v.swap(i, j);
        }
        v.truncate(k);
        v
    }
}

pub struct Instance {
    pub timeline: Timeline,
    pub book: ContractBook,
    pub demand: Vec<EnergyQty>,
    pub prices: PriceVector,
    pub privates: BTreeMap<FleetId, FleetPrivate>,
}

fn prices(g: &mut Gen, lo: i64, hi: i64) -> PriceVector {
    PriceVector::new(Market::DayAhead, (0..HHPS).map(|_| Money::pence(g.int(lo, hi))).collect())
}

/// Small single-peak book for oracle comparison: at most 6 bundles, 3
/// contracts per bundle, 4 peak hhps, 30 kWh demand. Coarse bids make ties common.
pub fn oracle_instance(seed: u64) -> Instance {
    let mut g = Gen::new(seed);
    let len = g.int(1, 4) as usize;
    let start = g.int(0, (HHPS - len) as i64) as usize;
    let peak: Range<usize> = start..start + len;
    let timeline = Timeline::build(HHPS, std::slice::from_ref(&peak)).unwrap();
    let hhps: Vec<usize> = peak.collect();

    let mut demand = vec![EnergyQty::ZERO; HHPS];
    for &h in &hhps {
        demand[h] = EnergyQty(g.int(0, 30) as u64);
    }
    let mut prices = prices(&mut g, -3, 20);
    for &h in &hhps {
        prices.per_hhp[h] = Money::pence(g.int(-5, 40));
    }

    let fleets = g.int(1, 3) as u32;
    let mut bundles = Vec::new();
    let mut contracts = Vec::new();
    let mut next = 1;
    for b in 1..=g.int(1, 6) as u32 {
        let owner = FleetId(g.int(1, fleets as i64) as u32);
        bundles.push(Bundle { id: BundleId(b), owner, size: EnergyQty(g.int(1, 12) as u64) });
        let k = g.int(1, 3.min(len as i64)) as usize;
        for hhp in g.sample(&hhps, k) {
            let bid = if g.int(0, 3) == 0 { Money(g.int(0, 30_000)) } else { Money::pence(g.int(0, 30)) };
            contracts.push(Contract { id: ContractId(next), fleet: owner, bid, hhp, bundle: BundleId(b), fine: Money::pence(100) });
            next += 1;
        }
    }
    let book = ContractBook::validate(contracts, bundles, &timeline).unwrap();
    Instance { timeline, book, demand, prices, privates: BTreeMap::new() }
}

/// Book whose bids equal each contract's expected cost per kWh exactly.
///
/// Probabilities are quarters, per-kWh costs multiples of 4 milli-pence,
/// fines multiples of 4ℓ and scheduling costs multiples of ℓ, so every
/// expected cost divides evenly by the bundle size.
pub fn truthful_instance(seed: u64) -> Instance {
    let mut g = Gen::new(seed);
    let peaks = [16..19, 34..37];
    let timeline = Timeline::build(HHPS, &peaks).unwrap();
    let peak_hhps: Vec<Vec<usize>> = peaks.iter().map(|r| r.clone().collect()).collect();

    let mut demand = vec![EnergyQty::ZERO; HHPS];
    for hs in &peak_hhps {
        for &h in hs {
            demand[h] = EnergyQty(g.int(0, 20) as u64);
        }
    }
    let mut prices = prices(&mut g, 1, 10);
    for hs in &peak_hhps {
        for &h in hs {
            prices.per_hhp[h] = Money::pence(g.int(5, 40));
        }
    }

    let mut bundles = Vec::new();
    let mut contracts = Vec::new();
    let mut privates = BTreeMap::new();
    let (mut next_b, mut next_c) = (1, 1);
    for f in 1..=g.int(2, 4) as u32 {
        let fleet = FleetId(f);
        let imported = Money(4 * g.int(500, 5_000));
        let deterioration = Money(4 * g.int(0, 1_000));
        let sched_per_kwh = g.int(0, 500);
        let mut success = BTreeMap::new();
        let mut sizes = Vec::new();
        for _ in 0..g.int(1, 2) {
            let size = g.int(1, 8);
            sizes.push(size);
            bundles.push(Bundle { id: BundleId(next_b), owner: fleet, size: EnergyQty(size as u64) });
            let peak = g.int(0, 1) as usize;
            let k = g.int(1, 2) as usize;
            for hhp in g.sample(&peak_hhps[peak], k) {
                let p = g.pick(&[0.0, 0.25, 0.5, 0.75, 1.0]);
                let fine = Money(4 * size * g.int(1_000, 12_000));
                success.insert(ContractId(next_c), p);
                contracts.push(Contract { id: ContractId(next_c), fleet, bid: Money::ZERO, hhp, bundle: BundleId(next_b), fine });
                next_c += 1;
            }
            next_b += 1;
        }
        // One scheduling cost per fleet must divide by every bundle size it owns.
        let lcm = sizes.iter().fold(1i64, |a, &b| a / gcd(a, b) * b);
        let private = FleetPrivate {
            success_prob: success,
            imported_price: imported,
            deterioration_cost: deterioration,
            scheduling_cost: Money(lcm * sched_per_kwh),
        };
        privates.insert(fleet, private);
    }
    let sizes: BTreeMap<BundleId, EnergyQty> = bundles.iter().map(|b| (b.id, b.size)).collect();
    for c in contracts.iter_mut() {
        let size = sizes[&c.bundle];
        let cost = v2x_core::vcg::fleet_expected_cost(c, size, &privates[&c.fleet]);
        assert_eq!(cost.millipence() % size.kwh() as i64, 0, "expected cost not divisible by size");
        c.bid = Money(cost.millipence() / size.kwh() as i64);
    }
    let book = ContractBook::validate(contracts, bundles, &timeline).unwrap();
    Instance { timeline, book, demand, prices, privates }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
