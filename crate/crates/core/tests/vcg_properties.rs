mod common;

use common::truthful_instance;
use v2x_core::clearing::{Auction, ClearingConfig, Method};
use v2x_core::model::Money;
use v2x_core::vcg::{
    deviation_grid, fleet_utility, payment_schedule, platform_utility, utility_under, vcg_payment, Ratio, DEFAULT_MULTIPLIERS,
};

fn auction(i: &common::Instance, method: Method) -> Auction<'_> {
    Auction { timeline: &i.timeline, demand: &i.demand, prices: &i.prices, config: ClearingConfig::default(), method }
}

#[test]
fn schedule_matches_single_fleet_payments() {
    for seed in 300..340 {
        let i = truthful_instance(seed);
        let a = auction(&i, Method::Dp);
        let s = payment_schedule(&a, &i.book).unwrap();
        for &fleet in i.privates.keys() {
            assert_eq!(vcg_payment(&a, &i.book, fleet).unwrap(), s.payment(fleet));
            assert_eq!(fleet_utility(&a, &i.book, fleet, &i.privates[&fleet]).unwrap(), utility_under(&s, &i.book, fleet, &i.privates[&fleet]));
        }
    }
}

#[test]
fn oracle_and_dp_schedules_agree() {
    for seed in 400..440 {
        let i = truthful_instance(seed);
        let dp = payment_schedule(&auction(&i, Method::Dp), &i.book).unwrap();
        let bf = payment_schedule(&auction(&i, Method::Oracle), &i.book).unwrap();
        assert_eq!(dp, bf, "seed {seed}");
    }
}

#[test]
fn truthful_fleets_never_lose_in_expectation() {
    for seed in 500..600 {
        let i = truthful_instance(seed);
        let s = payment_schedule(&auction(&i, Method::Dp), &i.book).unwrap();
        for (&fleet, p) in &i.privates {
            assert!(utility_under(&s, &i.book, fleet, p) >= Money::ZERO, "seed {seed} fleet {fleet}");
        }
    }
}

#[test]
fn identity_deviation_reproduces_truthful_utility() {
    for seed in 600..650 {
        let i = truthful_instance(seed);
        let a = auction(&i, Method::Dp);
        let s = payment_schedule(&a, &i.book).unwrap();
        for (&fleet, p) in &i.privates {
            let grid = deviation_grid(&a, &i.book, fleet, p, &[Ratio::new(1, 1)]).unwrap();
            assert_eq!(grid[0].utility, utility_under(&s, &i.book, fleet, p));
        }
    }
}

#[test]
fn finer_grid_finds_no_profitable_deviation() {
    let multipliers: Vec<Ratio> = (1..=40).map(|k| Ratio::new(k, 20)).collect();
    for seed in 700..740 {
        let i = truthful_instance(seed);
        let a = auction(&i, Method::Dp);
        let s = payment_schedule(&a, &i.book).unwrap();
        for (&fleet, p) in &i.privates {
            let truthful = utility_under(&s, &i.book, fleet, p);
            for d in deviation_grid(&a, &i.book, fleet, p, &multipliers).unwrap() {
                assert!(d.utility <= truthful, "seed {seed} fleet {fleet} x{}/{}", d.multiplier.num, d.multiplier.den);
            }
        }
    }
    assert_eq!(DEFAULT_MULTIPLIERS.len(), 9);
}

#[test]
fn platform_never_pays_more_than_it_saves_without_oversupply() {
    for seed in 800..1000 {
        let i = truthful_instance(seed);
        let s = payment_schedule(&auction(&i, Method::Dp), &i.book).unwrap();
        if s.allocation.per_hhp_supply.iter().zip(&i.demand).all(|(s, d)| s <= d) {
            assert!(platform_utility(&s.allocation, &i.demand, &i.prices, &s.payments) >= Money::ZERO, "seed {seed}");
        }
    }
}
