//! Clearing engine and simulator for day-ahead V2X energy-export auctions.
//!
//! Energy is whole kWh ([`model::EnergyQty`]); money is integer milli-pence
//! ([`model::Money`]). Everything downstream of a seed is deterministic.

#![cfg_attr(test, allow(clippy::single_range_in_vec_init))]

pub mod clearing;
pub mod fr;
pub mod io;
pub mod model;
pub mod reliability;
pub mod rng;
pub mod savings;
pub mod sim;
pub mod vcg;
