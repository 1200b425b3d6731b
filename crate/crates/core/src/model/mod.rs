//! Domain types shared by every stage: units, the peak/valley timeline,
//! demand and price vectors, and the validated contract book.

mod book;
mod market;
mod timeline;
mod units;

use thiserror::Error;

pub use book::{Bundle, BundleGroup, Contract, ContractBook, FleetPrivate};
pub use market::{DemandVector, Market, PriceVector};
pub use timeline::{Block, BlockKind, Timeline};
pub use units::{BundleId, ContractId, EnergyQty, EvId, FleetId, Money};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("peak range #{index} [{start},{end}) is empty or outside [0,{hhp_count})")]
    BadPeakRange { index: usize, start: usize, end: usize, hhp_count: usize },
    #[error("peak ranges #{first} and #{second} overlap or are unsorted")]
    OverlappingPeaks { first: usize, second: usize },
    #[error("peak ranges #{first} and #{second} touch at hhp {at} with no valley between")]
    AdjacentPeaks { first: usize, second: usize, at: usize },
    #[error("duplicate contract id {0}")]
    DuplicateContract(ContractId),
    #[error("duplicate bundle id {0}")]
    DuplicateBundle(BundleId),
    #[error("bundle {0} has zero size")]
    EmptyBundle(BundleId),
    #[error("contract {contract} references unknown bundle {bundle}")]
    UnknownBundle { contract: ContractId, bundle: BundleId },
    #[error("contract {contract}: bundle {bundle} is owned by fleet {owner}, not fleet {fleet}")]
    OwnerMismatch { contract: ContractId, bundle: BundleId, owner: FleetId, fleet: FleetId },
    #[error("contract {contract}: hhp {hhp} outside the timeline")]
    HhpOutOfRange { contract: ContractId, hhp: usize },
    #[error("contract {contract}: hhp not in peak (hhp {hhp})")]
    HhpNotInPeak { contract: ContractId, hhp: usize },
    #[error("bundle {bundle} offered twice at hhp {hhp}")]
    DuplicateBundleHhp { bundle: BundleId, hhp: usize },
    #[error("bundle spans peaks: bundle {bundle} offered at hhp {first_hhp} and hhp {second_hhp}")]
    BundleSpansPeaks { bundle: BundleId, first_hhp: usize, second_hhp: usize },
    #[error("contract {0} has a negative bid")]
    NegativeBid(ContractId),
    #[error("contract {0} has a negative fine")]
    NegativeFine(ContractId),
    #[error("unknown contract id {0}")]
    UnknownContract(ContractId),
    #[error("unknown fleet id {0}")]
    UnknownFleet(FleetId),
    #[error("contract {contract}: probability {p} outside [0,1]")]
    BadProbability { contract: ContractId, p: f64 },
    #[error("fleet cost parameters must be non-negative")]
    NegativeCost,
    #[error("invalid money amount {0:?}")]
    BadMoney(String),
    #[error("unknown market {0:?}")]
    UnknownMarket(String),
    #[error("{what} has length {got}, expected {expected}")]
    LengthMismatch { what: &'static str, got: usize, expected: usize },
}
