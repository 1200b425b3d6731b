use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{EnergyQty, ModelError, Money};

/// Expected per-hhp demand plus the additive safety margin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandVector {
    pub per_hhp: Vec<EnergyQty>,
    pub safety_margin: EnergyQty,
}

impl DemandVector {
    pub fn new(per_hhp: Vec<EnergyQty>, safety_margin: EnergyQty) -> DemandVector {
        DemandVector { per_hhp, safety_margin }
    }

    /// Demand with the safety margin added at every period.
    pub fn adjusted(&self) -> Vec<EnergyQty> {
        self.per_hhp.iter().map(|&d| d + self.safety_margin).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Market {
    #[serde(rename = "day-ahead")]
    DayAhead,
    #[serde(rename = "intra-day")]
    IntraDay,
    #[serde(rename = "balancing")]
    Balancing,
}

impl Market {
    pub fn as_str(self) -> &'static str {
        match self {
            Market::DayAhead => "day-ahead",
            Market::IntraDay => "intra-day",
            Market::Balancing => "balancing",
        }
    }
}

impl fmt::Display for Market {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Market {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Market, ModelError> {
        match s.trim() {
            "day-ahead" => Ok(Market::DayAhead),
            "intra-day" => Ok(Market::IntraDay),
            "balancing" => Ok(Market::Balancing),
            other => Err(ModelError::UnknownMarket(other.to_string())),
        }
    }
}

/// Per-hhp price in milli-pence per kWh. Negative prices are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PriceVector {
    pub market: Market,
    pub per_hhp: Vec<Money>,
}

impl PriceVector {
    pub fn new(market: Market, per_hhp: Vec<Money>) -> PriceVector {
        PriceVector { market, per_hhp }
    }

    pub fn at(&self, hhp: usize) -> Money {
        self.per_hhp[hhp]
    }

    pub fn len(&self) -> usize {
        self.per_hhp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_hhp.is_empty()
    }
}
