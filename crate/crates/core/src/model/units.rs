use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// Whole kilowatt-hours. All energy in the book is integral so the clearing
/// tables can be indexed by residual demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyQty(pub u64);

impl EnergyQty {
    pub const ZERO: EnergyQty = EnergyQty(0);

    pub fn kwh(self) -> u64 {
        self.0
    }

    pub fn checked_add(self, rhs: EnergyQty) -> Option<EnergyQty> {
        self.0.checked_add(rhs.0).map(EnergyQty)
    }

    pub fn saturating_sub(self, rhs: EnergyQty) -> EnergyQty {
        EnergyQty(self.0.saturating_sub(rhs.0))
    }
}

impl Add for EnergyQty {
    type Output = EnergyQty;
    fn add(self, rhs: EnergyQty) -> EnergyQty {
        self.checked_add(rhs).expect("energy quantity overflow")
    }
}

impl AddAssign for EnergyQty {
    fn add_assign(&mut self, rhs: EnergyQty) {
        *self = *self + rhs;
    }
}

impl Sum for EnergyQty {
    fn sum<I: Iterator<Item = EnergyQty>>(iter: I) -> EnergyQty {
        iter.fold(EnergyQty::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for EnergyQty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} kWh", self.0)
    }
}

/// Signed amount of money in milli-pence.
///
/// Per-kWh prices and bids use the same unit, so `price * kwh` yields a
/// total. Arithmetic panics on overflow instead of wrapping. In files money
/// is written as decimal pence with exactly three fraction digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(pub i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub fn from_millipence(v: i64) -> Money {
        Money(v)
    }

    /// Whole pence.
    pub fn pence(p: i64) -> Money {
        Money(p.checked_mul(1000).expect("money overflow"))
    }

    pub fn millipence(self) -> i64 {
        self.0
    }

    /// Per-kWh rate times a quantity.
    pub fn times_kwh(self, q: EnergyQty) -> Money {
        let kwh = i64::try_from(q.0).expect("energy quantity exceeds i64");
        Money(self.0.checked_mul(kwh).expect("money overflow"))
    }

    pub fn times(self, k: i64) -> Money {
        Money(self.0.checked_mul(k).expect("money overflow"))
    }

    /// Scales by a real factor, rounding half away from zero.
    pub fn scale(self, factor: f64) -> Money {
        Money::from_f64(self.0 as f64 * factor)
    }

    /// Rounds a real milli-pence amount half away from zero.
    pub fn from_f64(millipence: f64) -> Money {
        assert!(millipence.is_finite(), "non-finite money amount");
        Money(millipence.round() as i64)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn max(self, other: Money) -> Money {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0.checked_add(rhs.0).expect("money overflow"))
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        *self = *self + rhs;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0.checked_sub(rhs.0).expect("money overflow"))
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        *self = *self - rhs;
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(self.0.checked_neg().expect("money overflow"))
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        write!(f, "{sign}{}.{:03}", abs / 1000, abs % 1000)
    }
}

impl FromStr for Money {
    type Err = ModelError;

    /// Parses decimal pence with at most three fraction digits, exactly.
    fn from_str(s: &str) -> Result<Money, ModelError> {
        let bad = || ModelError::BadMoney(s.to_string());
        let t = s.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if frac_part.len() > 3
            || !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let whole: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        let mut frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        for _ in frac_part.len()..3 {
            frac *= 10;
        }
        let v = whole
            .checked_mul(1000)
            .and_then(|w| w.checked_add(frac))
            .ok_or_else(bad)?;
        Ok(Money(if neg { -v } else { v }))
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Money, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = Money;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("decimal pence as a string or number with at most 3 fraction digits")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Money, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Money, E> {
                v.checked_mul(1000).map(Money).ok_or_else(|| E::custom("money overflow"))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Money, E> {
                i64::try_from(v)
                    .ok()
                    .and_then(|v| v.checked_mul(1000))
                    .map(Money)
                    .ok_or_else(|| E::custom("money overflow"))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Money, E> {
                let milli = v * 1000.0;
                if !milli.is_finite() || (milli - milli.round()).abs() > 1e-6 {
                    return Err(E::custom(format!("{v} has more than 3 fraction digits")));
                }
                Ok(Money(milli.round() as i64))
            }
        }
        d.deserialize_any(V)
    }
}

macro_rules! id_type {
    ($(#[$m:meta])* $name:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(FleetId);
id_type!(BundleId);
id_type!(ContractId);
id_type!(EvId);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_pence_exactly() {
        assert_eq!("-1.250".parse::<Money>().unwrap(), Money(-1250));
        assert_eq!("8".parse::<Money>().unwrap(), Money(8000));
        assert_eq!("0.5".parse::<Money>().unwrap(), Money(500));
        assert_eq!(".25".parse::<Money>().unwrap(), Money(250));
        assert!("1.2345".parse::<Money>().is_err());
        assert!("1e3".parse::<Money>().is_err());
        assert!("".parse::<Money>().is_err());
        assert!("-".parse::<Money>().is_err());
    }

    #[test]
    fn renders_three_fraction_digits() {
        assert_eq!(Money(-1250).to_string(), "-1.250");
        assert_eq!(Money(5).to_string(), "0.005");
        assert_eq!(Money(-5).to_string(), "-0.005");
        assert_eq!(Money(80_000).to_string(), "80.000");
    }

    #[test]
    fn money_accepts_numbers_in_documents() {
        let m: Money = serde_json::from_str("8.125").unwrap();
        assert_eq!(m, Money(8125));
        let m: Money = serde_json::from_str("-3").unwrap();
        assert_eq!(m, Money(-3000));
        assert!(serde_json::from_str::<Money>("0.0001").is_err());
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn energy_overflow_is_loud() {
        let _ = EnergyQty(u64::MAX) + EnergyQty(1);
    }

    proptest::proptest! {
        #[test]
        fn money_text_round_trip(v in proptest::num::i64::ANY) {
            let m = Money(v / 2);
            proptest::prop_assert_eq!(m.to_string().parse::<Money>().unwrap(), m);
        }
    }
}
