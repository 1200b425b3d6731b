use std::collections::BTreeMap;
use std::path::Path;

use crate::model::{Market, Money, PriceVector};

use super::IoError;

/// One complete price vector per market present in the file.
pub type PriceSet = BTreeMap<Market, PriceVector>;

/// Parses `hhp,price,market` rows. A leading header row starting with `hhp` is skipped.
/// Every market that appears must cover hhps `0..hhp_count` exactly once.
pub fn parse_prices(text: &str, hhp_count: usize) -> Result<PriceSet, IoError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut cells: BTreeMap<Market, Vec<Option<Money>>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| IoError::Row {
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && rec.get(0).is_some_and(|f| f.eq_ignore_ascii_case("hhp")) {
            continue;
        }
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let bad = |msg: String| IoError::Row { line, msg };
        if rec.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", rec.len())));
        }
        let hhp: usize = rec[0].parse().map_err(|_| bad(format!("bad hhp {:?}", &rec[0])))?;
        if hhp >= hhp_count {
            return Err(bad(format!("hhp {hhp} outside 0..{hhp_count}")));
        }
        let price: Money = rec[1].parse().map_err(|e| bad(format!("{e}")))?;
        let market: Market = rec[2].parse().map_err(|e| bad(format!("{e}")))?;
        let slot = &mut cells.entry(market).or_insert_with(|| vec![None; hhp_count])[hhp];
        if slot.is_some() {
            return Err(IoError::DuplicateRow { line, hhp, market: market.to_string() });
        }
        *slot = Some(price);
    }
    cells
        .into_iter()
        .map(|(market, v)| {
            let per_hhp = v
                .into_iter()
                .enumerate()
                .map(|(hhp, p)| p.ok_or(IoError::MissingHhp { market: market.to_string(), hhp }))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((market, PriceVector::new(market, per_hhp)))
        })
        .collect()
}

pub fn load_prices(path: &Path, hhp_count: usize) -> Result<PriceSet, IoError> {
    parse_prices(&super::read_file(path)?, hhp_count)
}
