use std::fmt::Write;

use crate::sim::Settlement;

use super::IoError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Human,
    Machine,
}

/// Machine form: pretty JSON, two-space indent, field order as declared, trailing newline.
pub fn emit_report(s: &Settlement, format: Format) -> Vec<u8> {
    match format {
        Format::Machine => {
            let mut out = serde_json::to_vec_pretty(s).expect("settlement serializes");
            out.push(b'\n');
            out
        }
        Format::Human => human(s).into_bytes(),
    }
}

pub fn parse_record(bytes: &[u8]) -> Result<Settlement, IoError> {
    Ok(serde_json::from_slice(bytes)?)
}

fn human(s: &Settlement) -> String {
    let k = &s.kpis;
    let mut out = String::new();
    let ids = |v: &[crate::model::ContractId]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "seed            {}", s.seed);
    let _ = writeln!(out, "accepted        {}", ids(&s.allocation.accepted));
    let _ = writeln!(out, "honored         {}", ids(&s.honored));
    let _ = writeln!(out, "defaulted       {}", ids(&s.defaulted));
    out.push('\n');
    let _ = writeln!(out, "{:<8} {:>12} {:>12} {:>12}", "fleet", "payment", "fine", "utility");
    for p in &s.payments {
        let fine = s.fines.iter().find(|f| f.fleet == p.fleet).map(|f| f.amount).unwrap_or_default();
        let util = s.fleet_utilities.iter().find(|f| f.fleet == p.fleet).map(|f| f.amount).unwrap_or_default();
        let _ = writeln!(out, "{:<8} {:>12} {:>12} {:>12}", p.fleet.to_string(), p.amount.to_string(), fine.to_string(), util.to_string());
    }
    out.push('\n');
    let money = [
        ("social savings", k.social_savings),
        ("payments", k.total_payments),
        ("fines", k.fines_collected),
        ("served value", k.served_value),
        ("balancing cost", k.balancing_cost),
        ("FR payments", k.fr_payments),
        ("platform utility", k.platform_utility),
    ];
    for (name, v) in money {
        let _ = writeln!(out, "{name:<18} {:>14} p", v.to_string());
    }
    let energy = [
        ("contracted", k.contracted_kwh),
        ("delivered", k.delivered_kwh),
        ("unmet demand", k.unmet_demand_kwh),
        ("FR export", k.fr_export_kwh),
        ("FR import", k.fr_import_kwh),
        ("balancing", k.balancing_kwh),
        ("curtailed", k.curtailed_kwh),
        ("grid", k.grid_kwh),
    ];
    for (name, v) in energy {
        let _ = writeln!(out, "{name:<18} {v:>14} kWh");
    }
    let _ = writeln!(out, "{:<18} {:>14.1} g", "carbon", k.carbon_g);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_scenario, GeneratorParams, RunOptions, Scenario};

    #[test]
    fn empty_settlement_record_has_zeroed_kpis() {
        let bytes = emit_report(&Settlement::empty(48), Format::Machine);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.ends_with("}\n"));
        assert!(text.contains("\"platform_utility\": \"0.000\""));
        assert!(text.contains("\"carbon_g\": 0.0"));
        assert_eq!(parse_record(&bytes).unwrap(), Settlement::empty(48));
    }

    #[test]
    fn record_round_trips() {
        let s = Scenario::generate(&GeneratorParams::default(), 3);
        let settlement = run_scenario(&s, &RunOptions::default()).unwrap();
        let bytes = emit_report(&settlement, Format::Machine);
        assert_eq!(parse_record(&bytes).unwrap(), settlement);
        assert!(!emit_report(&settlement, Format::Human).is_empty());
    }
}
