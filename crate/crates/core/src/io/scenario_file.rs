use std::path::Path;

use crate::sim::{Scenario, SCHEMA_VERSION};

use super::IoError;

/// Parses a scenario and checks its schema version. Unknown fields are rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario, IoError> {
    let s: Scenario = toml::from_str(text).map_err(|e| IoError::Toml(e.to_string()))?;
    if s.schema_version != SCHEMA_VERSION {
        return Err(IoError::Toml(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            s.schema_version
        )));
    }
    Ok(s)
}

pub fn load_scenario(path: &Path) -> Result<Scenario, IoError> {
    parse_scenario(&super::read_file(path)?)
}

pub fn scenario_to_toml(s: &Scenario) -> Result<String, IoError> {
    toml::to_string(s).map_err(|e| IoError::Toml(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::GeneratorParams;

    #[test]
    fn round_trip() {
        for seed in 0..5 {
            let s = Scenario::generate(&GeneratorParams::default(), seed);
            let text = scenario_to_toml(&s).unwrap();
            assert_eq!(parse_scenario(&text).unwrap(), s);
        }
    }

    #[test]
    fn unknown_field_and_schema_are_rejected() {
        let s = Scenario::generate(&GeneratorParams::default(), 0);
        let text = scenario_to_toml(&s).unwrap();
        let extra = format!("colour = \"red\"\n{text}");
        assert!(parse_scenario(&extra).unwrap_err().to_string().contains("colour"));
        let old = text.replacen("schema_version = 1", "schema_version = 9", 1);
        assert!(parse_scenario(&old).unwrap_err().to_string().contains("schema_version 9"));
    }
}
