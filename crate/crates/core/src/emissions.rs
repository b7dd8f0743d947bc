//! NOx accounting for ICEB operation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Diesel consumption per kWh of engine work, l/kWh.
pub const SPECIFIC_FUEL_CONSUMPTION: f64 = 0.00059;
/// Diesel density, kg/m^3.
pub const DIESEL_DENSITY: f64 = 832.5;
/// Lower heating value of diesel, kWh/kg.
pub const DIESEL_HEATING_VALUE: f64 = 11.9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EmissionsError {
    #[error("emission threshold must be >= 0, got {0}")]
    NegativeThreshold(f64),
    #[error("unknown emission class `{0}`")]
    UnknownClass(String),
    #[error("period {period}: {required} ICEBs in use but only {available} in the inventory")]
    InventoryMismatch {
        period: u32,
        required: usize,
        available: usize,
    },
    #[error("period {0} is outside the planning horizon")]
    PeriodOutOfRange(u32),
}

/// Converts an engine-work threshold in g/kWh to a distance factor in g/km.
pub fn convert_threshold(threshold_g_per_kwh: f64) -> Result<f64, EmissionsError> {
    if !(threshold_g_per_kwh >= 0.0) {
        return Err(EmissionsError::NegativeThreshold(threshold_g_per_kwh));
    }
    Ok(threshold_g_per_kwh * SPECIFIC_FUEL_CONSUMPTION * DIESEL_DENSITY * DIESEL_HEATING_VALUE)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EmissionStandard {
    #[serde(rename = "EU-III")]
    EuIii,
    #[serde(rename = "EU-V/EEV", alias = "EU-V", alias = "EEV")]
    EuVEev,
    #[serde(rename = "EU-VI")]
    EuVi,
}

impl EmissionStandard {
    pub const ALL: [EmissionStandard; 3] = [Self::EuIii, Self::EuVEev, Self::EuVi];

    pub fn name(self) -> &'static str {
        match self {
            Self::EuIii => "EU-III",
            Self::EuVEev => "EU-V/EEV",
            Self::EuVi => "EU-VI",
        }
    }

    /// NOx limit in g/kWh.
    pub fn threshold_g_per_kwh(self) -> f64 {
        match self {
            Self::EuIii => 5.0,
            Self::EuVEev => 2.0,
            Self::EuVi => 0.4,
        }
    }

    pub fn factor_g_per_km(self) -> f64 {
        convert_threshold(self.threshold_g_per_kwh()).expect("built-in thresholds are positive")
    }

    pub fn class(self) -> EmissionClass {
        EmissionClass {
            name: self.name().to_string(),
            threshold_g_per_kwh: self.threshold_g_per_kwh(),
            derived_g_per_km: self.factor_g_per_km(),
        }
    }
}

impl fmt::Display for EmissionStandard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmissionStandard {
    type Err = EmissionsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EU-III" | "EURO-III" | "EURO III" => Ok(Self::EuIii),
            "EU-V/EEV" | "EU-V" | "EEV" | "EURO-V" => Ok(Self::EuVEev),
            "EU-VI" | "EURO-VI" | "EURO VI" => Ok(Self::EuVi),
            _ => Err(EmissionsError::UnknownClass(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionClass {
    pub name: String,
    pub threshold_g_per_kwh: f64,
    pub derived_g_per_km: f64,
}

/// How idle and busy ICEBs are matched to ICEB-operated sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Dirtiest buses run, and the dirtiest run the longest sequences.
    #[default]
    WorstCase,
    /// Cleanest buses run, and the cleanest run the longest sequences.
    BestCase,
}

/// Annual NOx in tonnes for ICEB-operated sequences with daily distances
/// `sequence_km`, served from `inventory` (class, count).
pub fn fleet_nox_tonnes(
    inventory: &[(EmissionStandard, usize)],
    sequence_km: &[f64],
    operating_days: f64,
    pairing: Pairing,
    period: u32,
) -> Result<f64, EmissionsError> {
    let available: usize = inventory.iter().map(|(_, c)| c).sum();
    if sequence_km.len() > available {
        return Err(EmissionsError::InventoryMismatch {
            period,
            required: sequence_km.len(),
            available,
        });
    }
    let mut buses: Vec<f64> = inventory
        .iter()
        .flat_map(|&(class, count)| std::iter::repeat_n(class.factor_g_per_km(), count))
        .collect();
    buses.sort_by(|a, b| b.total_cmp(a));
    if pairing == Pairing::BestCase {
        buses.reverse();
        buses.truncate(sequence_km.len());
        buses.reverse();
    }
    let mut km = sequence_km.to_vec();
    km.sort_by(|a, b| b.total_cmp(a));
    let grams: f64 = buses.iter().zip(&km).map(|(f, d)| f * d).sum();
    Ok(grams * operating_days / 1e6)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_examples() {
        assert!((convert_threshold(5.0).unwrap() - 29.22).abs() < 0.01);
        assert!((convert_threshold(2.0).unwrap() - 11.69).abs() < 0.01);
        assert!((convert_threshold(0.4).unwrap() - 2.338).abs() < 0.001);
        assert_eq!(convert_threshold(0.0).unwrap(), 0.0);
        assert!(matches!(
            convert_threshold(-1.0),
            Err(EmissionsError::NegativeThreshold(_))
        ));
    }

    #[test]
    fn standard_names_round_trip() {
        for s in EmissionStandard::ALL {
            assert_eq!(s.name().parse::<EmissionStandard>().unwrap(), s);
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<EmissionStandard>(&json).unwrap(), s);
        }
        assert_eq!("eev".parse::<EmissionStandard>().unwrap(), EmissionStandard::EuVEev);
        assert!("EU-IV".parse::<EmissionStandard>().is_err());
    }

    #[test]
    fn single_eu_vi_sequence() {
        let t = fleet_nox_tonnes(&[(EmissionStandard::EuVi, 1)], &[100.0], 307.0, Pairing::WorstCase, 1)
            .unwrap();
        let expected = 100.0 * convert_threshold(0.4).unwrap() * 307.0 / 1e6;
        assert!((t - expected).abs() < 1e-12);
        assert!((t - 0.0718).abs() < 1e-4);
    }

    #[test]
    fn pairing_independent_when_every_bus_runs() {
        let inv = [(EmissionStandard::EuIii, 1), (EmissionStandard::EuVi, 1)];
        let worst = fleet_nox_tonnes(&inv, &[100.0, 100.0], 307.0, Pairing::WorstCase, 1).unwrap();
        let best = fleet_nox_tonnes(&inv, &[100.0, 100.0], 307.0, Pairing::BestCase, 1).unwrap();
        assert!((worst - best).abs() < 1e-12);
        assert!((worst - 0.969).abs() < 1e-3);
    }

    #[test]
    fn pairing_bounds() {
        let inv = [(EmissionStandard::EuIii, 1), (EmissionStandard::EuVi, 2)];
        let km = [150.0, 50.0];
        let worst = fleet_nox_tonnes(&inv, &km, 300.0, Pairing::WorstCase, 1).unwrap();
        let best = fleet_nox_tonnes(&inv, &km, 300.0, Pairing::BestCase, 1).unwrap();
        assert!(best < worst);
        let f3 = EmissionStandard::EuIii.factor_g_per_km();
        let f6 = EmissionStandard::EuVi.factor_g_per_km();
        assert!((worst - (150.0 * f3 + 50.0 * f6) * 300.0 / 1e6).abs() < 1e-12);
        assert!((best - 200.0 * f6 * 300.0 / 1e6).abs() < 1e-12);
    }

    #[test]
    fn too_few_buses() {
        let r = fleet_nox_tonnes(&[(EmissionStandard::EuVi, 1)], &[1.0, 2.0], 1.0, Pairing::WorstCase, 3);
        assert!(matches!(
            r,
            Err(EmissionsError::InventoryMismatch { period: 3, required: 2, available: 1 })
        ));
    }
}
