//! Scenario configuration: horizon, scenario, technical and cost parameters.
//!
//! Every parameter except the horizon, scenario, charging power and battery
//! price reduction has a default taken from the reference case data tables, so a
//! minimal `scenario.json` only names the four experiment coordinates.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::BusKind;
use crate::costs::{check_anchors, CostError};
use crate::emissions::EmissionStandard;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {reason}")]
    InvalidValue { field: &'static str, reason: String },
    #[error("`{field}`: {source}")]
    Anchors {
        field: &'static str,
        source: CostError,
    },
    #[error("unknown scenario `{0}` (expected all, ic, nc or oc)")]
    UnknownScenario(String),
}

/// Which bus kinds may be purchased.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    All,
    Ic,
    Nc,
    Oc,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::All, Scenario::Ic, Scenario::Nc, Scenario::Oc];

    pub fn allows(self, kind: BusKind) -> bool {
        matches!(
            (self, kind),
            (_, BusKind::Iceb)
                | (Scenario::All, _)
                | (Scenario::Nc, BusKind::Ncb)
                | (Scenario::Oc, BusKind::Ocb)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::All => "all",
            Scenario::Ic => "ic",
            Scenario::Nc => "nc",
            Scenario::Oc => "oc",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Scenario::All),
            "ic" => Ok(Scenario::Ic),
            "nc" => Ok(Scenario::Nc),
            "oc" => Ok(Scenario::Oc),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }
}

/// Optional coupling between depot chargers and battery buses.
///
/// `None` keeps the depot charger count free of any fleet link; `PerBeb`
/// appends `a_t >= sum of BEB stock` rows, which is an extension of the base
/// model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepotCouplingMode {
    #[default]
    None,
    PerBeb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IcebParams {
    pub purchase_cost: f64,
    pub maintenance_cost_per_km: f64,
    pub fuel_price_per_l: f64,
    pub consumption_l_per_km: f64,
}

impl Default for IcebParams {
    fn default() -> Self {
        Self {
            purchase_cost: 330_000.0,
            maintenance_cost_per_km: 0.5,
            fuel_price_per_l: 0.97,
            consumption_l_per_km: 0.61,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BebParams {
    /// Vehicle price without battery.
    pub purchase_cost: f64,
    pub maintenance_cost_per_km: f64,
    pub electricity_price_per_kwh: f64,
    pub consumption_kwh_per_km: f64,
    pub battery_capacities_kwh: Vec<f64>,
}

impl Default for BebParams {
    fn default() -> Self {
        Self {
            purchase_cost: 350_000.0,
            maintenance_cost_per_km: 0.44,
            electricity_price_per_kwh: 0.13,
            consumption_kwh_per_km: 2.06,
            battery_capacities_kwh: vec![100.0, 200.0, 300.0, 400.0],
        }
    }
}

/// One cohort of the initial (pre-horizon) ICEB fleet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialCohort {
    pub emission_class: EmissionStandard,
    pub age_years: u32,
    pub count: u32,
}

fn default_discount_rate() -> f64 {
    0.05
}
fn default_operating_days() -> f64 {
    307.0
}
fn default_usable_soc() -> f64 {
    0.8
}
fn default_battery_lifetime() -> u32 {
    6
}
fn default_bus_lifetime() -> u32 {
    12
}
fn default_salvage_fraction() -> f64 {
    0.07
}
fn default_ocf_anchors() -> Vec<(f64, f64)> {
    vec![(50.0, 30_000.0), (150.0, 90_000.0), (350.0, 134_250.0)]
}
fn default_battery_anchors() -> Vec<(f64, f64)> {
    vec![(50.0, 487.5), (350.0, 780.0)]
}
fn default_ncf_cost() -> f64 {
    5_000.0
}
fn default_ncf_power() -> f64 {
    50.0
}
fn default_facility_maintenance() -> f64 {
    0.01
}
fn default_empty_fraction() -> f64 {
    0.75
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// Number of decision periods `n`.
    pub horizon_years: u32,
    pub scenario: Scenario,
    /// Power of opportunity charging facilities `r`, kW.
    pub charging_power_kw: f64,
    /// Annual relative battery price reduction `b` (fraction, not percent).
    pub battery_price_reduction_per_year: f64,
    #[serde(default = "default_discount_rate")]
    pub discount_rate: f64,
    /// Workday-equivalent operating days per year.
    #[serde(default = "default_operating_days")]
    pub annual_operating_days: f64,
    #[serde(default = "default_usable_soc")]
    pub usable_soc_fraction: f64,
    #[serde(default = "default_battery_lifetime")]
    pub battery_lifetime_years: u32,
    #[serde(default = "default_bus_lifetime")]
    pub bus_lifetime_years: u32,
    /// Bus salvage value as a fraction of the ICEB purchase cost.
    #[serde(default = "default_salvage_fraction")]
    pub salvage_fraction: f64,
    #[serde(default = "default_ocf_anchors")]
    pub ocf_cost_anchor_points: Vec<(f64, f64)>,
    /// Initial battery price per kWh as a function of charging power.
    #[serde(default = "default_battery_anchors")]
    pub battery_cost_anchor_points: Vec<(f64, f64)>,
    #[serde(default = "default_ncf_cost")]
    pub ncf_cost: f64,
    #[serde(default = "default_ncf_power")]
    pub ncf_power_kw: f64,
    /// Annual maintenance of any charging facility as a fraction of its cost.
    #[serde(default = "default_facility_maintenance")]
    pub facility_maintenance_fraction: f64,
    /// Empty-bus consumption as a fraction of loaded consumption.
    #[serde(default = "default_empty_fraction")]
    pub empty_consumption_fraction: f64,
    #[serde(default)]
    pub iceb: IcebParams,
    #[serde(default)]
    pub beb: BebParams,
    /// Filled from `fleet.csv` when loading a data directory.
    #[serde(default, skip_serializing)]
    pub initial_fleet: Vec<InitialCohort>,
    #[serde(default)]
    pub depot_coupling_mode: DepotCouplingMode,
    #[serde(flatten, skip_serializing)]
    pub unknown_fields: BTreeMap<String, serde_json::Value>,
}

impl ScenarioConfig {
    /// Reference-case parameters with the given experiment coordinates.
    pub fn reference(horizon_years: u32, scenario: Scenario, power_kw: f64, reduction: f64) -> Self {
        Self {
            horizon_years,
            scenario,
            charging_power_kw: power_kw,
            battery_price_reduction_per_year: reduction,
            discount_rate: default_discount_rate(),
            annual_operating_days: default_operating_days(),
            usable_soc_fraction: default_usable_soc(),
            battery_lifetime_years: default_battery_lifetime(),
            bus_lifetime_years: default_bus_lifetime(),
            salvage_fraction: default_salvage_fraction(),
            ocf_cost_anchor_points: default_ocf_anchors(),
            battery_cost_anchor_points: default_battery_anchors(),
            ncf_cost: default_ncf_cost(),
            ncf_power_kw: default_ncf_power(),
            facility_maintenance_fraction: default_facility_maintenance(),
            empty_consumption_fraction: default_empty_fraction(),
            iceb: IcebParams::default(),
            beb: BebParams::default(),
            initial_fleet: Vec::new(),
            depot_coupling_mode: DepotCouplingMode::None,
            unknown_fields: BTreeMap::new(),
        }
    }

    /// Absolute salvage value `v^b`, shared by every bus type.
    pub fn salvage_value(&self) -> f64 {
        self.salvage_fraction * self.iceb.purchase_cost
    }

    pub fn ocf_cost(&self) -> Result<f64, CostError> {
        crate::costs::interpolate_cost(&self.ocf_cost_anchor_points, self.charging_power_kw)
    }

    pub fn ocf_maintenance(&self) -> Result<f64, CostError> {
        Ok(self.ocf_cost()? * self.facility_maintenance_fraction)
    }

    pub fn ncf_maintenance(&self) -> f64 {
        self.ncf_cost * self.facility_maintenance_fraction
    }

    pub fn initial_fleet_size(&self) -> u32 {
        self.initial_fleet.iter().map(|c| c.count).sum()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn bad(field: &'static str, reason: impl Into<String>) -> ConfigError {
            ConfigError::InvalidValue {
                field,
                reason: reason.into(),
            }
        }
        let mu = self.usable_soc_fraction;
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(bad("usable_soc_fraction", format!("{mu} not in (0, 1]")));
        }
        if !(self.discount_rate >= 0.0) {
            return Err(bad("discount_rate", "must be >= 0"));
        }
        let b = self.battery_price_reduction_per_year;
        if !(0.0..1.0).contains(&b) {
            return Err(bad(
                "battery_price_reduction_per_year",
                format!("{b} not in [0, 1)"),
            ));
        }
        if !(self.annual_operating_days > 0.0) {
            return Err(bad("annual_operating_days", "must be > 0"));
        }
        if !(self.charging_power_kw > 0.0) {
            return Err(bad("charging_power_kw", "must be > 0"));
        }
        if self.bus_lifetime_years == 0 {
            return Err(bad("bus_lifetime_years", "must be >= 1"));
        }
        if self.battery_lifetime_years == 0 {
            return Err(bad("battery_lifetime_years", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.salvage_fraction) {
            return Err(bad("salvage_fraction", "must be in [0, 1)"));
        }
        if !(self.empty_consumption_fraction >= 0.0) {
            return Err(bad("empty_consumption_fraction", "must be >= 0"));
        }
        if !(self.facility_maintenance_fraction >= 0.0) {
            return Err(bad("facility_maintenance_fraction", "must be >= 0"));
        }
        for (name, v) in [
            ("ncf_cost", self.ncf_cost),
            ("ncf_power_kw", self.ncf_power_kw),
            ("iceb.purchase_cost", self.iceb.purchase_cost),
            ("iceb.maintenance_cost_per_km", self.iceb.maintenance_cost_per_km),
            ("iceb.fuel_price_per_l", self.iceb.fuel_price_per_l),
            ("iceb.consumption_l_per_km", self.iceb.consumption_l_per_km),
            ("beb.purchase_cost", self.beb.purchase_cost),
            ("beb.maintenance_cost_per_km", self.beb.maintenance_cost_per_km),
            ("beb.electricity_price_per_kwh", self.beb.electricity_price_per_kwh),
            ("beb.consumption_kwh_per_km", self.beb.consumption_kwh_per_km),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(name, format!("{v} must be finite and >= 0")));
            }
        }
        if self
            .beb
            .battery_capacities_kwh
            .iter()
            .any(|q| !(*q > 0.0 && q.is_finite()))
        {
            return Err(bad("beb.battery_capacities_kwh", "capacities must be > 0"));
        }
        check_anchors(&self.ocf_cost_anchor_points).map_err(|source| ConfigError::Anchors {
            field: "ocf_cost_anchor_points",
            source,
        })?;
        check_anchors(&self.battery_cost_anchor_points).map_err(|source| {
            ConfigError::Anchors {
                field: "battery_cost_anchor_points",
                source,
            }
        })?;
        for cohort in &self.initial_fleet {
            if cohort.age_years == 0 || cohort.age_years > self.bus_lifetime_years {
                return Err(bad(
                    "initial_fleet",
                    format!(
                        "age {} outside 1..={}",
                        cohort.age_years, self.bus_lifetime_years
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_json_takes_reference_defaults() {
        let cfg: ScenarioConfig = serde_json::from_str(
            r#"{"horizon_years": 3, "scenario": "all", "charging_power_kw": 350,
                "battery_price_reduction_per_year": 0.025}"#,
        )
        .unwrap();
        assert_eq!(cfg, ScenarioConfig::reference(3, Scenario::All, 350.0, 0.025));
        assert!((cfg.salvage_value() - 23_100.0).abs() < 1e-9);
        assert_eq!(cfg.ocf_cost().unwrap(), 134_250.0);
    }

    #[test]
    fn missing_required_field_is_an_error() {
        let r: Result<ScenarioConfig, _> =
            serde_json::from_str(r#"{"horizon_years": 3, "scenario": "all"}"#);
        assert!(r.is_err());
    }

    #[test]
    fn unknown_fields_are_collected() {
        let cfg: ScenarioConfig = serde_json::from_str(
            r#"{"horizon_years": 1, "scenario": "ic", "charging_power_kw": 50,
                "battery_price_reduction_per_year": 0, "colour": "red"}"#,
        )
        .unwrap();
        assert!(cfg.unknown_fields.contains_key("colour"));
    }

    #[test]
    fn scenario_filter_matches_design_table() {
        use BusKind::*;
        let table = [
            (Scenario::All, [true, true, true]),
            (Scenario::Ic, [true, false, false]),
            (Scenario::Nc, [true, true, false]),
            (Scenario::Oc, [true, false, true]),
        ];
        for (s, expect) in table {
            assert_eq!([s.allows(Iceb), s.allows(Ncb), s.allows(Ocb)], expect, "{s}");
        }
    }

    #[test]
    fn validation_rejects_out_of_range() {
        let mut cfg = ScenarioConfig::reference(2, Scenario::All, 150.0, 0.0);
        cfg.usable_soc_fraction = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::reference(2, Scenario::All, 150.0, 0.0);
        cfg.battery_price_reduction_per_year = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ScenarioConfig::reference(2, Scenario::All, 150.0, 0.0);
        cfg.ocf_cost_anchor_points = vec![(150.0, 1.0), (50.0, 2.0)];
        assert!(cfg.validate().is_err());
        assert!(ScenarioConfig::reference(2, Scenario::All, 150.0, 0.0)
            .validate()
            .is_ok());
    }
}
