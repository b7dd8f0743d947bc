//! Bus type catalog: ICEB holding-period classes and BEB types
//! (charging concept x battery capacity).

use serde::{Deserialize, Serialize};

use crate::config::{Scenario, ScenarioConfig};
use crate::costs::{decayed_battery_price, interpolate_cost, CostError};
use crate::emissions::EmissionStandard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum BusKind {
    /// Internal combustion engine bus.
    Iceb,
    /// Night (depot-only) charging battery bus.
    Ncb,
    /// Opportunity charging battery bus.
    Ocb,
}

impl BusKind {
    pub fn is_battery(self) -> bool {
        !matches!(self, BusKind::Iceb)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusType {
    pub id: String,
    pub kind: BusKind,
    /// Gross capacity `Q_k`; zero for ICEBs.
    pub battery_capacity_kwh: f64,
    pub holding_period_years: u32,
    pub purchase_cost: f64,
    /// Battery price per kWh in period 0.
    pub battery_cost_per_kwh_initial: f64,
    pub maintenance_cost_per_km: f64,
    /// EUR per litre (ICEB) or per kWh (BEB).
    pub energy_price_per_unit: f64,
    /// Litres or kWh per loaded km.
    pub consumption_loaded: f64,
    /// Litres or kWh per empty (deadhead) km.
    pub consumption_empty: f64,
    pub emission_class: Option<EmissionStandard>,
}

impl BusType {
    pub fn usable_capacity(&self, usable_fraction: f64) -> f64 {
        usable_fraction * self.battery_capacity_kwh
    }

    /// Energy (or fuel) for `service_km` loaded and `deadhead_km` empty kilometres.
    pub fn consumption(&self, service_km: f64, deadhead_km: f64) -> f64 {
        self.consumption_loaded * service_km + self.consumption_empty * deadhead_km
    }

    pub fn battery_price(&self, annual_reduction: f64, t: u32) -> f64 {
        decayed_battery_price(self.battery_cost_per_kwh_initial, annual_reduction, t)
    }
}

/// Battery price per kWh for `bus_type` in period `t`.
pub fn battery_price(config: &ScenarioConfig, bus_type: &BusType, t: u32) -> f64 {
    bus_type.battery_price(config.battery_price_reduction_per_year, t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusTypeCatalog {
    pub types: Vec<BusType>,
}

impl BusTypeCatalog {
    /// Every type the configuration describes: one ICEB class per holding period
    /// `1..=bus_lifetime`, then NCB and OCB types per battery capacity.
    pub fn from_config(config: &ScenarioConfig) -> Result<Self, CostError> {
        let lifetime = config.bus_lifetime_years;
        let empty = config.empty_consumption_fraction;
        let mut types = Vec::new();
        for h in 1..=lifetime {
            let p = &config.iceb;
            types.push(BusType {
                id: format!("ICEB-h{h}"),
                kind: BusKind::Iceb,
                battery_capacity_kwh: 0.0,
                holding_period_years: h,
                purchase_cost: p.purchase_cost,
                battery_cost_per_kwh_initial: 0.0,
                maintenance_cost_per_km: p.maintenance_cost_per_km,
                energy_price_per_unit: p.fuel_price_per_l,
                consumption_loaded: p.consumption_l_per_km,
                consumption_empty: empty * p.consumption_l_per_km,
                emission_class: Some(EmissionStandard::EuVi),
            });
        }
        let night_price = interpolate_cost(&config.battery_cost_anchor_points, config.ncf_power_kw)?;
        let opportunity_price =
            interpolate_cost(&config.battery_cost_anchor_points, config.charging_power_kw)?;
        for (kind, prefix, price) in [
            (BusKind::Ncb, "NCB", night_price),
            (BusKind::Ocb, "OCB", opportunity_price),
        ] {
            for &q in &config.beb.battery_capacities_kwh {
                let p = &config.beb;
                types.push(BusType {
                    id: format!("{prefix}-{q}"),
                    kind,
                    battery_capacity_kwh: q,
                    holding_period_years: lifetime,
                    purchase_cost: p.purchase_cost,
                    battery_cost_per_kwh_initial: price,
                    maintenance_cost_per_km: p.maintenance_cost_per_km,
                    energy_price_per_unit: p.electricity_price_per_kwh,
                    consumption_loaded: p.consumption_kwh_per_km,
                    consumption_empty: empty * p.consumption_kwh_per_km,
                    emission_class: None,
                });
            }
        }
        Ok(Self { types })
    }

    /// Types purchasable under the configured scenario, in catalog order.
    pub fn for_scenario(config: &ScenarioConfig) -> Result<Self, CostError> {
        Ok(Self::from_config(config)?.filtered(config.scenario))
    }

    pub fn filtered(&self, scenario: Scenario) -> Self {
        Self {
            types: self
                .types
                .iter()
                .filter(|t| scenario.allows(t.kind))
                .cloned()
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.types.iter().position(|t| t.id == id)
    }

    /// The ICEB class that keeps buses for the full lifetime; the initial fleet
    /// belongs to it.
    pub fn full_life_iceb(&self, lifetime: u32) -> Option<usize> {
        self.types
            .iter()
            .position(|t| t.kind == BusKind::Iceb && t.holding_period_years == lifetime)
    }

    pub fn max_battery_capacity(&self) -> f64 {
        self.types
            .iter()
            .map(|t| t.battery_capacity_kwh)
            .fold(0.0, f64::max)
    }
}
