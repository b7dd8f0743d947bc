//! Cost primitives shared by the model builder and the plan pricer.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("power {power} kW is outside the anchor range [{min}, {max}] kW")]
    PowerOutOfRange { power: f64, min: f64, max: f64 },
    #[error("cost anchor list is empty")]
    NoAnchors,
    #[error("cost anchors must be strictly increasing in power (at index {0})")]
    UnsortedAnchors(usize),
}

/// Piecewise-linear interpolation over `(power_kw, cost)` anchors.
///
/// Exact at every anchor. Powers outside the anchor range are rejected rather
/// than extrapolated.
pub fn interpolate_cost(anchors: &[(f64, f64)], power_kw: f64) -> Result<f64, CostError> {
    check_anchors(anchors)?;
    let (min, max) = (anchors[0].0, anchors[anchors.len() - 1].0);
    if !(power_kw >= min && power_kw <= max) {
        return Err(CostError::PowerOutOfRange {
            power: power_kw,
            min,
            max,
        });
    }
    if let Some(&(_, cost)) = anchors.iter().find(|(p, _)| *p == power_kw) {
        return Ok(cost);
    }
    let upper = anchors
        .iter()
        .position(|(p, _)| *p > power_kw)
        .expect("power is below the last anchor");
    let (p0, c0) = anchors[upper - 1];
    let (p1, c1) = anchors[upper];
    Ok(c0 + (power_kw - p0) / (p1 - p0) * (c1 - c0))
}

pub fn check_anchors(anchors: &[(f64, f64)]) -> Result<(), CostError> {
    if anchors.is_empty() {
        return Err(CostError::NoAnchors);
    }
    for (i, pair) in anchors.windows(2).enumerate() {
        if !(pair[1].0 > pair[0].0) {
            return Err(CostError::UnsortedAnchors(i + 1));
        }
    }
    Ok(())
}

/// Battery price per kWh in period `t` under a constant annual relative reduction.
pub fn decayed_battery_price(initial_per_kwh: f64, annual_reduction: f64, t: u32) -> f64 {
    initial_per_kwh * (1.0 - annual_reduction).powi(t as i32)
}

/// Present-value factor `1 / (1 + rate)^t`.
pub fn discount_factor(rate: f64, t: i64) -> f64 {
    (1.0 + rate).powi(-(t as i32))
}

/// Value of an asset after `age` years of linear depreciation from `purchase`
/// down to `salvage` over `lifetime` years.
pub fn depreciated_value(purchase: f64, salvage: f64, age: f64, lifetime: f64) -> f64 {
    (purchase - salvage) * (1.0 - age / lifetime) + salvage
}
