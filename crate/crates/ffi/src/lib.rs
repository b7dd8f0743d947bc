//! C ABI over the fleetplan library.
//!
//! Objects cross the boundary as opaque handles created by `fp_*_load`,
//! `fp_*_build` or `fp_solve` and released with the matching `fp_*_free`.
//! Every fallible function returns an [`FpStatus`]; the message of the last
//! failure on the calling thread is available from [`fp_last_error`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use fleetplan::config::Scenario;
use fleetplan::costs::interpolate_cost;
use fleetplan::emissions::{convert_threshold, Pairing};
use fleetplan::energy::{min_battery_capacity, SequenceProfile};
use fleetplan::milp::MipLimits;
use fleetplan::model::mps::write_mps;
use fleetplan::model::{build_mip, PlanReport};
use fleetplan::network::{load_network, Dataset};
use fleetplan::scheduler::{build_schedule, VehicleSchedule};
use fleetplan::sweep::solve_model;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Model = 4,
    Solve = 5,
    Panic = 6,
}

/// Network data and scenario configuration.
pub struct FpDataset {
    data: Dataset,
}

/// Vehicle schedule built for a dataset.
pub struct FpSchedule {
    schedule: VehicleSchedule,
}

/// Solved transformation plan.
pub struct FpPlan {
    report: PlanReport,
    gap: f64,
    at_gap: bool,
}

/// Solver limits; non-positive values select the defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FpSolveOptions {
    /// Wall clock limit in seconds.
    pub time_limit_s: f64,
    /// Relative optimality gap.
    pub gap: f64,
    /// Worker threads.
    pub threads: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Display) {
    let text = message.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

struct Failure(FpStatus, String);

impl Failure {
    fn new(status: FpStatus, message: impl Display) -> Self {
        Self(status, message.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> FpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FpStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside fleetplan");
            FpStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref()
        .ok_or_else(|| Failure::new(FpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ref<'a, T>(ptr: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    ptr.as_mut()
        .ok_or_else(|| Failure::new(FpStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::new(FpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| Failure::new(FpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn free<T>(ptr: *mut T) {
    if !ptr.is_null() {
        drop(Box::from_raw(ptr));
    }
}

fn write_file(path: &str, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::new(FpStatus::Io, format!("{path}: {e}")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
///
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn fp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads stations.csv, trips.csv, deadheads.csv, fleet.csv and scenario.json
/// from `dir`.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_load(dir: *const c_char, out: *mut *mut FpDataset) -> FpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let dir = PathBuf::from(text(dir, "dir")?);
        let data = load_network(&dir).map_err(|e| Failure::new(FpStatus::Io, e))?;
        *out = Box::into_raw(Box::new(FpDataset { data }));
        Ok(())
    })
}

/// Selects the scenario (`all`, `ic`, `nc` or `oc`), charging power in kW and
/// annual battery price reduction in percent used by later calls.
///
/// # Safety
/// `dataset` must come from [`fp_dataset_load`] and `scenario` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_set_cell(
    dataset: *mut FpDataset,
    scenario: *const c_char,
    power_kw: f64,
    reduction_pct: f64,
) -> FpStatus {
    guard(|| {
        let dataset = out_ref(dataset, "dataset")?;
        let scenario: Scenario = text(scenario, "scenario")?
            .parse()
            .map_err(|e| Failure::new(FpStatus::InvalidArgument, e))?;
        if !(power_kw > 0.0) || !(0.0..100.0).contains(&reduction_pct) {
            return Err(Failure::new(
                FpStatus::InvalidArgument,
                format!("invalid power {power_kw} kW or reduction {reduction_pct} %"),
            ));
        }
        let config = &mut dataset.data.config;
        config.scenario = scenario;
        config.charging_power_kw = power_kw;
        config.battery_price_reduction_per_year = reduction_pct / 100.0;
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or come from [`fp_dataset_load`], and is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_dataset_free(dataset: *mut FpDataset) {
    free(dataset);
}

/// Builds the minimum-fleet vehicle schedule of a dataset.
///
/// # Safety
/// `dataset` must come from [`fp_dataset_load`] and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_schedule_build(
    dataset: *const FpDataset,
    out: *mut *mut FpSchedule,
) -> FpStatus {
    guard(|| {
        let dataset = deref(dataset, "dataset")?;
        let out = out_ref(out, "out")?;
        let schedule = build_schedule(&dataset.data.network);
        *out = Box::into_raw(Box::new(FpSchedule { schedule }));
        Ok(())
    })
}

/// Number of trip sequences, which is the fleet size of the schedule; 0 for null.
///
/// # Safety
/// `schedule` must be null or come from [`fp_schedule_build`].
#[no_mangle]
pub unsafe extern "C" fn fp_schedule_len(schedule: *const FpSchedule) -> usize {
    schedule.as_ref().map_or(0, |s| s.schedule.len())
}

/// # Safety
/// `schedule` must come from [`fp_schedule_build`] and `path` must be a
/// NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fp_schedule_write_json(
    schedule: *const FpSchedule,
    path: *const c_char,
) -> FpStatus {
    guard(|| {
        let schedule = deref(schedule, "schedule")?;
        write_file(text(path, "path")?, &schedule.schedule.to_json())
    })
}

/// # Safety
/// `schedule` must be null or come from [`fp_schedule_build`], and is invalid
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_schedule_free(schedule: *mut FpSchedule) {
    free(schedule);
}

/// Builds and solves the transformation model of the selected cell.
///
/// A plan is returned even when a limit stops the search before the
/// requested gap; check [`fp_plan_at_gap`].
///
/// # Safety
/// `dataset` and `schedule` must be live handles, `options` null or valid,
/// and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn fp_solve(
    dataset: *const FpDataset,
    schedule: *const FpSchedule,
    options: *const FpSolveOptions,
    out: *mut *mut FpPlan,
) -> FpStatus {
    guard(|| {
        let dataset = deref(dataset, "dataset")?;
        let schedule = deref(schedule, "schedule")?;
        let out = out_ref(out, "out")?;
        let mut limits = MipLimits::default();
        if let Some(o) = options.as_ref() {
            limits.time_limit_s = (o.time_limit_s > 0.0).then_some(o.time_limit_s);
            if o.gap > 0.0 {
                limits.gap = o.gap;
            }
            limits.threads = (o.threads > 0).then_some(o.threads as usize);
        }
        let data = &dataset.data;
        let model = build_mip(&data.network, &schedule.schedule, &data.config)
            .map_err(|e| Failure::new(FpStatus::Model, e))?;
        let solved = solve_model(&model, limits).map_err(|e| Failure::new(FpStatus::Solve, e))?;
        let report = PlanReport::new(&solved.plan, &model.problem, Pairing::default())
            .map_err(|e| Failure::new(FpStatus::Model, e))?;
        *out = Box::into_raw(Box::new(FpPlan {
            report,
            gap: solved.report.gap,
            at_gap: solved.report.at_gap(),
        }));
        Ok(())
    })
}

/// Total cost of ownership in EUR; NaN for null.
///
/// # Safety
/// `plan` must be null or come from [`fp_solve`].
#[no_mangle]
pub unsafe extern "C" fn fp_plan_tco(plan: *const FpPlan) -> f64 {
    plan.as_ref().map_or(f64::NAN, |p| p.report.tco)
}

/// Relative gap at which the search stopped; NaN for null.
///
/// # Safety
/// `plan` must be null or come from [`fp_solve`].
#[no_mangle]
pub unsafe extern "C" fn fp_plan_gap(plan: *const FpPlan) -> f64 {
    plan.as_ref().map_or(f64::NAN, |p| p.gap)
}

/// Whether the search reached the requested gap; false for null.
///
/// # Safety
/// `plan` must be null or come from [`fp_solve`].
#[no_mangle]
pub unsafe extern "C" fn fp_plan_at_gap(plan: *const FpPlan) -> bool {
    plan.as_ref().is_some_and(|p| p.at_gap)
}

/// Buses held in `period` (1-based), over all bus types.
///
/// # Safety
/// `plan` must come from [`fp_solve`] and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_plan_fleet_count(plan: *const FpPlan, period: u32, out: *mut u32) -> FpStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let out = out_ref(out, "out")?;
        let summary = plan
            .report
            .periods
            .iter()
            .find(|p| p.period == period)
            .ok_or_else(|| Failure::new(FpStatus::InvalidArgument, format!("no period {period}")))?;
        *out = summary.fleet.values().sum();
        Ok(())
    })
}

/// Writes the plan as JSON.
///
/// # Safety
/// `plan` must come from [`fp_solve`] and `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fp_plan_write_json(plan: *const FpPlan, path: *const c_char) -> FpStatus {
    guard(|| {
        let plan = deref(plan, "plan")?;
        let path = text(path, "path")?;
        let json = serde_json::to_string_pretty(&plan.report).map_err(|e| Failure::new(FpStatus::Io, e))?;
        write_file(path, &json)
    })
}

/// # Safety
/// `plan` must be null or come from [`fp_solve`], and is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn fp_plan_free(plan: *mut FpPlan) {
    free(plan);
}

/// Writes the transformation model of the selected cell in MPS format.
///
/// # Safety
/// `dataset` and `schedule` must be live handles and `path` a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn fp_export_mps(
    dataset: *const FpDataset,
    schedule: *const FpSchedule,
    path: *const c_char,
) -> FpStatus {
    guard(|| {
        let dataset = deref(dataset, "dataset")?;
        let schedule = deref(schedule, "schedule")?;
        let path = text(path, "path")?;
        let data = &dataset.data;
        let model = build_mip(&data.network, &schedule.schedule, &data.config)
            .map_err(|e| Failure::new(FpStatus::Model, e))?;
        write_file(path, &write_mps(&model.mip))
    })
}

/// Converts an engine-work NOx threshold in g/kWh to g/km.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_convert_threshold(g_per_kwh: f64, out: *mut f64) -> FpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = convert_threshold(g_per_kwh).map_err(|e| Failure::new(FpStatus::InvalidArgument, e))?;
        Ok(())
    })
}

/// Piecewise-linear cost at `power_kw` over `len` anchors sorted by power.
///
/// # Safety
/// `powers` and `costs` must point to `len` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_interpolate_cost(
    powers: *const f64,
    costs: *const f64,
    len: usize,
    power_kw: f64,
    out: *mut f64,
) -> FpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if len > 0 && (powers.is_null() || costs.is_null()) {
            return Err(Failure::new(FpStatus::NullPointer, "anchor arrays are null"));
        }
        let anchors: Vec<(f64, f64)> = (0..len).map(|i| (*powers.add(i), *costs.add(i))).collect();
        *out = interpolate_cost(&anchors, power_kw).map_err(|e| Failure::new(FpStatus::InvalidArgument, e))?;
        Ok(())
    })
}

/// Smallest gross battery capacity in kWh that operates sequence `sequence`
/// with charging at every candidate station at `power_kw`.
///
/// # Safety
/// `dataset` and `schedule` must be live handles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn fp_min_battery_capacity(
    dataset: *const FpDataset,
    schedule: *const FpSchedule,
    sequence: usize,
    power_kw: f64,
    out: *mut f64,
) -> FpStatus {
    guard(|| {
        let dataset = deref(dataset, "dataset")?;
        let schedule = deref(schedule, "schedule")?;
        let out = out_ref(out, "out")?;
        let trips = schedule.schedule.sequences.get(sequence).ok_or_else(|| {
            Failure::new(FpStatus::InvalidArgument, format!("no sequence {sequence}"))
        })?;
        if !(power_kw >= 0.0) {
            return Err(Failure::new(FpStatus::InvalidArgument, format!("invalid power {power_kw} kW")));
        }
        let profile = SequenceProfile::new(trips, &dataset.data.network);
        *out = min_battery_capacity(&profile, power_kw, &dataset.data.config);
        Ok(())
    })
}
