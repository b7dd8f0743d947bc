#ifndef FLEETPLAN_H
#define FLEETPLAN_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FpStatus {
  FP_STATUS_OK = 0,
  FP_STATUS_NULL_POINTER = 1,
  FP_STATUS_INVALID_ARGUMENT = 2,
  FP_STATUS_IO = 3,
  FP_STATUS_MODEL = 4,
  FP_STATUS_SOLVE = 5,
  FP_STATUS_PANIC = 6,
} FpStatus;

// Network data and scenario configuration.
typedef struct FpDataset FpDataset;

// Solved transformation plan.
typedef struct FpPlan FpPlan;

// Vehicle schedule built for a dataset.
typedef struct FpSchedule FpSchedule;

// Solver limits; non-positive values select the defaults.
typedef struct FpSolveOptions {
  // Wall clock limit in seconds.
  double time_limit_s;
  // Relative optimality gap.
  double gap;
  // Worker threads.
  uint32_t threads;
} FpSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *fp_version(void);

// Message of the last failed call on this thread, or an empty string.
//
// The pointer stays valid until the next call into the library on this thread.
const char *fp_last_error(void);

// Loads stations.csv, trips.csv, deadheads.csv, fleet.csv and scenario.json
// from `dir`.
//
// # Safety
// `dir` must be a NUL-terminated string and `out` a valid pointer.
enum FpStatus fp_dataset_load(const char *dir, struct FpDataset **out);

// Selects the scenario (`all`, `ic`, `nc` or `oc`), charging power in kW and
// annual battery price reduction in percent used by later calls.
//
// # Safety
// `dataset` must come from [`fp_dataset_load`] and `scenario` must be a
// NUL-terminated string.
enum FpStatus fp_dataset_set_cell(struct FpDataset *dataset,
                                  const char *scenario,
                                  double power_kw,
                                  double reduction_pct);

// # Safety
// `dataset` must be null or come from [`fp_dataset_load`], and is invalid
// afterwards.
void fp_dataset_free(struct FpDataset *dataset);

// Builds the minimum-fleet vehicle schedule of a dataset.
//
// # Safety
// `dataset` must come from [`fp_dataset_load`] and `out` must be valid.
enum FpStatus fp_schedule_build(const struct FpDataset *dataset, struct FpSchedule **out);

// Number of trip sequences, which is the fleet size of the schedule; 0 for null.
//
// # Safety
// `schedule` must be null or come from [`fp_schedule_build`].
uintptr_t fp_schedule_len(const struct FpSchedule *schedule);

// # Safety
// `schedule` must come from [`fp_schedule_build`] and `path` must be a
// NUL-terminated string.
enum FpStatus fp_schedule_write_json(const struct FpSchedule *schedule, const char *path);

// # Safety
// `schedule` must be null or come from [`fp_schedule_build`], and is invalid
// afterwards.
void fp_schedule_free(struct FpSchedule *schedule);

// Builds and solves the transformation model of the selected cell.
//
// A plan is returned even when a limit stops the search before the
// requested gap; check [`fp_plan_at_gap`].
//
// # Safety
// `dataset` and `schedule` must be live handles, `options` null or valid,
// and `out` valid.
enum FpStatus fp_solve(const struct FpDataset *dataset,
                       const struct FpSchedule *schedule,
                       const struct FpSolveOptions *options,
                       struct FpPlan **out);

// Total cost of ownership in EUR; NaN for null.
//
// # Safety
// `plan` must be null or come from [`fp_solve`].
double fp_plan_tco(const struct FpPlan *plan);

// Relative gap at which the search stopped; NaN for null.
//
// # Safety
// `plan` must be null or come from [`fp_solve`].
double fp_plan_gap(const struct FpPlan *plan);

// Whether the search reached the requested gap; false for null.
//
// # Safety
// `plan` must be null or come from [`fp_solve`].
bool fp_plan_at_gap(const struct FpPlan *plan);

// Buses held in `period` (1-based), over all bus types.
//
// # Safety
// `plan` must come from [`fp_solve`] and `out` must be valid.
enum FpStatus fp_plan_fleet_count(const struct FpPlan *plan, uint32_t period, uint32_t *out);

// Writes the plan as JSON.
//
// # Safety
// `plan` must come from [`fp_solve`] and `path` must be a NUL-terminated string.
enum FpStatus fp_plan_write_json(const struct FpPlan *plan, const char *path);

// # Safety
// `plan` must be null or come from [`fp_solve`], and is invalid afterwards.
void fp_plan_free(struct FpPlan *plan);

// Writes the transformation model of the selected cell in MPS format.
//
// # Safety
// `dataset` and `schedule` must be live handles and `path` a NUL-terminated
// string.
enum FpStatus fp_export_mps(const struct FpDataset *dataset,
                            const struct FpSchedule *schedule,
                            const char *path);

// Converts an engine-work NOx threshold in g/kWh to g/km.
//
// # Safety
// `out` must be valid.
enum FpStatus fp_convert_threshold(double g_per_kwh, double *out);

// Piecewise-linear cost at `power_kw` over `len` anchors sorted by power.
//
// # Safety
// `powers` and `costs` must point to `len` values and `out` must be valid.
enum FpStatus fp_interpolate_cost(const double *powers,
                                  const double *costs,
                                  uintptr_t len,
                                  double power_kw,
                                  double *out);

// Smallest gross battery capacity in kWh that operates sequence `sequence`
// with charging at every candidate station at `power_kw`.
//
// # Safety
// `dataset` and `schedule` must be live handles and `out` must be valid.
enum FpStatus fp_min_battery_capacity(const struct FpDataset *dataset,
                                      const struct FpSchedule *schedule,
                                      uintptr_t sequence,
                                      double power_kw,
                                      double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLEETPLAN_H */
