#ifndef V2X_H
#define V2X_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum V2xStatus {
  V2X_STATUS_OK = 0,
  V2X_STATUS_NULL_POINTER = 1,
  V2X_STATUS_INVALID_UTF8 = 2,
  V2X_STATUS_IO = 3,
  V2X_STATUS_PARSE = 4,
  V2X_STATUS_VALIDATE = 5,
  V2X_STATUS_CLEAR = 6,
  V2X_STATUS_RELIABILITY = 7,
  V2X_STATUS_INVALID_ARGUMENT = 8,
  V2X_STATUS_PANIC = 9,
} V2xStatus;

/*
 Opaque scenario handle.
 */
typedef struct V2xScenario V2xScenario;

/*
 Opaque settlement handle.
 */
typedef struct V2xSettlement V2xSettlement;

/*
 Headline numbers of a run. Money fields are milli-pence.
 */
typedef struct V2xKpis {
  int64_t social_savings;
  int64_t total_payments;
  int64_t fines_collected;
  int64_t served_value;
  int64_t balancing_cost;
  int64_t fr_payments;
  int64_t platform_utility;
  uint64_t contracted_kwh;
  uint64_t delivered_kwh;
  uint64_t unmet_demand_kwh;
  uint64_t fr_export_kwh;
  uint64_t fr_import_kwh;
  uint64_t balancing_kwh;
  uint64_t curtailed_kwh;
  uint64_t grid_kwh;
  double carbon_g;
} V2xKpis;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. Valid until the next call.
 */
const char *v2x_last_error_message(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *v2x_version(void);

/*
 Parses a scenario from TOML text.

 # Safety
 `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum V2xStatus v2x_scenario_from_toml(const char *toml, struct V2xScenario **out);

/*
 Loads a scenario file.

 # Safety
 `path` must be a NUL-terminated string; `out` must be writable.
 */
enum V2xStatus v2x_scenario_load(const char *path, struct V2xScenario **out);

/*
 A random scenario with the default generator shape.

 # Safety
 `out` must be writable.
 */
enum V2xStatus v2x_scenario_generate(uint64_t seed, struct V2xScenario **out);

/*
 # Safety
 `scenario` must be a live handle.
 */
enum V2xStatus v2x_scenario_set_seed(struct V2xScenario *scenario, uint64_t seed);

/*
 Serializes a scenario back to TOML.

 # Safety
 `scenario` must be a live handle; `out` must be writable.
 */
enum V2xStatus v2x_scenario_to_toml(const struct V2xScenario *scenario, char **out);

/*
 # Safety
 `scenario` must be NULL or a handle not yet freed.
 */
void v2x_scenario_free(struct V2xScenario *scenario);

/*
 Runs a full seeded day. `oracle` selects exhaustive clearing.

 # Safety
 `scenario` must be a live handle; `out` must be writable.
 */
enum V2xStatus v2x_simulate(const struct V2xScenario *scenario,
                            bool oracle,
                            struct V2xSettlement **out);

/*
 Parses a machine record.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum V2xStatus v2x_settlement_from_json(const char *json, struct V2xSettlement **out);

/*
 The machine record (JSON). Free the result with `v2x_string_free`.

 # Safety
 `settlement` must be a live handle; `out` must be writable.
 */
enum V2xStatus v2x_settlement_to_json(const struct V2xSettlement *settlement, char **out);

/*
 The human-readable report. Free the result with `v2x_string_free`.

 # Safety
 `settlement` must be a live handle; `out` must be writable.
 */
enum V2xStatus v2x_settlement_to_text(const struct V2xSettlement *settlement, char **out);

/*
 # Safety
 `settlement` must be a live handle; `out` must be writable.
 */
enum V2xStatus v2x_settlement_kpis(const struct V2xSettlement *settlement, struct V2xKpis *out);

/*
 Number of accepted contracts; their ids are written to `ids` up to `capacity`.

 # Safety
 `settlement` must be a live handle; `ids` must hold `capacity` values or be NULL with `capacity == 0`.
 */
uintptr_t v2x_settlement_accepted(const struct V2xSettlement *settlement,
                                  uint32_t *ids,
                                  uintptr_t capacity);

/*
 # Safety
 `settlement` must be NULL or a handle not yet freed.
 */
void v2x_settlement_free(struct V2xSettlement *settlement);

/*
 # Safety
 `s` must be NULL or a string returned by this library and not yet freed.
 */
void v2x_string_free(char *s);

/*
 Lower bound on a contract's success probability from its fine and total bid (milli-pence).

 # Safety
 `out` must be writable.
 */
enum V2xStatus v2x_prob_lower_bound(int64_t fine_millipence,
                                    int64_t bid_total_millipence,
                                    double *out);

/*
 Grams of CO2 for the given balancing and grid energy.
 */
double v2x_carbon_proxy(uint64_t balancing_kwh,
                        uint64_t grid_kwh,
                        double grid_g_per_kwh,
                        double balancing_g_per_kwh);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* V2X_H */
