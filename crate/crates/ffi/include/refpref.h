/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef REFPREF_H
#define REFPREF_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_BAD_SHAPE = 2,
  RP_STATUS_NON_FINITE = 3,
  /**
   * The exponent matrix does not give unique decompositions.
   */
  RP_STATUS_SINGULAR_GROUP = 4,
  /**
   * A bundle, price or reference has a non-positive coordinate.
   */
  RP_STATUS_NON_POSITIVE = 5,
  /**
   * No minimizing matrix exists.
   */
  RP_STATUS_NOT_COERCIVE = 6,
  RP_STATUS_NOT_CONVERGED = 7,
  RP_STATUS_INVALID_PARAMETER = 8,
  /**
   * A Rust panic was caught at the boundary.
   */
  RP_STATUS_INTERNAL = 99,
} RpStatus;

/**
 * A list of agents over a fixed number of commodities.
 */
typedef struct RpEconomy RpEconomy;

/**
 * A validated exponent group.
 */
typedef struct RpGroup RpGroup;

/**
 * Outcome of `rp_tatonnement`.
 */
typedef struct RpEquilibriumInfo {
  double excess_norm;
  size_t iterations;
  bool converged;
  /**
   * Largest `|⟨p, z(p)⟩|` relative to total wealth over all iterates.
   */
  double max_walras_residual;
} RpEquilibriumInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Text for a status code. The string is static.
 */
const char *rp_status_message(enum RpStatus status);

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next call into this library on the same thread.
 */
const char *rp_last_error(void);

/**
 * Builds a group over `commodities` goods from a row-major
 * `commodities × (commodities - 1)` exponent matrix.
 *
 * # Safety
 * `exponents` must point to that many doubles; `out` must be writable.
 */
enum RpStatus rp_group_new(size_t commodities, const double *exponents, struct RpGroup **out);

/**
 * # Safety
 * `g` must come from `rp_group_new` and not be freed twice. Null is a no-op.
 */
void rp_group_free(struct RpGroup *g);

/**
 * Number of commodities, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live group handle.
 */
size_t rp_group_commodities(const struct RpGroup *g);

/**
 * Whether the group has a minimizing matrix. False for a null handle.
 *
 * # Safety
 * `g` must be null or a live group handle.
 */
bool rp_group_is_coercive(const struct RpGroup *g);

/**
 * Decomposes `x = value · (M × r)`, writing `value` and the `l - 1`
 * parameters of `M`.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_decompose(const struct RpGroup *g,
                           const double *x,
                           const double *r,
                           double *out_value,
                           double *out_params);

/**
 * Value of `x` against `r`.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_value(const struct RpGroup *g, const double *x, const double *r, double *out);

/**
 * Minimizing matrix of the unweighted sum of exponentials: writes its
 * `l - 1` parameters and the minimum value.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_min_matrix(const struct RpGroup *g, double *out_params, double *out_min);

/**
 * Demand at prices `p` with wealth `wealth`, solved against reference `r`.
 * `out_value` and `out_params` may be null.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_demand_direct(const struct RpGroup *g,
                               const double *p,
                               double wealth,
                               const double *r,
                               double *out_bundle,
                               double *out_value,
                               double *out_params);

/**
 * Reference-free demand. The value and parameters written are those
 * against the all-ones bundle. `out_value` and `out_params` may be null.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_demand_closed_form(const struct RpGroup *g,
                                    const double *p,
                                    double wealth,
                                    double *out_bundle,
                                    double *out_value,
                                    double *out_params);

/**
 * Maximal attainable value against `r` at prices `p` and wealth `wealth`.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_satisfaction(const struct RpGroup *g,
                              const double *p,
                              double wealth,
                              const double *r,
                              double *out);

/**
 * An empty economy over `commodities` goods.
 *
 * # Safety
 * `out` must be writable.
 */
enum RpStatus rp_economy_new(size_t commodities, struct RpEconomy **out);

/**
 * # Safety
 * `e` must come from `rp_economy_new` and not be freed twice. Null is a no-op.
 */
void rp_economy_free(struct RpEconomy *e);

/**
 * Adds an agent with group `g`, reference `r` and endowment `endowment`.
 * The economy keeps its own reference to the group, so `g` may be freed
 * afterwards.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_economy_add_agent(struct RpEconomy *e,
                                   const struct RpGroup *g,
                                   const double *r,
                                   const double *endowment);

/**
 * Number of agents, or 0 for a null handle.
 *
 * # Safety
 * `e` must be null or a live economy handle.
 */
size_t rp_economy_agents(const struct RpEconomy *e);

/**
 * Aggregate excess demand at prices `p`. With `direct` each agent's demand
 * is solved against its own reference; otherwise the closed form is used.
 *
 * # Safety
 * See the module notes on array lengths.
 */
enum RpStatus rp_excess_demand(const struct RpEconomy *e,
                               const double *p,
                               bool direct,
                               double *out_excess);

/**
 * Price adjustment from `initial_prices` (null: uniform prices) until
 * `‖z‖∞ ≤ tolerance` or `max_iters`. Writes the normalized prices to
 * `out_prices`. Running out of iterations is not an error; check
 * `converged`.
 *
 * # Safety
 * See the module notes on array lengths. `out_info` may be null.
 */
enum RpStatus rp_tatonnement(const struct RpEconomy *e,
                             const double *initial_prices,
                             double step,
                             double tolerance,
                             size_t max_iters,
                             bool direct,
                             double *out_prices,
                             struct RpEquilibriumInfo *out_info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REFPREF_H */
