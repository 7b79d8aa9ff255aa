#ifndef LTTF_H
#define LTTF_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum LttfStatus {
  LTTF_STATUS_OK = 0,
  LTTF_STATUS_NULL_POINTER = 1,
  LTTF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The requested quantity does not exist for this input (no feasible
   * power vector, a node that cannot transmit).
   */
  LTTF_STATUS_INFEASIBLE = 3,
  /**
   * Input exceeds the size limits of an exhaustive search.
   */
  LTTF_STATUS_GUARD_EXCEEDED = 4,
  /**
   * A caller buffer is too small; the required length was written.
   */
  LTTF_STATUS_BUFFER_TOO_SMALL = 5,
  LTTF_STATUS_NUMERICAL = 6,
  /**
   * A Rust panic was caught at the boundary.
   */
  LTTF_STATUS_INTERNAL = 7,
} LttfStatus;

typedef enum LttfStrategy {
  LTTF_STRATEGY_SNA_MLA = 0,
  LTTF_STRATEGY_SNA_MUA = 1,
} LttfStrategy;

/**
 * Nodes, link gains and radio parameters.
 */
typedef struct LttfNetwork LttfNetwork;

/**
 * Discrete rate table.
 */
typedef struct LttfRateTable LttfRateTable;

/**
 * A computed TDMA frame.
 */
typedef struct LttfSchedule LttfSchedule;

typedef struct LttfRadio {
  /**
   * Watts.
   */
  double p_max;
  /**
   * Total receiver noise power, watts.
   */
  double noise_power;
  double bandwidth_hz;
} LttfRadio;

/**
 * Per-node requirements, mirroring the library's node record.
 */
typedef struct LttfNode {
  uint32_t id;
  uint32_t controller_id;
  double packet_bits;
  /**
   * Packet generation period; nested multiples of the smallest one.
   */
  uint32_t period;
  /**
   * Seconds.
   */
  double delay_bound;
  /**
   * Joules per packet; may be infinite.
   */
  double energy_budget;
} LttfNode;

/**
 * Scalar part of a rate and power assignment.
 */
typedef struct LttfAllocation {
  bool feasible;
  /**
   * Seconds; infinite when infeasible.
   */
  double slot_length;
  size_t feasibility_checks;
} LttfAllocation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lttf_last_error(void);

/**
 * Default radio parameters: 0.25 W, 1e-8 W noise, 100 MHz.
 */
struct LttfRadio lttf_radio_default(void);

/**
 * Rate table from SINR thresholds in dB (`-INFINITY` allowed; such levels
 * are dropped).
 *
 * # Safety
 * `thresholds_db` must point to `len` doubles; `out` must be writable.
 */
enum LttfStatus lttf_rate_table_new(const double *thresholds_db,
                                    size_t len,
                                    double bandwidth_hz,
                                    struct LttfRateTable **out);

/**
 * The 4-entry table `{-inf, 10, 20, 30}` dB.
 *
 * # Safety
 * `out` must be writable.
 */
enum LttfStatus lttf_rate_table_disc4(double bandwidth_hz, struct LttfRateTable **out);

/**
 * The 8-entry table `{-inf, 0, 5, ..., 30}` dB.
 *
 * # Safety
 * `out` must be writable.
 */
enum LttfStatus lttf_rate_table_disc8(double bandwidth_hz, struct LttfRateTable **out);

/**
 * Number of usable levels, or 0 for a null table.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t lttf_rate_table_len(const struct LttfRateTable *table);

/**
 * Rate (bits/s) and linear SINR threshold of usable level `index`.
 *
 * # Safety
 * `table` must be a live handle; the out pointers must be writable or null.
 */
enum LttfStatus lttf_rate_table_level(const struct LttfRateTable *table,
                                      size_t index,
                                      double *rate_out,
                                      double *sinr_out);

/**
 * # Safety
 * `table` must be null or a handle not yet freed.
 */
void lttf_rate_table_free(struct LttfRateTable *table);

/**
 * Validates `n` nodes and an `n * n` row-major gain matrix where entry
 * `(l, k)` is the gain from node `l`'s transmitter to node `k`'s receiver.
 *
 * # Safety
 * `nodes` must point to `n` records, `gains` to `n * n` doubles, `radio` to
 * one record; `out` must be writable.
 */
enum LttfStatus lttf_network_new(const struct LttfNode *nodes,
                                 size_t n,
                                 const double *gains,
                                 const struct LttfRadio *radio,
                                 struct LttfNetwork **out);

/**
 * Number of nodes, or 0 for a null network.
 *
 * # Safety
 * `network` must be null or a live handle.
 */
size_t lttf_network_len(const struct LttfNetwork *network);

/**
 * # Safety
 * `network` must be null or a handle not yet freed.
 */
void lttf_network_free(struct LttfNetwork *network);

/**
 * Discrete rate and power assignment minimizing the slot length of the
 * `count` nodes listed in `members` transmitting together. When feasible,
 * per-member rates (bits/s) and powers (W) are written to `rates_out` and
 * `powers_out` if they are not null; each must hold `count` doubles.
 *
 * # Safety
 * Handles must be live; `members` must point to `count` indices; `out` must
 * be writable.
 */
enum LttfStatus lttf_allocate(const struct LttfNetwork *network,
                              const struct LttfRateTable *table,
                              const size_t *members,
                              size_t count,
                              struct LttfAllocation *out,
                              double *rates_out,
                              double *powers_out);

/**
 * Shannon-rate counterpart of [`lttf_allocate`].
 *
 * # Safety
 * As for [`lttf_allocate`].
 */
enum LttfStatus lttf_allocate_continuous(const struct LttfNetwork *network,
                                         const size_t *members,
                                         size_t count,
                                         struct LttfAllocation *out,
                                         double *rates_out,
                                         double *powers_out);

/**
 * Component-wise minimum powers meeting linear SINR `targets` for the listed
 * members. Returns `Infeasible` when no finite power vector exists; the
 * spectral radius of the interference matrix is written either way when
 * `radius_out` is not null. The power limit is not applied.
 *
 * # Safety
 * `members` and `targets` must point to `count` values; `powers_out` must
 * hold `count` doubles.
 */
enum LttfStatus lttf_min_power(const struct LttfNetwork *network,
                               const size_t *members,
                               const double *targets,
                               size_t count,
                               double *powers_out,
                               double *radius_out);

/**
 * Heuristic TDMA schedule. A null `table` selects Shannon rates.
 *
 * # Safety
 * `network` must be live, `table` null or live, `out` writable.
 */
enum LttfStatus lttf_schedule_new(const struct LttfNetwork *network,
                                  const struct LttfRateTable *table,
                                  enum LttfStrategy strategy,
                                  double subframe_duration,
                                  struct LttfSchedule **out);

/**
 * Exact minimum schedule for networks of at most `max_nodes` nodes and
 * `max_subframes` subframes.
 *
 * # Safety
 * As for [`lttf_schedule_new`].
 */
enum LttfStatus lttf_schedule_exhaustive(const struct LttfNetwork *network,
                                         const struct LttfRateTable *table,
                                         size_t max_nodes,
                                         size_t max_subframes,
                                         double subframe_duration,
                                         struct LttfSchedule **out);

/**
 * Largest per-subframe active length in seconds, or NaN for null.
 *
 * # Safety
 * `sched` must be null or live.
 */
double lttf_schedule_max_active(const struct LttfSchedule *sched);

/**
 * Number of subframes, or 0 for null.
 *
 * # Safety
 * `sched` must be null or live.
 */
size_t lttf_schedule_subframe_count(const struct LttfSchedule *sched);

/**
 * Active length of `subframe` and its number of groups.
 *
 * # Safety
 * `sched` must be live; out pointers writable or null.
 */
enum LttfStatus lttf_schedule_subframe(const struct LttfSchedule *sched,
                                       size_t subframe,
                                       double *active_out,
                                       size_t *group_count_out);

/**
 * Subframe offset of node `node`.
 *
 * # Safety
 * `sched` must be live; `out` writable.
 */
enum LttfStatus lttf_schedule_offset(const struct LttfSchedule *sched, size_t node, size_t *out);

/**
 * Members and slot length of group `group` in `subframe`. `members_out`
 * holds `capacity` entries; the member count is always written to `len_out`
 * and `BufferTooSmall` is returned if it exceeds `capacity`.
 *
 * # Safety
 * `sched` must be live; `members_out` must hold `capacity` entries (may be
 * null when `capacity` is 0); `len_out` writable; `slot_out` writable or null.
 */
enum LttfStatus lttf_schedule_group(const struct LttfSchedule *sched,
                                    size_t subframe,
                                    size_t group,
                                    size_t *members_out,
                                    size_t capacity,
                                    size_t *len_out,
                                    double *slot_out);

/**
 * # Safety
 * `sched` must be null or a handle not yet freed.
 */
void lttf_schedule_free(struct LttfSchedule *sched);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LTTF_H */
