/* Two decoupled links: each should get the top disc8 level and the pair
 * should share a slot. */
#include <math.h>
#include <stdio.h>

#include "lttf.h"

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            const char *err = lttf_last_error();                         \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,       \
                    err ? err : "no error message");                     \
            return 1;                                                    \
        }                                                                \
    } while (0)

int main(void) {
    LttfRadio radio = lttf_radio_default();
    LttfNode nodes[2] = {
        {1, 0, 100.0, 1, 1e-3, INFINITY},
        {2, 1, 100.0, 1, 1e-3, INFINITY},
    };
    double gains[4] = {1e-3, 1e-15, 1e-15, 1e-3};

    LttfRateTable *table = NULL;
    LttfNetwork *net = NULL;
    LttfSchedule *sched = NULL;
    CHECK(lttf_rate_table_disc8(radio.bandwidth_hz, &table) == LTTF_STATUS_OK);
    CHECK(lttf_rate_table_len(table) == 7);
    CHECK(lttf_network_new(nodes, 2, gains, &radio, &net) == LTTF_STATUS_OK);

    size_t members[2] = {0, 1};
    LttfAllocation alloc;
    double rates[2], powers[2];
    CHECK(lttf_allocate(net, table, members, 2, &alloc, rates, powers) == LTTF_STATUS_OK);
    CHECK(alloc.feasible);
    double top;
    CHECK(lttf_rate_table_level(table, 6, &top, NULL) == LTTF_STATUS_OK);
    CHECK(rates[0] == top && rates[1] == top);
    CHECK(fabs(alloc.slot_length - 100.0 / top) < 1e-18);

    CHECK(lttf_schedule_new(net, table, LTTF_STRATEGY_SNA_MLA, 1e-3, &sched) == LTTF_STATUS_OK);
    CHECK(lttf_schedule_subframe_count(sched) == 1);
    CHECK(fabs(lttf_schedule_max_active(sched) - alloc.slot_length) < 1e-18);

    size_t group[2], len = 0;
    CHECK(lttf_schedule_group(sched, 0, 0, group, 2, &len, NULL) == LTTF_STATUS_OK);
    CHECK(len == 2);

    CHECK(lttf_network_new(nodes, 2, NULL, &radio, &net) == LTTF_STATUS_NULL_POINTER);
    CHECK(lttf_last_error() != NULL);

    lttf_schedule_free(sched);
    lttf_network_free(net);
    lttf_rate_table_free(table);
    printf("ok\n");
    return 0;
}
