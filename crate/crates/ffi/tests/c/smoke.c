#include <stdio.h>
#include <string.h>

#include "hetcdc.h"

int main(void) {
    uint64_t m[3] = {6, 7, 7};
    HetcdcConfig *cfg = NULL;
    if (hetcdc_config_new(m, 3, 12, &cfg) != HETCDC_STATUS_OK) return 1;

    HetcdcRational l;
    if (hetcdc_optimal_load(cfg, &l) != HETCDC_STATUS_OK || l.num != 12 || l.den != 1) return 2;

    HetcdcPlacement *p = NULL;
    if (hetcdc_placement_new(cfg, &p) != HETCDC_STATUS_OK) return 3;
    char *json = NULL;
    if (hetcdc_placement_json(p, &json) != HETCDC_STATUS_OK || strstr(json, "\"R2\"") == NULL) return 4;
    hetcdc_string_free(json);
    if (hetcdc_simulate(p, 16, 7, &l) != HETCDC_STATUS_OK || l.num != 12) return 5;
    hetcdc_placement_free(p);
    hetcdc_config_free(cfg);

    uint64_t bad[3] = {1, 1, 1};
    HetcdcStatus s = hetcdc_config_new(bad, 3, 12, &cfg);
    if (s != HETCDC_STATUS_FEASIBILITY_VIOLATION) return 6;
    if (strcmp(hetcdc_status_name(s), "FeasibilityViolation") != 0) return 7;
    printf("%s\n", hetcdc_last_error());
    return 0;
}
