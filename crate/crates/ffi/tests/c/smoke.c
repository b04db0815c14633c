#include <stdio.h>
#include <string.h>
#include "genbound.h"

int main(void) {
    GbSetting *s = NULL;
    if (gb_setting_counterexample(2, 2, &s) != GB_STATUS_OK) {
        fprintf(stderr, "%s\n", gb_last_error());
        return 1;
    }
    size_t z = 0, n = 0, w = 0;
    if (gb_setting_sizes(s, &z, &n, &w) != GB_STATUS_OK || z != 4 || n != 2 || w != 3) {
        return 2;
    }
    double gap = -1.0, g2 = -1.0;
    if (gb_gap_moments(s, &gap, &g2) != GB_STATUS_OK || gap != 0.0 || g2 != 0.0) {
        return 3;
    }
    char *json = NULL;
    if (gb_cmi_report_json(s, &json) != GB_STATUS_OK || strstr(json, "\"certificates\"") == NULL) {
        return 4;
    }
    gb_string_free(json);
    gb_setting_free(s);
    if (gb_setting_random(1, NULL) != GB_STATUS_NULL_POINTER || gb_last_error() == NULL) {
        return 5;
    }
    printf("ok %s\n", gb_version());
    return 0;
}
