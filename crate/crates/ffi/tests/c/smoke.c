#include <stdio.h>
#include <string.h>
#include "ffperiods.h"

int main(void) {
    FfpCurve *c = NULL;
    const int64_t a[5] = {0, 0, 1, 0, 0};
    if (ffp_curve_new_elliptic(2, a, &c) != FFP_STATUS_OK) return 10;
    uint64_t n = 0;
    if (ffp_curve_count_points(c, 1, &n) != FFP_STATUS_OK || n != 3) return 11;
    FfpReport *r = NULL;
    if (ffp_genus1_report(c, 64, 3, &r) != FFP_STATUS_OK) return 12;
    int64_t num = -1, den = -1;
    ffp_report_total(r, &num, &den);
    if (num != 0 || den != 1 || ffp_report_status(r) != FFP_STATUS_OK) return 13;
    char *json = ffp_report_to_json(r);
    if (json == NULL || strstr(json, "\"points\":3") == NULL) return 14;
    ffp_string_free(json);
    ffp_report_free(r);
    ffp_curve_free(c);

    const int64_t singular[5] = {0, 0, 0, 0, 0};
    if (ffp_curve_new_elliptic(2, singular, &c) != FFP_STATUS_INVALID_INPUT) return 15;
    if (strlen(ffp_last_error()) == 0) return 16;
    printf("ok\n");
    return 0;
}
