#include <stdio.h>
#include <string.h>
#include "v2x.h"

int main(void) {
    V2xScenario *s = NULL;
    V2xSettlement *r = NULL;
    char *json = NULL;
    V2xKpis k;

    if (v2x_scenario_generate(5, &s) != V2X_STATUS_OK) return 1;
    if (v2x_simulate(s, false, &r) != V2X_STATUS_OK) return 2;
    if (v2x_settlement_kpis(r, &k) != V2X_STATUS_OK) return 3;
    if (k.total_payments + k.balancing_cost + k.fr_payments - k.fines_collected - k.served_value != -k.platform_utility) return 4;
    if (v2x_settlement_to_json(r, &json) != V2X_STATUS_OK) return 5;
    if (strstr(json, "\"kpis\"") == NULL) return 6;
    if (v2x_scenario_from_toml("nonsense", &s) != V2X_STATUS_PARSE) return 7;
    if (v2x_last_error_message() == NULL) return 8;
    printf("accepted %zu, platform %lld\n", v2x_settlement_accepted(r, NULL, 0), (long long)k.platform_utility);
    v2x_string_free(json);
    v2x_settlement_free(r);
    v2x_scenario_free(s);
    return 0;
}
