#include <math.h>
#include <stdio.h>
#include <string.h>

#include "decaypath.h"

static const char *WORKED =
    "{\"version\":1,\"n\":2,\"nodes\":["
    "{\"id\":0,\"maf\":{\"kind\":\"sum\"},\"neighbors\":[{\"j\":1,\"gain\":{\"kind\":\"linear\",\"params\":{\"a\":2.0}}}]},"
    "{\"id\":1,\"maf\":{\"kind\":\"sum\"},\"neighbors\":[{\"j\":0,\"gain\":{\"kind\":\"linear\",\"params\":{\"a\":0.125}}}]}]}";

int main(void) {
    DpNetwork *net = NULL;
    if (dp_network_from_json(WORKED, 0, &net) != DP_STATUS_OK) {
        fprintf(stderr, "load: %s\n", dp_last_error_message());
        return 1;
    }
    double s[2] = {1.0, 1.0}, g[2];
    if (dp_eval_gamma(net, s, 2, g) != DP_STATUS_OK || g[0] != 2.0 || g[1] != 0.125) return 2;

    double rho;
    if (dp_spectral_radius(net, &rho, NULL, NULL) != DP_STATUS_OK || fabs(rho - 0.5) > 1e-9) return 3;

    double grid[4] = {0.5, 1.0, 2.0, 4.0};
    DpPathTable *t = NULL;
    if (dp_path_table_build(net, grid, 4, 0.0, 0, &t) != DP_STATUS_OK) return 4;
    double v;
    int oor;
    if (dp_path_table_eval(t, 0, 1.5, &v, &oor) != DP_STATUS_OK || fabs(v - 3.0) > 1e-9 || oor) return 5;

    if (dp_eval_gamma(net, s, 3, g) != DP_STATUS_DIMENSION) return 6;
    if (strstr(dp_last_error_message(), "dimension") == NULL) return 7;

    dp_path_table_free(t);
    dp_network_free(net);
    printf("ok\n");
    return 0;
}
