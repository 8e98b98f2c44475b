/* SPDX-License-Identifier: Apache-2.0 */
#include <stdio.h>
#include "czscatter.h"

int main(void) {
    CzsModel *model = NULL;
    CzsGeometry *geometry = NULL;
    CzsComplex r[4];
    double fidelity = 0.0;

    if (czs_model_massive_from_gamma(1e3, 1.0, 1.0, &model) != CZS_STATUS_OK ||
        czs_geometry_cz_regime(1, 0, 1.0, &geometry) != CZS_STATUS_OK ||
        czs_reflection_gate(model, geometry, 1.0, r) != CZS_STATUS_OK ||
        czs_gate_fidelity(model, geometry, 1.0, &fidelity) != CZS_STATUS_OK) {
        char msg[256];
        czs_last_error_message(msg, sizeof msg);
        fprintf(stderr, "error: %s\n", msg);
        return 1;
    }
    printf("czscatter %s\n", czs_version());
    for (int i = 0; i < 4; i++) {
        printf("r[%d] = %+.6f %+.6fi\n", i, r[i].re, r[i].im);
    }
    printf("fidelity vs CZ: %.9f\n", fidelity);
    czs_geometry_free(geometry);
    czs_model_free(model);
    return 0;
}
