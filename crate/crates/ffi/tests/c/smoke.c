#include <math.h>
#include <stdio.h>
#include <string.h>

#include "spindir.h"

int main(void) {
    double f = 0.0;
    if (spindir_optimal_fidelity(2, &f) != SPINDIR_STATUS_OK || fabs(f - (3.0 + sqrt(3.0)) / 6.0) > 1e-12) {
        fprintf(stderr, "F_2 = %.17g\n", f);
        return 1;
    }
    if (spindir_fidelity(2, 3, 0, &f) != SPINDIR_STATUS_DOMAIN) {
        return 2;
    }
    const char *msg = spindir_last_error_message();
    if (msg == NULL || strlen(msg) == 0) {
        return 3;
    }

    SpindirFidelityResult *r = NULL;
    if (spindir_fidelity_result_new(4, 2, 2, &r) != SPINDIR_STATUS_OK) {
        return 4;
    }
    double comps[8];
    size_t n = spindir_fidelity_result_state_len(r);
    if (n == 0 || n > 8 || spindir_fidelity_result_state(r, comps, n) != SPINDIR_STATUS_OK) {
        return 5;
    }
    double norm = 0.0;
    for (size_t i = 0; i < n; i++) {
        norm += comps[i] * comps[i];
    }
    spindir_fidelity_result_free(r);
    if (fabs(norm - 1.0) > 1e-12) {
        return 6;
    }

    SpindirPovm *p = NULL;
    if (spindir_povm_tetrahedron(&p) != SPINDIR_STATUS_OK) {
        return 7;
    }
    SpindirSimReport rep;
    if (spindir_simulate(p, 20000, 7, &rep) != SPINDIR_STATUS_OK) {
        return 8;
    }
    spindir_povm_free(p);
    if (fabs(rep.mean - rep.target) > 5.0 * rep.std_error) {
        return 9;
    }
    printf("ok\n");
    return 0;
}
