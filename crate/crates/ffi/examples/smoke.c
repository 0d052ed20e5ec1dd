#include <stdio.h>
#include "expansive.h"

int main(void) {
    ExpSystem *sys = NULL;
    if (exp_system_build("tower", "{\"alpha\": \"3\", \"n\": 2}", &sys) != EXP_STATUS_OK) {
        fprintf(stderr, "build failed: %s\n", exp_last_error());
        return 1;
    }
    char *rank = NULL;
    if (exp_system_rank(sys, &rank) != EXP_STATUS_OK) {
        fprintf(stderr, "rank failed: %s\n", exp_last_error());
        return 1;
    }
    printf("rank %s\n", rank);
    exp_string_free(rank);
    exp_system_free(sys);
    return 0;
}
