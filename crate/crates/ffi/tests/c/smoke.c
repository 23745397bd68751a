#include <stdio.h>
#include <string.h>

#include "idealpack.h"

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,    \
                    ip_last_error());                                 \
            return 1;                                                 \
        }                                                             \
    } while (0)

int main(void) {
    IpUniverse *u = NULL;
    IpSet *evens = NULL;
    uint64_t value = 0;
    IpPackStatus status;

    CHECK(ip_universe_cyclic(12, &u) == IP_STATUS_OK);
    CHECK(ip_set_parse(u, "evens", &evens) == IP_STATUS_OK);
    CHECK(ip_pack(evens, 2, 0, 11, true, &value, &status) == IP_STATUS_OK);
    CHECK(value == 2 && status == IP_PACK_STATUS_EXACT);
    CHECK(ip_set_parse(u, "union(", &evens) == IP_STATUS_SYNTAX);
    CHECK(strlen(ip_last_error()) > 0);
    ip_set_free(evens);
    ip_universe_free(u);
    printf("ok %s\n", ip_version());
    return 0;
}
