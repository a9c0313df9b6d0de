#include <stdio.h>
#include "gnnbench.h"

int main(void) {
    GbDataset *d = NULL;
    if (gb_dataset_generate_preset("planted", 7, 100, 150, 8, 2, &d) != GB_STATUS_OK) {
        fprintf(stderr, "%s\n", gb_last_error_message());
        return 1;
    }
    GbFeatures *f = NULL;
    if (gb_features_extract(d, &f) != GB_STATUS_OK) return 2;
    double m[4];
    if (gb_features_preference_mean(f, m, 4) != GB_STATUS_OK) return 3;
    if (gb_dataset_load(NULL, &d) != GB_STATUS_NULL_POINTER) return 4;
    printf("%zu %zu %.3f\n", gb_dataset_node_count(d), gb_features_class_count(f), m[0] + m[1]);
    gb_features_free(f);
    gb_dataset_free(d);
    return 0;
}
