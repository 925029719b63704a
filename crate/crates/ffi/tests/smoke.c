#include "warpcluster.h"

#include <stdio.h>

int run(const char *csv) {
    WcDataset *ds = NULL;
    WcMatrix *m = NULL;
    WcResult *r = NULL;
    size_t medoids[2];
    double sil = 0.0;

    if (wc_dataset_load_csv(csv, false, &ds) != WC_STATUS_OK) {
        fprintf(stderr, "%s\n", wc_last_error());
        return 1;
    }
    if (wc_matrix_build(ds, -1, false, 0, &m) != WC_STATUS_OK ||
        wc_solve_exact(m, 2, 0, &r) != WC_STATUS_OK ||
        wc_result_medoids(r, medoids, 2) != WC_STATUS_OK ||
        wc_silhouette_mean(m, r, &sil) != WC_STATUS_OK) {
        fprintf(stderr, "%s\n", wc_last_error());
        return 1;
    }
    printf("medoids %zu %zu cost %g optimal %d silhouette %g\n", medoids[0], medoids[1],
           wc_result_total_cost(r), (int)wc_result_is_global_optimal(r), sil);
    wc_result_free(r);
    wc_matrix_free(m);
    wc_dataset_free(ds);
    return 0;
}
