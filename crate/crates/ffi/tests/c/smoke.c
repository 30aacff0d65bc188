#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "barolab.h"

static const char *SCENARIO =
    "{\"version\": 1, \"name\": \"c_smoke\","
    " \"grid\": {\"dim\": 1, \"extents\": [1.0], \"cells\": [32]},"
    " \"initial\": {\"density\": {\"kind\": \"uniform\", \"value\": 1.0},"
    "   \"velocity\": {\"shape\": \"sine\", \"amplitude\": [0.2], \"modes\": [1]}},"
    " \"fluid\": {\"law\": {\"kind\": \"isentropic\", \"a\": 1.0, \"gamma\": 2.0},"
    "   \"viscosity\": {\"mu\": 0.1, \"lambda\": 0.0}},"
    " \"t_end\": 0.1, \"sample_every\": 0.05}";

#define CHECK(call)                                                          \
  do {                                                                       \
    BlStatus s_ = (call);                                                    \
    if (s_ != BL_STATUS_OK) {                                                \
      fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, bl_last_error());    \
      return 1;                                                              \
    }                                                                        \
  } while (0)

int main(void) {
  BlSimulation *sim = NULL;
  CHECK(bl_simulation_new(SCENARIO, NULL, &sim));
  BlEnergy e0, e1;
  double m0, m1, t;
  size_t n = 0;
  CHECK(bl_simulation_energy(sim, &e0));
  CHECK(bl_simulation_mass(sim, &m0));
  CHECK(bl_simulation_advance(sim, 0.05));
  CHECK(bl_simulation_time(sim, &t));
  CHECK(bl_simulation_energy(sim, &e1));
  CHECK(bl_simulation_mass(sim, &m1));
  CHECK(bl_simulation_cell_count(sim, &n));
  double *rho = malloc(n * sizeof(double));
  CHECK(bl_simulation_copy_density(sim, rho, n, NULL));
  bl_simulation_free(sim);

  BlSimulation *bad = NULL;
  if (bl_simulation_new("{\"name\": \"x\"}", NULL, &bad) != BL_STATUS_CONFIG || bad != NULL ||
      bl_last_error() == NULL) {
    fprintf(stderr, "missing version was not a config error\n");
    return 1;
  }
  printf("t=%.17g n=%zu e0=%.17g e1=%.17g dm=%.3e rho0=%.17g version=%s\n", t, n, e0.total,
         e1.total, fabs(m1 - m0) / m0, rho[0], bl_version());
  free(rho);
  return (t == 0.05 && n == 32 && e1.total < e0.total && fabs(m1 - m0) <= 1e-12 * m0) ? 0 : 1;
}
