#pragma once

#include <vector>

#include "rnls/grid.hpp"
#include "rnls/propagator.hpp"

namespace rnls::solver {

// Fixed-point iteration controls. monitor_sigma < 0 selects the default
// monitor regularity: 1/2 for d in {1, 2}, (d-2)/2 + 1/4 above.
struct PicardOptions {
  int max_iter = 30;
  double tol_fix = 1e-10;        // relative update size declaring convergence
  double monitor_sigma = -1.0;   // H^sigma used for updates and reporting
  double divergence_factor = 10.0;  // growth over divergence_span => give up
  int divergence_span = 3;
};

struct PicardReport {
  bool converged = false;
  int iterations = 0;        // map applications performed
  double residual = 0.0;     // last relative update in the monitor norm
  double monitor = 0.0;      // max over the window of H^sigma of the result
  double sigma = 0.0;        // monitor regularity actually used
  std::vector<double> history;  // relative update per iteration
};

struct PicardResult {
  SpaceTimeField u;
  PicardReport report;
};

double default_monitor_sigma(int d);

// One application of the integral map with head f:
//   Phi_f(v) = e^{i(t-t0) Lap} f - i kappa I[ v conj(v) v ],
// cubic product masked like every product in the toolkit. v may be any
// window; f is data at the window start.
SpaceTimeField apply_map(const Field& f, const SpaceTimeField& v, prop::Sign sign);

// Picard iteration of Phi_f on the window [j0, j0 + nt), started at the free
// evolution. Stops at tol_fix, max_iter, non-finite values, or sustained
// growth of the update (divergence_factor over divergence_span iterates).
PicardResult picard_solve(const Field& f, prop::Sign sign, int j0, int nt,
                          const PicardOptions& opts = {});

// Decomposed route: with z = z_{<=M} precomputed, iterate the remainder map
//   J(w) = -i kappa I[ |z+w|^2 (z+w) - |z|^2 z + [z,z,z]_{>M} ]
// from w = 0 and assemble u = z + w. The expansion terms and the
// over-threshold forcing cancel exactly on the grid (same quadrature, same
// product mask), so the assembled u is a fixed point of the direct map:
// different M move mass between the z-terms and w but reproduce the same
// solution to fixed-point tolerance. M odd; convergence is monitored on the
// w updates, and the reported monitor value is that of the assembled u.
PicardResult picard_solve_decomposed(const Field& f, int M, prop::Sign sign,
                                     int j0, int nt,
                                     const PicardOptions& opts = {});

// Independent reference integrator: Strang splitting, full spectrum (no
// product mask), pointwise nonlinear phase rotation and cached one-step group
// multipliers. Shares no stepping code with the integral-map route.
SpaceTimeField splitstep_reference(const Field& f, prop::Sign sign, int j0, int nt);

// Largest lattice-aligned T' = dt * j such that picard_solve converges on
// [t_{j0}, t_{j0} + T']; 0.0 when even the two-slice window diverges.
// Monotone bisection over the window length.
double existence_time_heuristic(const Field& f, prop::Sign sign, int j0,
                                const PicardOptions& opts = {});

}  // namespace rnls::solver
