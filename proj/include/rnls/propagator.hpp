#pragma once

#include <functional>
#include <memory>

#include "rnls/grid.hpp"

namespace rnls::prop {

// Nonlinearity sign: +1 defocusing, -1 focusing. The Duhamel prefactor is
// -i*value, opposite to the equation's right-hand side sign.
struct Sign {
  int value = +1;
};
Sign make_sign(int v);

// Frequency multiplier of the free group at time t: exp(i * rate * t) with
// rate = -4 pi^2 |xi|^2, per grid bin.
void group_phases(const Grid& g, double t, cd* out);

// Bounded thread-safe cache of group multipliers, for callers that reuse a
// small set of times (fixed-step integrators). Every entry has |mult| = 1 to
// rounding.
class PropagatorTable {
 public:
  explicit PropagatorTable(GridPtr g, std::size_t max_entries = 6);
  ~PropagatorTable();
  std::shared_ptr<const std::vector<cd>> get(double t) const;
  const Grid& grid() const { return *g_; }

 private:
  GridPtr g_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// e^{it Laplacian} f; the input representation is preserved.
Field propagate(const Field& f, double t);

// Free evolution sampled on the window [j0, j0+nt) of f's grid time lattice.
SpaceTimeField free_evolution(const Field& f, int j0, int nt);

// w(t) = e^{i(t-t0) Lap} v0 - i kappa int_{t0}^t e^{i(t-s) Lap} h(s) ds on
// h's window, trapezoid quadrature in the interaction picture. v0 == nullptr
// means zero head. Result is frequency-rep on the same window.
SpaceTimeField duhamel(const Field* v0, const SpaceTimeField& h, Sign sign);

// Streaming core: h_at(j) supplies the forcing slice (frequency rep) for
// window index j in order; emit(j, w_j) receives the solution slice.
void duhamel_stream(const Field* v0, GridPtr g, int j0, int nt, Sign sign,
                    const std::function<Field(int)>& h_at,
                    const std::function<void(int, Field&&)>& emit);

// || e^{-i t2 Lap} u(t2) - e^{-i t1 Lap} u(t1) ||_{H^sigma}: Cauchy difference
// of the interaction-picture trajectory between two window indices.
double scattering_proxy(const SpaceTimeField& u, double sigma, int i1, int i2);

}  // namespace rnls::prop
