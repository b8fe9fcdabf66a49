#include "rnls/projections.hpp"

#include <cmath>

#include "rnls/kernels.hpp"

namespace rnls::proj {

namespace {

double bump(double s) {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

double cinf_step(double x) {  // 0 for x <= 0, 1 for x >= 1
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double e0 = std::exp(-1.0 / x);
  const double e1 = std::exp(-1.0 / (1.0 - x));
  return e0 / (e0 + e1);
}

constexpr double kPlateau = 1.0 / 256.0;  // 2^-8

}  // namespace

double psi1(double s) {
  const double num = bump(s);
  if (num == 0.0) return 0.0;
  const double u = s - std::floor(s);
  return num / (bump(u) + bump(u - 1.0));
}

double psi(const std::array<double, 3>& xi, int d) {
  double p = 1.0;
  for (int a = 0; a < d; ++a) {
    p *= psi1(xi[a]);
    if (p == 0.0) return 0.0;
  }
  return p;
}

double lp_step(double r) {
  return cinf_step((1.0 - std::abs(r)) / kPlateau);
}

bool is_pow2_scale(double N) {
  if (!(N >= 1.0) || N != std::floor(N)) return false;
  auto i = static_cast<unsigned long long>(N);
  return (i & (i - 1)) == 0;
}

double phi_dyadic(double a, double N) {
  if (N == 1.0) return lp_step(a);
  return lp_step(a / N) - lp_step(a / (N * 0.5));
}

double chi_dyadic(double a, double N) {
  const double lo = std::max(N / 4.0, 1.0);
  const double hi = 4.0 * N;
  if (lo == 1.0) return lp_step(a / hi);
  return lp_step(a / hi) - lp_step(a / (lo * 0.5));
}

namespace {

Field radial_multiplier(const Field& f, double (*prof)(double, double), double N) {
  const Grid& g = *f.g;
  require(is_pow2_scale(N), "lp_project: N must be a power of two >= 1");
  require(N <= g.xi_max() + 1e-12, "lp_project: N exceeds the grid's xi_max");
  Field in = to_freq(f);
  std::vector<double> w(g.n_total);
  const double invL2 = 1.0 / (g.L * g.L);
  for (std::size_t lin = 0; lin < g.n_total; ++lin)
    w[lin] = prof(std::sqrt(static_cast<double>(g.m2(lin)) * invL2), N);
  Field out = Field::zeros(f.g, Rep::frequency);
  kern::ops().rmul(out.v.data(), in.v.data(), w.data(), g.n_total);
  return out;
}

}  // namespace

Field unit_project(const Field& f, const std::array<int, 3>& k, int K) {
  const Grid& g = *f.g;
  require(K >= 0, "unit_project: K must be nonnegative");
  for (int a = 0; a < g.d; ++a)
    require(std::abs(k[a]) <= K, "unit_project: cell outside the declared lattice");
  require(g.xi_max() >= K + 1, "unit_project: grid does not resolve K+1");

  Field in = to_freq(f);
  Field out = Field::zeros(f.g, Rep::frequency);
  // Support of psi(.-k) is the open l-infinity unit ball: per axis the grid
  // modes with |m/L - k_a| < 1. Iterate that sub-box only.
  std::array<std::vector<int>, 3> axis_idx;
  for (int a = 0; a < g.d; ++a) {
    const double lo = (k[a] - 1.0) * g.L, hi = (k[a] + 1.0) * g.L;
    for (int m = static_cast<int>(std::floor(lo)) + 1; m < hi; ++m) {
      if (m <= -g.n / 2 || m >= g.n / 2) continue;
      axis_idx[a].push_back(m >= 0 ? m : m + g.n);
    }
  }
  for (int a = g.d; a < 3; ++a) axis_idx[a].push_back(0);

  std::array<double, 3> xi = {0, 0, 0};
  for (int i0 : axis_idx[0]) {
    xi[0] = g.mode(i0) / g.L - k[0];
    for (int i1 : axis_idx[1]) {
      if (g.d >= 2) xi[1] = g.mode(i1) / g.L - k[1];
      for (int i2 : axis_idx[2]) {
        if (g.d >= 3) xi[2] = g.mode(i2) / g.L - k[2];
        std::size_t lin = i0;
        if (g.d >= 2) lin = lin * g.n + i1;
        if (g.d >= 3) lin = lin * g.n + i2;
        out.v[lin] = psi(xi, g.d) * in.v[lin];
      }
    }
  }
  return out;
}

Field lp_project(const Field& f, double N) {
  return radial_multiplier(f, phi_dyadic, N);
}

Field lp_project_mod(const Field& f, double N) {
  return radial_multiplier(f, chi_dyadic, N);
}

bool in_cone(const Grid& g, std::size_t lin, int l) {
  const auto m = g.modes_of(lin);
  const std::int64_t tot = g.m2(lin);
  if (tot == 0) return false;
  const std::int64_t k4d = 4 * static_cast<std::int64_t>(g.d);
  for (int a = 0; a <= l; ++a) {
    const std::int64_t ma2 = static_cast<std::int64_t>(m[a]) * m[a];
    if (k4d * ma2 > tot) return a == l;
  }
  return false;
}

Field cone_project(const Field& f, int l) {
  const Grid& g = *f.g;
  require(l >= 0 && l < g.d, "cone_project: axis out of range");
  Field in = to_freq(f);
  Field out = Field::zeros(f.g, Rep::frequency);
  for (std::size_t lin = 0; lin < g.n_total; ++lin)
    if (in_cone(g, lin, l)) out.v[lin] = in.v[lin];
  return out;
}

}  // namespace rnls::proj
