#include "rnls/randomization.hpp"

#include <cmath>

#include "rnls/projections.hpp"

namespace rnls::rand {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double unit_open(std::uint64_t bits) {  // (0, 1]
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

double unit_half_open(std::uint64_t bits) {  // [0, 1)
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t cell_code(const std::array<int, 3>& k, int K) {
  const std::uint64_t w = 2ull * K + 1ull;
  std::uint64_t c = 0;
  for (int a = 2; a >= 0; --a) c = c * w + static_cast<std::uint64_t>(k[a] + K);
  return c;
}

// Shared cell walk: visit every (k, lin, psi(xi - k)) with |k|_inf <= K and
// psi > 0, in a fixed deterministic order.
template <typename Visit>
void for_each_cell(const Grid& g, int K, Visit&& visit) {
  require(K >= 0, "randomize: K must be nonnegative");
  require(g.xi_max() >= K + 1, "randomize: grid does not resolve K + 1");

  // Per axis and cell coordinate: the modes with |m/L - k| < 1.
  const int span = 2 * K + 1;
  std::vector<std::vector<int>> axis_idx(span);
  for (int kc = -K; kc <= K; ++kc) {
    auto& idx = axis_idx[kc + K];
    const double lo = (kc - 1.0) * g.L, hi = (kc + 1.0) * g.L;
    for (int m = static_cast<int>(std::floor(lo)) + 1; m < hi; ++m) {
      if (m <= -g.n / 2 || m >= g.n / 2) continue;
      idx.push_back(m >= 0 ? m : m + g.n);
    }
  }
  std::vector<int> zero = {0};

  std::array<int, 3> k = {0, 0, 0};
  for (k[0] = -K; k[0] <= K; ++k[0]) {
    const auto& i0 = axis_idx[k[0] + K];
    const int k1max = g.d >= 2 ? K : 0;
    for (k[1] = -k1max; k[1] <= k1max; ++k[1]) {
      const auto& i1 = g.d >= 2 ? axis_idx[k[1] + K] : zero;
      const int k2max = g.d >= 3 ? K : 0;
      for (k[2] = -k2max; k[2] <= k2max; ++k[2]) {
        const auto& i2 = g.d >= 3 ? axis_idx[k[2] + K] : zero;
        std::array<double, 3> xi = {0, 0, 0};
        for (int a0 : i0) {
          xi[0] = g.mode(a0) / g.L - k[0];
          for (int a1 : i1) {
            if (g.d >= 2) xi[1] = g.mode(a1) / g.L - k[1];
            for (int a2 : i2) {
              if (g.d >= 3) xi[2] = g.mode(a2) / g.L - k[2];
              std::size_t lin = a0;
              if (g.d >= 2) lin = lin * g.n + a1;
              if (g.d >= 3) lin = lin * g.n + a2;
              const double w = proj::psi(xi, g.d);
              if (w != 0.0) visit(k, lin, w);
            }
          }
        }
      }
    }
  }
}

}  // namespace

cd gaussian_coeff(std::uint64_t seed, std::uint64_t sample,
                  const std::array<int, 3>& k, int d, int K) {
  for (int a = d; a < 3; ++a)
    require(k[a] == 0, "gaussian_coeff: trailing cell coordinates must be 0");
  const std::uint64_t s0 =
      splitmix64(splitmix64(splitmix64(seed) ^ sample) ^ cell_code(k, K));
  const double u1 = unit_open(splitmix64(s0 ^ 0xA5A5A5A5A5A5A5A5ull));
  const double u2 = unit_half_open(splitmix64(s0 ^ 0x5A5A5A5A5A5A5A5Aull));
  const double r = std::sqrt(-std::log(u1));
  return cd(r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2));
}

Field randomize_with(const Field& f, int K,
                     const std::function<cd(const std::array<int, 3>&)>& coeff) {
  const Grid& g = *f.g;
  Field in = to_freq(f);
  Field out = Field::zeros(f.g, Rep::frequency);
  // Cache g_k per cell; cells are visited in contiguous runs.
  std::array<int, 3> cur = {0, 0, 0};
  cd gk(0, 0);
  bool have = false;
  for_each_cell(g, K, [&](const std::array<int, 3>& k, std::size_t lin, double w) {
    if (!have || k != cur) {
      cur = k;
      gk = coeff(k);
      have = true;
    }
    out.v[lin] += gk * (w * in.v[lin]);
  });
  return out;
}

Field randomize(const Field& f, int K, std::uint64_t seed, std::uint64_t sample) {
  const int d = f.g->d;
  return randomize_with(
      f, K, [&](const std::array<int, 3>& k) { return gaussian_coeff(seed, sample, k, d, K); });
}

double sq_weight(const Grid& g, std::size_t lin, int K) {
  const auto m = g.modes_of(lin);
  double prod = 1.0;
  for (int a = 0; a < g.d; ++a) {
    const double xi = m[a] / g.L;
    double s = 0.0;
    for (int k = -K; k <= K; ++k) {
      const double p = proj::psi1(xi - k);
      s += p * p;
    }
    prod *= s;
  }
  return prod;
}

MomentReport moment_check(const Field& f, int K, std::uint64_t seed, int n_samples) {
  require(n_samples >= 1, "moment_check: need at least one sample");
  const Grid& g = *f.g;
  Field in = to_freq(f);

  MomentReport rep;
  rep.n_samples = n_samples;
  double exact = 0.0;
  for (std::size_t lin = 0; lin < g.n_total; ++lin)
    exact += std::norm(in.v[lin]) * sq_weight(g, lin, K);
  exact *= std::pow(g.L, g.d);
  require(exact > 0.0, "moment_check: datum carries no randomized mass");
  rep.exact_mean = exact;

  double acc = 0.0;
  for (int s = 0; s < n_samples; ++s) {
    const double nrm = l2_norm(randomize(in, K, seed, static_cast<std::uint64_t>(s)));
    acc += nrm * nrm;
  }
  rep.empirical_mean = acc / n_samples;
  rep.rel_err = std::abs(rep.empirical_mean - exact) / exact;
  return rep;
}

}  // namespace rnls::rand
