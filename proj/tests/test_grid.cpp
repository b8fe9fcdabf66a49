#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rnls/grid.hpp"

using namespace rnls;

namespace {

Field random_field(GridPtr g, Rep rep, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Field f = Field::zeros(g, rep);
  for (auto& z : f.v) z = cd(gauss(rng), gauss(rng));
  return f;
}

double rel_l2_diff(const Field& a, const Field& b) {
  Field d = a;
  Field bb = b;
  d -= bb;
  return l2_norm(d) / l2_norm(a);
}

}  // namespace

TEST_CASE("grid factory validates its arguments") {
  CHECK_THROWS_AS(Grid::make(0, 64, 8.0, 16, 1.0), contract_error);
  CHECK_THROWS_AS(Grid::make(4, 64, 8.0, 16, 1.0), contract_error);
  CHECK_THROWS_AS(Grid::make(1, 100, 8.0, 16, 1.0), contract_error);  // not 2^k
  CHECK_THROWS_AS(Grid::make(1, 64, -1.0, 16, 1.0), contract_error);
  CHECK_THROWS_AS(Grid::make(1, 64, 8.0, 1, 1.0), contract_error);
  CHECK_THROWS_AS(Grid::make(1, 64, 8.0, 16, 0.0), contract_error);
  auto g = Grid::make(2, 32, 4.0, 9, 2.0);
  CHECK(g->dt == doctest::Approx(0.25));
  CHECK(g->dx == doctest::Approx(0.125));
  CHECK(g->n_total == 1024);
}

TEST_CASE("mode bookkeeping round-trips") {
  auto g = Grid::make(3, 16, 4.0, 4, 1.0);
  for (std::size_t lin = 0; lin < g->n_total; lin += 37) {
    auto m = g->modes_of(lin);
    CHECK(g->index_of(m) == lin);
    CHECK(g->m2(lin) ==
          std::int64_t(m[0]) * m[0] + std::int64_t(m[1]) * m[1] + std::int64_t(m[2]) * m[2]);
  }
}

TEST_CASE("pure grid mode transforms to a single bin with its amplitude") {
  for (int d : {1, 2, 3}) {
    int n = d == 3 ? 16 : 64;
    double L = 8.0;
    auto g = Grid::make(d, n, L, 4, 1.0);
    std::array<int, 3> m0 = {d >= 1 ? 3 : 0, d >= 2 ? -2 : 0, d >= 3 ? 5 : 0};
    if (d < 2) m0[1] = 0;
    if (d < 3) m0[2] = 0;
    const cd amp(0.7, -0.4);
    Field f = Field::zeros(g, Rep::physical);
    for (std::size_t lin = 0; lin < g->n_total; ++lin) {
      // physical coordinates from the linear index, row major, axis d-1 fastest
      std::size_t r = lin;
      double phase = 0.0;
      for (int a = d - 1; a >= 0; --a) {
        int i = static_cast<int>(r % n);
        r /= n;
        phase += 2.0 * kPi * (m0[a] / L) * (i * g->dx);
      }
      f.v[lin] = amp * cd(std::cos(phase), std::sin(phase));
    }
    Field fh = fft(f);
    std::size_t bin = g->index_of(m0);
    CHECK(std::abs(fh.v[bin] - amp) < 1e-12);
    fh.v[bin] = 0.0;
    for (const auto& z : fh.v) CHECK(std::abs(z) < 1e-12);
  }
}

TEST_CASE("constant field maps to the zero bin with its amplitude") {
  auto g = Grid::make(2, 32, 4.0, 4, 1.0);
  const cd c(1.25, 0.5);
  Field f = Field::zeros(g, Rep::physical);
  for (auto& z : f.v) z = c;
  Field fh = fft(f);
  CHECK(std::abs(fh.v[0] - c) < 1e-13);
  for (std::size_t i = 1; i < fh.v.size(); ++i) CHECK(std::abs(fh.v[i]) < 1e-13);
}

TEST_CASE("fft round trip and Plancherel") {
  for (int d : {1, 2, 3}) {
    int n = d == 3 ? 16 : 128;
    auto g = Grid::make(d, n, 8.0, 4, 1.0);
    for (unsigned s = 0; s < 10; ++s) {
      Field f = random_field(g, Rep::physical, 100 * d + s);
      Field back = ifft(fft(f));
      CHECK(rel_l2_diff(f, back) < 1e-12);
      // sum|f|^2 dx^d == L^d sum|fhat|^2 (mode-amplitude convention)
      Field fh = fft(f);
      CHECK(l2_norm(f) == doctest::Approx(l2_norm(fh)).epsilon(1e-12));
    }
  }
}

TEST_CASE("representation tags are enforced") {
  auto g = Grid::make(1, 64, 8.0, 4, 1.0);
  Field p = random_field(g, Rep::physical, 1);
  Field q = random_field(g, Rep::frequency, 2);
  CHECK_THROWS_AS((void)fft(q), contract_error);
  CHECK_THROWS_AS((void)ifft(p), contract_error);
  CHECK_THROWS_AS((void)quadrature_norm(q, 2.0), contract_error);
}

TEST_CASE("quadrature norms") {
  auto g = Grid::make(2, 32, 4.0, 4, 1.0);
  const double c = 0.8;
  Field f = Field::zeros(g, Rep::physical);
  for (auto& z : f.v) z = c;
  for (double p : {1.0, 2.0, 4.0, 32.0}) {
    // constant field: (sum c^p dx^d)^(1/p) = c * L^(d/p)
    CHECK(quadrature_norm(f, p) ==
          doctest::Approx(c * std::pow(g->L, g->d / p)).epsilon(1e-12));
  }
  CHECK(quadrature_norm(f, kInf) == doctest::Approx(c));
  CHECK_THROWS_AS(quadrature_norm(f, 0.5), contract_error);
  // max-normalized accumulation keeps huge exponents finite
  Field h = random_field(g, Rep::physical, 3);
  double q = quadrature_norm(h, 256.0);
  CHECK(std::isfinite(q));
  CHECK(q <= quadrature_norm(h, kInf) * std::pow(g->L * g->L, 1.0 / 256.0) * (1 + 1e-12));
}

TEST_CASE("dealias mask keeps the 2/3 cube") {
  auto g = Grid::make(1, 256, 32.0, 4, 1.0);
  const auto& keep = g->dealias_keep();
  for (std::size_t lin = 0; lin < g->n_total; ++lin) {
    int m = g->modes_of(lin)[0];
    CHECK(keep[lin] == (std::abs(m) <= 85 ? 1.0 : 0.0));
  }
}

TEST_CASE("space-time field window validation") {
  auto g = Grid::make(1, 64, 8.0, 16, 1.0);
  auto u = SpaceTimeField::zeros(g, Rep::frequency, 8, 4);
  CHECK(u.t(0) == doctest::Approx(4.0 / 15.0));
  CHECK_THROWS_AS(SpaceTimeField::zeros(g, Rep::frequency, 16, 4), contract_error);
}
