#include "rnls/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "rnls/kernels.hpp"

namespace rnls {

namespace {
// FFTW's planner is not re-entrant; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

GridPtr Grid::make(int d, int n, double L, int n_t, double T) {
  require(d >= 1 && d <= 3, "grid: d must be 1, 2, or 3");
  require(n >= 4 && (n & (n - 1)) == 0, "grid: n must be a power of two >= 4");
  require(L > 0, "grid: L must be positive");
  require(n_t >= 2, "grid: n_t must be at least 2");
  require(T > 0, "grid: T must be positive");

  auto g = std::shared_ptr<Grid>(new Grid());
  g->d = d;
  g->n = n;
  g->L = L;
  g->n_t = n_t;
  g->T = T;
  g->dt = T / (n_t - 1);
  g->dx = L / n;
  g->n_total = 1;
  for (int a = 0; a < d; ++a) g->n_total *= static_cast<std::size_t>(n);

  g->m2_.resize(g->n_total);
  g->rate_.resize(g->n_total);
  g->dealias_.resize(g->n_total);
  const int keep = n / 3;
  const double rate_unit = -4.0 * kPi * kPi / (L * L);
  for (std::size_t lin = 0; lin < g->n_total; ++lin) {
    std::size_t r = lin;
    std::int64_t m2 = 0;
    bool inside = true;
    for (int a = d - 1; a >= 0; --a) {
      int i = static_cast<int>(r % n);
      r /= n;
      int m = i < n / 2 ? i : i - n;
      m2 += static_cast<std::int64_t>(m) * m;
      if (std::abs(m) > keep) inside = false;
    }
    g->m2_[lin] = m2;
    g->rate_[lin] = rate_unit * static_cast<double>(m2);
    g->dealias_[lin] = inside ? 1.0 : 0.0;
  }

  {
    std::lock_guard<std::mutex> lk(planner_mutex());
    std::vector<cd> a(g->n_total), b(g->n_total);
    int dims[3] = {n, n, n};
    g->plan_fwd_ = fftw_plan_dft(
        d, dims, reinterpret_cast<fftw_complex*>(a.data()),
        reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    g->plan_bwd_ = fftw_plan_dft(
        d, dims, reinterpret_cast<fftw_complex*>(a.data()),
        reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    require(g->plan_fwd_ && g->plan_bwd_, "grid: FFT planning failed");
  }
  return g;
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lk(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::array<int, 3> Grid::modes_of(std::size_t lin) const {
  std::array<int, 3> m = {0, 0, 0};
  std::size_t r = lin;
  for (int a = d - 1; a >= 0; --a) {
    int i = static_cast<int>(r % n);
    r /= n;
    m[a] = mode(i);
  }
  return m;
}

std::size_t Grid::index_of(const std::array<int, 3>& m) const {
  std::size_t lin = 0;
  for (int a = 0; a < d; ++a) {
    int mm = m[a];
    require(mm >= -n / 2 && mm < n / 2, "grid: mode outside lattice");
    int i = mm >= 0 ? mm : mm + n;
    lin = lin * n + static_cast<std::size_t>(i);
  }
  return lin;
}

void Grid::fft_raw(const cd* in, cd* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Grid::ifft_raw(const cd* in, cd* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cd*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

Field Field::zeros(GridPtr g, Rep rep) {
  Field f;
  f.g = std::move(g);
  f.rep = rep;
  f.v.assign(f.g->n_total, cd(0.0, 0.0));
  return f;
}

Field fft(const Field& f) {
  require(f.rep == Rep::physical, "fft: field is not in physical representation");
  Field out;
  out.g = f.g;
  out.rep = Rep::frequency;
  out.v.resize(f.v.size());
  f.g->fft_raw(f.v.data(), out.v.data());
  kern::ops().scale(out.v.data(), cd(1.0 / static_cast<double>(f.g->n_total), 0.0),
                    out.v.size());
  return out;
}

Field ifft(const Field& f) {
  require(f.rep == Rep::frequency, "ifft: field is not in frequency representation");
  Field out;
  out.g = f.g;
  out.rep = Rep::physical;
  out.v.resize(f.v.size());
  f.g->ifft_raw(f.v.data(), out.v.data());
  return out;
}

Field to_freq(const Field& f) { return f.rep == Rep::frequency ? f : fft(f); }
Field to_phys(const Field& f) { return f.rep == Rep::physical ? f : ifft(f); }

double quadrature_norm(const Field& f, double p) {
  require(f.rep == Rep::physical, "quadrature_norm: field must be physical");
  require(p >= 1.0, "quadrature_norm: p must be at least 1");
  const auto& k = kern::ops();
  const double m2 = k.max_abs2(f.v.data(), f.v.size());
  if (m2 == 0.0) return 0.0;
  const double m = std::sqrt(m2);
  if (p == kInf) return m;
  const double vol = std::pow(f.g->dx, f.g->d);
  if (p == 2.0) return std::sqrt(k.sum_abs2(f.v.data(), f.v.size()) * vol);
  double s = 0.0;
  for (const cd& z : f.v) s += std::pow(std::abs(z) / m, p);
  return m * std::pow(s * vol, 1.0 / p);
}

double l2_norm(const Field& f) {
  const double vol = f.rep == Rep::physical ? std::pow(f.g->dx, f.g->d)
                                            : std::pow(f.g->L, f.g->d);
  return std::sqrt(kern::ops().sum_abs2(f.v.data(), f.v.size()) * vol);
}

void check_same_grid(const Field& a, const Field& b) {
  require(a.g == b.g, "field op: grids differ");
  require(a.rep == b.rep, "field op: representations differ");
}

Field& operator+=(Field& a, const Field& b) {
  check_same_grid(a, b);
  kern::ops().axpy(a.v.data(), cd(1.0, 0.0), b.v.data(), a.v.size());
  return a;
}

Field& operator-=(Field& a, const Field& b) {
  check_same_grid(a, b);
  kern::ops().axpy(a.v.data(), cd(-1.0, 0.0), b.v.data(), a.v.size());
  return a;
}

Field operator+(Field a, const Field& b) {
  a += b;
  return a;
}

Field operator-(Field a, const Field& b) {
  a -= b;
  return a;
}

Field operator*(cd alpha, Field a) {
  kern::ops().scale(a.v.data(), alpha, a.v.size());
  return a;
}

SpaceTimeField SpaceTimeField::zeros(GridPtr g, Rep rep, int nt, int j0) {
  require(nt >= 1 && j0 >= 0 && j0 + nt <= g->n_t,
          "space-time field: window outside time lattice");
  SpaceTimeField u;
  u.g = g;
  u.j0 = j0;
  u.s.reserve(nt);
  for (int i = 0; i < nt; ++i) u.s.push_back(Field::zeros(g, rep));
  return u;
}

}  // namespace rnls
