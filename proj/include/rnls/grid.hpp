#pragma once

#include <array>
#include <limits>
#include <memory>
#include <vector>

#include "rnls/common.hpp"

namespace rnls {

enum class Rep { physical, frequency };

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

// Periodic box [0,L)^d sampled on n^d points (n a power of two), with a time
// lattice t_j = j*dt, dt = T/(n_t-1). Frequency lattice xi = m/L with signed
// integer modes m in {-n/2, ..., n/2-1} per axis, FFT bin order, row-major,
// last axis fastest. Immutable once built; FFT plans are created at
// construction and executed re-entrantly on caller buffers.
class Grid {
 public:
  static GridPtr make(int d, int n, double L, int n_t, double T);
  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int d = 0, n = 0, n_t = 0;
  double L = 0, T = 0, dt = 0, dx = 0;
  std::size_t n_total = 0;

  int mode(int i) const { return i < n / 2 ? i : i - n; }
  std::int64_t m2(std::size_t lin) const { return m2_[lin]; }
  // -4 pi^2 |xi|^2 at a linear index; the propagator phase is rate * t.
  double phase_rate(std::size_t lin) const { return rate_[lin]; }
  // 2/3-rule mask: 1.0 where |m_axis| <= floor(n/3) on every axis, else 0.0.
  const std::vector<double>& dealias_keep() const { return dealias_; }

  std::array<int, 3> modes_of(std::size_t lin) const;
  std::size_t index_of(const std::array<int, 3>& m) const;
  double t(int j) const { return dt * j; }
  double xi_max() const { return n / (2.0 * L); }

  void fft_raw(const cd* in, cd* out) const;   // unnormalized forward DFT
  void ifft_raw(const cd* in, cd* out) const;  // unnormalized backward DFT

 private:
  Grid() = default;
  std::vector<std::int64_t> m2_;
  std::vector<double> rate_;
  std::vector<double> dealias_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

// One complex scalar field on a grid, tagged physical or frequency. Treated
// as a value: operations return fresh fields.
struct Field {
  GridPtr g;
  Rep rep = Rep::physical;
  std::vector<cd> v;

  static Field zeros(GridPtr g, Rep rep);
  std::size_t size() const { return v.size(); }
};

Field fft(const Field& f);   // requires physical; mode of amplitude c -> bin value c
Field ifft(const Field& f);  // requires frequency
Field to_freq(const Field& f);
Field to_phys(const Field& f);

// (sum |v|^p dx^d)^(1/p) on the physical samples; p = inf gives max|v|.
// Max-normalized accumulation, so large p stays finite.
double quadrature_norm(const Field& f, double p);
// L^2 norm from either representation (Plancherel: dual measure is L^d).
double l2_norm(const Field& f);

void check_same_grid(const Field& a, const Field& b);
Field& operator+=(Field& a, const Field& b);
Field& operator-=(Field& a, const Field& b);
Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cd alpha, Field a);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Time-sliced field over a contiguous window of the grid's time lattice,
// starting at lattice index j0. All slices share one representation.
struct SpaceTimeField {
  GridPtr g;
  int j0 = 0;
  std::vector<Field> s;

  static SpaceTimeField zeros(GridPtr g, Rep rep, int nt, int j0 = 0);
  int nt() const { return static_cast<int>(s.size()); }
  double t(int i) const { return g->dt * (j0 + i); }
};

}  // namespace rnls
