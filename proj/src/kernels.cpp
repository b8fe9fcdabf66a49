#include "rnls/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>

namespace rnls::kern {
namespace {

void s_cmul(cd* out, const cd* a, const cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cd(ar * br - ai * bi, ai * br + ar * bi);
  }
}

void s_cmul_conj2(cd* out, const cd* a, const cd* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cd(ar * br + ai * bi, ai * br - ar * bi);
  }
}

void s_triple(cd* out, const cd* a, const cd* b, const cd* c, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    const double tr = ar * br + ai * bi;
    const double ti = ai * br - ar * bi;
    const double cr = c[i].real(), ci = c[i].imag();
    out[i] = cd(tr * cr - ti * ci, ti * cr + tr * ci);
  }
}

void s_rmul(cd* out, const cd* a, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = cd(a[i].real() * w[i], a[i].imag() * w[i]);
}

void s_axpy(cd* y, cd alpha, const cd* x, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cd(y[i].real() + (pr * xr - pi * xi), y[i].imag() + (pi * xr + pr * xi));
  }
}

void s_scale(cd* y, cd alpha, std::size_t n) {
  const double pr = alpha.real(), pi = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    const double yr = y[i].real(), yi = y[i].imag();
    y[i] = cd(yr * pr - yi * pi, yi * pr + yr * pi);
  }
}

double s_sum_abs2(const cd* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

double s_max_abs2(const cd* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  return m;
}

const Ops kScalar = {"scalar", s_cmul,  s_cmul_conj2, s_triple,
                     s_rmul,   s_axpy,  s_scale,      s_sum_abs2,
                     s_max_abs2};

const Ops* pick() {
  if (const char* sel = std::getenv("RNLS_KERNELS")) {
    if (std::strcmp(sel, "scalar") == 0) return &kScalar;
    if (std::strcmp(sel, "avx2") == 0) {
      const Ops* v = avx2_ops();
      require(v != nullptr, "RNLS_KERNELS=avx2 but AVX2 unsupported on this CPU");
      return v;
    }
    throw contract_error(std::string("unknown RNLS_KERNELS value: ") + sel);
  }
  if (const Ops* v = avx2_ops()) return v;
  return &kScalar;
}

}  // namespace

const Ops& scalar_ops() { return kScalar; }

const Ops& ops() {
  static const Ops* active = pick();
  return *active;
}

}  // namespace rnls::kern
