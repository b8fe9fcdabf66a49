#include <immintrin.h>

#include <algorithm>

#include "rnls/kernels.hpp"

// AVX2 variants. Two complex doubles per 256-bit vector, interleaved re/im.
// Every map kernel mirrors the scalar operation sequence exactly (products,
// then add/sub via addsub or sign-flip tricks), giving bitwise-equal output.

namespace rnls::kern {
namespace {

// [a0r*b0r - a0i*b0i, a0i*b0r + a0r*b0i, ...]
inline __m256d vcmul(__m256d va, __m256d vb) {
  __m256d bre = _mm256_movedup_pd(vb);          // [br0,br0,br1,br1]
  __m256d bim = _mm256_permute_pd(vb, 0xF);     // [bi0,bi0,bi1,bi1]
  __m256d asw = _mm256_permute_pd(va, 0x5);     // [ai0,ar0,ai1,ar1]
  return _mm256_addsub_pd(_mm256_mul_pd(va, bre), _mm256_mul_pd(asw, bim));
}

inline __m256d vconj(__m256d v) {
  const __m256d mask = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
  return _mm256_xor_pd(v, mask);
}

void v_cmul(cd* out, const cd* a, const cd* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d vb = _mm256_loadu_pd(reinterpret_cast<const double*>(b + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), vcmul(va, vb));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cd(ar * br - ai * bi, ai * br + ar * bi);
  }
}

void v_cmul_conj2(cd* out, const cd* a, const cd* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d vb = vconj(_mm256_loadu_pd(reinterpret_cast<const double*>(b + i)));
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), vcmul(va, vb));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = cd(ar * br + ai * bi, ai * br - ar * bi);
  }
}

void v_triple(cd* out, const cd* a, const cd* b, const cd* c, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d vb = vconj(_mm256_loadu_pd(reinterpret_cast<const double*>(b + i)));
    __m256d vc = _mm256_loadu_pd(reinterpret_cast<const double*>(c + i));
    __m256d t = vcmul(va, vb);
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), vcmul(t, vc));
  }
  for (; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    const double tr = ar * br + ai * bi;
    const double ti = ai * br - ar * bi;
    const double cr = c[i].real(), ci = c[i].imag();
    out[i] = cd(tr * cr - ti * ci, ti * cr + tr * ci);
  }
}

void v_rmul(cd* out, const cd* a, const double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m128d wlo = _mm_loadu_pd(w + i);
    __m256d vw = _mm256_permute4x64_pd(_mm256_castpd128_pd256(wlo), 0x50);
    _mm256_storeu_pd(reinterpret_cast<double*>(out + i), _mm256_mul_pd(va, vw));
  }
  for (; i < n; ++i) out[i] = cd(a[i].real() * w[i], a[i].imag() * w[i]);
}

void v_axpy(cd* y, cd alpha, const cd* x, std::size_t n) {
  const __m256d va = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(reinterpret_cast<const double*>(x + i));
    __m256d vy = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i),
                     _mm256_add_pd(vy, vcmul(va, vx)));
  }
  const double pr = alpha.real(), pi = alpha.imag();
  for (; i < n; ++i) {
    const double xr = x[i].real(), xi = x[i].imag();
    y[i] = cd(y[i].real() + (pr * xr - pi * xi), y[i].imag() + (pi * xr + pr * xi));
  }
}

void v_scale(cd* y, cd alpha, std::size_t n) {
  const __m256d va = _mm256_setr_pd(alpha.real(), alpha.imag(), alpha.real(), alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vy = _mm256_loadu_pd(reinterpret_cast<double*>(y + i));
    _mm256_storeu_pd(reinterpret_cast<double*>(y + i), vcmul(vy, va));
  }
  const double pr = alpha.real(), pi = alpha.imag();
  for (; i < n; ++i) {
    const double yr = y[i].real(), yi = y[i].imag();
    y[i] = cd(yr * pr - yi * pi, yi * pr + yr * pi);
  }
}

double v_sum_abs2(const cd* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double s = (lane[0] + lane[1]) + (lane[2] + lane[3]);
  for (; i < n; ++i)
    s += a[i].real() * a[i].real() + a[i].imag() * a[i].imag();
  return s;
}

double v_max_abs2(const cd* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(reinterpret_cast<const double*>(a + i));
    __m256d sq = _mm256_mul_pd(v, v);
    acc = _mm256_max_pd(acc, _mm256_hadd_pd(sq, sq));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double m = std::max(std::max(lane[0], lane[1]), std::max(lane[2], lane[3]));
  for (; i < n; ++i)
    m = std::max(m, a[i].real() * a[i].real() + a[i].imag() * a[i].imag());
  return m;
}

const Ops kAvx2 = {"avx2",  v_cmul,  v_cmul_conj2, v_triple,
                   v_rmul,  v_axpy,  v_scale,      v_sum_abs2,
                   v_max_abs2};

}  // namespace

const Ops* avx2_ops() {
  return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

}  // namespace rnls::kern
