#pragma once

#include <cstddef>

#include "rnls/common.hpp"

namespace rnls::kern {

// Data-parallel inner loops, runtime-dispatched. Map kernels (cmul..scale)
// are fixed operation sequences -- component products combined with plain
// add/sub, no FMA -- so scalar and AVX2 variants agree bitwise. Reductions
// reassociate and agree to rounding only.
struct Ops {
  const char* name;
  void (*cmul)(cd* out, const cd* a, const cd* b, std::size_t n);        // a*b
  void (*cmul_conj2)(cd* out, const cd* a, const cd* b, std::size_t n);  // a*conj(b)
  void (*triple)(cd* out, const cd* a, const cd* b, const cd* c,
                 std::size_t n);                                          // a*conj(b)*c
  void (*rmul)(cd* out, const cd* a, const double* w, std::size_t n);    // a*w
  void (*axpy)(cd* y, cd alpha, const cd* x, std::size_t n);             // y += alpha*x
  void (*scale)(cd* y, cd alpha, std::size_t n);                         // y *= alpha
  double (*sum_abs2)(const cd* a, std::size_t n);
  double (*max_abs2)(const cd* a, std::size_t n);
};

const Ops& scalar_ops();
// nullptr when AVX2 is unavailable on the executing CPU.
const Ops* avx2_ops();
// Active implementation: AVX2 when supported, overridable via
// RNLS_KERNELS=scalar|avx2 (checked once, at first use).
const Ops& ops();

}  // namespace rnls::kern
