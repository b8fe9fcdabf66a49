#pragma once

#include <cstdint>
#include <functional>

#include "rnls/grid.hpp"

namespace rnls::rand {

// Standard complex Gaussian coefficient g_k for unit cell k, drawn by a
// stateless counter-based generator: the value depends only on
// (seed, sample, k, K), never on evaluation order or thread count. Re and Im
// are independent N(0, 1/2), so E|g|^2 = 1.
cd gaussian_coeff(std::uint64_t seed, std::uint64_t sample,
                  const std::array<int, 3>& k, int d, int K);

// Wiener randomization at unit scale: sum over |k|_inf <= K of
// g_k(omega) Q_k f, a random radial-free Fourier multiplier. Determinism,
// support, and second moments are inherited bin-by-bin. Requires the grid to
// resolve K + 1. Returns frequency rep.
Field randomize(const Field& f, int K, std::uint64_t seed, std::uint64_t sample);

// Same accumulation with caller-supplied coefficients (e.g. the constant 1,
// which reproduces f on frequencies |xi|_inf <= K by the partition of unity).
Field randomize_with(const Field& f, int K,
                     const std::function<cd(const std::array<int, 3>&)>& coeff);

// A reusable randomized datum: base profile + lattice extent + seed.
struct RandomizedDatum {
  Field base;
  int K = 0;
  std::uint64_t seed = 0;
  Field sample(std::uint64_t index) const { return randomize(base, K, seed, index); }
};

// Monte Carlo check of E||f^omega||_{L^2}^2 against the exact value
// sum_xi |f_hat|^2 (sum_k psi(xi-k)^2) L^d. On data supported on the integer
// frequency lattice the weight collapses to 1 and the exact value is
// ||f||_{L^2}^2 itself.
struct MomentReport {
  double empirical_mean = 0.0;
  double exact_mean = 0.0;
  double rel_err = 0.0;
  int n_samples = 0;
};
MomentReport moment_check(const Field& f, int K, std::uint64_t seed, int n_samples);

// The multiplier weight sum_{|k|_inf <= K} psi(xi - k)^2 at one frequency bin;
// always within [2^-d, 1] on covered frequencies, exactly 1 on integer xi.
double sq_weight(const Grid& g, std::size_t lin, int K);

}  // namespace rnls::rand
