#pragma once

#include <array>

#include "rnls/grid.hpp"

namespace rnls::proj {

// --- scalar multiplier profiles -----------------------------------------

// 1-d unit-scale bump: b(s) = exp(-1/(1-s^2)) on (-1,1), normalized by its
// integer translates. Even, nonnegative, supported on (-1,1), psi1(0) = 1,
// and sum_k psi1(s-k) = 1 identically.
double psi1(double s);
// Tensor product over the first d axes; support is the open l-infinity unit
// ball, and the translates over Z^d form an exact partition of unity.
double psi(const std::array<double, 3>& xi, int d);

// Radial C-infinity cutoff: 1 for r <= 1-2^-8, 0 for r >= 1, monotone in
// between (plateau constant 2^-8 replaces the analysis value 2^-100).
double lp_step(double r);
// Dyadic annulus bump phi_N at radius a = |xi|_2; N = 1 is the core cutoff.
// Scalings by N are exact (powers of two), so the dyadic sum telescopes to
// lp_step(a/N_max) bitwise.
double phi_dyadic(double a, double N);
// chi_N = sum of phi_{N'} over dyadic N' with 1/8 < N'/N < 8 (N' >= 1).
double chi_dyadic(double a, double N);

bool is_pow2_scale(double N);  // N in {1, 2, 4, ...}

// --- grid projections ----------------------------------------------------

// Q_k: multiplier psi(xi - k) around integer cell k, |k|_inf <= K. Requires
// the grid to resolve frequencies up to K+1. Returns frequency rep.
Field unit_project(const Field& f, const std::array<int, 3>& k, int K);

// P_N and the fattened companion; N a power of two >= 1, N <= xi_max.
Field lp_project(const Field& f, double N);
Field lp_project_mod(const Field& f, double N);

// Sharp cone projection U_{e_l}, axes numbered 0..d-1. Cones partition the
// nonzero frequencies: membership is 4d*m_l^2 > |m|^2, ties broken to the
// smallest axis, decided in exact integer arithmetic.
bool in_cone(const Grid& g, std::size_t lin, int l);
Field cone_project(const Field& f, int l);

}  // namespace rnls::proj
