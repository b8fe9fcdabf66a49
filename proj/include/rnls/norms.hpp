#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rnls/grid.hpp"

namespace rnls::norms {

// || (1 + |2 pi xi|^4)^(sigma/4) f_hat ||_{L^2}; sigma = 0 reproduces the L^2
// norm exactly. Either representation accepted.
double sobolev_norm(const Field& f, double sigma);

// L^p_t L^q_x over the field's window, trapezoid in t, p or q may be inf.
double strichartz_norm(const SpaceTimeField& u, double p, double q);

// Mixed directional norm: outer L^a in x_l, middle L^b in t (trapezoid),
// inner L^c over the remaining axes. Axis l is 0-based. a = b = c reproduces
// the full space-time L^p norm.
struct DirectionalSpec {
  int l = 0;
  double a = 2.0, b = 2.0, c = 2.0;
};
double directional_norm(const SpaceTimeField& u, const DirectionalSpec& spec);

// Shell-weighted dispersive norms. c0 = 2(d-1)/(d-2) needs d >= 3, which is
// required for the X/Y families wholesale.
struct XYConfig {
  double eps0 = 1.0 / 16.0;  // in (0, 1/4]
  double sigma = 0.0;        // shell weight exponent
  double N_max = 4.0;        // dyadic shells 1..N_max
};
enum class Family { X, Y };

struct NormBreakdown {
  double total = 0.0;
  // Diagnostic marginals: per component, the l^2 aggregate over shells of its
  // weighted value; per shell N, the weighted contribution N^sigma * ||P_N u||,
  // so total^2 = sum of squared shell entries.
  std::map<std::string, double> components;
  std::map<std::string, double> shells;
};

NormBreakdown xy_norm(const SpaceTimeField& u, Family fam, const XYConfig& cfg);

// Sampled lower bound for the dual pairing sup |int h* h| over ||h*||_{X_N}=1:
// max over n_probes deterministic pseudo-random smooth probes. Nondecreasing
// in n_probes for a fixed seed.
double dual_norm_estimate(const SpaceTimeField& h, double N, const XYConfig& cfg,
                          int n_probes, std::uint64_t seed);

// Least-squares slope of log ||P_N f||_{L^2} against log N over the given
// shells; requires at least 3 shells with nonzero mass. The negated slope
// estimates the Sobolev regularity margin of f.
double spectral_slope(const Field& f, const std::vector<double>& N_set);

}  // namespace rnls::norms
