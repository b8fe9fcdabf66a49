#pragma once

#include <vector>

namespace rnls::tail {

// Fit of a stretched-exponential survival law P(X > lam) ~ exp(-c lam^theta):
// least squares of log(-log Phat) against log lam over quantile-spaced
// thresholds between the median and the far tail, keeping only thresholds
// with at least min_exceed exceedances so each Phat is statistically firm.
struct TailFit {
  double theta = 0.0;         // stretch exponent; 2 for Gaussian-type tails
  double intercept = 0.0;     // log c
  double theta_stderr = 0.0;  // regression standard error of theta
  int bins_used = 0;
  bool reliable = false;  // >= 4 usable thresholds and >= 100 samples
  // Thresholds actually used and their empirical survival fractions, for
  // plotting and persistence alongside the fitted exponent.
  std::vector<double> lambda;
  std::vector<double> p_hat;
};

TailFit fit_survival_tail(std::vector<double> samples, int min_exceed = 20);

}  // namespace rnls::tail
