#include "rnls/tailfit.hpp"

#include <algorithm>
#include <cmath>

#include "rnls/common.hpp"

namespace rnls::tail {

TailFit fit_survival_tail(std::vector<double> samples, int min_exceed) {
  require(min_exceed >= 1, "tail fit: min_exceed must be positive");
  TailFit fit;
  const auto n = static_cast<long>(samples.size());
  std::sort(samples.begin(), samples.end());

  // Thresholds at geometrically spaced exceedance counts between n/4 (the
  // upper quartile) and min_exceed: roughly even coverage of log(-log P), so
  // the regression is not dominated by the distribution's body.
  const long c_hi = n / 4, c_lo = min_exceed;
  if (c_hi <= c_lo) return fit;  // too few samples; stays unreliable

  std::vector<double> lx, ly;
  const int n_bins = 12;
  double last_lam = -1.0;
  for (int b = 0; b < n_bins; ++b) {
    const double frac = b / (n_bins - 1.0);
    const auto c = static_cast<long>(std::lround(
        c_hi * std::pow(static_cast<double>(c_lo) / c_hi, frac)));
    const double lam = samples[static_cast<std::size_t>(n - 1 - c)];
    if (lam <= 0.0 || lam == last_lam) continue;
    last_lam = lam;
    const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), lam);
    if (above < min_exceed) continue;
    const double phat = static_cast<double>(above) / n;
    if (phat >= 0.95) continue;
    lx.push_back(std::log(lam));
    ly.push_back(std::log(-std::log(phat)));
    fit.lambda.push_back(lam);
    fit.p_hat.push_back(phat);
  }

  fit.bins_used = static_cast<int>(lx.size());
  if (fit.bins_used < 2) return fit;
  const double m = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom <= 0.0) return fit;
  fit.theta = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.theta * sx) / m;
  if (lx.size() > 2) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      const double r = ly[i] - (fit.intercept + fit.theta * lx[i]);
      ss_res += r * r;
    }
    fit.theta_stderr = std::sqrt(ss_res / (m - 2.0) / (sxx - sx * sx / m));
  }
  fit.reliable = fit.bins_used >= 4 && n >= 100;
  return fit;
}

}  // namespace rnls::tail
