#include "rnls/solver.hpp"

#include <cmath>
#include <limits>

#include "rnls/kernels.hpp"
#include "rnls/multilinear.hpp"
#include "rnls/norms.hpp"

namespace rnls::solver {

namespace {

// Both window norms poison on non-finite slices: NaN must surface as
// +infinity, never be dropped by a false NaN comparison inside max().
double monitor_norm(const SpaceTimeField& u, double sigma) {
  double m = 0.0;
  for (const auto& sl : u.s) {
    const double v = norms::sobolev_norm(sl, sigma);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, v);
  }
  return m;
}

double update_size(const SpaceTimeField& a, const SpaceTimeField& b, double sigma) {
  double m = 0.0;
  for (int j = 0; j < a.nt(); ++j) {
    Field d = a.s[j] - b.s[j];
    const double v = norms::sobolev_norm(d, sigma);
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, v);
  }
  return m;
}

// Shared fixed-point driver: iterate `map` from `start`, stopping on small
// updates, exhaustion, non-finite values, or sustained growth. The residual
// is the last relative update of the iterate in H^sigma.
template <typename Map>
PicardResult iterate_fixed_point(SpaceTimeField start, const Map& map,
                                 double sigma, const PicardOptions& opts) {
  require(opts.max_iter >= 1, "picard: max_iter must be positive");
  require(opts.tol_fix > 0.0, "picard: tol_fix must be positive");

  PicardResult res{std::move(start), {}};
  PicardReport& rep = res.report;
  rep.sigma = sigma;

  for (int it = 0; it < opts.max_iter; ++it) {
    SpaceTimeField next = map(res.u);
    const double scale = std::max(1.0, monitor_norm(next, sigma));
    const double upd = update_size(next, res.u, sigma) / scale;
    res.u = std::move(next);
    rep.iterations = it + 1;
    rep.history.push_back(upd);
    rep.residual = upd;
    if (!std::isfinite(upd) || !std::isfinite(scale)) break;  // blow-up
    if (upd <= opts.tol_fix) {
      rep.converged = true;
      break;
    }
    const int span = opts.divergence_span;
    if (it >= span && upd > opts.divergence_factor * rep.history[it - span] &&
        upd > 1.0)
      break;  // sustained growth: the map is not contracting here
  }
  rep.monitor = monitor_norm(res.u, sigma);
  if (!std::isfinite(rep.monitor)) rep.converged = false;
  return res;
}

}  // namespace

double default_monitor_sigma(int d) {
  require(d >= 1 && d <= 3, "monitor sigma: dimension out of range");
  return d <= 2 ? 0.5 : (d - 2.0) / 2.0 + 0.25;
}

SpaceTimeField apply_map(const Field& f, const SpaceTimeField& v, prop::Sign sign) {
  require(f.g == v.g, "apply_map: head and iterate live on different grids");
  return prop::duhamel(&f, multi::cubic(v, v, v), sign);
}

PicardResult picard_solve(const Field& f, prop::Sign sign, int j0, int nt,
                          const PicardOptions& opts) {
  const double sigma =
      opts.monitor_sigma >= 0.0 ? opts.monitor_sigma : default_monitor_sigma(f.g->d);
  return iterate_fixed_point(
      prop::free_evolution(f, j0, nt),
      [&](const SpaceTimeField& v) { return apply_map(f, v, sign); }, sigma,
      opts);
}

PicardResult picard_solve_decomposed(const Field& f, int M, prop::Sign sign,
                                     int j0, int nt,
                                     const PicardOptions& opts) {
  require(M >= 1 && M % 2 == 1,
          "picard decomposed: expansion order must be odd and positive");
  const double sigma =
      opts.monitor_sigma >= 0.0 ? opts.monitor_sigma : default_monitor_sigma(f.g->d);

  const auto zlist = multi::compute_z(f, M, j0, nt, sign);
  const SpaceTimeField z = multi::z_sum(zlist);
  const SpaceTimeField tail = multi::tail_forcing(zlist);
  const SpaceTimeField zzz = multi::cubic(z, z, z);
  const int n = z.nt();

  auto map = [&](const SpaceTimeField& w) {
    SpaceTimeField u = z;
    for (int j = 0; j < n; ++j) u.s[j] += w.s[j];
    SpaceTimeField h = multi::cubic(u, u, u);
    for (int j = 0; j < n; ++j) {
      h.s[j] -= zzz.s[j];
      h.s[j] += tail.s[j];
    }
    return prop::duhamel(nullptr, h, sign);
  };
  PicardResult res = iterate_fixed_point(
      SpaceTimeField::zeros(f.g, Rep::frequency, nt, j0), map, sigma, opts);
  for (int j = 0; j < n; ++j) res.u.s[j] += z.s[j];
  res.report.monitor = monitor_norm(res.u, sigma);
  if (!std::isfinite(res.report.monitor)) res.report.converged = false;
  return res;
}

SpaceTimeField splitstep_reference(const Field& f, prop::Sign sign, int j0, int nt) {
  GridPtr g = f.g;
  require(nt >= 2 && j0 >= 0 && j0 + nt <= g->n_t,
          "splitstep: window outside time lattice");
  const double dt = g->dt;
  const double half = -0.5 * dt * sign.value;  // nonlinear phase: e^{-i kappa |u|^2 dt/2}

  prop::PropagatorTable table(g);
  auto step_phases = table.get(dt);

  SpaceTimeField out = SpaceTimeField::zeros(g, Rep::frequency, nt, j0);
  Field state = to_phys(f);
  out.s[0] = to_freq(state);

  Field freq = Field::zeros(g, Rep::frequency);
  for (int i = 1; i < nt; ++i) {
    for (auto& z : state.v) z *= std::polar(1.0, half * std::norm(z));
    freq = fft(state);
    kern::ops().cmul(freq.v.data(), freq.v.data(), step_phases->data(),
                     g->n_total);
    state = ifft(freq);
    for (auto& z : state.v) z *= std::polar(1.0, half * std::norm(z));
    out.s[i] = to_freq(state);
  }
  return out;
}

double existence_time_heuristic(const Field& f, prop::Sign sign, int j0,
                                const PicardOptions& opts) {
  const Grid& g = *f.g;
  require(j0 >= 0 && j0 + 2 <= g.n_t, "existence time: window start too late");
  auto converges = [&](int steps) {
    return picard_solve(f, sign, j0, steps + 1, opts).report.converged;
  };
  const int max_steps = g.n_t - 1 - j0;
  if (!converges(1)) return 0.0;
  if (converges(max_steps)) return g.dt * max_steps;
  int lo = 1, hi = max_steps;  // converges(lo), !converges(hi)
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (converges(mid) ? lo : hi) = mid;
  }
  return g.dt * lo;
}

}  // namespace rnls::solver
