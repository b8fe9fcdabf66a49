// Acceptance suite: one criterion per function, one pass/fail line each.
// Run everything, or a single criterion with --only N (N in 1..11).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rnls/experiments.hpp"
#include "rnls/harness.hpp"
#include "rnls/multilinear.hpp"
#include "rnls/norms.hpp"
#include "rnls/projections.hpp"
#include "rnls/propagator.hpp"
#include "rnls/randomization.hpp"
#include "rnls/solver.hpp"

using namespace rnls;

namespace {

char detail_buf[1024];

void detail(const char* msg) {
  std::snprintf(detail_buf, sizeof detail_buf, "%s", msg);
}

template <typename A, typename... Args>
void detail(const char* fmt, A a0, Args... args) {
  std::snprintf(detail_buf, sizeof detail_buf, fmt, a0, args...);
}

Field smooth_datum(GridPtr g, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Field f = Field::zeros(g, Rep::frequency);
  for (std::size_t lin = 0; lin < g->n_total; ++lin) {
    const double m2 = static_cast<double>(g->m2(lin));
    f.v[lin] = scale * std::exp(-m2 / 2.0) * cd(gauss(rng), gauss(rng));
  }
  return f;
}

Field random_band(GridPtr g, std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> gauss;
  Field f = Field::zeros(g, Rep::frequency);
  for (std::size_t lin = 0; lin < g->n_total; ++lin) {
    const double xi = std::sqrt(static_cast<double>(g->m2(lin))) / g->L;
    if (xi <= radius) f.v[lin] = cd(gauss(rng), gauss(rng));
  }
  return f;
}

// sup over the window of the L^2 distance between slices.
double sup_l2_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
  double m = 0.0;
  for (int j = 0; j < a.nt(); ++j) {
    Field d = a.s[j] - b.s[j];
    m = std::max(m, l2_norm(d));
  }
  return m;
}

// --- 1: tree combinatorics ---------------------------------------------------

long long oracle_tree_count(int k, std::map<int, long long>& memo) {
  if (k == 1) return 1;
  if (k < 1 || k % 2 == 0) return 0;  // three odd parts sum odd: T_even empty
  auto it = memo.find(k);
  if (it != memo.end()) return it->second;
  long long total = 0;
  for (int a = 1; a <= k - 2; a += 2)
    for (int b = 1; a + b <= k - 1; b += 2) {
      const int c = k - a - b;
      if (c >= 1)
        total += oracle_tree_count(a, memo) * oracle_tree_count(b, memo) *
                 oracle_tree_count(c, memo);
    }
  memo[k] = total;
  return total;
}

bool crit_1() {
  const long long expect[] = {1, 1, 3, 12, 55};
  std::map<int, long long> memo;
  for (int i = 0; i < 5; ++i) {
    const int k = 2 * i + 1;
    const long long n_lib = multi::count_trees(k);
    const long long n_enum = static_cast<long long>(multi::enumerate_trees(k).size());
    const long long n_oracle = oracle_tree_count(k, memo);
    if (n_lib != expect[i] || n_enum != expect[i] || n_oracle != expect[i]) {
      detail("k=%d: count=%lld enumerate=%lld oracle=%lld want=%lld", k, n_lib,
             n_enum, n_oracle, expect[i]);
      return false;
    }
  }
  // Even orders: the oracle recursion has no decomposition into three odd
  // parts, and the library refuses even orders outright.
  for (int k : {2, 4, 6, 8}) {
    if (oracle_tree_count(k, memo) != 0) {
      detail("oracle found trees of even order %d", k);
      return false;
    }
    bool rejected = false;
    try {
      multi::count_trees(k);
    } catch (const contract_error&) {
      rejected = true;
    }
    if (!rejected) {
      detail("count_trees accepted even order %d", k);
      return false;
    }
  }
  detail("counts 1,1,3,12,55 vs oracle; even orders empty and rejected");
  return true;
}

// --- 2: mu ladder -------------------------------------------------------------

bool crit_2() {
  int points = 0;
  for (int k : {1, 3, 5, 7, 9}) {
    for (int j = 0; j < 2000; ++j) {
      const double S = 2.0 * j / 1999.0;
      const double direct = std::min({k * S, 2.0 * S + 0.5, S + 1.0});
      if (multi::mu(k, S) != direct) {
        detail("mu(%d, %.17g) = %.17g, direct min gives %.17g", k, S,
               multi::mu(k, S), direct);
        return false;
      }
      ++points;
    }
  }
  int checked = 0;
  for (int i = 1; i <= 20; ++i) {
    const double S = 0.05 * i;
    if (!multi::mu_inductive_check(S, 9)) {
      detail("inductive closure violated at S=%.2f", S);
      return false;
    }
    ++checked;
  }
  detail("exact on %d (k,S) points; inductive closure clean at %d regularities",
         points, checked);
  return true;
}

// --- 3: expansion identity ------------------------------------------------------

bool crit_3() {
  auto g = Grid::make(1, 256, 4.0, 128, 0.5);
  Field f = smooth_datum(g, 31, 0.4);
  const auto sign = prop::make_sign(+1);
  const auto z = multi::compute_z(f, 5, 0, g->n_t, sign);

  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int k = 2 * i + 1;
    SpaceTimeField sum = SpaceTimeField::zeros(g, Rep::frequency, g->n_t, 0);
    for (const auto& t : multi::enumerate_trees(k)) {
      const SpaceTimeField rt = multi::tree_operator(*t, f, 0, g->n_t, sign);
      for (int j = 0; j < g->n_t; ++j) sum.s[j] += rt.s[j];
    }
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g->n_t; ++j) {
      Field d = sum.s[j] - z[static_cast<std::size_t>(i)].s[j];
      num = std::max(num, l2_norm(d));
      den = std::max(den, l2_norm(z[static_cast<std::size_t>(i)].s[j]));
    }
    worst = std::max(worst, num / den);
  }
  if (worst > 1e-10) {
    detail("tree sum vs recursion rel err %.3g > 1e-10", worst);
    return false;
  }

  // One application of the integral map to z1 yields z1 + z3 on the nose.
  const SpaceTimeField mapped =
      prop::duhamel(&f, multi::cubic(z[0], z[0], z[0]), sign);
  SpaceTimeField expect = z[0];
  for (int j = 0; j < g->n_t; ++j) expect.s[j] += z[1].s[j];
  double num = 0.0, den = 0.0;
  for (int j = 0; j < g->n_t; ++j) {
    Field d = mapped.s[j] - expect.s[j];
    num = std::max(num, l2_norm(d));
    den = std::max(den, l2_norm(expect.s[j]));
  }
  if (num / den > 1e-10) {
    detail("duhamel(f, |z1|^2 z1) vs z1+z3 rel err %.3g > 1e-10", num / den);
    return false;
  }
  detail("tree sums match z_k to %.2g; head identity to %.2g", worst, num / den);
  return true;
}

// --- 4: exact identities suite ---------------------------------------------------

bool crit_4() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uxi(-3.0, 3.0), ut(0.0, 0.1);
  auto g1 = Grid::make(1, 64, 4.0, 9, 0.25);
  auto g3 = Grid::make(3, 16, 2.0, 9, 0.25);

  // Unit-cell bump translates sum to one at 100 random points per dimension.
  for (int d : {1, 2, 3}) {
    for (int i = 0; i < 100; ++i) {
      std::array<double, 3> xi = {uxi(rng), d >= 2 ? uxi(rng) : 0.0,
                                  d >= 3 ? uxi(rng) : 0.0};
      double sum = 0.0;
      for (int k0 = -4; k0 <= 4; ++k0)
        for (int k1 = d >= 2 ? -4 : 0; k1 <= (d >= 2 ? 4 : 0); ++k1)
          for (int k2 = d >= 3 ? -4 : 0; k2 <= (d >= 3 ? 4 : 0); ++k2) {
            sum += proj::psi({xi[0] - k0, xi[1] - k1, xi[2] - k2}, d);
          }
      if (std::abs(sum - 1.0) > 1e-12) {
        detail("psi partition off by %.3g at a d=%d point", sum - 1.0, d);
        return false;
      }
    }
  }

  // Dyadic shells partition band-limited fields; fattened fixes sharp;
  // cones partition away from the zero mode.
  for (int i = 0; i < 100; ++i) {
    const bool low = i % 2 == 0;
    GridPtr g = low ? g1 : g3;
    const double top = low ? 8.0 : 4.0;
    Field f = random_band(g, rng, top * (1.0 - 1.0 / 256.0));
    Field sum = Field::zeros(g, Rep::frequency);
    for (double N = 1.0; N <= top; N *= 2.0) sum += proj::lp_project(f, N);
    sum -= f;
    if (l2_norm(sum) > 1e-12 * l2_norm(f)) {
      detail("dyadic partition defect %.3g", l2_norm(sum));
      return false;
    }
    Field pn = proj::lp_project(f, 2.0);
    Field fixed = proj::lp_project_mod(pn, 2.0);
    fixed -= pn;
    if (l2_norm(fixed) > 1e-12) {
      detail("fattened projection moved a sharp shell by %.3g", l2_norm(fixed));
      return false;
    }
    if (!low) {
      Field h = f;
      h.v[g->index_of({0, 0, 0})] = cd(0, 0);
      Field csum = Field::zeros(g, Rep::frequency);
      for (int l = 0; l < 3; ++l) csum += proj::cone_project(h, l);
      csum -= h;
      if (l2_norm(csum) > 1e-12) {
        detail("cone partition defect %.3g", l2_norm(csum));
        return false;
      }
    }
  }

  // Free group: isometry and composition, 100 random (f, s, t).
  for (int i = 0; i < 100; ++i) {
    Field f = random_band(g3, rng, 4.0);
    const double s = ut(rng), t = ut(rng);
    if (std::abs(l2_norm(prop::propagate(f, t)) - l2_norm(f)) >
        1e-12 * l2_norm(f)) {
      detail("propagator is not an isometry");
      return false;
    }
    Field a = prop::propagate(f, s + t);
    Field b = prop::propagate(prop::propagate(f, s), t);
    b -= a;
    if (l2_norm(b) > 1e-12 * l2_norm(f)) {
      detail("group law defect %.3g", l2_norm(b));
      return false;
    }
  }

  // Parity z_{2k} = 0: the solution map is odd, so u(-f) = -u(f); IEEE
  // negation is exact, and any even-order content would break the sign flip.
  const auto sgn = prop::make_sign(+1);
  for (int i = 0; i < 100; ++i) {
    Field f = random_band(g1, rng, 2.0);
    const double nf = l2_norm(f);
    for (auto& zv : f.v) zv *= 0.05 / nf;
    Field fm = f;
    for (auto& zv : fm.v) zv = -zv;
    const auto up = solver::picard_solve(f, sgn, 0, g1->n_t);
    const auto um = solver::picard_solve(fm, sgn, 0, g1->n_t);
    double worst = 0.0;
    for (int j = 0; j < g1->n_t; ++j) {
      Field sum = up.u.s[j];
      sum += um.u.s[j];
      worst = std::max(worst, l2_norm(sum));
    }
    if (worst > 1e-10) {
      detail("odd-parity defect %.3g", worst);
      return false;
    }
  }

  // Fourier support of z_k grows at most k-fold, 100 random band-limited data.
  for (int i = 0; i < 100; ++i) {
    Field f = random_band(g1, rng, 1.0);
    const auto z = multi::compute_z(f, 5, 0, g1->n_t, sgn);
    for (std::size_t ord = 0; ord < z.size(); ++ord) {
      const double k = 2.0 * static_cast<double>(ord) + 1.0;
      for (int j = 0; j < g1->n_t; ++j) {
        const Field& slice = z[ord].s[j];
        for (std::size_t lin = 0; lin < g1->n_total; ++lin) {
          if (std::abs(slice.v[lin]) > 1e-12) {
            const double xi =
                std::sqrt(static_cast<double>(g1->m2(lin))) / g1->L;
            if (xi > k * 1.0 + 1e-10) {
              detail("z_%d support reached |xi| = %.3g > %g", int(k), xi, k);
              return false;
            }
          }
        }
      }
    }
  }

  detail("partitions, projections, group laws, parity, support growth: "
         "100 random inputs each");
  return true;
}

// --- 5: solver vs oracle ---------------------------------------------------------

bool crit_5() {
  const double L = 2.0 * kPi, T = 0.5;
  solver::PicardOptions opts;
  opts.tol_fix = 1e-8;

  auto gap_at = [&](int n_t, double* m_gap) {
    auto g = Grid::make(1, 64, L, n_t, T);
    Field f = smooth_datum(g, 13, 0.25);
    auto u1 = solver::picard_solve_decomposed(f, 1, prop::make_sign(+1), 0, n_t,
                                              opts);
    if (!u1.report.converged || u1.report.residual > opts.tol_fix) return -1.0;
    SpaceTimeField ref =
        solver::splitstep_reference(f, prop::make_sign(+1), 0, n_t);
    if (m_gap) {
      auto u3 = solver::picard_solve_decomposed(f, 3, prop::make_sign(+1), 0,
                                                n_t, opts);
      if (!u3.report.converged) return -1.0;
      *m_gap = sup_l2_diff(u1.u, u3.u);
    }
    return sup_l2_diff(u1.u, ref);
  };

  double m_gap = -1.0;
  const double err_coarse = gap_at(256, &m_gap);
  const double err_fine = gap_at(511, nullptr);  // dt exactly halved
  if (err_coarse < 0.0 || err_fine < 0.0) {
    detail("a picard route failed to converge at tol 1e-8");
    return false;
  }
  const double ratio = err_coarse / err_fine;
  const bool ok = err_coarse <= 1e-4 && ratio >= 3.0 && ratio <= 5.0 &&
                  m_gap <= 1e-7;
  detail("oracle gap %.3g (<= 1e-4), dt-halving ratio %.2f (in [3,5]), "
         "M=1 vs M=3 gap %.3g (<= 1e-7)",
         err_coarse, ratio, m_gap);
  return ok;
}

// --- 6: soliton oracle -----------------------------------------------------------

bool crit_6() {
  const int n = 1024, n_t = 1024;
  const double L = 32.0, T = 1.0, x0 = 16.0;
  auto g = Grid::make(1, n, L, n_t, T);

  Field f = Field::zeros(g, Rep::physical);
  for (int i = 0; i < n; ++i) {
    const double x = g->dx * i;
    f.v[static_cast<std::size_t>(i)] = std::sqrt(2.0) / std::cosh(x - x0);
  }
  const SpaceTimeField u =
      solver::splitstep_reference(to_freq(f), prop::make_sign(-1), 0, n_t);

  double worst = 0.0;
  for (int j = 0; j < n_t; ++j) {
    const Field slice = to_phys(u.s[j]);
    const cd phase = std::polar(1.0, g->t(j));
    for (int i = 0; i < n; ++i) {
      const double x = g->dx * i;
      const cd exact = std::sqrt(2.0) * phase / std::cosh(x - x0);
      worst = std::max(worst,
                       std::abs(slice.v[static_cast<std::size_t>(i)] - exact));
    }
  }
  detail("sup_x,t |u - sqrt(2) e^{it} sech(x-%g)| = %.3g (<= 1e-3)", x0, worst);
  return worst <= 1e-3;
}

// --- 7: randomization moments ------------------------------------------------------

bool crit_7() {
  // Datum on the integer-frequency lattice: each mode sits at the center of
  // its randomization cell, where the window is exactly 1 and every other
  // cell's window vanishes, so E||f^omega||^2 = ||f||^2 by Plancherel alone.
  auto g = Grid::make(3, 16, 2.0, 2, 0.1);
  const int K = 3;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  Field f = Field::zeros(g, Rep::frequency);
  int cells = 0;
  for (int m0 = -K; m0 <= K; ++m0)
    for (int m1 = -K; m1 <= K; ++m1)
      for (int m2 = -K; m2 <= K; ++m2) {
        const std::array<int, 3> m = {
            m0 * static_cast<int>(g->L), m1 * static_cast<int>(g->L),
            m2 * static_cast<int>(g->L)};
        f.v[g->index_of(m)] = cd(gauss(rng), gauss(rng));
        ++cells;
      }
  const double base = std::pow(l2_norm(f), 2);

  const int n_samples = 2000;
  double mean = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Field fw = rand::randomize(f, K, 77, static_cast<std::uint64_t>(i));
    mean += std::pow(l2_norm(fw), 2) / n_samples;
  }
  const double rel = std::abs(mean - base) / base;
  detail("mean ||f^omega||^2 off by %.3g relative (<= 0.05), %d samples, "
         "%d cells",
         rel, n_samples, cells);
  return rel <= 0.05;
}

// --- 8: tail exponents -----------------------------------------------------------

bool crit_8() {
  auto g = Grid::make(3, 32, 4.0, 9, 0.25);
  expt::DatumSpec spec;
  spec.kind = expt::DatumKind::lattice_bump;
  spec.S = 0.4;
  spec.ell = {2, 0, 0};

  expt::TailConfig c1;
  c1.k = 1;
  c1.n_samples = 5000;
  c1.seed = 2024;
  c1.K = 2;
  c1.S = 0.4;
  c1.primary = expt::TailNorm::c0_sobolev;
  c1.record_y = false;
  c1.nt = g->n_t;
  const auto r1 = expt::run_tail_experiment(g, spec, c1);

  expt::TailConfig c3 = c1;
  c3.k = 3;
  c3.n_samples = 2000;
  c3.seed = 2025;
  c3.primary = expt::TailNorm::y_engine;
  c3.record_y = true;
  const auto r3 = expt::run_tail_experiment(g, spec, c3);

  const bool ok = r1.fit.reliable && r3.fit.reliable &&
                  r1.fit.theta >= 1.2 && r1.fit.theta <= 2.8 &&
                  r3.fit.theta >= 0.4 && r3.fit.theta <= 1.0;
  detail("theta(k=1) = %.3f in [1.2,2.8]; theta(k=3) = %.3f in [0.4,1.0]",
         r1.fit.theta, r3.fit.theta);
  return ok;
}

// --- 9: smoothing gain ------------------------------------------------------------

bool crit_9() {
  auto g = Grid::make(3, 128, 4.0, 33, 0.1);
  expt::DatumSpec spec;
  spec.kind = expt::DatumKind::power_law;
  spec.S = 0.2;
  spec.N_top = 8.0;

  expt::SmoothingConfig cfg;
  cfg.S = 0.2;
  cfg.n_samples = 20;
  cfg.seed = 2026;
  cfg.K = 8;
  cfg.shells = {2.0, 4.0, 8.0};
  cfg.nt = g->n_t;
  const auto r = expt::run_smoothing_experiment(g, spec, cfg);

  detail("slope gain %.3f over %d samples (need >= %.2f, predicted %.2f)",
         r.gain, cfg.n_samples, cfg.S, r.predicted_gain);
  return r.gain >= cfg.S;
}

// --- 10: estimate scaling fits -------------------------------------------------------

bool crit_10() {
  expt::ScalingConfig base;
  base.n = 32;
  base.L = 4.0;
  base.N_set = {1.0, 2.0, 4.0};
  base.n_samples = 30;
  base.theta_window = 0.25;
  base.nt = 33;

  expt::ScalingConfig cm = base;
  cm.lemma = expt::Lemma::dir_maximal;
  cm.c = kInf;
  cm.seed = 2027;
  const auto rm = expt::run_estimate_scaling(cm);

  expt::ScalingConfig cs = base;
  cs.lemma = expt::Lemma::dir_smoothing;
  cs.c = 2.0;
  cs.seed = 2028;
  const auto rs = expt::run_estimate_scaling(cs);

  expt::ScalingConfig cb = base;
  cb.lemma = expt::Lemma::bilinear;
  cb.seed = 2029;
  const auto rb = expt::run_estimate_scaling(cb);

  const bool ok = std::abs(rm.fitted - rm.predicted) <= 0.35 &&
                  std::abs(rs.fitted - rs.predicted) <= 0.35 &&
                  rb.max_ratio < 20.0;
  detail("maximal %.3f vs %.1f, smoothing %.3f vs %.1f (both +-0.35); "
         "bilinear ratio %.3g < 20",
         rm.fitted, rm.predicted, rs.fitted, rs.predicted, rb.max_ratio);
  return ok;
}

// --- 11: harness reproducibility ------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool same_results(const std::filesystem::path& a,
                  const std::filesystem::path& b) {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(a))
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      names.push_back(e.path().filename().string());
  if (names.empty()) return false;
  for (const auto& name : names)
    if (!fs::exists(b / name) || slurp(a / name) != slurp(b / name))
      return false;
  return true;
}

bool crit_11() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "rnls_acceptance_11";
  fs::remove_all(root);

  const std::vector<std::string> smoothing = {
      "montecarlo", "--d", "3", "--n", "16", "--L", "2", "--nt", "5",
      "--datum", "power_law:0.2:4", "--experiment", "smoothing",
      "--samples", "6", "--K", "3", "--shells", "1,2,4", "--seed", "5"};
  const std::vector<std::string> tail = {
      "montecarlo", "--d", "3", "--n", "16", "--L", "2", "--nt", "5",
      "--datum", "lattice_bump:0.4:2,0,0", "--experiment", "tail",
      "--k", "3", "--samples", "40", "--K", "2", "--seed", "9"};

  int runs = 0;
  auto run = [&](const std::vector<std::string>& base, const std::string& sub,
                 const char* workers) {
    std::vector<std::string> args = base;
    args.insert(args.end(),
                {"--workers", workers, "--out", (root / sub).string()});
    ++runs;
    return harness::cli_run(args) == 0;
  };

  if (!run(smoothing, "s1", "1") || !run(smoothing, "s2", "1") ||
      !run(smoothing, "s4", "4") || !run(tail, "t1", "1") ||
      !run(tail, "t2", "1") || !run(tail, "t4", "4")) {
    detail("a harness run exited nonzero");
    return false;
  }
  const bool rerun_ok =
      same_results(root / "s1", root / "s2") && same_results(root / "t1", root / "t2");
  const bool pool_ok =
      same_results(root / "s1", root / "s4") && same_results(root / "t1", root / "t4");
  const bool verified = harness::verify_results((root / "s1").string()).empty() &&
                        harness::verify_results((root / "t4").string()).empty();
  detail("%d runs: reruns byte-identical %s, pools {1,4} byte-identical %s, "
         "manifests verify %s",
         runs, rerun_ok ? "yes" : "NO", pool_ok ? "yes" : "NO",
         verified ? "yes" : "NO");
  return rerun_ok && pool_ok && verified;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);
  }

  struct Criterion {
    int id;
    const char* name;
    bool (*fn)();
  };
  const Criterion table[] = {
      {1, "tree combinatorics", crit_1},
      {2, "mu ladder", crit_2},
      {3, "expansion identity", crit_3},
      {4, "exact identities suite", crit_4},
      {5, "solver vs oracle", crit_5},
      {6, "soliton oracle", crit_6},
      {7, "randomization moments", crit_7},
      {8, "tail exponents", crit_8},
      {9, "smoothing gain", crit_9},
      {10, "estimate scaling fits", crit_10},
      {11, "harness reproducibility", crit_11},
  };

  int failures = 0, ran = 0;
  for (const auto& c : table) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    detail_buf[0] = '\0';
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.fn();
    } catch (const std::exception& e) {
      detail("exception: %s", e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::printf("[%s] %2d %-26s %s (%.1f s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name, detail_buf, secs);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "--only %d selects no criterion (1..11)\n", only);
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
