#include "rnls/multilinear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>

#include "rnls/kernels.hpp"

namespace rnls::multi {

namespace {

void check_odd_order(int k, const char* who) {
  require(k >= 1 && k % 2 == 1, std::string(who) + ": order must be odd and positive");
}

std::mutex g_tree_mu;
std::map<int, std::vector<TreePtr>> g_tree_memo;

std::vector<TreePtr> enumerate_locked(int k) {
  auto it = g_tree_memo.find(k);
  if (it != g_tree_memo.end()) return it->second;
  std::vector<TreePtr> out;
  if (k == 1) {
    out.push_back(std::make_shared<Tree>());
  } else {
    for (int a = 1; a <= k - 2; a += 2) {
      for (int b = 1; a + b <= k - 1; b += 2) {
        const int c = k - a - b;
        if (c < 1) continue;
        for (const auto& ta : enumerate_locked(a))
          for (const auto& tb : enumerate_locked(b))
            for (const auto& tc : enumerate_locked(c)) {
              auto t = std::make_shared<Tree>();
              t->ch = {ta, tb, tc};
              out.push_back(std::move(t));
            }
      }
    }
  }
  g_tree_memo[k] = out;
  return out;
}

void check_same_window(const SpaceTimeField& a, const SpaceTimeField& b,
                       const char* who) {
  require(a.g == b.g && a.j0 == b.j0 && a.nt() == b.nt(),
          std::string(who) + ": space-time windows differ");
}

void add_into(SpaceTimeField& acc, const SpaceTimeField& x) {
  check_same_window(acc, x, "window sum");
  for (int j = 0; j < acc.nt(); ++j) acc.s[j] += x.s[j];
}

}  // namespace

int Tree::leaves() const {
  if (leaf()) return 1;
  return ch[0]->leaves() + ch[1]->leaves() + ch[2]->leaves();
}

long long count_trees(int k) {
  check_odd_order(k, "count_trees");
  static std::mutex mu;
  static std::map<int, long long> memo;
  std::lock_guard<std::mutex> lk(mu);
  std::function<long long(int)> rec = [&](int m) -> long long {
    if (m == 1) return 1;
    auto it = memo.find(m);
    if (it != memo.end()) return it->second;
    long long s = 0;
    for (int a = 1; a <= m - 2; a += 2)
      for (int b = 1; a + b <= m - 1; b += 2) {
        const int c = m - a - b;
        if (c >= 1) s += rec(a) * rec(b) * rec(c);
      }
    memo[m] = s;
    return s;
  };
  return rec(k);
}

std::vector<TreePtr> enumerate_trees(int k) {
  check_odd_order(k, "enumerate_trees");
  std::lock_guard<std::mutex> lk(g_tree_mu);
  return enumerate_locked(k);
}

std::string serialize(const Tree& t) {
  if (t.leaf()) return ".";
  return "[" + serialize(*t.ch[0]) + "," + serialize(*t.ch[1]) + "," +
         serialize(*t.ch[2]) + "]";
}

double mu(int k, double S) {
  check_odd_order(k, "mu");
  require(S >= 0.0, "mu: regularity must be nonnegative");
  return std::min({k * S, 2.0 * S + 0.5, S + 1.0});
}

double s_min(int d) {
  require(d >= 3, "s_min: needs d >= 3");
  if (d == 3) return 0.0;
  if (d == 4) return 0.25;
  return (d - 4.0) / 2.0;
}

bool mu_inductive_check(double S, int k_max, double cap) {
  check_odd_order(k_max, "mu_inductive_check");
  require(cap > 0.0, "mu_inductive_check: cap must be positive");
  for (int k = 3; k <= k_max; k += 2)
    for (int a = 1; a <= k - 2; a += 2)
      for (int b = 1; a + b <= k - 1; b += 2) {
        const int c = k - a - b;
        if (c < 1) continue;
        const double rhs =
            mu(a, S) + std::min(mu(b, S), cap) + std::min(mu(c, S), cap);
        if (mu(k, S) > rhs + 1e-12) return false;
      }
  return true;
}

Field cubic(const Field& a, const Field& b, const Field& c) {
  check_same_grid(a, b);
  check_same_grid(a, c);
  const Grid& g = *a.g;
  Field pa = to_phys(a), pb = to_phys(b), pc = to_phys(c);
  Field prod = Field::zeros(a.g, Rep::physical);
  kern::ops().triple(prod.v.data(), pa.v.data(), pb.v.data(), pc.v.data(),
                     g.n_total);
  Field out = fft(prod);
  kern::ops().rmul(out.v.data(), out.v.data(), g.dealias_keep().data(), g.n_total);
  return out;
}

SpaceTimeField cubic(const SpaceTimeField& a, const SpaceTimeField& b,
                     const SpaceTimeField& c) {
  check_same_window(a, b, "cubic");
  check_same_window(a, c, "cubic");
  SpaceTimeField out = SpaceTimeField::zeros(a.g, Rep::frequency, a.nt(), a.j0);
  for (int j = 0; j < a.nt(); ++j) out.s[j] = cubic(a.s[j], b.s[j], c.s[j]);
  return out;
}

SpaceTimeField tree_operator(const Tree& t, const Field& f, int j0, int nt,
                             prop::Sign sign) {
  if (t.leaf()) return prop::free_evolution(f, j0, nt);
  SpaceTimeField r0 = tree_operator(*t.ch[0], f, j0, nt, sign);
  SpaceTimeField r1 = tree_operator(*t.ch[1], f, j0, nt, sign);
  SpaceTimeField r2 = tree_operator(*t.ch[2], f, j0, nt, sign);
  return prop::duhamel(nullptr, cubic(r0, r1, r2), sign);
}

std::vector<SpaceTimeField> compute_z(const Field& f, int M, int j0, int nt,
                                      prop::Sign sign) {
  check_odd_order(M, "compute_z");
  std::vector<SpaceTimeField> z;
  z.push_back(prop::free_evolution(f, j0, nt));
  for (int m = 3; m <= M; m += 2) {
    SpaceTimeField h = SpaceTimeField::zeros(f.g, Rep::frequency, nt, j0);
    for (int a = 1; a <= m - 2; a += 2)
      for (int b = 1; a + b <= m - 1; b += 2) {
        const int c = m - a - b;
        if (c < 1) continue;
        add_into(h, cubic(z[(a - 1) / 2], z[(b - 1) / 2], z[(c - 1) / 2]));
      }
    z.push_back(prop::duhamel(nullptr, h, sign));
  }
  return z;
}

SpaceTimeField z_sum(const std::vector<SpaceTimeField>& z) {
  require(!z.empty(), "z_sum: empty expansion");
  SpaceTimeField acc = z[0];
  for (std::size_t i = 1; i < z.size(); ++i) add_into(acc, z[i]);
  return acc;
}

SpaceTimeField tail_forcing(const std::vector<SpaceTimeField>& z) {
  require(!z.empty(), "tail_forcing: empty expansion");
  const int M = 2 * static_cast<int>(z.size()) - 1;
  SpaceTimeField acc =
      SpaceTimeField::zeros(z[0].g, Rep::frequency, z[0].nt(), z[0].j0);
  for (int a = 1; a <= M; a += 2)
    for (int b = 1; b <= M; b += 2)
      for (int c = 1; c <= M; c += 2) {
        if (a + b + c <= M) continue;
        add_into(acc, cubic(z[(a - 1) / 2], z[(b - 1) / 2], z[(c - 1) / 2]));
      }
  return acc;
}

}  // namespace rnls::multi
