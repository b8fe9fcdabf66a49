#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rnls/grid.hpp"
#include "rnls/propagator.hpp"

namespace rnls::multi {

// --- expansion trees ------------------------------------------------------

// Ternary interaction tree: a node is a leaf or has exactly three children
// (the middle slot enters conjugated in the associated operator). A tree with
// k leaves represents one k-linear term of the Picard expansion; k is odd.
struct Tree;
using TreePtr = std::shared_ptr<const Tree>;
struct Tree {
  std::array<TreePtr, 3> ch = {nullptr, nullptr, nullptr};
  bool leaf() const { return ch[0] == nullptr; }
  int leaves() const;
};

// Number of trees with k leaves: t(1) = 1 and t(k) = sum over ordered odd
// triples a+b+c = k of t(a) t(b) t(c). Memoized.
long long count_trees(int k);

// All trees with k leaves, deterministically ordered; subtrees are shared.
std::vector<TreePtr> enumerate_trees(int k);

// "." for a leaf, "[s1,s2,s3]" for a node; injective on trees.
std::string serialize(const Tree& t);

// --- regularity bookkeeping ----------------------------------------------

// Gain exponent of the k-th expansion term over H^S data:
// mu(k, S) = min(k S, 2 S + 1/2, S + 1).
double mu(int k, double S);

// Smallest admissible data regularity: 0 for d = 3, 1/4 for d = 4,
// (d - 4)/2 for d >= 5.
double s_min(int d);

// Closure property driving the induction: for every ordered odd triple with
// k1 + k2 + k3 = k <= k_max,
//   mu(k, S) <= mu(k1, S) + min(mu(k2, S), cap) + min(mu(k3, S), cap),
// with cap = 1/2 the saturation level of the directional smoothing gain.
bool mu_inductive_check(double S, int k_max, double cap = 0.5);

// --- dealiased cubic products ----------------------------------------------

// Pointwise a conj(b) c, computed in physical space, then masked by the
// grid's product mask (keep |m_j| <= floor(n/3) per axis). Frequency rep out.
Field cubic(const Field& a, const Field& b, const Field& c);
SpaceTimeField cubic(const SpaceTimeField& a, const SpaceTimeField& b,
                     const SpaceTimeField& c);

// --- expansion terms --------------------------------------------------------

// R_tau over the window: a leaf is e^{it Lap} f; a node integrates the cubic
// product of its children against the free group (zero head).
SpaceTimeField tree_operator(const Tree& t, const Field& f, int j0, int nt,
                             prop::Sign sign);

// z_1, z_3, ..., z_M (even orders vanish identically and are not stored):
// z_1 = e^{it Lap} f and
// z_m = -i kappa int e^{i(t-s) Lap} sum_{k1+k2+k3=m} z_k1 conj(z_k2) z_k3.
// Returned vector holds z_{2i+1} at index i. M odd.
std::vector<SpaceTimeField> compute_z(const Field& f, int M, int j0, int nt,
                                      prop::Sign sign);

// z_{<=M}: sum of the stored orders.
SpaceTimeField z_sum(const std::vector<SpaceTimeField>& z);

// Over-threshold forcing [z, z, z]_{>M}: sum of z_k1 conj(z_k2) z_k3 over
// ordered odd triples with every k_i <= M and k1 + k2 + k3 > M. Satisfies,
// exactly on the grid (same quadrature, same mask),
//   z_{<=M} = e^{it Lap} f - i kappa I[ |z_{<=M}|^2 z_{<=M} - tail ].
SpaceTimeField tail_forcing(const std::vector<SpaceTimeField>& z);

}  // namespace rnls::multi
