#include "rnls/propagator.hpp"

#include <cmath>
#include <list>
#include <mutex>

#include "rnls/kernels.hpp"
#include "rnls/norms.hpp"

namespace rnls::prop {

Sign make_sign(int v) {
  require(v == 1 || v == -1, "sign: value must be +1 or -1");
  return Sign{v};
}

void group_phases(const Grid& g, double t, cd* out) {
  for (std::size_t lin = 0; lin < g.n_total; ++lin)
    out[lin] = std::polar(1.0, g.phase_rate(lin) * t);
}

struct PropagatorTable::Impl {
  std::mutex mu;
  std::size_t cap;
  std::list<std::pair<double, std::shared_ptr<const std::vector<cd>>>> lru;
};

PropagatorTable::PropagatorTable(GridPtr g, std::size_t max_entries)
    : g_(std::move(g)), impl_(new Impl) {
  require(max_entries >= 1, "propagator table: capacity must be positive");
  impl_->cap = max_entries;
}

PropagatorTable::~PropagatorTable() = default;

std::shared_ptr<const std::vector<cd>> PropagatorTable::get(double t) const {
  std::lock_guard<std::mutex> lk(impl_->mu);
  for (auto it = impl_->lru.begin(); it != impl_->lru.end(); ++it) {
    if (it->first == t) {
      impl_->lru.splice(impl_->lru.begin(), impl_->lru, it);
      return impl_->lru.front().second;
    }
  }
  auto tab = std::make_shared<std::vector<cd>>(g_->n_total);
  group_phases(*g_, t, tab->data());
  impl_->lru.emplace_front(t, tab);
  if (impl_->lru.size() > impl_->cap) impl_->lru.pop_back();
  return impl_->lru.front().second;
}

Field propagate(const Field& f, double t) {
  const bool was_physical = f.rep == Rep::physical;
  Field fh = to_freq(f);
  std::vector<cd> ph(f.g->n_total);
  group_phases(*f.g, t, ph.data());
  Field out = Field::zeros(f.g, Rep::frequency);
  kern::ops().cmul(out.v.data(), fh.v.data(), ph.data(), ph.size());
  return was_physical ? ifft(out) : out;
}

SpaceTimeField free_evolution(const Field& f, int j0, int nt) {
  GridPtr g = f.g;
  Field fh = to_freq(f);
  SpaceTimeField u = SpaceTimeField::zeros(g, Rep::frequency, nt, j0);
  std::vector<cd> ph(g->n_total);
  for (int i = 0; i < nt; ++i) {
    group_phases(*g, u.t(i), ph.data());
    kern::ops().cmul(u.s[i].v.data(), fh.v.data(), ph.data(), ph.size());
  }
  return u;
}

void duhamel_stream(const Field* v0, GridPtr g, int j0, int nt, Sign sign,
                    const std::function<Field(int)>& h_at,
                    const std::function<void(int, Field&&)>& emit) {
  require(nt >= 2 && j0 >= 0 && j0 + nt <= g->n_t,
          "duhamel: window outside time lattice");
  const std::size_t n = g->n_total;
  const auto& k = kern::ops();
  const cd pref(0.0, -static_cast<double>(sign.value));  // -i*kappa

  Field head = v0 ? to_freq(*v0) : Field::zeros(g, Rep::frequency);
  if (v0) require(v0->g == g, "duhamel: initial datum grid differs from forcing grid");

  // Interaction picture relative to the window start: tau = t - t_{j0}.
  // acc_j = int_0^{tau_j} e^{-i s Lap} h ds by trapezoid; the emitted slice is
  // e^{i tau_j Lap} (v0_hat + pref * acc_j).
  std::vector<cd> acc(n, cd(0, 0)), prev(n), cur(n), ph(n), tmp(n);

  {
    Field h0 = to_freq(h_at(0));
    require(h0.g == g, "duhamel: forcing slice grid differs");
    std::copy(h0.v.begin(), h0.v.end(), prev.begin());  // e^{0} h_0
    Field out0 = head;                                   // tau = 0
    emit(0, std::move(out0));
  }

  for (int i = 1; i < nt; ++i) {
    const double tau = g->dt * i;
    Field hi = to_freq(h_at(i));
    require(hi.g == g, "duhamel: forcing slice grid differs");
    for (std::size_t lin = 0; lin < n; ++lin)
      ph[lin] = std::polar(1.0, -g->phase_rate(lin) * tau);
    k.cmul(cur.data(), hi.v.data(), ph.data(), n);
    // acc += dt/2 (prev + cur)
    const cd half(0.5 * g->dt, 0.0);
    k.axpy(acc.data(), half, prev.data(), n);
    k.axpy(acc.data(), half, cur.data(), n);
    std::swap(prev, cur);

    std::copy(head.v.begin(), head.v.end(), tmp.begin());
    k.axpy(tmp.data(), pref, acc.data(), n);
    Field out = Field::zeros(g, Rep::frequency);
    for (std::size_t lin = 0; lin < n; ++lin)
      out.v[lin] = tmp[lin] * std::polar(1.0, g->phase_rate(lin) * tau);
    emit(i, std::move(out));
  }
}

SpaceTimeField duhamel(const Field* v0, const SpaceTimeField& h, Sign sign) {
  if (v0) require(v0->g == h.g, "duhamel: grids differ");
  SpaceTimeField w = SpaceTimeField::zeros(h.g, Rep::frequency, h.nt(), h.j0);
  duhamel_stream(
      v0, h.g, h.j0, h.nt(), sign, [&](int i) { return h.s[i]; },
      [&](int i, Field&& f) { w.s[i] = std::move(f); });
  return w;
}

double scattering_proxy(const SpaceTimeField& u, double sigma, int i1, int i2) {
  require(i1 >= 0 && i1 < u.nt() && i2 >= 0 && i2 < u.nt(),
          "scattering_proxy: indices outside window");
  Field a = propagate(to_freq(u.s[i1]), -u.t(i1));
  Field b = propagate(to_freq(u.s[i2]), -u.t(i2));
  b -= a;
  return norms::sobolev_norm(b, sigma);
}

}  // namespace rnls::prop
