#include "rnls/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "rnls/multilinear.hpp"
#include "rnls/norms.hpp"
#include "rnls/projections.hpp"
#include "rnls/randomization.hpp"
#include "rnls/solver.hpp"

namespace rnls::harness {

namespace fs = std::filesystem;

// --- configuration -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void key_error(const std::string& key, const std::string& what) {
  throw contract_error("config key " + key + ": " + what);
}

}  // namespace

const std::string& ExperimentConfig::get_str(const std::string& key) const {
  auto it = kv.find(key);
  if (it == kv.end()) key_error(key, "missing");
  return it->second;
}

std::string ExperimentConfig::get_str_or(const std::string& key,
                                         const std::string& fb) const {
  auto it = kv.find(key);
  return it == kv.end() ? fb : it->second;
}

double ExperimentConfig::get_num(const std::string& key) const {
  const std::string& raw = get_str(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    key_error(key, "not a number: '" + raw + "'");
  }
  if (used != raw.size()) key_error(key, "not a number: '" + raw + "'");
  return v;
}

double ExperimentConfig::get_num_or(const std::string& key, double fb) const {
  return has(key) ? get_num(key) : fb;
}

long long ExperimentConfig::get_int(const std::string& key) const {
  const std::string& raw = get_str(key);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(raw, &used);
  } catch (const std::exception&) {
    key_error(key, "not an integer: '" + raw + "'");
  }
  if (used != raw.size()) key_error(key, "not an integer: '" + raw + "'");
  return v;
}

long long ExperimentConfig::get_int_or(const std::string& key, long long fb) const {
  return has(key) ? get_int(key) : fb;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  kv[key] = value;
}

void ExperimentConfig::set_num(const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  kv[key] = buf;
}

void ExperimentConfig::set_int(const std::string& key, long long value) {
  kv[key] = std::to_string(value);
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : kv) {
    if (k == "output.dir" || k == "pool.workers") continue;
    text += k;
    text += " = ";
    text += v;
    text += '\n';
  }
  return fnv1a64(text);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw contract_error("config line " + std::to_string(lineno) +
                           ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) key_error("(line " + std::to_string(lineno) + ")", "empty key");
    if (key.find_first_of(" \t") != std::string::npos)
      key_error(key, "keys contain no whitespace");
    cfg.kv[key] = value;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw contract_error("config file not readable: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw contract_error("config file not writable: " + path);
  out << cfg.canonical();
  if (!out) throw contract_error("config file write failed: " + path);
}

GridPtr grid_from(const ExperimentConfig& cfg) {
  const int d = static_cast<int>(cfg.get_int("grid.d"));
  int n_default = 32, nt_default = 9;
  if (d == 1) n_default = 256, nt_default = 33;
  if (d == 2) n_default = 64, nt_default = 17;
  const int n = static_cast<int>(cfg.get_int_or("grid.n", n_default));
  const double L = cfg.get_num_or("grid.L", 4.0);
  const int nt = static_cast<int>(cfg.get_int_or("grid.nt", nt_default));
  const double T = cfg.get_num_or("grid.T", 0.25);
  return Grid::make(d, n, L, nt, T);
}

expt::DatumSpec datum_from(const ExperimentConfig& cfg) {
  expt::DatumSpec spec;
  const std::string kind = cfg.get_str_or("datum.kind", "power_law");
  if (kind == "power_law") {
    spec.kind = expt::DatumKind::power_law;
  } else if (kind == "lattice_bump") {
    spec.kind = expt::DatumKind::lattice_bump;
  } else if (kind == "custom") {
    spec.kind = expt::DatumKind::custom;
  } else {
    key_error("datum.kind", "unknown kind '" + kind + "'");
  }
  spec.S = cfg.get_num_or("datum.S", 0.0);
  spec.N_top = cfg.get_num_or("datum.N_top", 0.0);
  if (cfg.has("datum.ell")) {
    const std::string raw = cfg.get_str("datum.ell");
    std::istringstream in(raw);
    std::string part;
    int a = 0;
    while (std::getline(in, part, ',')) {
      if (a >= 3) key_error("datum.ell", "at most three components");
      try {
        spec.ell[static_cast<std::size_t>(a)] = std::stoi(trim(part));
      } catch (const std::exception&) {
        key_error("datum.ell", "not an integer list: '" + raw + "'");
      }
      ++a;
    }
  }
  spec.path = cfg.get_str_or("datum.path", "");
  return spec;
}

// --- results and manifest --------------------------------------------------------

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

// Tiny ordered JSON writer: values arrive pre-rendered, objects keep
// insertion order, so emitted bytes are a pure function of the inputs.
struct JsonObj {
  std::vector<std::pair<std::string, std::string>> items;
  void raw(const std::string& k, const std::string& rendered) {
    items.emplace_back(k, rendered);
  }
  void str(const std::string& k, const std::string& v) {
    raw(k, "\"" + json_escape(v) + "\"");
  }
  void num(const std::string& k, double v) { raw(k, fmt_num(v)); }
  void integer(const std::string& k, long long v) { raw(k, std::to_string(v)); }
  void boolean(const std::string& k, bool v) { raw(k, v ? "true" : "false"); }
  std::string render(int indent = 0) const {
    const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
    std::string out = "{\n";
    for (std::size_t i = 0; i < items.size(); ++i) {
      out += pad + "\"" + items[i].first + "\": " + items[i].second;
      out += i + 1 < items.size() ? ",\n" : "\n";
    }
    out += std::string(static_cast<std::size_t>(indent), ' ') + "}";
    return out;
  }
};

std::string json_array(const std::vector<std::string>& rendered, int indent) {
  if (rendered.empty()) return "[]";
  const std::string pad(static_cast<std::size_t>(indent) + 2, ' ');
  std::string out = "[\n";
  for (std::size_t i = 0; i < rendered.size(); ++i) {
    out += pad + rendered[i];
    out += i + 1 < rendered.size() ? ",\n" : "\n";
  }
  out += std::string(static_cast<std::size_t>(indent), ' ') + "]";
  return out;
}

std::string json_num_array(const std::vector<double>& v) {
  std::vector<std::string> parts;
  parts.reserve(v.size());
  for (double x : v) parts.push_back(fmt_num(x));
  std::string out = "[";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out += parts[i];
    if (i + 1 < parts.size()) out += ", ";
  }
  return out + "]";
}

}  // namespace

ResultManifest save_results(const std::string& dir,
                            const std::vector<ResultRecord>& records,
                            const ExperimentConfig& cfg, std::uint64_t seed,
                            double wall_ms) {
  fs::create_directories(dir);
  ResultManifest man;
  man.config_hash = cfg.hash();
  man.seed = seed;
  man.tool_version = kToolVersion;
  man.wall_ms = wall_ms;
  for (const auto& rec : records) {
    const fs::path p = fs::path(dir) / rec.name;
    std::ofstream out(p, std::ios::binary);
    if (!out) throw contract_error("result file not writable: " + p.string());
    out.write(rec.content.data(),
              static_cast<std::streamsize>(rec.content.size()));
    if (!out) throw contract_error("result file write failed: " + p.string());
    man.files.push_back({rec.name, rec.content.size(), fnv1a64(rec.content)});
  }

  JsonObj root;
  root.str("tool", man.tool_version);
  root.str("config_hash", hex64(man.config_hash));
  root.integer("seed", static_cast<long long>(man.seed));
  root.num("wall_ms", man.wall_ms);
  std::vector<std::string> files;
  for (const auto& fe : man.files) {
    JsonObj f;
    f.str("path", fe.path);
    f.integer("bytes", static_cast<long long>(fe.bytes));
    f.str("fnv64", hex64(fe.fnv64));
    files.push_back(f.render(4));
  }
  root.raw("files", json_array(files, 2));
  const std::string text = root.render() + "\n";
  const fs::path mp = fs::path(dir) / "manifest.json";
  std::ofstream out(mp, std::ios::binary);
  if (!out) throw contract_error("manifest not writable: " + mp.string());
  out << text;
  return man;
}

namespace {

// Extracts the quoted value following "<key>": starting at `from`.
bool scan_str(const std::string& text, const std::string& key, std::size_t from,
              std::string* out, std::size_t* next) {
  const std::string pat = "\"" + key + "\": \"";
  const std::size_t at = text.find(pat, from);
  if (at == std::string::npos) return false;
  const std::size_t start = at + pat.size();
  const std::size_t end = text.find('"', start);
  if (end == std::string::npos) return false;
  *out = text.substr(start, end - start);
  *next = end + 1;
  return true;
}

bool scan_int(const std::string& text, const std::string& key, std::size_t from,
              std::uint64_t* out, std::size_t* next) {
  const std::string pat = "\"" + key + "\": ";
  const std::size_t at = text.find(pat, from);
  if (at == std::string::npos) return false;
  const std::size_t start = at + pat.size();
  std::size_t end = start;
  while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end])))
    ++end;
  if (end == start) return false;
  *out = std::stoull(text.substr(start, end - start));
  *next = end;
  return true;
}

}  // namespace

std::vector<std::string> verify_results(const std::string& dir) {
  std::vector<std::string> bad;
  const fs::path mp = fs::path(dir) / "manifest.json";
  std::ifstream in(mp, std::ios::binary);
  if (!in) return {"manifest.json: missing"};
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::size_t pos = text.find("\"files\":");
  if (pos == std::string::npos) return {"manifest.json: no file inventory"};
  while (true) {
    std::string path, sum;
    std::uint64_t bytes = 0;
    std::size_t next = pos;
    if (!scan_str(text, "path", pos, &path, &next)) break;
    pos = next;
    if (!scan_int(text, "bytes", pos, &bytes, &next)) {
      bad.push_back(path + ": manifest entry lacks byte count");
      break;
    }
    pos = next;
    if (!scan_str(text, "fnv64", pos, &sum, &next)) {
      bad.push_back(path + ": manifest entry lacks checksum");
      break;
    }
    pos = next;

    std::ifstream f(fs::path(dir) / path, std::ios::binary);
    if (!f) {
      bad.push_back(path + ": missing");
      continue;
    }
    std::ostringstream fb;
    fb << f.rdbuf();
    const std::string content = fb.str();
    if (content.size() != bytes)
      bad.push_back(path + ": size mismatch");
    else if (hex64(fnv1a64(content)) != sum)
      bad.push_back(path + ": checksum mismatch");
  }
  return bad;
}

// --- pipelines -------------------------------------------------------------------

namespace {

Field scaled(Field f, double a) {
  for (auto& z : f.v) z *= a;
  return f;
}

// The randomized datum used by the probabilistic pipelines; deterministic
// pipelines read datum.randomize = 0.
Field pipeline_datum(const GridPtr& g, const ExperimentConfig& cfg,
                     std::uint64_t seed, bool randomize_default) {
  Field base = expt::make_datum(g, datum_from(cfg));
  base = scaled(std::move(base), cfg.get_num_or("datum.scale", 1.0));
  const bool randomize =
      cfg.get_int_or("datum.randomize", randomize_default ? 1 : 0) != 0;
  if (!randomize) return base;
  const int K_cap = static_cast<int>(std::floor(g->xi_max())) - 1;
  const int K = static_cast<int>(cfg.get_int_or("experiment.K",
                                                std::min(4, K_cap)));
  return rand::randomize(base, K, seed, 0);
}

std::string csv_render(const std::string& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out = header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out += fmt_num(row[i]);
      if (i + 1 < row.size()) out += ',';
    }
    out += '\n';
  }
  return out;
}

struct Pipeline {
  std::vector<ResultRecord> records;
  int exit_code = 0;
  std::string summary;  // printed on stdout
};

Pipeline run_expand(const ExperimentConfig& cfg) {
  const GridPtr g = grid_from(cfg);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const int M = static_cast<int>(cfg.get_int_or("solver.M", 3));
  const auto sign = prop::make_sign(
      static_cast<int>(cfg.get_int_or("solver.sign", +1)));
  const Field f = pipeline_datum(g, cfg, seed, /*randomize_default=*/true);

  const auto z = multi::compute_z(f, M, 0, g->n_t, sign);
  const double mu_S = cfg.get_num_or("datum.S", 0.0);

  JsonObj root;
  root.str("config_hash", hex64(cfg.hash()));
  root.integer("seed", static_cast<long long>(seed));
  root.integer("M", M);
  std::vector<std::string> terms;
  std::vector<std::vector<double>> rows;
  std::string lines;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const int k = 2 * static_cast<int>(i) + 1;
    const Field& end = z[i].s.back();
    const double l2_end = l2_norm(end);
    const double mu = multi::mu(k, mu_S);
    const double h_end = norms::sobolev_norm(end, mu);

    // Tree route: sum the elementary operators over all k-trees and compare
    // against the Duhamel recursion, slice by slice.
    const auto trees = multi::enumerate_trees(k);
    SpaceTimeField tree_sum = SpaceTimeField::zeros(g, Rep::frequency, g->n_t, 0);
    for (const auto& t : trees) {
      const SpaceTimeField rt = multi::tree_operator(*t, f, 0, g->n_t, sign);
      for (int j = 0; j < g->n_t; ++j) tree_sum.s[j] += rt.s[j];
    }
    double num = 0.0, den = 0.0;
    for (int j = 0; j < g->n_t; ++j) {
      Field diff = tree_sum.s[j];
      diff -= z[i].s[j];
      num = std::max(num, l2_norm(diff));
      den = std::max(den, l2_norm(z[i].s[j]));
    }
    const double residual = den > 0.0 ? num / den : num;

    JsonObj term;
    term.integer("k", k);
    term.integer("trees", static_cast<long long>(trees.size()));
    term.num("l2_end", l2_end);
    term.num("mu", mu);
    term.num("h_mu_end", h_end);
    term.num("tree_vs_recursion", residual);
    terms.push_back(term.render(4));
    rows.push_back({static_cast<double>(k), l2_end, h_end, residual});
    lines += "  k=" + std::to_string(k) + "  l2 " + fmt_num(l2_end) +
             "  H^" + fmt_num(mu) + " " + fmt_num(h_end) +
             "  tree-vs-recursion " + fmt_num(residual) + "\n";
  }
  root.raw("terms", json_array(terms, 2));

  Pipeline p;
  p.records.push_back({"expand.json", root.render() + "\n"});
  p.records.push_back({"expand.csv",
                       csv_render("k,l2_end,h_mu_end,tree_vs_recursion", rows)});
  p.summary = "expansion to order " + std::to_string(M) + ":\n" + lines;
  return p;
}

Pipeline run_simulate(const ExperimentConfig& cfg) {
  const GridPtr g = grid_from(cfg);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const auto sign = prop::make_sign(
      static_cast<int>(cfg.get_int_or("solver.sign", +1)));
  const Field f = pipeline_datum(g, cfg, seed, /*randomize_default=*/false);

  solver::PicardOptions opts;
  opts.max_iter = static_cast<int>(cfg.get_int_or("solver.max_iter", 30));
  opts.tol_fix = cfg.get_num_or("solver.tol_fix", 1e-10);
  const auto sol = solver::picard_solve(f, sign, 0, g->n_t, opts);

  const SpaceTimeField ref = solver::splitstep_reference(f, sign, 0, g->n_t);
  double gap = 0.0;
  std::vector<std::vector<double>> rows;
  for (int j = 0; j < g->n_t; ++j) {
    Field diff = sol.u.s[j];
    diff -= ref.s[j];
    gap = std::max(gap, l2_norm(diff));
    rows.push_back({static_cast<double>(j), g->t(j), l2_norm(sol.u.s[j]),
                    norms::sobolev_norm(sol.u.s[j], sol.report.sigma)});
  }

  JsonObj root;
  root.str("config_hash", hex64(cfg.hash()));
  root.integer("seed", static_cast<long long>(seed));
  root.boolean("converged", sol.report.converged);
  root.integer("iterations", sol.report.iterations);
  root.num("residual", sol.report.residual);
  root.num("monitor_sigma", sol.report.sigma);
  root.num("monitor", sol.report.monitor);
  root.num("splitstep_gap", gap);

  Pipeline p;
  p.records.push_back({"simulate.json", root.render() + "\n"});
  p.records.push_back({"timeseries.csv", csv_render("j,t,l2,h_sigma", rows)});
  p.summary = std::string("picard ") +
              (sol.report.converged ? "converged" : "DID NOT converge") +
              " in " + std::to_string(sol.report.iterations) +
              " iterations, residual " + fmt_num(sol.report.residual) +
              ", split-step gap " + fmt_num(gap) + "\n";
  if (!sol.report.converged) p.exit_code = 1;
  return p;
}

Pipeline run_norms(const ExperimentConfig& cfg) {
  const GridPtr g = grid_from(cfg);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const Field f = pipeline_datum(g, cfg, seed, /*randomize_default=*/false);
  const SpaceTimeField u = prop::free_evolution(f, 0, g->n_t);

  const double sigma = cfg.get_num_or("norms.sigma", cfg.get_num_or("datum.S", 0.0));
  const double p_exp = cfg.get_num_or("norms.p", 4.0);
  const double q_exp = cfg.get_num_or("norms.q", 4.0);

  std::vector<std::pair<std::string, double>> table;
  table.emplace_back("l2", l2_norm(f));
  table.emplace_back("h_sigma", norms::sobolev_norm(f, sigma));
  table.emplace_back("strichartz", norms::strichartz_norm(u, p_exp, q_exp));
  if (g->d >= 3) {
    norms::XYConfig xy;
    xy.sigma = sigma;
    table.emplace_back("x_engine", norms::xy_norm(u, norms::Family::X, xy).total);
    table.emplace_back("y_engine", norms::xy_norm(u, norms::Family::Y, xy).total);
    norms::DirectionalSpec dspec;
    dspec.l = 0;
    dspec.a = 2.0;
    dspec.b = kInf;
    dspec.c = kInf;
    table.emplace_back("directional_max", norms::directional_norm(u, dspec));
  }

  JsonObj root;
  root.str("config_hash", hex64(cfg.hash()));
  root.integer("seed", static_cast<long long>(seed));
  root.num("sigma", sigma);
  root.num("p", p_exp);
  root.num("q", q_exp);
  std::string csv = "name,value\n", lines;
  for (const auto& [name, value] : table) {
    root.num(name, value);
    csv += name + "," + fmt_num(value) + "\n";
    lines += "  " + name + " = " + fmt_num(value) + "\n";
  }

  Pipeline p;
  p.records.push_back({"norms.json", root.render() + "\n"});
  p.records.push_back({"norms.csv", csv});
  p.summary = "norm battery on the free evolution:\n" + lines;
  return p;
}

std::string tail_fit_json(const tail::TailFit& fit, int indent) {
  JsonObj f;
  f.num("theta", fit.theta);
  f.num("theta_stderr", fit.theta_stderr);
  f.num("intercept", fit.intercept);
  f.integer("bins_used", fit.bins_used);
  f.boolean("reliable", fit.reliable);
  return f.render(indent);
}

Pipeline run_montecarlo(const ExperimentConfig& cfg) {
  const GridPtr g = grid_from(cfg);
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const std::string kind = cfg.get_str_or("experiment.kind", "tail");
  const int workers = static_cast<int>(cfg.get_int_or("pool.workers", 1));
  const expt::DatumSpec spec = datum_from(cfg);
  Pipeline p;

  if (kind == "tail") {
    expt::TailConfig tc;
    tc.k = static_cast<int>(cfg.get_int_or("experiment.k", 1));
    tc.n_samples = static_cast<int>(cfg.get_int_or("experiment.n_samples", 500));
    tc.seed = seed;
    tc.K = static_cast<int>(cfg.get_int_or("experiment.K", 2));
    tc.S = spec.S;
    const std::string norm = cfg.get_str_or("experiment.norm", "c0_sobolev");
    if (norm == "c0_sobolev") {
      tc.primary = expt::TailNorm::c0_sobolev;
    } else if (norm == "y_engine") {
      tc.primary = expt::TailNorm::y_engine;
    } else {
      key_error("experiment.norm", "unknown norm '" + norm + "'");
    }
    tc.record_y = cfg.get_int_or("experiment.record_y", 1) != 0;
    tc.nt = g->n_t;
    tc.n_workers = workers;
    const auto r = expt::run_tail_experiment(g, spec, tc);

    JsonObj root;
    root.str("config_hash", hex64(cfg.hash()));
    root.integer("seed", static_cast<long long>(seed));
    root.integer("k", tc.k);
    root.integer("n_samples", tc.n_samples);
    root.num("mu", r.mu);
    root.str("norm_used", r.norm_used);
    root.raw("fit", tail_fit_json(r.fit, 2));
    if (!r.alt_norm_used.empty()) {
      root.str("alt_norm_used", r.alt_norm_used);
      root.raw("alt_fit", tail_fit_json(r.alt_fit, 2));
    }
    p.records.push_back({"tails.json", root.render() + "\n"});

    std::vector<std::vector<double>> surv;
    for (std::size_t i = 0; i < r.fit.lambda.size(); ++i)
      surv.push_back({r.fit.lambda[i], r.fit.p_hat[i]});
    p.records.push_back({"tail_survival.csv", csv_render("lambda,p_hat", surv)});
    if (!r.alt_norm_used.empty()) {
      std::vector<std::vector<double>> asurv;
      for (std::size_t i = 0; i < r.alt_fit.lambda.size(); ++i)
        asurv.push_back({r.alt_fit.lambda[i], r.alt_fit.p_hat[i]});
      p.records.push_back(
          {"tail_survival_alt.csv", csv_render("lambda,p_hat", asurv)});
    }
    std::vector<std::vector<double>> samples;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      if (r.alt_samples.empty())
        samples.push_back({static_cast<double>(i), r.samples[i]});
      else
        samples.push_back({static_cast<double>(i), r.samples[i], r.alt_samples[i]});
    }
    p.records.push_back(
        {"samples.csv", csv_render(r.alt_samples.empty() ? "i,value" : "i,value,alt",
                                   samples)});
    p.summary = "tail fit (" + r.norm_used + "): theta " + fmt_num(r.fit.theta) +
                " +- " + fmt_num(r.fit.theta_stderr) + " over " +
                std::to_string(r.fit.bins_used) + " bins" +
                (r.fit.reliable ? "" : " (UNRELIABLE)") + "\n";
    return p;
  }

  if (kind == "smoothing") {
    expt::SmoothingConfig sc;
    sc.S = spec.S;
    sc.n_samples = static_cast<int>(cfg.get_int_or("experiment.n_samples", 20));
    sc.seed = seed;
    sc.K = static_cast<int>(cfg.get_int_or("experiment.K", 8));
    if (cfg.has("experiment.shells")) {
      sc.shells.clear();
      std::istringstream in(cfg.get_str("experiment.shells"));
      std::string part;
      while (std::getline(in, part, ','))
        sc.shells.push_back(std::stod(trim(part)));
    }
    sc.nt = g->n_t;
    sc.n_workers = workers;
    const auto r = expt::run_smoothing_experiment(g, spec, sc);

    JsonObj root;
    root.str("config_hash", hex64(cfg.hash()));
    root.integer("seed", static_cast<long long>(seed));
    root.num("predicted_gain", r.predicted_gain);
    root.num("gain", r.gain);
    std::vector<std::vector<double>> rows;
    std::string csv;
    if (r.saturation_sigma.empty()) {
      root.num("mean_slope_z1", r.mean_slope_z1);
      root.num("mean_slope_z3", r.mean_slope_z3);
      root.raw("per_sample_gain", json_num_array(r.per_sample_gain));
      for (const auto& [N, q] : r.shell_ratio) rows.push_back({N, q});
      csv = csv_render("N,ratio", rows);
    } else {
      root.raw("saturation_sigma", json_num_array(r.saturation_sigma));
      root.raw("saturation_growth", json_num_array(r.saturation_growth));
      for (std::size_t i = 0; i < r.saturation_sigma.size(); ++i)
        rows.push_back({r.saturation_sigma[i], r.saturation_growth[i]});
      csv = csv_render("sigma,growth", rows);
    }
    p.records.push_back({"smoothing.json", root.render() + "\n"});
    p.records.push_back({"smoothing.csv", csv});
    p.summary = "smoothing gain " + fmt_num(r.gain) + " (predicted " +
                fmt_num(r.predicted_gain) + ")\n";
    return p;
  }

  key_error("experiment.kind", "unknown experiment '" + kind + "'");
}

Pipeline run_check_estimates(const ExperimentConfig& cfg) {
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  const int workers = static_cast<int>(cfg.get_int_or("pool.workers", 1));
  const double band = cfg.get_num_or("experiment.tolerance", 0.35);
  const double ratio_cap = cfg.get_num_or("experiment.ratio_cap", 20.0);

  std::vector<std::string> lemmas;
  const std::string which = cfg.get_str_or("experiment.lemma", "all");
  if (which == "all")
    lemmas = {"dir_maximal", "dir_smoothing", "bilinear"};
  else
    lemmas = {which};

  Pipeline p;
  JsonObj root;
  root.str("config_hash", hex64(cfg.hash()));
  root.integer("seed", static_cast<long long>(seed));
  std::vector<std::string> entries;
  std::vector<std::vector<double>> rows;
  std::string lines;
  bool all_ok = true;
  for (std::size_t li = 0; li < lemmas.size(); ++li) {
    const std::string& name = lemmas[li];
    expt::ScalingConfig sc;
    if (name == "dir_maximal") {
      sc.lemma = expt::Lemma::dir_maximal;
      sc.c = kInf;
    } else if (name == "dir_smoothing") {
      sc.lemma = expt::Lemma::dir_smoothing;
      sc.c = 2.0;
    } else if (name == "bilinear") {
      sc.lemma = expt::Lemma::bilinear;
    } else {
      key_error("experiment.lemma", "unknown lemma '" + name + "'");
    }
    sc.n = static_cast<int>(cfg.get_int_or("experiment.n", 32));
    sc.L = cfg.get_num_or("experiment.L", 4.0);
    sc.n_samples = static_cast<int>(cfg.get_int_or("experiment.n_samples", 30));
    sc.seed = seed;
    sc.nt = static_cast<int>(cfg.get_int_or("experiment.nt", 33));
    sc.n_workers = workers;
    const auto r = expt::run_estimate_scaling(sc);

    const bool ok = name == "bilinear" ? r.max_ratio < ratio_cap
                                       : std::abs(r.fitted - r.predicted) <= band;
    all_ok = all_ok && ok;
    JsonObj e;
    e.str("lemma", name);
    e.num("predicted", r.predicted);
    e.num("fitted", r.fitted);
    e.num("max_ratio", r.max_ratio);
    e.boolean("pass", ok);
    entries.push_back(e.render(4));
    for (const auto& [N, q] : r.ratio) rows.push_back({static_cast<double>(li), N, q});
    lines += "  " + name + ": predicted " + fmt_num(r.predicted) + ", fitted " +
             fmt_num(r.fitted) + (name == "bilinear"
                                      ? ", max ratio " + fmt_num(r.max_ratio)
                                      : "") +
             (ok ? "  [pass]" : "  [FAIL]") + "\n";
  }
  root.raw("lemmas", json_array(entries, 2));
  root.boolean("pass", all_ok);

  p.records.push_back({"estimates.json", root.render() + "\n"});
  p.records.push_back({"estimates.csv", csv_render("lemma_index,N,ratio", rows)});
  p.summary = "estimate scaling fits:\n" + lines;
  p.exit_code = all_ok ? 0 : 1;
  return p;
}

Pipeline run_check_invariants(const ExperimentConfig& cfg) {
  const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
  struct Check {
    std::string name;
    double err = 0.0, tol = 0.0;
    bool pass = false;
  };
  std::vector<Check> checks;
  auto push = [&](const std::string& name, double err, double tol) {
    checks.push_back({name, err, tol, err <= tol});
  };

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;

  // Unit-cell bump translates sum to one everywhere.
  {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int d : {1, 2, 3}) {
      for (int i = 0; i < 25; ++i) {
        std::array<double, 3> xi = {u(rng), d >= 2 ? u(rng) : 0.0,
                                    d >= 3 ? u(rng) : 0.0};
        double sum = 0.0;
        for (int k0 = -3; k0 <= 3; ++k0)
          for (int k1 = d >= 2 ? -3 : 0; k1 <= (d >= 2 ? 3 : 0); ++k1)
            for (int k2 = d >= 3 ? -3 : 0; k2 <= (d >= 3 ? 3 : 0); ++k2) {
              std::array<double, 3> s = {xi[0] - k0, xi[1] - k1, xi[2] - k2};
              sum += proj::psi(s, d);
            }
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    }
    push("unit_bump_partition", worst, 1e-10);
  }

  auto random_band = [&](const GridPtr& g, double radius) {
    Field f = Field::zeros(g, Rep::frequency);
    for (std::size_t lin = 0; lin < g->n_total; ++lin) {
      const double xi = std::sqrt(static_cast<double>(g->m2(lin))) / g->L;
      if (xi <= radius) f.v[lin] = cd(gauss(rng), gauss(rng));
    }
    return f;
  };

  const auto g1 = Grid::make(1, 64, 4.0, 9, 0.25);
  const auto g3 = Grid::make(3, 16, 2.0, 9, 0.25);

  // Dyadic shells partition a band-limited field.
  {
    double worst = 0.0;
    for (const auto& g : {g1, g3}) {
      const double top = g->d == 1 ? 8.0 : 4.0;
      Field f = random_band(g, top * (1.0 - 1.0 / 256.0));
      Field sum = Field::zeros(g, Rep::frequency);
      for (double N = 1.0; N <= top; N *= 2.0) sum += proj::lp_project(f, N);
      sum -= f;
      worst = std::max(worst, l2_norm(sum) / l2_norm(f));
    }
    push("dyadic_shell_partition", worst, 1e-12);
  }

  // Fattened projections fix the sharp ones: P~_N P_N = P_N.
  {
    double worst = 0.0;
    Field f = random_band(g3, 4.0);
    for (double N : {1.0, 2.0, 4.0}) {
      Field a = proj::lp_project(f, N);
      Field b = proj::lp_project_mod(a, N);
      b -= a;
      worst = std::max(worst, l2_norm(b));
    }
    push("fattened_projection_identity", worst, 1e-12);
  }

  // Cone projections partition everything but the zero mode.
  {
    Field f = random_band(g3, 4.0);
    f.v[g3->index_of({0, 0, 0})] = cd(0, 0);
    Field sum = Field::zeros(g3, Rep::frequency);
    for (int l = 0; l < 3; ++l) sum += proj::cone_project(f, l);
    sum -= f;
    push("cone_partition", l2_norm(sum), 1e-12);
  }

  // The free group: unitary, and s+t composes.
  {
    Field f = random_band(g3, 4.0);
    const double s = 0.013, t = 0.021;
    const double unit_err = std::abs(l2_norm(prop::propagate(f, t)) - l2_norm(f));
    Field a = prop::propagate(f, s + t);
    Field b = prop::propagate(prop::propagate(f, s), t);
    b -= a;
    push("propagator_unitarity", unit_err, 1e-12);
    push("propagator_group_law", l2_norm(b), 1e-12);
  }

  // Parity: the cubic flow maps -f to -u(f), so even chaos orders vanish.
  {
    Field f = random_band(g1, 2.0);
    const double nf = l2_norm(f);
    f = scaled(std::move(f), 0.05 / nf);
    Field fp = f;
    Field fm = scaled(f, -1.0);
    const auto sign = prop::make_sign(+1);
    const auto up = solver::picard_solve(fp, sign, 0, g1->n_t);
    const auto um = solver::picard_solve(fm, sign, 0, g1->n_t);
    double worst = 0.0;
    for (int j = 0; j < g1->n_t; ++j) {
      Field sum = up.u.s[j];
      sum += um.u.s[j];
      worst = std::max(worst, l2_norm(sum));
    }
    push("odd_parity_of_the_flow", worst, 1e-10);
  }

  // Fourier support of z_k grows at most k-fold.
  {
    Field f = random_band(g1, 1.0);
    const auto z = multi::compute_z(f, 5, 0, g1->n_t, prop::make_sign(+1));
    double worst_excess = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double k = 2.0 * static_cast<double>(i) + 1.0;
      double r_max = 0.0;
      for (int j = 0; j < g1->n_t; ++j) {
        const Field& slice = z[i].s[j];
        for (std::size_t lin = 0; lin < g1->n_total; ++lin)
          if (std::abs(slice.v[lin]) > 1e-12)
            r_max = std::max(
                r_max, std::sqrt(static_cast<double>(g1->m2(lin))) / g1->L);
      }
      worst_excess = std::max(worst_excess, r_max - k * 1.0);
    }
    push("support_growth_bound", worst_excess, 1e-9);
  }

  JsonObj root;
  root.str("config_hash", hex64(cfg.hash()));
  root.integer("seed", static_cast<long long>(seed));
  std::vector<std::string> entries;
  std::string lines;
  bool all_ok = true;
  for (const auto& c : checks) {
    JsonObj e;
    e.str("name", c.name);
    e.num("err", c.err);
    e.num("tol", c.tol);
    e.boolean("pass", c.pass);
    entries.push_back(e.render(4));
    all_ok = all_ok && c.pass;
    lines += "  " + c.name + ": err " + fmt_num(c.err) + " (tol " +
             fmt_num(c.tol) + ") " + (c.pass ? "[pass]" : "[FAIL]") + "\n";
  }
  root.raw("checks", json_array(entries, 2));
  root.boolean("pass", all_ok);

  Pipeline p;
  p.records.push_back({"invariants.json", root.render() + "\n"});
  p.summary = "exact-identity suite:\n" + lines;
  p.exit_code = all_ok ? 0 : 1;
  return p;
}

// --- command line ---------------------------------------------------------------

const char* kUsage =
    "usage: rnls <subcommand> [--flag value ...]\n"
    "\n"
    "subcommands:\n"
    "  simulate          solve the equation (integral map vs split-step)\n"
    "  expand            multilinear expansion: z_k norms, tree residuals\n"
    "  norms             norm battery on the free evolution of the datum\n"
    "  montecarlo        tail or smoothing sampling campaign\n"
    "  check-estimates   scaling fits for the directional/bilinear bounds\n"
    "  check-invariants  exact-identity suite (projections, unitarity, parity)\n"
    "  report            verify checksums and summarize an output directory\n"
    "\n"
    "common flags:\n"
    "  --config PATH   load a key=value config file (flags override it)\n"
    "  --out DIR       output directory (default $RNLS_OUT_ROOT/<subcommand>)\n"
    "  --seed N        sample seed (default 0)\n"
    "  --workers N     worker pool size (default 1)\n"
    "  --d / --n / --L / --nt / --T     grid parameters\n"
    "  --datum KIND:ARGS   power_law:S[:N_top] | lattice_bump:S:l1,l2,l3 |\n"
    "                      custom:PATH\n"
    "  --M N           expansion order (expand)\n"
    "  --scale A       datum amplitude scale\n"
    "  --experiment E  montecarlo experiment: tail | smoothing\n"
    "  --k N           tail expansion order\n"
    "  --samples N     sample count\n"
    "  --K N           randomization lattice extent\n"
    "  --norm NAME     tail norm: c0_sobolev | y_engine\n"
    "  --shells LIST   smoothing fit shells, comma-separated\n"
    "  --lemma NAME    check-estimates: dir_maximal | dir_smoothing |\n"
    "                  bilinear | all\n";

bool apply_datum_flag(const std::string& raw, ExperimentConfig* cfg) {
  const std::size_t colon = raw.find(':');
  const std::string kind = raw.substr(0, colon);
  cfg->set("datum.kind", kind);
  if (kind == "custom") {
    if (colon == std::string::npos) return false;
    cfg->set("datum.path", raw.substr(colon + 1));
    return true;
  }
  if (kind != "power_law" && kind != "lattice_bump") return false;
  if (colon == std::string::npos) return false;
  const std::string rest = raw.substr(colon + 1);
  const std::size_t colon2 = rest.find(':');
  cfg->set("datum.S", rest.substr(0, colon2));
  if (colon2 != std::string::npos) {
    const std::string tail_part = rest.substr(colon2 + 1);
    if (kind == "power_law")
      cfg->set("datum.N_top", tail_part);
    else
      cfg->set("datum.ell", tail_part);
  }
  return true;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  static const std::set<std::string> subcommands = {
      "simulate",        "expand", "norms",  "montecarlo",
      "check-estimates", "check-invariants", "report"};

  if (args.empty() || args[0] == "help" || args[0] == "--help") {
    std::fputs(kUsage, args.empty() ? stderr : stdout);
    return args.empty() ? 2 : 0;
  }
  const std::string sub = args[0];
  if (!subcommands.count(sub)) {
    std::fprintf(stderr, "unknown subcommand '%s'\n\n%s", sub.c_str(), kUsage);
    return 2;
  }

  // Flag table: --flag -> config key. Flags override the loaded config.
  static const std::map<std::string, std::string> flag_keys = {
      {"--d", "grid.d"},          {"--n", "grid.n"},
      {"--L", "grid.L"},          {"--nt", "grid.nt"},
      {"--T", "grid.T"},          {"--seed", "seed"},
      {"--workers", "pool.workers"}, {"--out", "output.dir"},
      {"--M", "solver.M"},        {"--scale", "datum.scale"},
      {"--experiment", "experiment.kind"}, {"--k", "experiment.k"},
      {"--samples", "experiment.n_samples"}, {"--K", "experiment.K"},
      {"--norm", "experiment.norm"}, {"--shells", "experiment.shells"},
      {"--lemma", "experiment.lemma"}, {"--tolerance", "experiment.tolerance"},
      {"--randomize", "datum.randomize"}, {"--S", "datum.S"},
  };

  ExperimentConfig cfg;
  try {
    // First pass: --config loads the file, so later flags override it.
    for (std::size_t i = 1; i < args.size(); i += 2) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) {
          std::fprintf(stderr, "--config needs a path\n\n%s", kUsage);
          return 2;
        }
        cfg = load_config(args[i + 1]);
      }
    }
    for (std::size_t i = 1; i < args.size(); i += 2) {
      const std::string& flag = args[i];
      if (i + 1 >= args.size()) {
        std::fprintf(stderr, "flag %s needs a value\n\n%s", flag.c_str(), kUsage);
        return 2;
      }
      const std::string& value = args[i + 1];
      if (flag == "--config") continue;
      if (flag == "--datum") {
        if (!apply_datum_flag(value, &cfg)) {
          std::fprintf(stderr, "unparsable --datum '%s'\n\n%s", value.c_str(),
                       kUsage);
          return 2;
        }
        continue;
      }
      auto it = flag_keys.find(flag);
      if (it == flag_keys.end()) {
        std::fprintf(stderr, "unknown flag '%s'\n\n%s", flag.c_str(), kUsage);
        return 2;
      }
      cfg.set(it->second, value);
    }
  } catch (const contract_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  }

  // Grid-bound pipelines need the dimension up front.
  if (sub == "simulate" || sub == "expand" || sub == "norms" ||
      sub == "montecarlo") {
    if (!cfg.has("grid.d")) {
      std::fprintf(stderr, "missing required --d\n\n%s", kUsage);
      return 2;
    }
  }

  std::string outdir = cfg.get_str_or("output.dir", "");
  if (outdir.empty()) {
    const char* root = std::getenv(kOutRootEnv);
    outdir = (root ? std::string(root) : std::string("rnls_out")) + "/" + sub;
  }

  try {
    if (sub == "report") {
      const auto bad = verify_results(outdir);
      if (!bad.empty()) {
        for (const auto& b : bad)
          std::fprintf(stderr, "verify: %s\n", b.c_str());
        return 1;
      }
      std::ifstream in(fs::path(outdir) / "manifest.json", std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      std::printf("manifest intact in %s\n%s", outdir.c_str(), buf.str().c_str());
      return 0;
    }

    const auto t0 = std::chrono::steady_clock::now();
    Pipeline p;
    if (sub == "simulate") p = run_simulate(cfg);
    if (sub == "expand") p = run_expand(cfg);
    if (sub == "norms") p = run_norms(cfg);
    if (sub == "montecarlo") p = run_montecarlo(cfg);
    if (sub == "check-estimates") p = run_check_estimates(cfg);
    if (sub == "check-invariants") p = run_check_invariants(cfg);
    const auto t1 = std::chrono::steady_clock::now();

    const auto seed = static_cast<std::uint64_t>(cfg.get_int_or("seed", 0));
    save_results(outdir, p.records, cfg, seed,
                 std::chrono::duration<double, std::milli>(t1 - t0).count());
    std::fputs(p.summary.c_str(), stdout);
    std::printf("results in %s (%zu files + manifest.json)\n", outdir.c_str(),
                p.records.size());
    return p.exit_code;
  } catch (const contract_error& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace rnls::harness
