#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rnls/common.hpp"
#include "rnls/harness.hpp"

using namespace rnls;
using namespace rnls::harness;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("rnls_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(static_cast<bool>(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

// Every regular file except the manifest, sorted by name. The manifest holds
// wall-clock metadata, so byte-identity claims are about the result files.
std::vector<std::string> result_names(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json")
      names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

void check_same_results(const fs::path& a, const fs::path& b) {
  const auto na = result_names(a), nb = result_names(b);
  REQUIRE(na == nb);
  REQUIRE(!na.empty());
  for (const auto& name : na) {
    INFO("file ", name);
    CHECK(slurp(a / name) == slurp(b / name));
  }
}

}  // namespace

TEST_CASE("config round-trips through save and load") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> nkeys(1, 12), keylen(1, 8), pick(0, 35);
  std::uniform_real_distribution<double> val(-1e6, 1e6);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
  const fs::path dir = fresh_dir("roundtrip");

  for (int trial = 0; trial < 20; ++trial) {
    ExperimentConfig cfg;
    const int nk = nkeys(rng);
    for (int i = 0; i < nk; ++i) {
      std::string key;
      for (int seg = 0; seg < 1 + i % 3; ++seg) {
        if (seg) key += '.';
        const int len = keylen(rng);
        for (int c = 0; c < len; ++c)
          key += alphabet[static_cast<std::size_t>(pick(rng))];
      }
      if (i % 2 == 0)
        cfg.set_num(key, val(rng));
      else
        cfg.set(key, "word_" + std::to_string(pick(rng)));
    }
    const fs::path file = dir / ("cfg_" + std::to_string(trial) + ".txt");
    save_config(file.string(), cfg);
    const ExperimentConfig back = load_config(file.string());
    CHECK(back == cfg);
    CHECK(back.hash() == cfg.hash());
  }
}

TEST_CASE("config text accepts comments and reports bad lines") {
  const ExperimentConfig cfg = parse_config(
      "# leading comment\n"
      "grid.d = 3   # trailing comment\n"
      "\n"
      "datum.kind = power_law\n"
      "  datum.S   =   0.25  \n");
  CHECK(cfg.get_int("grid.d") == 3);
  CHECK(cfg.get_str("datum.kind") == "power_law");
  CHECK(cfg.get_num("datum.S") == doctest::Approx(0.25));

  CHECK_THROWS_AS(parse_config("grid.d 3\n"), contract_error);
  CHECK_THROWS_AS(parse_config("bad key = 1\n"), contract_error);
  CHECK_THROWS_AS(cfg.get_num("datum.kind"), contract_error);
  CHECK_THROWS_AS(cfg.get_int("datum.S"), contract_error);
  CHECK_THROWS_AS(cfg.get_str("absent"), contract_error);
  CHECK(cfg.get_num_or("absent", 4.5) == 4.5);
  CHECK(cfg.get_int_or("absent", 9) == 9);
  CHECK(cfg.get_str_or("absent", "fb") == "fb");
}

TEST_CASE("config hash ignores key order and tracks semantic content") {
  const std::string sorted =
      "datum.S = 0.2\n"
      "grid.d = 3\n"
      "seed = 11\n";
  const std::string shuffled =
      "seed = 11\n"
      "datum.S = 0.2\n"
      "grid.d = 3\n";
  const ExperimentConfig a = parse_config(sorted);
  const ExperimentConfig b = parse_config(shuffled);
  CHECK(a.hash() == b.hash());
  CHECK(a == b);

  // Any semantic change moves the hash: a value, a key, an extra key.
  ExperimentConfig c = a;
  c.set("seed", "12");
  CHECK(c.hash() != a.hash());
  ExperimentConfig d = a;
  d.kv.erase("seed");
  d.set("seeds", "11");
  CHECK(d.hash() != a.hash());
  ExperimentConfig e = a;
  e.set("extra", "1");
  CHECK(e.hash() != a.hash());

  // Operational keys do not define the experiment: moving the output or
  // resizing the worker pool leaves the hash alone.
  ExperimentConfig f = a;
  f.set("output.dir", "/somewhere/else");
  f.set_int("pool.workers", 4);
  CHECK(f.hash() == a.hash());
  CHECK(f != a);
}

TEST_CASE("manifest lists every file and verification notices tampering") {
  const fs::path dir = fresh_dir("manifest");
  ExperimentConfig cfg;
  cfg.set_int("grid.d", 1);
  cfg.set("note", "manifest test");

  const std::vector<ResultRecord> records = {
      {"alpha.json", "{\n  \"x\": 1\n}\n"},
      {"beta.csv", "a,b\n1,2\n3,4\n"},
      {"gamma.csv", ""},
  };
  const ResultManifest man = save_results(dir.string(), records, cfg, 42, 12.5);
  CHECK(man.config_hash == cfg.hash());
  CHECK(man.seed == 42);
  REQUIRE(man.files.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(man.files[i].path == records[i].name);
    CHECK(man.files[i].bytes == records[i].content.size());
    CHECK(man.files[i].fnv64 == fnv1a64(records[i].content));
    CHECK(slurp(dir / records[i].name) == records[i].content);
  }

  CHECK(verify_results(dir.string()).empty());

  SUBCASE("content tamper") {
    spit(dir / "beta.csv", "a,b\n1,2\n3,5\n");
    const auto bad = verify_results(dir.string());
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("beta.csv") != std::string::npos);
  }
  SUBCASE("size tamper") {
    spit(dir / "alpha.json", "{}\n");
    const auto bad = verify_results(dir.string());
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("size mismatch") != std::string::npos);
  }
  SUBCASE("missing file") {
    fs::remove(dir / "gamma.csv");
    const auto bad = verify_results(dir.string());
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].find("gamma.csv: missing") != std::string::npos);
  }
  SUBCASE("missing manifest") {
    fs::remove(dir / "manifest.json");
    CHECK(!verify_results(dir.string()).empty());
  }
}

TEST_CASE("cli exit codes: success 0, validation 1, usage 2") {
  const fs::path dir = fresh_dir("cli_codes");

  CHECK(cli_run({"check-invariants", "--out", (dir / "inv").string()}) == 0);
  CHECK(cli_run({"expand", "--M", "3", "--datum", "power_law:0.3"}) == 2);
  CHECK(cli_run({"frobnicate"}) == 2);
  CHECK(cli_run({}) == 2);
  CHECK(cli_run({"expand", "--d", "1", "--bogus", "1"}) == 2);
  CHECK(cli_run({"expand", "--d", "1", "--M"}) == 2);
  CHECK(cli_run({"expand", "--d", "1", "--datum", "nonsense:1"}) == 2);

  // Validation failures inside the pipelines exit 1: the smoothing regime
  // bound 3S < 2S + 1/2 rejects S = 0.6.
  CHECK(cli_run({"montecarlo", "--d", "3", "--n", "16", "--L", "2", "--nt", "5",
                 "--datum", "power_law:0.6:4", "--experiment", "smoothing",
                 "--samples", "1", "--K", "3",
                 "--out", (dir / "bad").string()}) == 1);
  // Unknown experiment kind is also a config-validation failure.
  CHECK(cli_run({"montecarlo", "--d", "3", "--experiment", "warp",
                 "--out", (dir / "warp").string()}) == 1);
  // A config file that does not parse.
  spit(dir / "broken.cfg", "no equals sign here\n");
  CHECK(cli_run({"expand", "--config", (dir / "broken.cfg").string()}) == 1);

  // report: 0 on an intact directory, 1 once a byte changes.
  CHECK(cli_run({"report", "--out", (dir / "inv").string()}) == 0);
  std::string text = slurp(dir / "inv" / "invariants.json");
  text[text.find("err") + 1] = 'R';
  spit(dir / "inv" / "invariants.json", text);
  CHECK(cli_run({"report", "--out", (dir / "inv").string()}) == 1);
}

TEST_CASE("config file loads and flags override it") {
  const fs::path dir = fresh_dir("cli_config");
  spit(dir / "run.cfg",
       "grid.d = 1\n"
       "grid.nt = 9\n"
       "solver.M = 5\n"
       "datum.kind = power_law\n"
       "datum.S = 0.3\n"
       "seed = 7\n");
  CHECK(cli_run({"expand", "--config", (dir / "run.cfg").string(), "--M", "1",
                 "--out", (dir / "a").string()}) == 0);
  // --M overrode the file: only the k = 1 row exists.
  const std::string csv = slurp(dir / "a" / "expand.csv");
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n3,") == std::string::npos);
}

TEST_CASE("identical config and seed reproduce byte-identical results") {
  const fs::path dir = fresh_dir("cli_repro");
  const std::vector<std::string> base = {
      "montecarlo", "--d", "3", "--n", "16", "--L", "2", "--nt", "5",
      "--datum", "power_law:0.2:4", "--experiment", "smoothing",
      "--samples", "4", "--K", "3", "--shells", "1,2,4", "--seed", "5"};

  auto run_into = [&](const std::string& sub, const std::string& workers) {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--workers", workers, "--out", (dir / sub).string()});
    REQUIRE(cli_run(args) == 0);
  };
  run_into("a", "1");
  run_into("b", "1");
  run_into("c", "4");

  check_same_results(dir / "a", dir / "b");   // rerun
  check_same_results(dir / "a", dir / "c");   // worker-pool independence

  // The manifests agree on everything but wall time.
  const auto va = verify_results((dir / "a").string());
  CHECK(va.empty());
  std::string ma = slurp(dir / "a" / "manifest.json");
  std::string mc = slurp(dir / "c" / "manifest.json");
  auto strip_wall = [](std::string m) {
    const std::size_t at = m.find("\"wall_ms\"");
    const std::size_t end = m.find('\n', at);
    return m.erase(at, end - at);
  };
  CHECK(strip_wall(ma) == strip_wall(mc));

  // A different seed changes the numeric outputs.
  std::vector<std::string> args = base;
  args[args.size() - 1] = "6";
  args.insert(args.end(), {"--out", (dir / "d").string()});
  REQUIRE(cli_run(args) == 0);
  CHECK(slurp(dir / "a" / "smoothing.json") != slurp(dir / "d" / "smoothing.json"));
}

TEST_CASE("tail campaign through the cli writes survival data") {
  const fs::path dir = fresh_dir("cli_tail");
  CHECK(cli_run({"montecarlo", "--d", "3", "--n", "16", "--nt", "5",
                 "--L", "2", "--datum", "lattice_bump:0.4:2,0,0",
                 "--experiment", "tail", "--k", "1", "--samples", "200",
                 "--K", "2", "--seed", "3", "--out", (dir / "t").string()}) == 0);
  const std::string json = slurp(dir / "t" / "tails.json");
  CHECK(json.find("\"theta\"") != std::string::npos);
  const std::string surv = slurp(dir / "t" / "tail_survival.csv");
  CHECK(surv.rfind("lambda,p_hat\n", 0) == 0);
  CHECK(std::count(surv.begin(), surv.end(), '\n') > 4);
  CHECK(verify_results((dir / "t").string()).empty());
}
