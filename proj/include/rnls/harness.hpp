#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rnls/experiments.hpp"
#include "rnls/grid.hpp"

namespace rnls::harness {

inline constexpr const char* kToolVersion = "rnls 1.0.0";

// Environment variable naming the default output root; results for a
// subcommand land in "<root>/<subcommand>" unless --out or output.dir says
// otherwise.
inline constexpr const char* kOutRootEnv = "RNLS_OUT_ROOT";

// --- configuration ---------------------------------------------------------

// Structured text configuration: dotted keys with scalar values, one
// "key = value" per line, '#' comments. The map keeps keys sorted, so the
// canonical serialization (and therefore the hash) is independent of the
// order keys appeared in the file.
struct ExperimentConfig {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  // Typed getters; violations are reported with the offending key path.
  const std::string& get_str(const std::string& key) const;
  std::string get_str_or(const std::string& key, const std::string& fb) const;
  double get_num(const std::string& key) const;
  double get_num_or(const std::string& key, double fb) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fb) const;

  void set(const std::string& key, const std::string& value);
  void set_num(const std::string& key, double value);
  void set_int(const std::string& key, long long value);

  // Sorted "key = value\n" lines; load_config(save) reproduces `kv` exactly.
  std::string canonical() const;
  // FNV-1a 64 over the canonical serialization, minus the operational keys
  // output.dir and pool.workers: stable under key reordering, sensitive to
  // exactly the fields that determine the computed numbers. Two configs that
  // differ only in where results land or how many workers share the sampling
  // describe the same experiment, and reproducibility demands they hash alike.
  std::uint64_t hash() const;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

// Builders from the conventional key groups (grid.*, datum.*); violations
// carry the key path in the message.
GridPtr grid_from(const ExperimentConfig& cfg);
expt::DatumSpec datum_from(const ExperimentConfig& cfg);

// --- results and manifest ----------------------------------------------------

// One result file to be written: `name` is relative to the output directory,
// `content` its full byte content. Numeric payloads are rendered by the
// pipelines with deterministic formatting ("%.17g", fixed key order), so a
// rerun with the same config and seed reproduces each file byte for byte.
struct ResultRecord {
  std::string name;
  std::string content;
};

struct FileEntry {
  std::string path;
  std::uint64_t bytes = 0;
  std::uint64_t fnv64 = 0;
};

struct ResultManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string tool_version;
  double wall_ms = 0.0;
  std::vector<FileEntry> files;  // every emitted file, with checksum
};

std::uint64_t fnv1a64(const std::string& bytes);

// Writes every record (single-threaded) plus "manifest.json" listing each
// with its checksum. `dir` is created if missing.
ResultManifest save_results(const std::string& dir,
                            const std::vector<ResultRecord>& records,
                            const ExperimentConfig& cfg, std::uint64_t seed,
                            double wall_ms);

// Re-reads manifest.json in `dir`, recomputes each file's checksum, and
// returns the mismatches (empty = intact). Missing files count as mismatches.
std::vector<std::string> verify_results(const std::string& dir);

// --- command line ------------------------------------------------------------

// Exit codes: 0 success, 1 validation failure (a contract was violated or a
// check did not pass), 2 usage error (unknown subcommand/flag, missing or
// unparsable argument).
int cli_run(const std::vector<std::string>& args);

}  // namespace rnls::harness
