#pragma once

#include "dephaselab/operator_core.hpp"
#include "dephaselab/states.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Experiment driver behind the CLI: run configurations, sweep
// orchestration, CSV emission and the JSON run manifest.

namespace dephaselab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment run. Flat key=value settings; grids are kept in their
/// textual form and parsed on demand so the canonical config text (and its
/// hash) round-trips exactly.
struct RunConfig {
  std::string command;  // sweep | fringes | variance | qfi | coherence | compare
  std::string family = "ghz";  // family name; "graph:<path>" loads an edge list
  std::string n = "4";         // qubit count; ranges like "2:8" for qfi sweeps
  std::string mask;  // bitstring, 1 = Hadamard; empty = family default
  std::string p = "0:1:0.05";
  std::string phi = "0:pi:0.01";
  long long shots = 0;  // 0 disables sampled columns
  int resamples = 10000;
  std::uint64_t seed = 0;
  bool seed_explicit = false;  // bookkeeping for the env-var fallback
  std::string partitions;  // comma list of side-A digit strings; empty = standard set
  int k = 1;
  std::string out = "negativity,purity,entropy,qfi";  // sweep outputs
  std::string out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency
  int sdp_iteration_cap = 200;

  void apply_kv(const std::string& key, const std::string& value);
  static RunConfig from_file(const std::string& path);

  /// Canonical sorted key=value text. Excludes out_dir and threads, which
  /// affect where and how fast results appear but not what they are.
  std::string canonical_text() const;
  /// FNV-1a 64 of the canonical text, 16 hex digits.
  std::string config_hash() const;

  // Parsed views (throw ConfigError on malformed fields).
  std::vector<double> p_grid() const;
  std::vector<double> phi_grid() const;
  std::vector<int> n_values() const;
  int n_single() const;  // rejects ranges
  std::vector<Bipartition> partition_set() const;
  std::optional<EncodingMask> mask_override() const;
  std::vector<std::string> output_kinds() const;
  std::optional<GraphSpec> graph_spec() const;
  std::string family_name() const;  // "graph:<path>" -> "graph"
};

struct RunResult {
  std::vector<std::string> output_files;
  std::string manifest_file;
  std::string status;  // "ok" or "partial"
  int exit_code = 0;   // 0, or 3 on numeric/solver failure
};

/// Execute a run; writes one CSV per output plus the manifest into
/// config.out_dir. Throws ConfigError for malformed configs (exit 2 at the
/// CLI); solver failures are reported via exit_code 3 with partial outputs
/// flagged in the manifest.
RunResult run(const RunConfig& config);

/// Resolve the seed: explicit value, else DEPHASE_LAB_SEED, else default.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed);

// Grid-syntax helpers (exposed for tests). Numbers may carry a "pi"
// suffix: "pi", "2pi", "0.5pi".
double parse_angle(const std::string& token);
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_range(const std::string& text);

}  // namespace dephaselab
