#include "dephaselab/runner.hpp"

#include "dephaselab/channels.hpp"
#include "dephaselab/coherence.hpp"
#include "dephaselab/metrics.hpp"
#include "dephaselab/metrology.hpp"
#include "dephaselab/shotsim.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace dephaselab {

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";
constexpr std::uint64_t kDefaultSeed = 0xDE9A5E;
constexpr double kCompareTolerance = 1e-7;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// -- parsing -----------------------------------------------------------------

double parse_plain_number(const std::string& token) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("malformed number: '" + token + "'");
  }
  if (consumed != token.size()) {
    throw ConfigError("malformed number: '" + token + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

double parse_angle(const std::string& token) {
  if (token.size() >= 2 && token.compare(token.size() - 2, 2, "pi") == 0) {
    const std::string coef = token.substr(0, token.size() - 2);
    if (coef.empty()) return std::numbers::pi;
    if (coef == "-") return -std::numbers::pi;
    return parse_plain_number(coef) * std::numbers::pi;
  }
  return parse_plain_number(token);
}

std::vector<double> parse_grid(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() == 1) {
    return {parse_angle(parts[0])};
  }
  if (parts.size() != 3) {
    throw ConfigError("grid must be a single value or start:stop:step, got '" + text + "'");
  }
  const double start = parse_angle(parts[0]);
  const double stop = parse_angle(parts[1]);
  const double step = parse_angle(parts[2]);
  if (step <= 0.0 || stop < start) {
    throw ConfigError("grid needs stop >= start and step > 0, got '" + text + "'");
  }
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double value = start + i * step;
    if (value > stop + 1e-12) break;
    // Snap the endpoint so inclusive grids end exactly on stop.
    grid.push_back(std::abs(value - stop) <= 1e-12 ? stop : value);
  }
  return grid;
}

std::vector<int> parse_int_range(const std::string& text) {
  const std::vector<std::string> parts = split(text, ':');
  auto to_int = [](const std::string& s) {
    const double v = parse_plain_number(s);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9) {
      throw ConfigError("expected an integer, got '" + s + "'");
    }
    return i;
  };
  if (parts.size() == 1) return {to_int(parts[0])};
  if (parts.size() != 2 && parts.size() != 3) {
    throw ConfigError("integer range must be start:stop[:step], got '" + text + "'");
  }
  const int start = to_int(parts[0]);
  const int stop = to_int(parts[1]);
  const int step = parts.size() == 3 ? to_int(parts[2]) : 1;
  if (step <= 0 || stop < start) {
    throw ConfigError("integer range needs stop >= start and step > 0");
  }
  std::vector<int> values;
  for (int v = start; v <= stop; v += step) values.push_back(v);
  return values;
}

// -- RunConfig ----------------------------------------------------------------

void RunConfig::apply_kv(const std::string& key, const std::string& value) {
  auto to_ll = [&](const std::string& s) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      throw ConfigError("malformed integer for key '" + key + "': '" + s + "'");
    }
  };
  if (key == "command") {
    command = value;
  } else if (key == "family") {
    family = value;
  } else if (key == "n") {
    n = value;
  } else if (key == "mask") {
    mask = value;
  } else if (key == "p") {
    p = value;
  } else if (key == "phi") {
    phi = value;
  } else if (key == "shots") {
    shots = to_ll(value);
  } else if (key == "resamples") {
    resamples = static_cast<int>(to_ll(value));
  } else if (key == "seed") {
    try {
      seed = std::stoull(value);
      seed_explicit = true;
    } catch (const std::exception&) {
      throw ConfigError("malformed seed: '" + value + "'");
    }
  } else if (key == "partitions") {
    partitions = value;
  } else if (key == "k") {
    k = static_cast<int>(to_ll(value));
  } else if (key == "out") {
    out = value;
  } else if (key == "out-dir" || key == "out_dir") {
    out_dir = value;
  } else if (key == "threads") {
    threads = static_cast<int>(to_ll(value));
  } else if (key == "sdp_iteration_cap") {
    sdp_iteration_cap = static_cast<int>(to_ll(value));
  } else {
    throw ConfigError("unknown config key: '" + key + "'");
  }
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    // Trim.
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value");
    }
    config.apply_kv(line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

std::string RunConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["command"] = command;
  kv["family"] = family;
  kv["k"] = std::to_string(k);
  kv["mask"] = mask;
  kv["n"] = n;
  kv["out"] = out;
  kv["p"] = p;
  kv["partitions"] = partitions;
  kv["phi"] = phi;
  kv["resamples"] = std::to_string(resamples);
  kv["sdp_iteration_cap"] = std::to_string(sdp_iteration_cap);
  kv["seed"] = std::to_string(seed);
  kv["shots"] = std::to_string(shots);
  std::string text;
  for (const auto& [key, value] : kv) {
    text += key;
    text += '=';
    text += value;
    text += '\n';
  }
  return text;
}

std::string RunConfig::config_hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text())));
  return buf;
}

std::vector<double> RunConfig::p_grid() const {
  std::vector<double> grid = parse_grid(p);
  for (double v : grid) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ConfigError("noise strength outside [0,1]: " + fmt_short(v));
    }
  }
  return grid;
}

std::vector<double> RunConfig::phi_grid() const { return parse_grid(phi); }

std::vector<int> RunConfig::n_values() const {
  std::vector<int> values = parse_int_range(n);
  for (int v : values) {
    if (v < 1 || v > 10) {
      throw ConfigError("qubit count must lie in [1,10], got " + std::to_string(v));
    }
  }
  return values;
}

int RunConfig::n_single() const {
  const std::vector<int> values = n_values();
  if (values.size() != 1) {
    throw ConfigError("this command needs a single qubit count, got range '" + n + "'");
  }
  return values.front();
}

std::vector<Bipartition> RunConfig::partition_set() const {
  if (partitions.empty()) {
    return Bipartition::standard_set(n_single());
  }
  std::vector<Bipartition> parts;
  for (const std::string& token : split(partitions, ',')) {
    if (token.empty()) {
      throw ConfigError("empty partition token");
    }
    std::vector<int> side_a;
    for (char c : token) {
      if (c < '1' || c > '9') {
        throw ConfigError("partition tokens are digit strings like 1 or 12, got '" + token +
                          "'");
      }
      side_a.push_back(c - '0');
    }
    try {
      parts.emplace_back(side_a, n_single());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad partition '") + token + "': " + e.what());
    }
  }
  return parts;
}

std::optional<EncodingMask> RunConfig::mask_override() const {
  if (mask.empty()) return std::nullopt;
  try {
    return EncodingMask::from_bitstring(mask);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> RunConfig::output_kinds() const {
  std::vector<std::string> kinds;
  for (const std::string& kind : split(out, ',')) {
    if (kind.empty()) continue;
    if (kind != "negativity" && kind != "purity" && kind != "entropy" && kind != "qfi") {
      throw ConfigError("unknown sweep output '" + kind + "'");
    }
    kinds.push_back(kind);
  }
  if (kinds.empty()) {
    throw ConfigError("no sweep outputs requested");
  }
  return kinds;
}

std::string RunConfig::family_name() const {
  const auto colon = family.find(':');
  return colon == std::string::npos ? family : family.substr(0, colon);
}

std::optional<GraphSpec> RunConfig::graph_spec() const {
  const auto colon = family.find(':');
  if (family_name() != "graph") return std::nullopt;
  if (colon == std::string::npos) {
    throw ConfigError("graph family needs a file: --family graph:<edge-list>");
  }
  try {
    return GraphSpec::from_file(family.substr(colon + 1));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& explicit_seed) {
  if (explicit_seed) return *explicit_seed;
  if (const char* env = std::getenv("DEPHASE_LAB_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("DEPHASE_LAB_SEED is not a valid integer");
    }
  }
  return kDefaultSeed;
}

namespace {

// -- infrastructure -----------------------------------------------------------

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
    if (!out_) {
      throw ConfigError("cannot open output file: " + path.string());
    }
  }

  void header(const std::vector<std::string>& columns) { line(columns); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_double(v));
    line(cells);
  }

 private:
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::ofstream out_;
};

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ProbeFamily family_from_config(const RunConfig& config) {
  try {
    return make_family(config.family_name(), config.n_single(), config.mask_override(),
                       config.graph_spec());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

struct RunContext {
  const RunConfig& config;
  std::filesystem::path dir;
  std::string hash8;
  std::vector<ordered_json> outputs;
  std::vector<std::string> notes;
  std::vector<std::string> files;
  std::string status = "ok";
  int exit_code = 0;

  std::filesystem::path csv_path(const std::string& kind) const {
    return dir / (kind + "-" + hash8 + ".csv");
  }
  void record_output(const std::string& kind, const std::filesystem::path& path) {
    outputs.push_back({{"kind", kind}, {"path", path.filename().string()}});
    files.push_back(path.string());
  }
};

// -- commands -----------------------------------------------------------------

void cmd_sweep(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> grid = cfg.p_grid();
  const std::vector<std::string> kinds = cfg.output_kinds();
  const std::vector<Bipartition> parts = cfg.partition_set();
  const ProbeFamily family = family_from_config(cfg);
  const Operator generator = collective_z_generator(family.num_qubits());

  const bool want_neg = std::count(kinds.begin(), kinds.end(), "negativity") > 0;
  const bool want_pur = std::count(kinds.begin(), kinds.end(), "purity") > 0;
  const bool want_ent = std::count(kinds.begin(), kinds.end(), "entropy") > 0;
  const bool want_qfi = std::count(kinds.begin(), kinds.end(), "qfi") > 0;

  struct Row {
    std::vector<double> neg;
    double purity = 0.0, entropy = 0.0, qfi_value = 0.0;
  };
  std::vector<Row> rows(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
    DensityMatrix rho = family.noisy_state(grid[i]);
    Row& row = rows[i];
    if (want_neg) {
      for (const Bipartition& part : parts) row.neg.push_back(negativity(rho, part));
    }
    if (want_pur) row.purity = purity(rho);
    if (want_ent) row.entropy = entropy(rho);
    if (want_qfi) row.qfi_value = qfi(rho, generator);
  });

  for (const std::string& kind : kinds) {
    const auto path = ctx.csv_path(kind);
    CsvWriter csv(path);
    if (kind == "negativity") {
      std::vector<std::string> header = {"p"};
      for (const Bipartition& part : parts) header.push_back("negativity_" + part.label());
      csv.header(header);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> cells = {grid[i]};
        cells.insert(cells.end(), rows[i].neg.begin(), rows[i].neg.end());
        csv.row(cells);
      }
    } else {
      csv.header({"p", kind});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Row& row = rows[i];
        const double value = kind == "purity" ? row.purity
                             : kind == "entropy" ? row.entropy
                                                 : row.qfi_value;
        csv.row({grid[i], value});
      }
    }
    ctx.record_output(kind, path);
  }
}

void cmd_fringes(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> ps = cfg.p_grid();
  const std::vector<double> phis = cfg.phi_grid();
  const ProbeFamily family = family_from_config(cfg);

  std::vector<FringeCurve> curves(ps.size(), FringeCurve{family, 0.0, {}, {}});
  parallel_for(ps.size(), cfg.threads, [&](std::size_t i) {
    curves[i] = fringe(family, ps[i], phis);
  });

  const bool sampled = cfg.shots > 0;
  struct Sampled {
    double frequency = 0.0, lower = 0.0, upper = 0.0;
  };
  std::vector<Sampled> stats(sampled ? ps.size() * phis.size() : 0);
  if (sampled) {
    parallel_for(stats.size(), cfg.threads, [&](std::size_t t) {
      const std::size_t pi = t / phis.size();
      const std::size_t fi = t % phis.size();
      const double eps = curves[pi].expectation[fi];
      const std::uint64_t task_seed = derive_stream_seed(cfg.seed, t);
      CountRecord record = sample_counts({eps, 1.0 - eps}, cfg.shots, task_seed,
                                         {"all_plus", "rest"});
      auto freq = [](const CountRecord& r) { return normalized_frequency(r, 0); };
      ConfidenceInterval ci =
          mc_interval(freq, record, cfg.resamples, SigmaLevel::Three, task_seed);
      stats[t] = {ci.center, ci.lower, ci.upper};
    });
    ctx.notes.push_back("3-sigma Monte-Carlo intervals from " + std::to_string(cfg.resamples) +
                        " Poisson resamples of " + std::to_string(cfg.shots) + " shots");
  }

  const auto path = ctx.csv_path("fringes");
  CsvWriter csv(path);
  if (ps.size() == 1) {
    std::vector<std::string> header = {"phi", "expectation"};
    if (sampled) {
      header.insert(header.end(), {"sampled_frequency", "lower_3sigma", "upper_3sigma"});
    }
    csv.header(header);
    for (std::size_t fi = 0; fi < phis.size(); ++fi) {
      std::vector<double> cells = {phis[fi], curves[0].expectation[fi]};
      if (sampled) {
        cells.insert(cells.end(),
                     {stats[fi].frequency, stats[fi].lower, stats[fi].upper});
      }
      csv.row(cells);
    }
  } else {
    std::vector<std::string> header = {"p", "phi", "expectation"};
    if (sampled) {
      header.insert(header.end(), {"sampled_frequency", "lower_3sigma", "upper_3sigma"});
    }
    csv.header(header);
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      for (std::size_t fi = 0; fi < phis.size(); ++fi) {
        std::vector<double> cells = {ps[pi], phis[fi], curves[pi].expectation[fi]};
        if (sampled) {
          const Sampled& s = stats[pi * phis.size() + fi];
          cells.insert(cells.end(), {s.frequency, s.lower, s.upper});
        }
        csv.row(cells);
      }
    }
  }
  ctx.record_output("fringes", path);
}

void cmd_variance(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> ps = cfg.p_grid();
  const std::vector<double> phis = cfg.phi_grid();
  const ProbeFamily family = family_from_config(cfg);
  const long long nu = cfg.shots > 0 ? cfg.shots : 1000;

  std::vector<VarianceReport> reports(ps.size());
  parallel_for(ps.size(), cfg.threads, [&](std::size_t i) {
    FringeCurve curve = fringe(family, ps[i], phis);
    try {
      reports[i] = phase_variance(curve, nu);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  });

  const auto path = ctx.csv_path("variance");
  CsvWriter csv(path);
  csv.header({"p", "phi_star", "epsilon", "slope", "var_phi"});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const VarianceReport& r = reports[i];
    csv.row({ps[i], r.phi_star, r.epsilon, r.slope, r.var_phi});
  }
  ctx.record_output("variance", path);
}

void cmd_qfi(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<int> ns = cfg.n_values();
  const std::vector<double> ps = cfg.p_grid();
  std::vector<QfiSweepRow> rows;
  try {
    rows = qfi_sweep(cfg.family_name(), ns, ps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  const auto path = ctx.csv_path("qfi");
  CsvWriter csv(path);
  csv.header({"n", "p", "qfi", "qfi_closed_form", "snl", "hl"});
  for (const QfiSweepRow& row : rows) {
    csv.row({static_cast<double>(row.n), row.p, row.qfi_numeric, row.qfi_closed_form,
             row.shot_noise_limit, row.heisenberg_limit});
  }
  ctx.record_output("qfi", path);
}

void cmd_coherence(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> ps = cfg.p_grid();
  const ProbeFamily family = family_from_config(cfg);
  sdp::Options opts;
  opts.max_iterations = cfg.sdp_iteration_cap;

  struct Point {
    bool ok = false;
    double value = 0.0, gap = 0.0;
    int iterations = 0;
    std::string error;
  };
  std::vector<Point> points(ps.size());
  parallel_for(ps.size(), cfg.threads, [&](std::size_t i) {
    try {
      RobustnessResult result = robustness(family.noisy_state(ps[i]), cfg.k, opts);
      points[i] = {true, result.value, result.certificate.dual_gap,
                   result.certificate.iterations, {}};
    } catch (const sdp::SolverError& e) {
      points[i] = {false, 0.0, e.last_gap(), e.iterations(), e.what()};
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  });

  const auto path = ctx.csv_path("coherence");
  CsvWriter csv(path);
  csv.header({"p", "robustness_k" + std::to_string(cfg.k), "dual_gap", "iterations"});
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Point& pt = points[i];
    if (pt.ok) {
      csv.row({ps[i], pt.value, pt.gap, static_cast<double>(pt.iterations)});
    } else {
      ctx.status = "partial";
      ctx.exit_code = 3;
      ctx.notes.push_back("solver failure at p=" + fmt_short(ps[i]) + ": " + pt.error);
    }
  }
  ctx.record_output("coherence", path);
}

void cmd_compare(RunContext& ctx) {
  const RunConfig& cfg = ctx.config;
  const std::vector<double> ps = cfg.p_grid();
  const ProbeFamily family = family_from_config(cfg);
  const int n = family.num_qubits();
  const Operator generator = collective_z_generator(n);
  const std::string name = cfg.family_name();
  const bool bare_ghz = name == "ghz" && !cfg.mask_override();
  const bool encoded_ghz = name == "ghz_encoded" && !cfg.mask_override();
  const Bipartition one_vs_rest(std::vector<int>{1}, n);

  struct Row {
    double neg = 0.0, pur = 0.0, ent = 0.0, fisher = 0.0;
  };
  std::vector<Row> rows(ps.size());
  parallel_for(ps.size(), cfg.threads, [&](std::size_t i) {
    DensityMatrix rho = family.noisy_state(ps[i]);
    rows[i] = {negativity(rho, one_vs_rest), purity(rho), entropy(rho), qfi(rho, generator)};
  });

  const auto path = ctx.csv_path("compare");
  CsvWriter csv(path);
  double max_dev = 0.0;
  std::map<std::string, double> dev_by_metric;
  if (bare_ghz || encoded_ghz) {
    std::vector<std::string> header = {"p"};
    if (bare_ghz) header.insert(header.end(), {"negativity", "negativity_closed"});
    header.insert(header.end(), {"purity", "purity_closed", "entropy", "entropy_closed",
                                 "qfi", "qfi_closed"});
    csv.header(header);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const ClosedFormValues cf = closed_form_suite(n, ps[i]);
      const Row& row = rows[i];
      std::vector<double> cells = {ps[i]};
      auto push_pair = [&](const std::string& metric, double numeric, double closed) {
        cells.push_back(numeric);
        cells.push_back(closed);
        const double dev = std::abs(numeric - closed);
        max_dev = std::max(max_dev, dev);
        dev_by_metric[metric] = std::max(dev_by_metric[metric], dev);
      };
      if (bare_ghz) {
        push_pair("negativity", row.neg, cf.bare_negativity);
        push_pair("purity", row.pur, cf.bare_purity);
        push_pair("entropy", row.ent, cf.bare_entropy);
        push_pair("qfi", row.fisher, cf.bare_qfi);
      } else {
        push_pair("purity", row.pur, cf.encoded_purity);
        push_pair("entropy", row.ent, cf.encoded_entropy);
        push_pair("qfi", row.fisher, cf.encoded_qfi);
      }
      csv.row(cells);
    }
    for (const auto& [metric, dev] : dev_by_metric) {
      ctx.notes.push_back("max_abs_deviation_" + metric + "=" + fmt_double(dev));
    }
    ctx.notes.push_back("max_abs_deviation=" + fmt_double(max_dev));
    if (max_dev > kCompareTolerance) {
      ctx.status = "partial";
      ctx.exit_code = 3;
      ctx.notes.push_back("closed-form deviation exceeds " + fmt_double(kCompareTolerance));
    }
  } else {
    csv.header({"p", "negativity", "purity", "entropy", "qfi"});
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const Row& row = rows[i];
      csv.row({ps[i], row.neg, row.pur, row.ent, row.fisher});
    }
    ctx.notes.push_back("numeric only: no closed forms for family " + name);
  }
  ctx.record_output("compare", path);
}

void validate_manifest_roundtrip(const std::filesystem::path& manifest_path,
                                 const std::string& expected_hash) {
  std::ifstream in(manifest_path);
  ordered_json manifest = ordered_json::parse(in);
  RunConfig echo;
  for (const auto& [key, value] : manifest.at("config").items()) {
    echo.apply_kv(key, value.get<std::string>());
  }
  if (echo.config_hash() != expected_hash ||
      manifest.at("config_hash").get<std::string>() != expected_hash) {
    throw std::logic_error("manifest config echo does not reproduce the config hash");
  }
}

}  // namespace

RunResult run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();

  RunContext ctx{config, config.out_dir, config.config_hash().substr(0, 8), {}, {}, {}, "ok", 0};
  std::filesystem::create_directories(ctx.dir);

  if (config.command == "sweep") {
    cmd_sweep(ctx);
  } else if (config.command == "fringes") {
    cmd_fringes(ctx);
  } else if (config.command == "variance") {
    cmd_variance(ctx);
  } else if (config.command == "qfi") {
    cmd_qfi(ctx);
  } else if (config.command == "coherence") {
    cmd_coherence(ctx);
  } else if (config.command == "compare") {
    cmd_compare(ctx);
  } else {
    throw ConfigError("unknown command: '" + config.command + "'");
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ordered_json manifest;
  manifest["command"] = config.command;
  ordered_json config_echo;
  {
    std::istringstream lines(config.canonical_text());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      config_echo[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  manifest["config"] = config_echo;
  manifest["config_hash"] = config.config_hash();
  manifest["seed"] = config.seed;
  manifest["versions"] = {{"dephase-lab", kVersion},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION)}};
  manifest["wall_time_s"] = wall;
  manifest["outputs"] = ctx.outputs;
  manifest["status"] = ctx.status;
  manifest["notes"] = ctx.notes;

  const auto manifest_path = ctx.dir / ("manifest-" + ctx.hash8 + ".json");
  {
    std::ofstream out(manifest_path);
    if (!out) {
      throw ConfigError("cannot open manifest file: " + manifest_path.string());
    }
    out << manifest.dump(2) << '\n';
  }
  validate_manifest_roundtrip(manifest_path, config.config_hash());

  RunResult result;
  result.output_files = ctx.files;
  result.manifest_file = manifest_path.string();
  result.status = ctx.status;
  result.exit_code = ctx.exit_code;
  return result;
}

}  // namespace dephaselab
