#pragma once

// Experiment runner: builds a workload and a structure, serves the trace and
// records cumulative costs. Also the offline optimizer entry point.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "santree/demand.hpp"
#include "santree/offline_opt.hpp"
#include "santree/online.hpp"
#include "santree/tree.hpp"
#include "santree/workloads.hpp"

namespace santree {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class WorkloadError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class InvariantError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitConfig = 2;
inline constexpr int kExitWorkload = 3;
inline constexpr int kExitInvariant = 4;

enum class StructureKind { StaticBalanced, StaticOptimal, SplayNet, CentroidSplayNet };
enum class WorkloadKind { Uniform, FiniteUniform, Temporal, File };

inline StructureKind parse_structure(const std::string& s) {
  if (s == "static-balanced") return StructureKind::StaticBalanced;
  if (s == "static-optimal") return StructureKind::StaticOptimal;
  if (s == "splaynet") return StructureKind::SplayNet;
  if (s == "centroid-splaynet") return StructureKind::CentroidSplayNet;
  throw ConfigError("unknown structure '" + s + "'");
}

inline WorkloadKind parse_workload(const std::string& s) {
  if (s == "uniform") return WorkloadKind::Uniform;
  if (s == "finite-uniform") return WorkloadKind::FiniteUniform;
  if (s == "temporal") return WorkloadKind::Temporal;
  if (s == "trace") return WorkloadKind::File;
  throw ConfigError("unknown workload '" + s + "'");
}

struct ExperimentConfig {
  StructureKind structure = StructureKind::SplayNet;
  int k = 2;
  int n = 0;
  WorkloadKind workload = WorkloadKind::Uniform;
  std::size_t requests = 0;
  double theta = 0.5;
  int window = 64;
  std::uint64_t seed = 0;
  std::string trace_file;
  ColumnSpec columns;
  std::string trace_cache;  // optional: write the served trace here
  std::string output;       // CSV path; empty = no file
  std::size_t stride = 1000;
  bool verify = false;  // re-derive every cost from edge snapshots
};

struct CsvRow {
  std::size_t index = 0;
  Cost routing_sum = 0;
  Cost adjustment_sum = 0;
};

struct ExperimentResult {
  std::string structure;
  std::string provenance;
  int n = 0;
  std::size_t requests = 0;
  std::size_t history_draws = 0;
  Cost routing_total = 0;
  Cost adjustment_total = 0;
  std::uint64_t rotations = 0;
  std::vector<CsvRow> rows;

  double average() const { return requests == 0 ? 0.0 : static_cast<double>(routing_total + adjustment_total) / static_cast<double>(requests); }
};

inline bool verify_requested_by_env() {
  const char* v = std::getenv("SANTREE_VERIFY");
  return v != nullptr && std::string(v) == "1";
}

/// total / count rounded half-up to 6 decimals, computed in integers.
inline std::string format_average(Cost total, std::uint64_t count) {
  if (count == 0) return "0.000000";
  const unsigned __int128 scaled = (static_cast<unsigned __int128>(total) * 2000000u + count) / (2u * static_cast<unsigned __int128>(count));
  const auto whole = static_cast<unsigned long long>(scaled / 1000000u);
  const auto frac = static_cast<unsigned long long>(scaled % 1000000u);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%llu.%06llu", whole, frac);
  return buf;
}

inline constexpr const char* kCsvHeader = "request_index,routing_cost_sum,adjustment_cost_sum,cumulative_avg";

inline void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows)
    out << r.index << ',' << r.routing_sum << ',' << r.adjustment_sum << ',' << format_average(r.routing_sum + r.adjustment_sum, r.index)
        << '\n';
}

/// Writes through a sibling temp file and renames it into place.
inline void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw WorkloadError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw WorkloadError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw WorkloadError("cannot move output into place at " + path);
  }
}

inline void check_config(const ExperimentConfig& cfg) {
  if (cfg.k < 2) throw ConfigError("k must be at least 2");
  if (cfg.n < 2) throw ConfigError("nodes must be at least 2");
  if (cfg.stride < 1) throw ConfigError("stride must be at least 1");
  if (cfg.workload == WorkloadKind::Temporal) {
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw ConfigError("theta must lie in (0, 1]");
    if (cfg.window < 1) throw ConfigError("window must be at least 1");
    if (cfg.requests < 1) throw ConfigError("temporal workload needs at least one request");
  }
  if (cfg.workload == WorkloadKind::File) {
    if (cfg.trace_file.empty()) throw ConfigError("trace workload needs --trace-file");
    if (cfg.columns.src < 0 || cfg.columns.dst < 0) throw ConfigError("column indices must be nonnegative");
  }
}

inline Trace build_workload(const ExperimentConfig& cfg) {
  check_config(cfg);
  Trace t;
  try {
    switch (cfg.workload) {
      case WorkloadKind::Uniform:
        t = gen_uniform(cfg.n, cfg.requests, cfg.seed);
        break;
      case WorkloadKind::FiniteUniform:
        t = gen_finite_uniform(cfg.n);
        break;
      case WorkloadKind::Temporal:
        t = gen_temporal(cfg.n, cfg.requests, {cfg.theta, cfg.window, cfg.seed});
        break;
      case WorkloadKind::File:
        t = load_trace(cfg.trace_file, cfg.n, cfg.columns);
        break;
    }
  } catch (const std::exception& e) {
    throw WorkloadError(e.what());
  }
  if (!cfg.trace_cache.empty()) {
    std::ostringstream out;
    write_trace(out, t);
    write_file_atomic(cfg.trace_cache, out.str());
  }
  return t;
}

inline std::unique_ptr<Strategy> build_structure(const ExperimentConfig& cfg, const Trace& trace) {
  const int n = trace.n;
  const int k = cfg.k;
  switch (cfg.structure) {
    case StructureKind::StaticBalanced:
      return std::make_unique<StaticNetwork>(balanced_tree(n, k), "static-balanced");
    case StructureKind::StaticOptimal:
      return std::make_unique<StaticNetwork>(optimal_tree_generic(tally(trace), k).tree, "static-optimal");
    case StructureKind::SplayNet:
      return std::make_unique<SplayNet>(n, k);
    case StructureKind::CentroidSplayNet:
      if (n < k + 3) throw ConfigError("centroid-splaynet needs at least k + 3 nodes, got " + std::to_string(n));
      return std::make_unique<CentroidSplayNet>(n, k);
  }
  throw ConfigError("unknown structure");
}

/// Serves every request. With `verify`, each step is checked against an
/// independent edge-set snapshot and the validator; mismatches throw
/// InvariantError. Rows are sampled every `stride` requests plus a final row.
inline ExperimentResult serve_trace(Strategy& s, const Trace& trace, std::size_t stride = 1000, bool verify = false) {
  if (stride < 1) throw ConfigError("stride must be at least 1");
  ExperimentResult r;
  r.structure = s.name();
  r.provenance = trace.provenance;
  r.n = trace.n;
  r.requests = trace.requests.size();
  r.history_draws = trace.history_draws;
  const KaryTree& topo = s.topology();
  for (std::size_t i = 0; i < trace.requests.size(); ++i) {
    const auto [u, v] = trace.requests[i];
    EdgeSet before;
    Cost expected_routing = 0;
    if (verify) {
      before = topo.edges();
      expected_routing = u == v ? 0 : distance(topo, u, v);
    }
    const ServeOutcome out = s.serve(u, v);
    if (verify) {
      const std::string where = " at request " + std::to_string(i + 1);
      if (out.routing != expected_routing)
        throw InvariantError("routing cost mismatch" + where + ": reported " + std::to_string(out.routing) + ", path length " +
                             std::to_string(expected_routing));
      const Cost diff = edge_diff(before, topo.edges());
      if (out.adjustment != diff)
        throw InvariantError("adjustment cost mismatch" + where + ": reported " + std::to_string(out.adjustment) + ", edge diff " +
                             std::to_string(diff));
      if (auto bad = find_violation(topo)) throw InvariantError("search-tree invariant broken" + where + ": " + *bad);
      if (auto bad = s.check_invariants()) throw InvariantError("structure invariant broken" + where + ": " + *bad);
    }
    r.routing_total += out.routing;
    r.adjustment_total += out.adjustment;
    r.rotations += static_cast<std::uint64_t>(out.rotations);
    const std::size_t served = i + 1;
    if (served % stride == 0 || served == trace.requests.size()) r.rows.push_back({served, r.routing_total, r.adjustment_total});
  }
  return r;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Trace trace = build_workload(cfg);
  if (trace.n < 2) throw WorkloadError("workload has fewer than 2 nodes");
  auto strategy = build_structure(cfg, trace);
  auto result = serve_trace(*strategy, trace, cfg.stride, cfg.verify);
  if (!cfg.output.empty()) {
    std::ostringstream csv;
    write_csv(csv, result.rows);
    write_file_atomic(cfg.output, csv.str());
  }
  return result;
}

struct OptimizerConfig {
  std::string demand_file;  // either this ...
  int uniform_n = 0;        // ... or this
  int k = 2;
  std::string output;  // tree file; empty = none
};

/// Optimal static tree for a demand file, or for uniform demand through the
/// O(n^2 k) fast path.
inline OptResult run_optimizer(const OptimizerConfig& cfg) {
  if (cfg.k < 2) throw ConfigError("k must be at least 2");
  const bool from_file = !cfg.demand_file.empty();
  if (from_file == (cfg.uniform_n != 0)) throw ConfigError("give exactly one of a demand file or a uniform size");
  OptResult result;
  if (from_file) {
    DemandMatrix d;
    std::ifstream in(cfg.demand_file);
    if (!in) throw WorkloadError("cannot read demand file " + cfg.demand_file);
    try {
      d = read_demand(in);
    } catch (const std::exception& e) {
      throw WorkloadError(e.what());
    }
    result = optimal_tree_generic(d, cfg.k);
  } else {
    if (cfg.uniform_n < 1) throw ConfigError("uniform size must be positive");
    result = optimal_tree_uniform(cfg.uniform_n, cfg.k);
  }
  if (!cfg.output.empty()) {
    std::ostringstream out;
    write_tree(out, result.tree);
    write_file_atomic(cfg.output, out.str());
  }
  return result;
}

}  // namespace santree
