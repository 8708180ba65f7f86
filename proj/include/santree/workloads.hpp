#pragma once

// Request sequences: synthetic generators and trace-file ingestion.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "santree/demand.hpp"
#include "santree/tree.hpp"

namespace santree {

struct Request {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  friend bool operator==(const Request&, const Request&) = default;
};

struct Trace {
  int n = 0;
  std::vector<Request> requests;
  std::string provenance;
  std::size_t history_draws = 0;  // temporal generator: requests copied from the window
};

struct TemporalConfig {
  double theta = 0.5;  // probability of a fresh pair
  int window = 64;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxTraceRequests = 1'000'000;
inline constexpr const char* kRngName = "mt19937_64";

/// mt19937_64 with fixed, library-independent bounded draws, so traces are
/// identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t x;
    do x = engine_();
    while (x < threshold);
    return x % bound;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

inline void check_nodes(int n, const char* who) {
  if (n < 2) throw std::invalid_argument(std::string(who) + ": need n >= 2");
}

inline Request fresh_pair(Rng& rng, int n) {
  const auto src = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n)) + 1);
  auto dst = static_cast<NodeId>(rng.below(static_cast<std::uint64_t>(n - 1)) + 1);
  if (dst >= src) ++dst;
  return {src, dst};
}

}  // namespace detail

inline Trace gen_uniform(int n, std::size_t m, std::uint64_t seed) {
  detail::check_nodes(n, "gen_uniform");
  Trace t;
  t.n = n;
  t.provenance = "uniform n=" + std::to_string(n) + " m=" + std::to_string(m) + " seed=" + std::to_string(seed) + " rng=" + kRngName;
  Rng rng(seed);
  t.requests.reserve(m);
  for (std::size_t i = 0; i < m; ++i) t.requests.push_back(detail::fresh_pair(rng, n));
  return t;
}

/// Every unordered pair once as (min, max), shuffled with seed 0.
inline Trace gen_finite_uniform(int n) {
  detail::check_nodes(n, "gen_finite_uniform");
  Trace t;
  t.n = n;
  t.provenance = "finite-uniform n=" + std::to_string(n) + " seed=0 rng=" + kRngName;
  for (NodeId u = 1; u <= n; ++u)
    for (NodeId v = u + 1; v <= n; ++v) t.requests.push_back({u, v});
  Rng rng(0);
  for (std::size_t i = t.requests.size(); i > 1; --i) std::swap(t.requests[i - 1], t.requests[rng.below(i)]);
  return t;
}

/// Fresh uniform pair with probability theta, otherwise a copy of one of the
/// last `window` requests. The first `window` requests are always fresh.
inline Trace gen_temporal(int n, std::size_t m, const TemporalConfig& cfg) {
  detail::check_nodes(n, "gen_temporal");
  if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw std::invalid_argument("gen_temporal: theta must lie in (0, 1]");
  if (cfg.window < 1) throw std::invalid_argument("gen_temporal: window must be positive");
  if (m < 1) throw std::invalid_argument("gen_temporal: need m >= 1");
  Trace t;
  t.n = n;
  std::ostringstream tag;
  tag << "temporal n=" << n << " m=" << m << " theta=" << cfg.theta << " window=" << cfg.window << " seed=" << cfg.seed
      << " rng=" << kRngName;
  t.provenance = tag.str();
  Rng rng(cfg.seed);
  const auto w = static_cast<std::size_t>(cfg.window);
  t.requests.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (i < w || cfg.theta >= 1.0 || rng.unit() < cfg.theta) {
      t.requests.push_back(detail::fresh_pair(rng, n));
    } else {
      t.requests.push_back(t.requests[i - w + rng.below(w)]);
      ++t.history_draws;
    }
  }
  return t;
}

/// Demand matrix counted from a trace; self-requests are skipped.
inline DemandMatrix tally(const Trace& t) {
  DemandMatrix d(t.n);
  for (const auto& r : t.requests)
    if (r.src != r.dst) d.add(r.src, r.dst);
  return d;
}

struct ColumnSpec {
  int src = 0;
  int dst = 1;
  char delimiter = '\0';  // '\0' splits on runs of whitespace
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  if (delimiter == '\0') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i == line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
  } else {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(delimiter, start);
      auto field = line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.front()))) field.remove_prefix(1);
      while (!field.empty() && std::isspace(static_cast<unsigned char>(field.back()))) field.remove_suffix(1);
      out.push_back(field);
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  }
  return out;
}

/// Raw ids order: integers numerically first, then the rest lexicographically.
struct RawIdKey {
  bool numeric = false;
  long long value = 0;
  std::string text;

  explicit RawIdKey(const std::string& s) : text(s) {
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    numeric = !s.empty() && ec == std::errc() && ptr == end;
  }

  bool operator<(const RawIdKey& o) const {
    if (numeric != o.numeric) return numeric;
    if (numeric && value != o.value) return value < o.value;
    return text < o.text;
  }
};

}  // namespace detail

/// Reads raw (src, dst) ids, keeps the n_target most frequent ids (ties by raw
/// id), renumbers them 1.. by decreasing frequency, drops requests touching
/// other ids and truncates to max_requests.
inline Trace load_trace(std::istream& in, int n_target, const ColumnSpec& cols = {}, const std::string& source = "stream",
                        std::size_t max_requests = kMaxTraceRequests) {
  if (n_target < 2) throw std::invalid_argument("load_trace: n_target must be at least 2");
  if (cols.src < 0 || cols.dst < 0) throw std::invalid_argument("load_trace: column indices must be nonnegative");
  std::unordered_map<std::string, std::size_t> ids;
  std::vector<std::string> names;
  std::vector<std::uint64_t> freq;
  std::vector<std::pair<std::size_t, std::size_t>> raw;
  auto intern = [&](std::string_view s) {
    auto [it, inserted] = ids.try_emplace(std::string(s), names.size());
    if (inserted) {
      names.emplace_back(s);
      freq.push_back(0);
    }
    ++freq[it->second];
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  const auto need = static_cast<std::size_t>(std::max(cols.src, cols.dst)) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = detail::split_fields(line, cols.delimiter);
    if (fields.size() < need || fields[static_cast<std::size_t>(cols.src)].empty() || fields[static_cast<std::size_t>(cols.dst)].empty())
      throw std::runtime_error("trace " + source + ": malformed line " + std::to_string(line_no));
    const auto s = intern(fields[static_cast<std::size_t>(cols.src)]);
    const auto d = intern(fields[static_cast<std::size_t>(cols.dst)]);
    raw.emplace_back(s, d);
  }
  if (names.size() < 2) throw std::runtime_error("trace " + source + ": fewer than 2 distinct ids");

  std::vector<std::size_t> order(names.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<detail::RawIdKey> keys;
  keys.reserve(names.size());
  for (const auto& s : names) keys.emplace_back(s);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return keys[a] < keys[b];
  });
  const std::size_t n = std::min(order.size(), static_cast<std::size_t>(n_target));
  std::vector<NodeId> remap(names.size(), kNoNode);
  for (std::size_t rank = 0; rank < n; ++rank) remap[order[rank]] = static_cast<NodeId>(rank + 1);

  Trace t;
  t.n = static_cast<int>(n);
  t.provenance = "file " + source + " n=" + std::to_string(n);
  for (auto [s, d] : raw) {
    if (t.requests.size() >= max_requests) break;
    if (remap[s] == kNoNode || remap[d] == kNoNode) continue;
    t.requests.push_back({remap[s], remap[d]});
  }
  return t;
}

inline Trace load_trace(const std::string& path, int n_target, const ColumnSpec& cols = {},
                        std::size_t max_requests = kMaxTraceRequests) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trace file " + path);
  return load_trace(in, n_target, cols, path, max_requests);
}

// Cache format: "n m" header, then "src dst" per request.

inline void write_trace(std::ostream& out, const Trace& t) {
  out << t.n << ' ' << t.requests.size() << '\n';
  for (const auto& r : t.requests) out << r.src << ' ' << r.dst << '\n';
}

inline Trace read_trace(std::istream& in, const std::string& source = "cache") {
  Trace t;
  std::size_t m = 0;
  if (!(in >> t.n >> m) || t.n < 1) throw std::runtime_error("trace cache " + source + ": malformed header");
  t.requests.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    long long s = 0, d = 0;
    if (!(in >> s >> d)) throw std::runtime_error("trace cache " + source + ": truncated at request " + std::to_string(i + 1));
    if (s < 1 || s > t.n || d < 1 || d > t.n)
      throw std::runtime_error("trace cache " + source + ": id out of range at request " + std::to_string(i + 1));
    t.requests.push_back({static_cast<NodeId>(s), static_cast<NodeId>(d)});
  }
  t.provenance = "cache " + source;
  return t;
}

}  // namespace santree
