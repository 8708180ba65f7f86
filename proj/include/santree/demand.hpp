#pragma once

// Demand matrices and the quantities the offline optimizers are built on.

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "santree/tree.hpp"

namespace santree {

/// n x n nonnegative request counts, 1-based, zero diagonal.
class DemandMatrix {
 public:
  DemandMatrix() = default;
  explicit DemandMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0) {
    if (n < 1) throw std::invalid_argument("demand matrix needs n >= 1");
  }

  int size() const { return n_; }

  Cost at(NodeId u, NodeId v) const { return d_[index(u, v)]; }

  void set(NodeId u, NodeId v, Cost count) {
    if (u == v && count != 0) throw std::invalid_argument("self-demand must be zero");
    d_[index(u, v)] = count;
  }

  void add(NodeId u, NodeId v, Cost count = 1) {
    if (u == v) throw std::invalid_argument("self-demand must be zero");
    d_[index(u, v)] += count;
  }

  /// D[u][v] + D[v][u].
  Cost pair(NodeId u, NodeId v) const { return at(u, v) + at(v, u); }

  Cost total() const {
    Cost s = 0;
    for (Cost c : d_) s += c;
    return s;
  }

  friend bool operator==(const DemandMatrix&, const DemandMatrix&) = default;

 private:
  std::size_t index(NodeId u, NodeId v) const {
    if (u < 1 || u > n_ || v < 1 || v > n_)
      throw std::out_of_range("demand index (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range");
    return static_cast<std::size_t>(u - 1) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v - 1);
  }

  int n_ = 0;
  std::vector<Cost> d_;
};

/// One request for every unordered pair, stored as D[u][v] = 1 for u < v.
inline DemandMatrix uniform_demand(int n) {
  DemandMatrix d(n);
  for (NodeId u = 1; u <= n; ++u)
    for (NodeId v = u + 1; v <= n; ++v) d.set(u, v, 1);
  return d;
}

/// Outflow of any length-l segment under uniform_demand(n).
inline Cost uniform_outflow(int l, int n) {
  if (l < 1 || l > n) throw std::invalid_argument("uniform_outflow: need 1 <= l <= n");
  return static_cast<Cost>(l) * static_cast<Cost>(n - l);
}

/// F[u][v] (u < v): demand between u and [v, n].
/// B[u][v] (v < u): demand between u and [1, v].
/// Stored (n+2) x (n+2) so that F[u][n+1] and B[u][0] read as zero.
class PrefixTables {
 public:
  explicit PrefixTables(const DemandMatrix& d) : n_(d.size()), f_(stride() * stride(), 0), b_(stride() * stride(), 0) {
    const int n = n_;
    for (NodeId u = 1; u <= n; ++u) {
      if (u < n) {
        Cost s = 0;
        for (NodeId w = u + 1; w <= n; ++w) s += d.pair(u, w);
        f_[at(u, u + 1)] = s;
        for (NodeId v = u + 2; v <= n; ++v) f_[at(u, v)] = f_[at(u, v - 1)] - d.pair(u, v - 1);
      }
      if (u > 1) {
        Cost s = 0;
        for (NodeId w = 1; w <= u - 1; ++w) s += d.pair(u, w);
        b_[at(u, u - 1)] = s;
        for (NodeId v = u - 2; v >= 1; --v) b_[at(u, v)] = b_[at(u, v + 1)] - d.pair(u, v + 1);
      }
    }
  }

  int size() const { return n_; }
  Cost forward(NodeId u, NodeId v) const { return f_[at(u, v)]; }
  Cost backward(NodeId u, NodeId v) const { return b_[at(u, v)]; }

 private:
  std::size_t stride() const { return static_cast<std::size_t>(n_) + 2; }
  std::size_t at(NodeId u, NodeId v) const { return static_cast<std::size_t>(u) * stride() + static_cast<std::size_t>(v); }

  int n_;
  std::vector<Cost> f_;
  std::vector<Cost> b_;
};

inline PrefixTables compute_prefix_tables(const DemandMatrix& d) { return PrefixTables(d); }

/// W[i][j]: demand crossing the boundary of the key segment [i, j].
class OutflowMatrix {
 public:
  OutflowMatrix() = default;
  explicit OutflowMatrix(int n) : n_(n), w_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1), 0) {}

  int size() const { return n_; }
  Cost at(NodeId i, NodeId j) const { return w_[index(i, j)]; }
  void set(NodeId i, NodeId j, Cost value) { w_[index(i, j)] = value; }

 private:
  std::size_t index(NodeId i, NodeId j) const {
    if (i < 1 || j > n_ || i > j) throw std::out_of_range("outflow segment out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j);
  }

  int n_ = 0;
  std::vector<Cost> w_;
};

/// W[i][j] = sum over u in [i, j] of F[u][j+1] + B[u][i-1]; O(n^3).
inline OutflowMatrix compute_outflow(const DemandMatrix& d, const PrefixTables& p) {
  const int n = d.size();
  if (p.size() != n) throw std::invalid_argument("prefix tables belong to a different demand matrix");
  OutflowMatrix w(n);
  for (NodeId i = 1; i <= n; ++i)
    for (NodeId j = i; j <= n; ++j) {
      Cost s = 0;
      for (NodeId u = i; u <= j; ++u) s += p.forward(u, j + 1) + p.backward(u, i - 1);
      w.set(i, j, s);
    }
  return w;
}

inline OutflowMatrix compute_outflow(const DemandMatrix& d) { return compute_outflow(d, compute_prefix_tables(d)); }

namespace detail {

/// Breadth-first distances from `source` over the undirected tree.
inline void distances_from(const KaryTree& t, NodeId source, std::vector<int>& dist, std::vector<NodeId>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const NodeId x = queue[i];
    auto visit = [&](NodeId y) {
      if (y != kNoNode && dist[y] < 0) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
    };
    visit(t.parent(x));
    for (NodeId c : t.children(x)) visit(c);
  }
}

}  // namespace detail

/// Sum over (u, v) of d_T(u, v) * D[u][v].
inline Cost total_distance(const DemandMatrix& d, const KaryTree& t) {
  const int n = t.size();
  if (d.size() != n) throw std::invalid_argument("total_distance: demand and tree sizes differ");
  std::vector<int> dist(static_cast<std::size_t>(n) + 1);
  std::vector<NodeId> queue;
  queue.reserve(static_cast<std::size_t>(n));
  Cost sum = 0;
  for (NodeId u = 1; u <= n; ++u) {
    bool any = false;
    for (NodeId v = 1; v <= n && !any; ++v) any = d.at(u, v) != 0;
    if (!any) continue;
    detail::distances_from(t, u, dist, queue);
    for (NodeId v = 1; v <= n; ++v) sum += d.at(u, v) * static_cast<Cost>(dist[v]);
  }
  return sum;
}

/// Demand whose tree path crosses the link {a, b}.
inline Cost edge_potential(const DemandMatrix& d, const KaryTree& t, Link e) {
  if (d.size() != t.size()) throw std::invalid_argument("edge_potential: demand and tree sizes differ");
  if (!t.has_link(e.a, e.b))
    throw std::invalid_argument("edge " + std::to_string(e.a) + "-" + std::to_string(e.b) + " is not in the tree");
  const NodeId child = t.parent(e.a) == e.b ? e.a : e.b;
  std::vector<char> inside(static_cast<std::size_t>(t.size()) + 1, 0);
  const auto members = subtree_nodes(t, child);
  for (NodeId x : members) inside[x] = 1;
  Cost s = 0;
  for (NodeId u : members)
    for (NodeId v = 1; v <= t.size(); ++v)
      if (!inside[v]) s += d.pair(u, v);
  return s;
}

// "n" header, then "u v count" per nonzero entry.

inline void write_demand(std::ostream& out, const DemandMatrix& d) {
  out << d.size() << '\n';
  for (NodeId u = 1; u <= d.size(); ++u)
    for (NodeId v = 1; v <= d.size(); ++v)
      if (d.at(u, v) != 0) out << u << ' ' << v << ' ' << d.at(u, v) << '\n';
}

inline DemandMatrix read_demand(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream header(line);
    if (!(header >> n) || n < 1) throw std::runtime_error("demand file: malformed header on line " + std::to_string(line_no));
    break;
  }
  if (n < 1) throw std::runtime_error("demand file: missing header");
  DemandMatrix d(n);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    long long u = 0, v = 0, count = 0;
    std::string extra;
    if (!(row >> u >> v >> count) || (row >> extra) || count < 0)
      throw std::runtime_error("demand file: malformed line " + std::to_string(line_no));
    if (u < 1 || u > n || v < 1 || v > n)
      throw std::runtime_error("demand file: node out of range on line " + std::to_string(line_no));
    if (u == v) {
      if (count != 0) throw std::runtime_error("demand file: self-demand on line " + std::to_string(line_no));
      continue;
    }
    d.add(static_cast<NodeId>(u), static_cast<NodeId>(v), static_cast<Cost>(count));
  }
  return d;
}

}  // namespace santree
