#pragma once

// Exact offline optimizers for static k-ary search tree networks.
//
// For a key segment [i, j], dp(i, j, t) is the cheapest way to cover the
// segment with t consecutive search trees, each charged its internal total
// distance plus the demand leaving its segment (the potential of the link to
// its parent):
//
//   dp(i, j, 1) = W[i, j] + min over root r, left/right child counts a, b of
//                 dp(i, r-1, a) + dp(r+1, j, b)
//   dp(i, j, t) = min over l of dp(i, l, 1) + dp(l+1, j, t-1)
//
// Child counts obey a + b <= k and a, b <= k-1. Empty segments cost 0 for any
// count. Taking prefix minima over t (dp2) turns the inner (a, b) search into
// a single scan over a, so the whole table costs O(n^3 k).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <stdexcept>
#include <vector>

#include "santree/demand.hpp"
#include "santree/tree.hpp"

namespace santree {

struct OptResult {
  KaryTree tree;
  Cost cost = 0;
};

inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max() / 4;

namespace detail {

inline Cost add_costs(Cost a, Cost b) { return (a >= kInfiniteCost || b >= kInfiniteCost) ? kInfiniteCost : a + b; }

inline void check_arity(int k) {
  if (k < 2) throw std::invalid_argument("arity k must be at least 2");
}

}  // namespace detail

/// Filled dp / dp2 tables for an arbitrary demand matrix, with the argmin
/// choices needed to rebuild an optimal tree.
class GenericDp {
 public:
  GenericDp(const DemandMatrix& demand, int k) : n_(demand.size()), k_(k) {
    detail::check_arity(k);
    if (n_ < 1) throw std::invalid_argument("optimal_tree_generic: empty demand matrix");
    const auto w = compute_outflow(demand);
    const std::size_t cells = static_cast<std::size_t>(n_ + 2) * static_cast<std::size_t>(n_ + 2);
    const std::size_t slots = cells * static_cast<std::size_t>(k_ + 1);
    dp_.assign(slots, kInfiniteCost);
    dp2_.assign(slots, kInfiniteCost);
    dp2_arg_.assign(slots, 0);
    split_.assign(slots, 0);
    root_.assign(cells, 0);
    left_.assign(cells, 0);

    for (int len = 1; len <= n_; ++len) {
      for (NodeId i = 1; i + len - 1 <= n_; ++i) {
        const NodeId j = i + len - 1;
        Cost best = kInfiniteCost;
        for (NodeId r = i; r <= j; ++r) {
          for (int a = 0; a <= k_ - 1; ++a) {
            const Cost c = detail::add_costs(side(i, r - 1, a), side(r + 1, j, right_budget(a)));
            if (c < best) {
              best = c;
              root_[cell(i, j)] = r;
              left_[cell(i, j)] = static_cast<std::uint8_t>(a);
            }
          }
        }
        dp_[slot(i, j, 1)] = detail::add_costs(best, w.at(i, j));
        for (int t = 2; t <= k_; ++t) {
          Cost bt = kInfiniteCost;
          for (NodeId l = i; l < j; ++l) {
            const Cost c = detail::add_costs(dp_[slot(i, l, 1)], dp_[slot(l + 1, j, t - 1)]);
            if (c < bt) {
              bt = c;
              split_[slot(i, j, t)] = l;
            }
          }
          dp_[slot(i, j, t)] = bt;
        }
        Cost run = kInfiniteCost;
        int arg = 0;
        for (int x = 1; x <= k_; ++x) {
          if (dp_[slot(i, j, x)] < run) {
            run = dp_[slot(i, j, x)];
            arg = x;
          }
          dp2_[slot(i, j, x)] = run;
          dp2_arg_[slot(i, j, x)] = static_cast<std::uint8_t>(arg);
        }
      }
    }
  }

  int size() const { return n_; }
  int arity() const { return k_; }

  /// Cost of covering [i, j] with exactly t trees (kInfiniteCost if t > j-i+1).
  Cost dp(NodeId i, NodeId j, int t) const { return dp_[checked_slot(i, j, t)]; }
  /// Minimum of dp(i, j, y) over y <= x.
  Cost dp2(NodeId i, NodeId j, int x) const { return dp2_[checked_slot(i, j, x)]; }
  /// Optimal single tree on [i, j] plus the demand leaving the segment.
  Cost segment_cost(NodeId i, NodeId j) const { return dp(i, j, 1); }
  Cost optimum() const { return dp(1, n_, 1); }

  KaryTree reconstruct() const {
    std::vector<NodeId> parents(static_cast<std::size_t>(n_), kNoNode);
    build(1, n_, kNoNode, parents);
    return KaryTree::from_parents(k_, parents);
  }

 private:
  std::size_t cell(NodeId i, NodeId j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 2) + static_cast<std::size_t>(j);
  }
  std::size_t slot(NodeId i, NodeId j, int t) const { return cell(i, j) * static_cast<std::size_t>(k_ + 1) + static_cast<std::size_t>(t); }
  std::size_t checked_slot(NodeId i, NodeId j, int t) const {
    if (i < 1 || j > n_ || i > j || t < 1 || t > k_) throw std::out_of_range("dp index out of range");
    return slot(i, j, t);
  }

  int right_budget(int left) const { return std::min(k_ - left, k_ - 1); }

  /// Best cover of [i, j] with at most x trees; an empty segment is free.
  Cost side(NodeId i, NodeId j, int x) const {
    if (i > j) return 0;
    if (x == 0) return kInfiniteCost;
    return dp2_[slot(i, j, x)];
  }

  void build_forest(NodeId i, NodeId j, int t, NodeId parent, std::vector<NodeId>& parents) const {
    while (t > 1) {
      const NodeId l = split_[slot(i, j, t)];
      build(i, l, parent, parents);
      i = l + 1;
      --t;
    }
    build(i, j, parent, parents);
  }

  void build(NodeId i, NodeId j, NodeId parent, std::vector<NodeId>& parents) const {
    const NodeId r = root_[cell(i, j)];
    const int a = left_[cell(i, j)];
    parents[static_cast<std::size_t>(r - 1)] = parent;
    if (i <= r - 1) build_forest(i, r - 1, dp2_arg_[slot(i, r - 1, a)], r, parents);
    if (r + 1 <= j) build_forest(r + 1, j, dp2_arg_[slot(r + 1, j, right_budget(a))], r, parents);
  }

  int n_;
  int k_;
  std::vector<Cost> dp_;
  std::vector<Cost> dp2_;
  std::vector<std::uint8_t> dp2_arg_;
  std::vector<NodeId> split_;
  std::vector<NodeId> root_;
  std::vector<std::uint8_t> left_;
};

inline OptResult optimal_tree_generic(const DemandMatrix& demand, int k) {
  GenericDp dp(demand, k);
  return {dp.reconstruct(), dp.optimum()};
}

/// Same recurrence specialised to uniform demand, where a segment's cost only
/// depends on its length: dp(len, t), O(n^2 k).
class UniformDp {
 public:
  UniformDp(int n, int k) : n_(n), k_(k) {
    detail::check_arity(k);
    if (n < 1) throw std::invalid_argument("optimal_tree_uniform: n must be positive");
    const std::size_t slots = static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(k + 1);
    dp_.assign(slots, kInfiniteCost);
    dp2_.assign(slots, kInfiniteCost);
    dp2_arg_.assign(slots, 0);
    split_.assign(slots, 0);
    root_.assign(static_cast<std::size_t>(n + 1), 0);
    left_.assign(static_cast<std::size_t>(n + 1), 0);
    for (int len = 1; len <= n_; ++len) {
      Cost best = kInfiniteCost;
      for (int r = 1; r <= len; ++r) {
        for (int a = 0; a <= k_ - 1; ++a) {
          const Cost c = detail::add_costs(side(r - 1, a), side(len - r, right_budget(a)));
          if (c < best) {
            best = c;
            root_[static_cast<std::size_t>(len)] = r;
            left_[static_cast<std::size_t>(len)] = static_cast<std::uint8_t>(a);
          }
        }
      }
      dp_[slot(len, 1)] = detail::add_costs(best, uniform_outflow(len, n_));
      for (int t = 2; t <= k_; ++t) {
        Cost bt = kInfiniteCost;
        for (int l = 1; l < len; ++l) {
          const Cost c = detail::add_costs(dp_[slot(l, 1)], dp_[slot(len - l, t - 1)]);
          if (c < bt) {
            bt = c;
            split_[slot(len, t)] = l;
          }
        }
        dp_[slot(len, t)] = bt;
      }
      Cost run = kInfiniteCost;
      int arg = 0;
      for (int x = 1; x <= k_; ++x) {
        if (dp_[slot(len, x)] < run) {
          run = dp_[slot(len, x)];
          arg = x;
        }
        dp2_[slot(len, x)] = run;
        dp2_arg_[slot(len, x)] = static_cast<std::uint8_t>(arg);
      }
    }
  }

  Cost dp(int len, int t) const {
    if (len < 1 || len > n_ || t < 1 || t > k_) throw std::out_of_range("dp index out of range");
    return dp_[slot(len, t)];
  }
  Cost optimum() const { return dp_[slot(n_, 1)]; }

  KaryTree reconstruct() const {
    std::vector<NodeId> parents(static_cast<std::size_t>(n_), kNoNode);
    build(1, n_, kNoNode, parents);
    return KaryTree::from_parents(k_, parents);
  }

 private:
  std::size_t slot(int len, int t) const { return static_cast<std::size_t>(len) * static_cast<std::size_t>(k_ + 1) + static_cast<std::size_t>(t); }
  int right_budget(int left) const { return std::min(k_ - left, k_ - 1); }
  Cost side(int len, int x) const {
    if (len == 0) return 0;
    if (x == 0) return kInfiniteCost;
    return dp2_[slot(len, x)];
  }

  void build_forest(NodeId first, int len, int t, NodeId parent, std::vector<NodeId>& parents) const {
    while (t > 1) {
      const int l = split_[slot(len, t)];
      build(first, l, parent, parents);
      first += l;
      len -= l;
      --t;
    }
    build(first, len, parent, parents);
  }

  void build(NodeId first, int len, NodeId parent, std::vector<NodeId>& parents) const {
    const int r = root_[static_cast<std::size_t>(len)];
    const int a = left_[static_cast<std::size_t>(len)];
    const NodeId key = first + r - 1;
    parents[static_cast<std::size_t>(key - 1)] = parent;
    if (r - 1 > 0) build_forest(first, r - 1, dp2_arg_[slot(r - 1, a)], key, parents);
    if (len - r > 0) build_forest(key + 1, len - r, dp2_arg_[slot(len - r, right_budget(a))], key, parents);
  }

  int n_;
  int k_;
  std::vector<Cost> dp_;
  std::vector<Cost> dp2_;
  std::vector<std::uint8_t> dp2_arg_;
  std::vector<int> split_;
  std::vector<int> root_;
  std::vector<std::uint8_t> left_;
};

inline OptResult optimal_tree_uniform(int n, int k) {
  UniformDp dp(n, k);
  return {dp.reconstruct(), dp.optimum()};
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration (test oracle)

inline int enumeration_limit(int k) { return k == 2 ? 12 : 8; }

namespace detail {

// Trees and forests over a segment of length m, as parent-index arrays
// (-1 marks a root). Memoized per (length, tree count).
class TreeCatalog {
 public:
  using Shape = std::vector<std::int8_t>;

  explicit TreeCatalog(int k) : k_(k) {}

  const std::vector<Shape>& trees(int m) {
    if (auto it = trees_.find(m); it != trees_.end()) return it->second;
    std::vector<Shape> result;
    for (int r = 0; r < m; ++r) {
      const int left_len = r;
      const int right_len = m - 1 - r;
      for (int a = 0; a <= k_ - 1; ++a) {
        for (int b = 0; b <= std::min(k_ - a, k_ - 1); ++b) {
          const auto& lefts = forests(left_len, a);
          const auto& rights = forests(right_len, b);
          for (const auto& lf : lefts) {
            for (const auto& rf : rights) {
              Shape shape(static_cast<std::size_t>(m));
              for (int x = 0; x < left_len; ++x) {
                const auto p = lf[static_cast<std::size_t>(x)];
                shape[static_cast<std::size_t>(x)] = static_cast<std::int8_t>(p < 0 ? r : p);
              }
              shape[static_cast<std::size_t>(r)] = -1;
              for (int x = 0; x < right_len; ++x) {
                const auto p = rf[static_cast<std::size_t>(x)];
                shape[static_cast<std::size_t>(r + 1 + x)] = static_cast<std::int8_t>(p < 0 ? r : p + r + 1);
              }
              result.push_back(std::move(shape));
            }
          }
        }
      }
    }
    return trees_.emplace(m, std::move(result)).first->second;
  }

  const std::vector<Shape>& forests(int len, int count) {
    const auto key = std::make_pair(len, count);
    if (auto it = forests_.find(key); it != forests_.end()) return it->second;
    std::vector<Shape> result;
    if (count == 0) {
      if (len == 0) result.emplace_back();
    } else {
      for (int first = 1; first <= len - (count - 1); ++first) {
        const auto& heads = trees(first);
        const auto& tails = forests(len - first, count - 1);
        for (const auto& h : heads) {
          for (const auto& tl : tails) {
            Shape f(h);
            for (auto p : tl) f.push_back(static_cast<std::int8_t>(p < 0 ? -1 : p + first));
            result.push_back(std::move(f));
          }
        }
      }
    }
    return forests_.emplace(key, std::move(result)).first->second;
  }

 private:
  int k_;
  std::map<int, std::vector<Shape>> trees_;
  std::map<std::pair<int, int>, std::vector<Shape>> forests_;
};

}  // namespace detail

/// Calls `visit` once for every k-ary search tree on keys 1..n (root picked,
/// then each side split into consecutive child segments). Returns the count.
inline std::size_t enumerate_trees(int n, int k, const std::function<void(const KaryTree&)>& visit) {
  detail::check_arity(k);
  if (n < 1) throw std::invalid_argument("enumerate_trees: n must be positive");
  if (n > enumeration_limit(k))
    throw std::invalid_argument("enumerate_trees: n = " + std::to_string(n) + " exceeds the enumeration limit " +
                                std::to_string(enumeration_limit(k)) + " for k = " + std::to_string(k));
  detail::TreeCatalog catalog(k);
  const auto& shapes = catalog.trees(n);
  std::vector<NodeId> parents(static_cast<std::size_t>(n));
  for (const auto& s : shapes) {
    for (int x = 0; x < n; ++x) parents[static_cast<std::size_t>(x)] = s[static_cast<std::size_t>(x)] < 0 ? kNoNode : s[static_cast<std::size_t>(x)] + 1;
    visit(KaryTree::from_parents(k, parents));
  }
  return shapes.size();
}

/// Argmin of total_distance over every tree; first minimum in enumeration order.
inline OptResult brute_force_optimal(const DemandMatrix& demand, int k) {
  std::optional<OptResult> best;
  enumerate_trees(demand.size(), k, [&](const KaryTree& t) {
    const Cost c = total_distance(demand, t);
    if (!best || c < best->cost) best = OptResult{t, c};
  });
  return *best;
}

}  // namespace santree
