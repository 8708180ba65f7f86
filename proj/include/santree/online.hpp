#pragma once

// Online strategies: a static network, the k-ary SplayNet and the
// centroid-pinned SplayNet. Each serves (u, v) requests and reports the
// routing cost on the topology before the request plus the number of links
// changed while adjusting.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "santree/tree.hpp"

namespace santree {

struct ServeOutcome {
  Cost routing = 0;     // path length before adjusting
  Cost adjustment = 0;  // links added + removed, net over the whole serve
  // Diagnostics, not part of the cost model.
  int rotations = 0;
  Cost rotation_link_sum = 0;  // sum of per-rotation link changes
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  virtual const KaryTree& topology() const = 0;
  virtual ServeOutcome serve(NodeId u, NodeId v) = 0;
  /// Strategy-specific invariants beyond the search-tree ones.
  virtual std::optional<std::string> check_invariants() const { return std::nullopt; }
};

class StaticNetwork : public Strategy {
 public:
  explicit StaticNetwork(KaryTree tree, std::string label = "static") : tree_(std::move(tree)), label_(std::move(label)) {}

  std::string name() const override { return label_; }
  const KaryTree& topology() const override { return tree_; }
  ServeOutcome serve(NodeId u, NodeId v) override {
    ServeOutcome out;
    if (u != v) out.routing = distance(tree_, u, v);
    else tree_.parent(u);  // range check
    return out;
  }

 private:
  KaryTree tree_;
  std::string label_;
};

/// Promotes x with zig / zig-zig / zig-zag steps until its parent is `stop`
/// (kNoNode: until x is the root). `stop` must be a proper ancestor of x.
inline void splay(KaryTree& t, NodeId x, NodeId stop, LinkJournal& journal, ServeOutcome& out) {
  auto step = [&](NodeId y) {
    out.rotation_link_sum += t.rotate(y, &journal).cost;
    ++out.rotations;
  };
  while (true) {
    const NodeId p = t.parent(x);
    if (p == stop) return;
    if (p == kNoNode) throw std::logic_error("splay: stop node is not an ancestor");
    const NodeId g = t.parent(p);
    if (g == stop) {
      step(x);
    } else if ((x < p) == (p < g)) {
      step(p);
      if (t.parent(x) != stop) step(x);
    } else {
      step(x);
      if (t.parent(x) != stop) step(x);
    }
  }
}

class SplayNet : public Strategy {
 public:
  explicit SplayNet(KaryTree initial) : tree_(std::move(initial)), journal_(tree_.size()) {}
  /// Starts from the balanced k-ary search tree on n keys.
  SplayNet(int n, int k) : SplayNet(balanced_tree(n, k)) {}

  std::string name() const override { return "splaynet"; }
  const KaryTree& topology() const override { return tree_; }

  /// Splays u into the place of lca(u, v), then v until it is u's child.
  ServeOutcome serve(NodeId u, NodeId v) override {
    ServeOutcome out;
    if (u == v) {
      tree_.parent(u);
      return out;
    }
    const NodeId w = lca(tree_, u, v);
    out.routing = static_cast<Cost>(tree_.depth(u) + tree_.depth(v) - 2 * tree_.depth(w));
    journal_.clear();
    const NodeId stop = tree_.parent(w);
    if (u != w) splay(tree_, u, stop, journal_, out);
    splay(tree_, v, u, journal_, out);
    out.adjustment = journal_.net_changes(tree_);
    return out;
  }

 private:
  KaryTree tree_;
  LinkJournal journal_;
};

/// Two pinned nodes c1 < c2 and the 2k-1 key ranges hanging below them:
/// ranges 0..k-2 under c1 (all left of c1), ranges k-1..2k-2 under c2
/// (floor(k/2) of them left of c2). Ranges may be empty for small n.
struct CentroidLayout {
  int k = 2;
  NodeId c1 = kNoNode;
  NodeId c2 = kNoNode;
  std::vector<std::pair<NodeId, NodeId>> ranges;  // inclusive; empty when first > last
  std::vector<int> subtree_of;                    // per key; -1 for c1 and c2

  NodeId anchor(int range) const { return range < k - 1 ? c1 : c2; }
  bool empty(int range) const { return ranges[static_cast<std::size_t>(range)].first > ranges[static_cast<std::size_t>(range)].second; }
};

namespace detail {

inline std::vector<int> split_evenly(int total, int parts) {
  std::vector<int> out(static_cast<std::size_t>(parts), total / parts);
  for (int i = 0; i < total % parts; ++i) ++out[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace detail

/// Layout plus its initial tree: c1 at the root, each range a balanced
/// subtree. The n-2 free nodes are split over k+1 parts (part 0 for c1, one
/// per c2 subtree), then part 0 over c1's k-1 subtrees; remainders go one per
/// part from the left.
inline std::pair<CentroidLayout, KaryTree> build_centroid_splaynet(int n, int k) {
  if (k < 2) throw std::invalid_argument("build_centroid_splaynet: k must be at least 2");
  if (n < k + 3)
    throw std::invalid_argument("build_centroid_splaynet: need n >= k + 3 (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
  const auto parts = detail::split_evenly(n - 2, k + 1);
  std::vector<int> sizes = detail::split_evenly(parts[0], k - 1);
  sizes.insert(sizes.end(), parts.begin() + 1, parts.end());

  CentroidLayout layout;
  layout.k = k;
  layout.subtree_of.assign(static_cast<std::size_t>(n) + 1, -1);
  const int c2_left = k / 2;
  NodeId next = 1;
  auto take_range = [&](int r) {
    const int m = sizes[static_cast<std::size_t>(r)];
    layout.ranges.emplace_back(next, next + m - 1);
    for (int i = 0; i < m; ++i) layout.subtree_of[static_cast<std::size_t>(next + i)] = r;
    next += m;
  };
  for (int r = 0; r < k - 1; ++r) take_range(r);
  layout.c1 = next++;
  for (int r = k - 1; r < k - 1 + c2_left; ++r) take_range(r);
  layout.c2 = next++;
  for (int r = k - 1 + c2_left; r < 2 * k - 1; ++r) take_range(r);

  OrderedShape s;
  s.root = s.add_node();
  int left = 0;
  for (int r = 0; r < k - 1; ++r) {
    if (sizes[static_cast<std::size_t>(r)] == 0) continue;
    const int c = add_balanced_subtree(s, sizes[static_cast<std::size_t>(r)], k);
    s.children[0].push_back(c);
    ++left;
  }
  s.left_count[0] = left;
  const int c2 = s.add_node();
  s.children[0].push_back(c2);
  left = 0;
  for (int r = k - 1; r < 2 * k - 1; ++r) {
    if (sizes[static_cast<std::size_t>(r)] == 0) continue;
    const int c = add_balanced_subtree(s, sizes[static_cast<std::size_t>(r)], k);
    s.children[static_cast<std::size_t>(c2)].push_back(c);
    if (r < k - 1 + c2_left) ++left;
  }
  s.left_count[static_cast<std::size_t>(c2)] = left;
  return {std::move(layout), label_in_order(s, k)};
}

/// Root of the adjustable subtree holding `range`, or kNoNode if it is empty.
inline NodeId range_root(const KaryTree& t, const CentroidLayout& layout, int range) {
  if (layout.empty(range)) return kNoNode;
  const auto [lo, hi] = layout.ranges[static_cast<std::size_t>(range)];
  for (NodeId c : t.children(layout.anchor(range)))
    if (c >= lo && c <= hi) return c;
  return kNoNode;
}

class CentroidSplayNet : public Strategy {
 public:
  CentroidSplayNet(int n, int k) {
    auto built = build_centroid_splaynet(n, k);
    layout_ = std::move(built.first);
    tree_ = std::move(built.second);
    journal_ = LinkJournal(n);
  }

  std::string name() const override { return "centroid-splaynet"; }
  const KaryTree& topology() const override { return tree_; }
  const CentroidLayout& layout() const { return layout_; }

  /// Same subtree: SplayNet inside it. Otherwise each non-pinned endpoint is
  /// splayed to the root of its own subtree. c1 and c2 never move.
  ServeOutcome serve(NodeId u, NodeId v) override {
    ServeOutcome out;
    if (u == v) {
      tree_.parent(u);
      return out;
    }
    out.routing = distance(tree_, u, v);
    journal_.clear();
    const int su = layout_.subtree_of[static_cast<std::size_t>(u)];
    const int sv = layout_.subtree_of[static_cast<std::size_t>(v)];
    if (su >= 0 && su == sv) {
      const NodeId w = lca(tree_, u, v);
      const NodeId stop = tree_.parent(w);
      if (u != w) splay(tree_, u, stop, journal_, out);
      splay(tree_, v, u, journal_, out);
    } else {
      if (su >= 0) splay(tree_, u, layout_.anchor(su), journal_, out);
      if (sv >= 0) splay(tree_, v, layout_.anchor(sv), journal_, out);
    }
    out.adjustment = journal_.net_changes(tree_);
    return out;
  }

  std::optional<std::string> check_invariants() const override {
    if (tree_.root() != layout_.c1) return "c1 is no longer the root";
    if (tree_.parent(layout_.c2) != layout_.c1) return "c2 is no longer a child of c1";
    for (int r = 0; r < static_cast<int>(layout_.ranges.size()); ++r) {
      if (layout_.empty(r)) continue;
      const NodeId top = range_root(tree_, layout_, r);
      const auto [lo, hi] = layout_.ranges[static_cast<std::size_t>(r)];
      if (top == kNoNode) return "subtree " + std::to_string(r) + " is detached from its pinned parent";
      const auto members = subtree_nodes(tree_, top);
      if (static_cast<NodeId>(members.size()) != hi - lo + 1) return "subtree " + std::to_string(r) + " changed its key set";
      for (NodeId x : members)
        if (x < lo || x > hi) return "subtree " + std::to_string(r) + " changed its key set";
    }
    const std::size_t pinned_children = tree_.children(layout_.c1).size() + tree_.children(layout_.c2).size();
    std::size_t nonempty = 1;  // c2 under c1
    for (int r = 0; r < static_cast<int>(layout_.ranges.size()); ++r) nonempty += layout_.empty(r) ? 0 : 1;
    if (pinned_children != nonempty) return "c1/c2 child counts changed";
    return std::nullopt;
  }

 private:
  CentroidLayout layout_;
  KaryTree tree_;
  LinkJournal journal_;
};

}  // namespace santree
