#pragma once

// Quasi-optimal trees for uniform demand and the leaf-moving transformations
// around them.
//
// The quasi-optimal layout is a root with k+1 children where every other node
// has at most k children, filled level by level with the last level packed to
// the left. Its root breaks the arity bound, so two views are produced: the
// layout itself (arity k+1) and the same graph re-rooted at a deepest leaf,
// which is an ordinary k-ary search tree. Distances do not depend on the root,
// so both views have the same total distance.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "santree/tree.hpp"

namespace santree {

struct QuasiOptimalTree {
  KaryTree layout;                 // central root with up to k+1 children
  KaryTree tree;                   // re-rooted at a deepest leaf, arity k
  std::vector<int> subtree_sizes;  // sizes of the central root's subtrees
};

namespace detail {

/// Breadth-first fill: node 0 takes up to root_cap children, the rest up to k.
inline OrderedShape bfs_filled_shape(int n, int root_cap, int k) {
  OrderedShape s;
  s.root = s.add_node();
  for (int x = 0; s.size() < n; ++x) {
    const int cap = x == 0 ? root_cap : k;
    for (int c = 0; c < cap && s.size() < n; ++c) {
      const int child = s.add_node();
      s.children[static_cast<std::size_t>(x)].push_back(child);
    }
  }
  for (int x = 0; x < s.size(); ++x)
    s.left_count[static_cast<std::size_t>(x)] = static_cast<int>(s.children[static_cast<std::size_t>(x)].size()) / 2;
  return s;
}

/// The same undirected shape hung from `new_root`; children keep their
/// relative order and the former parent is appended last.
inline OrderedShape reroot_shape(const OrderedShape& s, int new_root) {
  const int n = s.size();
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  for (int x = 0; x < n; ++x)
    for (int c : s.children[static_cast<std::size_t>(x)]) parent[static_cast<std::size_t>(c)] = x;

  OrderedShape out;
  out.children.resize(static_cast<std::size_t>(n));
  out.left_count.resize(static_cast<std::size_t>(n));
  out.root = new_root;
  std::vector<int> from(static_cast<std::size_t>(n), -2);
  std::vector<int> queue{new_root};
  from[static_cast<std::size_t>(new_root)] = -1;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    const int x = queue[i];
    auto& ch = out.children[static_cast<std::size_t>(x)];
    for (int c : s.children[static_cast<std::size_t>(x)])
      if (c != from[static_cast<std::size_t>(x)]) ch.push_back(c);
    const int p = parent[static_cast<std::size_t>(x)];
    if (p >= 0 && p != from[static_cast<std::size_t>(x)]) ch.push_back(p);
    for (int c : ch) {
      from[static_cast<std::size_t>(c)] = x;
      queue.push_back(c);
    }
    out.left_count[static_cast<std::size_t>(x)] = static_cast<int>(ch.size()) / 2;
  }
  return out;
}

inline int subtree_size(const OrderedShape& s, int x) {
  int count = 0;
  std::vector<int> stack{x};
  while (!stack.empty()) {
    const int y = stack.back();
    stack.pop_back();
    ++count;
    for (int c : s.children[static_cast<std::size_t>(y)]) stack.push_back(c);
  }
  return count;
}

/// Nodes of x's subtree grouped by depth below x (children in list order).
inline std::vector<std::vector<NodeId>> levels_below(const KaryTree& t, NodeId x) {
  std::vector<std::vector<NodeId>> levels{{x}};
  while (true) {
    std::vector<NodeId> next;
    for (NodeId y : levels.back())
      for (NodeId c : t.children(y)) next.push_back(c);
    if (next.empty()) break;
    levels.push_back(std::move(next));
  }
  return levels;
}

inline int resolve_arity(const KaryTree& t, int k) {
  if (k == 0) return t.arity();
  if (k < 2) throw std::invalid_argument("arity k must be at least 2");
  return k;
}

}  // namespace detail

/// O(n) construction of both views of the quasi-optimal tree.
inline QuasiOptimalTree build_quasi_optimal(int n, int k) {
  if (n < 1) throw std::invalid_argument("build_quasi_optimal: n must be positive");
  if (k < 2) throw std::invalid_argument("build_quasi_optimal: k must be at least 2");
  if (n == 1) return {KaryTree::single(k + 1), KaryTree::single(k), {}};

  const OrderedShape layout = detail::bfs_filled_shape(n, k + 1, k);
  QuasiOptimalTree q;
  q.layout = label_in_order(layout, k + 1);
  for (int c : layout.children[static_cast<std::size_t>(layout.root)])
    q.subtree_sizes.push_back(detail::subtree_size(layout, c));

  // BFS creation order makes the last node the rightmost one on the deepest
  // level; the first node of that level is the leftmost deepest leaf.
  int first_deepest = n - 1;
  {
    std::vector<int> depth(static_cast<std::size_t>(n), 0);
    for (int x = 0; x < n; ++x)
      for (int c : layout.children[static_cast<std::size_t>(x)])
        depth[static_cast<std::size_t>(c)] = depth[static_cast<std::size_t>(x)] + 1;
    while (first_deepest > 0 && depth[static_cast<std::size_t>(first_deepest - 1)] == depth[static_cast<std::size_t>(n - 1)])
      --first_deepest;
  }
  q.tree = label_in_order(detail::reroot_shape(layout, first_deepest), k);
  return q;
}

/// Every level of x's subtree except the deepest holds k^depth nodes.
/// k = 0 uses the tree's arity.
inline bool is_weakly_complete(const KaryTree& t, NodeId x, int k = 0) {
  k = detail::resolve_arity(t, k);
  const auto levels = detail::levels_below(t, x);
  std::size_t full = 1;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    if (levels[l].size() != full) return false;
    full *= static_cast<std::size_t>(k);
  }
  return true;
}

/// Height of x's subtree (0 for a leaf).
inline int subtree_height(const KaryTree& t, NodeId x) { return static_cast<int>(detail::levels_below(t, x).size()) - 1; }

/// Moves the last leaf on the deepest level of `from` to the first free slot
/// on the last level of `to` (or on a new level when that one is full), then
/// relabels keys by in-order position.
inline KaryTree push_up(const KaryTree& t, NodeId from, NodeId to, int k = 0) {
  k = detail::resolve_arity(t, k);
  if (!t.contains(from) || !t.contains(to)) throw std::out_of_range("push_up: unknown node");
  if (from == to || t.parent(from) == kNoNode || t.parent(from) != t.parent(to))
    throw std::invalid_argument("push_up: subtrees must be distinct siblings");
  if (!is_weakly_complete(t, from, k) || !is_weakly_complete(t, to, k))
    throw std::invalid_argument("push_up: both subtrees must be weakly-complete");

  const auto src = detail::levels_below(t, from);
  const auto dst = detail::levels_below(t, to);
  const int h2 = static_cast<int>(src.size()) - 1;
  const NodeId leaf = src.back().back();

  // Target level: the last level of `to` if it has room, else one deeper.
  std::size_t capacity = 1;
  for (std::size_t l = 0; l + 1 < dst.size(); ++l) capacity *= static_cast<std::size_t>(k);
  const bool last_full = dst.back().size() == capacity;
  const int h1 = static_cast<int>(dst.size()) - (last_full ? 0 : 1);
  if (!(h2 > h1))
    throw std::invalid_argument("push_up: height of from (" + std::to_string(h2) + ") must exceed the height of to after the move (" +
                                std::to_string(h1) + ")");
  const auto& parents_level = dst[static_cast<std::size_t>(h1 - 1)];
  NodeId target = kNoNode;
  for (NodeId y : parents_level)
    if (static_cast<int>(t.children(y).size()) < k) {
      target = y;
      break;
    }
  if (target == kNoNode) throw std::logic_error("push_up: no free slot in a non-full level");

  OrderedShape s = shape_of(t);
  const int old_parent = t.parent(leaf) - 1;
  auto& pc = s.children[static_cast<std::size_t>(old_parent)];
  pc.erase(std::find(pc.begin(), pc.end(), leaf - 1));
  s.left_count[static_cast<std::size_t>(old_parent)] = static_cast<int>(pc.size()) / 2;
  auto& tc = s.children[static_cast<std::size_t>(target - 1)];
  tc.push_back(leaf - 1);
  s.left_count[static_cast<std::size_t>(target - 1)] = static_cast<int>(tc.size()) / 2;
  return label_in_order(s, t.arity());
}

/// Redistributes the deepest level's leaves so the parents one level up are
/// filled to capacity in breadth-first order. Requires every level above the
/// last two to be full. The root may hold k+1 children when the tree's arity
/// is k+1 (the quasi-optimal layout view). Keys are relabeled in order.
inline KaryTree pack_leaves_left(const KaryTree& t, int k = 0) {
  k = detail::resolve_arity(t, k);
  const int root_cap = t.arity() == k + 1 ? k + 1 : k;
  const auto levels = detail::levels_below(t, t.root());
  const int h = static_cast<int>(levels.size()) - 1;
  if (h == 0) return t;
  auto cap = [&](NodeId x) { return x == t.root() ? root_cap : k; };
  for (int l = 0; l + 1 < h; ++l)
    for (NodeId x : levels[static_cast<std::size_t>(l)])
      if (static_cast<int>(t.children(x).size()) != cap(x))
        throw std::invalid_argument("pack_leaves_left: level " + std::to_string(l) + " is not full");

  OrderedShape s = shape_of(t);
  const auto& leaves = levels[static_cast<std::size_t>(h)];
  std::size_t next = 0;
  for (NodeId x : levels[static_cast<std::size_t>(h - 1)]) {
    auto& ch = s.children[static_cast<std::size_t>(x - 1)];
    const std::size_t before = ch.size();
    ch.clear();
    while (next < leaves.size() && static_cast<int>(ch.size()) < cap(x)) ch.push_back(leaves[next++] - 1);
    if (ch.size() != before) s.left_count[static_cast<std::size_t>(x - 1)] = static_cast<int>(ch.size()) / 2;
  }
  return label_in_order(s, t.arity());
}

}  // namespace santree
