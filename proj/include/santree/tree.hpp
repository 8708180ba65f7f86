#pragma once

// k-ary search tree topology over keys 1..n.
//
// Each node keeps its children in ascending key order. Children with keys
// below the node's own key form its left group, the rest its right group.
// A node has at most k children and at most k-1 on either side, which for
// k = 2 is exactly the family of binary search trees.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace santree {

using NodeId = std::int32_t;
using Cost = std::uint64_t;

inline constexpr NodeId kNoNode = 0;

/// Unordered link between two nodes, normalized so that a < b.
struct Link {
  NodeId a = kNoNode;
  NodeId b = kNoNode;
  auto operator<=>(const Link&) const = default;
};

inline Link make_link(NodeId x, NodeId y) { return x < y ? Link{x, y} : Link{y, x}; }

/// Sorted set of links of a topology.
using EdgeSet = std::vector<Link>;

/// |a \ b| + |b \ a|.
inline Cost edge_diff(EdgeSet a, EdgeSet b) {
  if (!std::is_sorted(a.begin(), a.end())) std::sort(a.begin(), a.end());
  if (!std::is_sorted(b.begin(), b.end())) std::sort(b.begin(), b.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  Cost diff = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++diff;
      ++i;
    } else if (b[j] < a[i]) {
      ++diff;
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return diff + (a.size() - i) + (b.size() - j);
}

class KaryTree;

/// Remembers the parent every node had when it was first relinked, so the
/// net number of links changed over several rotations can be recovered.
class LinkJournal {
 public:
  explicit LinkJournal(int n = 0) : mark_(static_cast<std::size_t>(n) + 1, 0) {}

  void record(NodeId node, NodeId old_parent) {
    if (static_cast<std::size_t>(node) >= mark_.size()) mark_.resize(static_cast<std::size_t>(node) + 1, 0);
    if (mark_[node] == epoch_) return;
    mark_[node] = epoch_;
    entries_.emplace_back(node, old_parent);
  }

  void clear() {
    entries_.clear();
    if (++epoch_ == 0) {
      std::fill(mark_.begin(), mark_.end(), 0);
      epoch_ = 1;
    }
  }

  bool empty() const { return entries_.empty(); }

  /// Links added plus removed between the recorded state and `tree` now.
  Cost net_changes(const KaryTree& tree) const;

 private:
  std::vector<std::pair<NodeId, NodeId>> entries_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t epoch_ = 1;
};

/// Outcome of a single promotion step.
struct RotationResult {
  Cost cost = 0;   // links added + removed
  int spills = 0;  // children pushed one level down to restore arity
};

/// Plain ordered tree used while constructing or reshaping topologies.
/// Nodes are indexed 0..size()-1; `left_count[x]` children come before x's key.
struct OrderedShape {
  std::vector<std::vector<int>> children;
  std::vector<int> left_count;
  int root = 0;

  int size() const { return static_cast<int>(children.size()); }

  int add_node() {
    children.emplace_back();
    left_count.push_back(0);
    return size() - 1;
  }
};

class KaryTree {
 public:
  KaryTree() = default;

  /// parents[i] is the parent key of key i+1 (0 for the root). Children are
  /// ordered by key.
  static KaryTree from_parents(int arity, std::span<const NodeId> parents) {
    KaryTree t;
    t.init(static_cast<int>(parents.size()), arity);
    for (int key = 1; key <= t.n_; ++key) {
      const NodeId p = parents[static_cast<std::size_t>(key - 1)];
      if (p < 0 || p > t.n_) throw std::invalid_argument("parent id out of range for node " + std::to_string(key));
      t.parent_[key] = p;
      if (p == kNoNode) {
        if (t.root_ == kNoNode) t.root_ = key;
      } else {
        t.children_[p].push_back(key);
      }
    }
    return t;
  }

  /// Children lists are taken verbatim (children[key] for key in 1..n,
  /// index 0 unused); `validate` reports ordering problems.
  static KaryTree from_children(int arity, NodeId root, std::vector<std::vector<NodeId>> children) {
    if (children.empty()) throw std::invalid_argument("children table must have an unused slot 0");
    KaryTree t;
    t.init(static_cast<int>(children.size()) - 1, arity);
    if (root < 1 || root > t.n_) throw std::invalid_argument("root out of range");
    t.root_ = root;
    for (NodeId p = 1; p <= t.n_; ++p) {
      for (NodeId c : children[p]) {
        if (c < 1 || c > t.n_) throw std::invalid_argument("child id out of range under node " + std::to_string(p));
        t.parent_[c] = p;
      }
    }
    t.parent_[root] = kNoNode;
    t.children_ = std::move(children);
    return t;
  }

  static KaryTree single(int arity) {
    const NodeId none[] = {kNoNode};
    return from_parents(arity, none);
  }

  int size() const { return n_; }
  int arity() const { return arity_; }
  NodeId root() const { return root_; }
  bool contains(NodeId x) const { return x >= 1 && x <= n_; }

  NodeId parent(NodeId x) const {
    check_node(x);
    return parent_[x];
  }

  std::span<const NodeId> children(NodeId x) const {
    check_node(x);
    return children_[x];
  }

  std::span<const NodeId> left_children(NodeId x) const {
    auto c = children(x);
    auto split = std::lower_bound(c.begin(), c.end(), x) - c.begin();
    return c.first(static_cast<std::size_t>(split));
  }

  std::span<const NodeId> right_children(NodeId x) const {
    auto c = children(x);
    auto split = std::lower_bound(c.begin(), c.end(), x) - c.begin();
    return c.subspan(static_cast<std::size_t>(split));
  }

  int depth(NodeId x) const {
    check_node(x);
    int d = 0;
    for (NodeId p = parent_[x]; p != kNoNode; p = parent_[p]) ++d;
    return d;
  }

  std::vector<NodeId> parent_array() const { return {parent_.begin() + 1, parent_.end()}; }

  EdgeSet edges() const {
    EdgeSet e;
    e.reserve(static_cast<std::size_t>(std::max(n_ - 1, 0)));
    for (NodeId x = 1; x <= n_; ++x)
      if (parent_[x] != kNoNode) e.push_back(make_link(x, parent_[x]));
    std::sort(e.begin(), e.end());
    return e;
  }

  bool has_link(NodeId x, NodeId y) const {
    return contains(x) && contains(y) && (parent_[x] == y || parent_[y] == x);
  }

  /// Promotes u above its parent p (generalized zig):
  ///  - u takes p's slot under p's parent;
  ///  - p's children on the far side of u move to the outer end of u's group;
  ///  - p becomes u's outermost child on the side facing p;
  ///  - while u breaks the arity caps, u's children lying between u and p move
  ///    into p's freed slots;
  ///  - if that is not enough, outermost children are spilled one level down
  ///    into their inner neighbour, cascading towards the leaves.
  RotationResult rotate(NodeId u, LinkJournal* journal = nullptr);

  /// Same as rotate(), returning only the number of links changed.
  Cost rotate_up(NodeId u, LinkJournal* journal = nullptr) { return rotate(u, journal).cost; }

  friend bool operator==(const KaryTree& a, const KaryTree& b) {
    return a.n_ == b.n_ && a.arity_ == b.arity_ && a.root_ == b.root_ && a.parent_ == b.parent_ &&
           a.children_ == b.children_;
  }

 private:
  void init(int n, int arity) {
    if (n < 1) throw std::invalid_argument("a tree needs at least one node");
    if (arity < 2) throw std::invalid_argument("arity must be at least 2");
    n_ = n;
    arity_ = arity;
    root_ = kNoNode;
    parent_.assign(static_cast<std::size_t>(n) + 1, kNoNode);
    children_.assign(static_cast<std::size_t>(n) + 1, {});
  }

  void check_node(NodeId x) const {
    if (!contains(x)) throw std::out_of_range("unknown node id " + std::to_string(x));
  }

  int left_count(NodeId x) const {
    const auto& c = children_[x];
    return static_cast<int>(std::lower_bound(c.begin(), c.end(), x) - c.begin());
  }

  bool over_caps(NodeId x) const {
    const int total = static_cast<int>(children_[x].size());
    const int left = left_count(x);
    return total > arity_ || left > arity_ - 1 || total - left > arity_ - 1;
  }

  template <class Relink>
  int spill(NodeId x, Relink& relink);

  int n_ = 0;
  int arity_ = 2;
  NodeId root_ = kNoNode;
  std::vector<NodeId> parent_;
  std::vector<std::vector<NodeId>> children_;

  friend class LinkJournal;
};

namespace detail {

inline Cost net_link_changes(std::span<const std::pair<NodeId, NodeId>> old_parents,
                             std::span<const NodeId> current_parent) {
  EdgeSet before, after;
  before.reserve(old_parents.size());
  after.reserve(old_parents.size());
  for (auto [node, old_parent] : old_parents) {
    if (old_parent != kNoNode) before.push_back(make_link(node, old_parent));
    const NodeId now = current_parent[static_cast<std::size_t>(node)];
    if (now != kNoNode) after.push_back(make_link(node, now));
  }
  return edge_diff(std::move(before), std::move(after));
}

}  // namespace detail

inline Cost LinkJournal::net_changes(const KaryTree& tree) const {
  return detail::net_link_changes(entries_, tree.parent_);
}

template <class Relink>
int KaryTree::spill(NodeId x, Relink& relink) {
  int spills = 0;
  while (over_caps(x)) {
    auto& c = children_[x];
    const int total = static_cast<int>(c.size());
    const int left = left_count(x);
    const int right = total - left;
    bool from_left;
    if (left > arity_ - 1)
      from_left = true;
    else if (right > arity_ - 1)
      from_left = false;
    else
      from_left = left >= 2;
    NodeId outer, inner;
    if (from_left) {
      outer = c[0];
      inner = c[1];
      c.erase(c.begin());
      children_[inner].insert(children_[inner].begin(), outer);
    } else {
      outer = c[c.size() - 1];
      inner = c[c.size() - 2];
      c.pop_back();
      children_[inner].push_back(outer);
    }
    relink(outer, inner);
    ++spills;
    spills += spill(inner, relink);
  }
  return spills;
}

inline RotationResult KaryTree::rotate(NodeId u, LinkJournal* journal) {
  check_node(u);
  const NodeId p = parent_[u];
  if (p == kNoNode) throw std::invalid_argument("rotate_up: node " + std::to_string(u) + " is the root");
  const NodeId g = parent_[p];

  std::vector<std::pair<NodeId, NodeId>> log;
  auto relink = [&](NodeId x, NodeId new_parent) {
    const NodeId old = parent_[x];
    if (std::none_of(log.begin(), log.end(), [x](const auto& e) { return e.first == x; })) log.emplace_back(x, old);
    if (journal != nullptr) journal->record(x, old);
    parent_[x] = new_parent;
  };

  auto& pc = children_[p];
  const auto pos = std::find(pc.begin(), pc.end(), u);
  std::vector<NodeId> before(pc.begin(), pos);
  std::vector<NodeId> after(pos + 1, pc.end());
  const std::vector<NodeId> old_u = children_[u];
  const bool from_left = u < p;

  std::vector<NodeId> new_u;
  new_u.reserve(before.size() + old_u.size() + after.size() + 1);
  if (from_left) {
    new_u.insert(new_u.end(), before.begin(), before.end());
    new_u.insert(new_u.end(), old_u.begin(), old_u.end());
    new_u.push_back(p);
    for (NodeId x : before) relink(x, u);
    children_[p] = std::move(after);
  } else {
    new_u.push_back(p);
    new_u.insert(new_u.end(), old_u.begin(), old_u.end());
    new_u.insert(new_u.end(), after.begin(), after.end());
    for (NodeId x : after) relink(x, u);
    children_[p] = std::move(before);
  }
  if (g != kNoNode) {
    auto& gc = children_[g];
    *std::find(gc.begin(), gc.end(), p) = u;
  } else {
    root_ = u;
  }
  relink(u, g);
  relink(p, u);
  children_[u] = std::move(new_u);

  // Hand u's children that sit between u and p over to p while u is over
  // its caps on p's side or in total and p has room.
  auto& uc = children_[u];
  auto& np = children_[p];
  if (from_left) {
    while (uc.size() >= 2) {
      const int total = static_cast<int>(uc.size());
      const int right = total - left_count(u);
      if (!(total > arity_ || right > arity_ - 1)) break;
      const NodeId x = uc[uc.size() - 2];
      if (x < u) break;
      const int p_total = static_cast<int>(np.size());
      if (p_total >= arity_ || left_count(p) >= arity_ - 1) break;
      uc.erase(uc.end() - 2);
      np.insert(np.begin(), x);
      relink(x, p);
    }
  } else {
    while (uc.size() >= 2) {
      const int total = static_cast<int>(uc.size());
      const int left = left_count(u);
      if (!(total > arity_ || left > arity_ - 1)) break;
      const NodeId x = uc[1];
      if (x > u) break;
      const int p_total = static_cast<int>(np.size());
      if (p_total >= arity_ || p_total - left_count(p) >= arity_ - 1) break;
      uc.erase(uc.begin() + 1);
      np.push_back(x);
      relink(x, p);
    }
  }

  RotationResult result;
  result.spills = spill(u, relink);
  result.cost = detail::net_link_changes(log, parent_);
  return result;
}

// ---------------------------------------------------------------------------
// Validation

/// Describes the first violated invariant, or nullopt for a valid tree.
inline std::optional<std::string> find_violation(const KaryTree& t) {
  const int n = t.size();
  if (n < 1) return "empty tree";
  if (t.arity() < 2) return "arity below 2";
  const NodeId root = t.root();
  if (!t.contains(root)) return "no root";
  if (t.parent(root) != kNoNode) return "root " + std::to_string(root) + " has a parent";

  std::vector<NodeId> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  order.push_back(root);
  seen[root] = 1;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const NodeId x = order[i];
    for (NodeId c : t.children(x)) {
      if (!t.contains(c)) return "node " + std::to_string(x) + " lists unknown child " + std::to_string(c);
      if (t.parent(c) != x)
        return "child " + std::to_string(c) + " of node " + std::to_string(x) + " has parent link " +
               std::to_string(t.parent(c));
      if (seen[c]) return "node " + std::to_string(c) + " reachable twice";
      seen[c] = 1;
      order.push_back(c);
    }
  }
  if (static_cast<int>(order.size()) != n)
    return "only " + std::to_string(order.size()) + " of " + std::to_string(n) + " nodes reachable from the root";

  std::vector<NodeId> lo(static_cast<std::size_t>(n) + 1), hi(static_cast<std::size_t>(n) + 1);
  std::vector<int> size(static_cast<std::size_t>(n) + 1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId x = *it;
    const auto ch = t.children(x);
    const int k = t.arity();
    if (static_cast<int>(ch.size()) > k)
      return "node " + std::to_string(x) + " has " + std::to_string(ch.size()) + " children, arity " + std::to_string(k);
    lo[x] = hi[x] = x;
    int left = 0;
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const NodeId c = ch[i];
      if (i > 0 && !(hi[ch[i - 1]] < lo[c]))
        return "children " + std::to_string(ch[i - 1]) + " and " + std::to_string(c) + " of node " +
               std::to_string(x) + " are out of segment order";
      if (c < x) {
        if (!(hi[c] < x)) return "left subtree of node " + std::to_string(x) + " at " + std::to_string(c) + " exceeds its key";
        ++left;
      } else if (!(lo[c] > x)) {
        return "right subtree of node " + std::to_string(x) + " at " + std::to_string(c) + " undercuts its key";
      }
      lo[x] = std::min(lo[x], lo[c]);
      hi[x] = std::max(hi[x], hi[c]);
      size[x] += size[c];
    }
    const int right = static_cast<int>(ch.size()) - left;
    if (left > k - 1 || right > k - 1)
      return "node " + std::to_string(x) + " has " + std::to_string(left) + " left / " + std::to_string(right) +
             " right children, side limit " + std::to_string(k - 1);
    if (hi[x] - lo[x] + 1 != size[x]) return "subtree of node " + std::to_string(x) + " is not a contiguous key segment";
  }
  return std::nullopt;
}

inline bool validate(const KaryTree& t) { return !find_violation(t).has_value(); }

// ---------------------------------------------------------------------------
// Queries

inline NodeId lca(const KaryTree& t, NodeId u, NodeId v) {
  int du = t.depth(u), dv = t.depth(v);
  while (du > dv) {
    u = t.parent(u);
    --du;
  }
  while (dv > du) {
    v = t.parent(v);
    --dv;
  }
  while (u != v) {
    u = t.parent(u);
    v = t.parent(v);
  }
  return u;
}

inline Cost distance(const KaryTree& t, NodeId u, NodeId v) {
  const NodeId w = lca(t, u, v);
  return static_cast<Cost>(t.depth(u) + t.depth(v) - 2 * t.depth(w));
}

/// Nodes of the subtree rooted at x, x first, in breadth-first order.
inline std::vector<NodeId> subtree_nodes(const KaryTree& t, NodeId x) {
  std::vector<NodeId> out{x};
  t.parent(x);  // range check
  for (std::size_t i = 0; i < out.size(); ++i)
    for (NodeId c : t.children(out[i])) out.push_back(c);
  return out;
}

inline std::vector<int> subtree_sizes(const KaryTree& t) {
  auto order = subtree_nodes(t, t.root());
  std::vector<int> size(static_cast<std::size_t>(t.size()) + 1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (t.parent(*it) != kNoNode) size[t.parent(*it)] += size[*it];
  return size;
}

/// Total distance from every node of x's subtree to x.
inline Cost tdr(const KaryTree& t, NodeId x) {
  std::vector<std::pair<NodeId, Cost>> frontier{{x, 0}};
  t.parent(x);
  Cost sum = 0;
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    const auto [node, d] = frontier[i];
    sum += d;
    for (NodeId c : t.children(node)) frontier.emplace_back(c, d + 1);
  }
  return sum;
}

/// A node whose removal leaves components of at most n/2 nodes; smallest key
/// among candidates.
inline NodeId centroid(const KaryTree& t) {
  const auto size = subtree_sizes(t);
  const int n = t.size();
  for (NodeId x = 1; x <= n; ++x) {
    int largest = n - size[x];
    for (NodeId c : t.children(x)) largest = std::max(largest, size[c]);
    if (2 * largest <= n) return x;
  }
  throw std::logic_error("tree without centroid");  // unreachable for trees
}

// ---------------------------------------------------------------------------
// Shapes and labeling

/// Key of every shape node under in-order labeling: a node's key follows
/// its first left_count children's subtrees and precedes the rest.
inline std::vector<NodeId> in_order_keys(const OrderedShape& shape) {
  const int n = shape.size();
  std::vector<NodeId> key(static_cast<std::size_t>(n), kNoNode);
  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> stack{{shape.root, 0}};
  NodeId next_key = 1;
  while (!stack.empty()) {
    const int node = stack.back().node;
    const std::size_t i = stack.back().next;
    const auto& ch = shape.children[static_cast<std::size_t>(node)];
    if (i == static_cast<std::size_t>(shape.left_count[static_cast<std::size_t>(node)]) && key[node] == kNoNode)
      key[node] = next_key++;
    if (i < ch.size()) {
      stack.back().next = i + 1;
      stack.push_back({ch[i], 0});
    } else {
      stack.pop_back();
    }
  }
  if (next_key != n + 1) throw std::invalid_argument("shape is not a single tree");
  return key;
}

/// Assigns keys 1..n by in-order position; every ordered shape has exactly one
/// such labeling.
inline KaryTree label_in_order(const OrderedShape& shape, int arity) {
  const auto key = in_order_keys(shape);
  std::vector<NodeId> parents(key.size(), kNoNode);
  for (std::size_t x = 0; x < key.size(); ++x)
    for (int c : shape.children[x]) parents[static_cast<std::size_t>(key[static_cast<std::size_t>(c)] - 1)] = key[x];
  return KaryTree::from_parents(arity, parents);
}

/// Shape of a tree; node index = key - 1.
inline OrderedShape shape_of(const KaryTree& t) {
  OrderedShape s;
  s.children.resize(static_cast<std::size_t>(t.size()));
  s.left_count.resize(static_cast<std::size_t>(t.size()));
  s.root = t.root() - 1;
  for (NodeId x = 1; x <= t.size(); ++x) {
    for (NodeId c : t.children(x)) s.children[static_cast<std::size_t>(x - 1)].push_back(c - 1);
    s.left_count[static_cast<std::size_t>(x - 1)] = static_cast<int>(t.left_children(x).size());
  }
  return s;
}

namespace detail {

inline int add_balanced(OrderedShape& s, int m, int arity) {
  const int node = s.add_node();
  const int c = std::min(arity, m - 1);
  const int rest = m - 1;
  for (int i = 0; i < c; ++i) {
    const int part = rest / c + (i < rest % c ? 1 : 0);
    const int child = add_balanced(s, part, arity);
    s.children[static_cast<std::size_t>(node)].push_back(child);
  }
  s.left_count[static_cast<std::size_t>(node)] = (c + 1) / 2;
  return node;
}

}  // namespace detail

/// Appends a balanced subtree of m >= 1 nodes: the m-1 descendants are split
/// as evenly as possible over min(k, m-1) children, larger parts first, with
/// the node's key after the first half of them. Returns the subtree root.
inline int add_balanced_subtree(OrderedShape& s, int m, int arity) { return detail::add_balanced(s, m, arity); }

inline KaryTree balanced_tree(int n, int arity) {
  if (n < 1) throw std::invalid_argument("balanced_tree: n must be positive");
  if (arity < 2) throw std::invalid_argument("balanced_tree: arity must be at least 2");
  OrderedShape s;
  s.root = add_balanced_subtree(s, n, arity);
  return label_in_order(s, arity);
}

// ---------------------------------------------------------------------------
// Text format: "n k root" then one "key:parent" line per node.

inline void write_tree(std::ostream& out, const KaryTree& t) {
  out << t.size() << ' ' << t.arity() << ' ' << t.root() << '\n';
  for (NodeId x = 1; x <= t.size(); ++x) out << x << ':' << t.parent(x) << '\n';
}

inline KaryTree read_tree(std::istream& in) {
  int n = 0, k = 0;
  NodeId root = 0;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("tree file: missing header");
  {
    std::istringstream header(line);
    if (!(header >> n >> k >> root) || n < 1) throw std::runtime_error("tree file: malformed header '" + line + "'");
  }
  std::vector<NodeId> parents(static_cast<std::size_t>(n), -1);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    NodeId key = 0, parent = 0;
    try {
      if (colon == std::string::npos) throw std::invalid_argument("no colon");
      key = std::stoi(line.substr(0, colon));
      parent = std::stoi(line.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("tree file: malformed line " + std::to_string(line_no));
    }
    if (key < 1 || key > n) throw std::runtime_error("tree file: key out of range on line " + std::to_string(line_no));
    parents[static_cast<std::size_t>(key - 1)] = parent;
  }
  for (int i = 0; i < n; ++i)
    if (parents[static_cast<std::size_t>(i)] < 0) throw std::runtime_error("tree file: no entry for key " + std::to_string(i + 1));
  auto t = KaryTree::from_parents(k, parents);
  if (t.root() != root) throw std::runtime_error("tree file: header root disagrees with parent links");
  return t;
}

}  // namespace santree
