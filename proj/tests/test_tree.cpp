#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "santree/tree.hpp"

using namespace santree;

namespace {

KaryTree tree_of(int k, std::vector<NodeId> parents) { return KaryTree::from_parents(k, parents); }

// root 1, right child 3 with children {2, 4}
KaryTree sample4() { return tree_of(2, {0, 3, 1, 3}); }

// Independent classic BST rotation on left/right arrays.
std::vector<NodeId> classic_rotate(const KaryTree& t, NodeId u) {
  const int n = t.size();
  std::vector<NodeId> left(n + 1, 0), right(n + 1, 0), parent(n + 1, 0);
  for (NodeId x = 1; x <= n; ++x) {
    parent[x] = t.parent(x);
    for (NodeId c : t.children(x)) (c < x ? left : right)[x] = c;
  }
  const NodeId p = parent[u], g = parent[p];
  if (u == left[p]) {
    const NodeId b = right[u];
    left[p] = b;
    if (b) parent[b] = p;
    right[u] = p;
  } else {
    const NodeId b = left[u];
    right[p] = b;
    if (b) parent[b] = p;
    left[u] = p;
  }
  parent[p] = u;
  parent[u] = g;
  if (g) (left[g] == p ? left : right)[g] = u;
  return {parent.begin() + 1, parent.end()};
}

}  // namespace

TEST(Validate, Examples) {
  EXPECT_TRUE(validate(KaryTree::single(2)));
  EXPECT_TRUE(validate(tree_of(2, {2, 0, 2})));
  const auto swapped = KaryTree::from_children(3, 1, {{}, {3, 2}, {}, {}});
  EXPECT_FALSE(validate(swapped));
  EXPECT_NE(find_violation(swapped)->find("segment order"), std::string::npos);
}

TEST(Validate, DetectsBrokenInvariants) {
  // three children on one side with k = 3 (side limit 2)
  EXPECT_FALSE(validate(tree_of(3, {0, 1, 1, 1})));
  // too many children
  EXPECT_FALSE(validate(tree_of(2, {3, 3, 0, 3, 3})));
  // right child 3 of root 2 holds the smaller key 1
  EXPECT_FALSE(validate(tree_of(3, {3, 0, 2})));
  // left child with a larger key
  EXPECT_FALSE(validate(KaryTree::from_children(2, 1, {{}, {3, 2}, {}, {}})));
  // two roots: 3 unreachable
  EXPECT_FALSE(validate(tree_of(2, {0, 1, 0})));
  EXPECT_TRUE(validate(sample4()));
}

TEST(Validate, FamilyAtArityTwoIsBinarySearchTrees) {
  // 2 -> {1, 3} as two right children of 1 would be two on one side
  EXPECT_FALSE(validate(tree_of(2, {0, 1, 1})));
  EXPECT_TRUE(validate(tree_of(3, {0, 1, 1})));
}

TEST(Distance, Examples) {
  const auto path = tree_of(2, {2, 0, 2});
  EXPECT_EQ(distance(path, 1, 3), 2u);
  EXPECT_EQ(lca(path, 1, 3), 2);
  const auto t = sample4();
  EXPECT_EQ(distance(t, 2, 4), 2u);
  EXPECT_EQ(lca(t, 2, 4), 3);
  for (NodeId u = 1; u <= 4; ++u) {
    EXPECT_EQ(distance(t, u, u), 0u);
    EXPECT_EQ(lca(t, u, u), u);
  }
  EXPECT_THROW(distance(t, 0, 1), std::out_of_range);
  EXPECT_THROW(lca(t, 1, 5), std::out_of_range);
}

TEST(Distance, MatchesBfsOracleAndIsAMetric) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 40; ++iter) {
    const int k = 2 + iter % 3;
    const int n = 1 + static_cast<int>(rng() % 40);
    const auto t = oracle::random_tree(rng, n, k);
    ASSERT_TRUE(validate(t)) << *find_violation(t);
    const auto d = oracle::all_distances(t);
    for (NodeId u = 1; u <= n; ++u)
      for (NodeId v = 1; v <= n; ++v) {
        ASSERT_EQ(distance(t, u, v), static_cast<Cost>(d[u][v]));
        ASSERT_EQ(lca(t, u, v), oracle::lca(t, u, v));
        ASSERT_EQ(distance(t, u, v), distance(t, v, u));
        ASSERT_EQ(distance(t, u, v) == 0, u == v);
        for (NodeId w = 1; w <= n; w += 3) ASSERT_LE(distance(t, u, v), distance(t, u, w) + distance(t, w, v));
      }
  }
}

TEST(EdgeDiff, Examples) {
  EXPECT_EQ(edge_diff({{1, 2}, {2, 3}}, {{1, 2}, {2, 3}}), 0u);
  EXPECT_EQ(edge_diff({{1, 2}}, {{2, 3}}), 2u);
  EXPECT_EQ(edge_diff({}, {{1, 2}, {3, 4}}), 2u);
  EXPECT_EQ(edge_diff({{2, 3}, {1, 2}}, {{1, 2}}), 1u);
}

TEST(Rotate, ClassicZig) {
  auto t = tree_of(2, {2, 0, 2});
  const auto before = t.edges();
  const Cost c = t.rotate_up(1);
  EXPECT_EQ(t.root(), 1);
  EXPECT_EQ(t.parent(2), 1);
  EXPECT_EQ(t.parent(3), 2);
  EXPECT_TRUE(validate(t));
  EXPECT_EQ(c, edge_diff(before, t.edges()));
  // links are unordered: the two-node zig keeps the same link set
  auto two = tree_of(2, {2, 0});
  EXPECT_EQ(two.rotate_up(1), 0u);
  EXPECT_EQ(two.root(), 1);
}

TEST(Rotate, ZigWithInnerSubtreeChangesTwoLinks) {
  // 4 is the root with children 2 and 5; 2 has children 1 and 3
  auto t = tree_of(2, {2, 4, 2, 0, 4});
  EXPECT_EQ(t.rotate_up(2), 2u);
  EXPECT_EQ(t.root(), 2);
  EXPECT_EQ(t.parent(3), 4);
  EXPECT_EQ(t.parent(4), 2);
  EXPECT_TRUE(validate(t));
}

TEST(Rotate, Errors) {
  auto t = sample4();
  EXPECT_THROW(t.rotate_up(1), std::invalid_argument);
  EXPECT_THROW(t.rotate_up(9), std::out_of_range);
}

TEST(Rotate, ArityTwoMatchesClassicRotation) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 2000; ++iter) {
    const int n = 2 + static_cast<int>(rng() % 30);
    auto t = oracle::random_tree(rng, n, 2);
    NodeId u;
    do u = static_cast<NodeId>(1 + rng() % n);
    while (t.parent(u) == kNoNode);
    const auto expected = classic_rotate(t, u);
    const auto r = t.rotate(u);
    ASSERT_EQ(t.parent_array(), expected);
    ASSERT_EQ(r.spills, 0);
  }
}

TEST(Rotate, SpillChainAtArityThree) {
  // 7 is the root with left children 2 and 6; 2 has children 1, 3 and 6 has
  // left children 4, 5. Promoting 6 would give it 2, 4, 5 on the left: one
  // more than the side limit and no inner child to hand back to 7.
  auto t = tree_of(3, {2, 7, 2, 6, 6, 7, 0});
  ASSERT_TRUE(validate(t)) << *find_violation(t);
  const auto before = oracle::edge_snapshot(t);
  const auto r = t.rotate(6);
  EXPECT_TRUE(validate(t)) << *find_violation(t);
  EXPECT_EQ(t.root(), 6);
  EXPECT_EQ(r.spills, 1);
  EXPECT_EQ(t.parent(2), 4);
  EXPECT_EQ(r.cost, oracle::symmetric_difference(before, oracle::edge_snapshot(t)));
}

class RotationProperty : public ::testing::TestWithParam<int> {};

TEST_P(RotationProperty, HundredThousandRandomRotations) {
  const int k = GetParam();
  std::mt19937_64 rng(1000 + k);
  int spilled = 0;
  auto t = oracle::random_tree(rng, 60, k);
  for (int step = 0; step < 100000; ++step) {
    if (step % 5000 == 0) t = oracle::random_tree(rng, 20 + static_cast<int>(rng() % 60), k);
    const int n = t.size();
    NodeId u;
    do u = static_cast<NodeId>(1 + rng() % n);
    while (t.parent(u) == kNoNode);
    const int depth_before = t.depth(u);
    const auto before = t.edges();
    const auto r = t.rotate(u);
    ASSERT_EQ(t.depth(u), depth_before - 1);
    if (step % 10 == 0) {
      ASSERT_TRUE(validate(t)) << *find_violation(t);
    }
    ASSERT_EQ(r.cost, edge_diff(before, t.edges()));
    ASSERT_LE(r.cost, static_cast<Cost>(4 * k - 4 + 2 * r.spills));
    if (r.spills == 0 && k <= 3) {
      ASSERT_LE(r.cost, static_cast<Cost>(2 * k + 2));
    }
    spilled += r.spills > 0;
  }
  ASSERT_TRUE(validate(t));
  if (k > 2) {
    EXPECT_GT(spilled, 0);
  } else {
    EXPECT_EQ(spilled, 0);
  }
}

INSTANTIATE_TEST_SUITE_P(Arity, RotationProperty, ::testing::Values(2, 3, 4));

TEST(LinkJournal, NetChangesOverSeveralRotations) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 500; ++iter) {
    const int k = 2 + iter % 3;
    auto t = oracle::random_tree(rng, 30, k);
    LinkJournal j(30);
    const auto before = t.edges();
    for (int s = 0; s < 6; ++s) {
      NodeId u;
      do u = static_cast<NodeId>(1 + rng() % 30);
      while (t.parent(u) == kNoNode);
      t.rotate(u, &j);
    }
    ASSERT_EQ(j.net_changes(t), edge_diff(before, t.edges()));
    j.clear();
    EXPECT_TRUE(j.empty());
    EXPECT_EQ(j.net_changes(t), 0u);
  }
}

TEST(Centroid, Examples) {
  EXPECT_EQ(centroid(tree_of(2, {2, 0, 2})), 2);
  EXPECT_EQ(centroid(tree_of(2, {0, 1, 2})), 2);
  EXPECT_EQ(centroid(KaryTree::single(2)), 1);
}

TEST(Centroid, MatchesComponentSizeOracle) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 50; ++n)
    for (int k = 2; k <= 4; ++k) {
      const auto t = oracle::random_tree(rng, n, k);
      ASSERT_EQ(centroid(t), oracle::centroid(t)) << "n=" << n << " k=" << k;
    }
}

TEST(Tdr, Examples) {
  const auto chain = tree_of(2, {0, 1, 2});
  EXPECT_EQ(tdr(chain, 1), 3u);
  EXPECT_EQ(tdr(chain, 3), 0u);
  EXPECT_THROW(tdr(chain, 4), std::out_of_range);
  std::mt19937_64 rng(9);
  const auto t = oracle::random_tree(rng, 40, 3);
  const auto d = oracle::all_distances(t);
  for (NodeId x = 1; x <= 40; ++x) {
    Cost s = 0;
    for (NodeId y : subtree_nodes(t, x)) s += static_cast<Cost>(d[x][y]);
    EXPECT_EQ(tdr(t, x), s);
  }
}

TEST(Subtrees, ContiguousSegments) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 100; ++iter) {
    const auto t = oracle::random_tree(rng, 35, 2 + iter % 3);
    const auto sizes = subtree_sizes(t);
    for (NodeId x = 1; x <= t.size(); ++x) {
      auto nodes = subtree_nodes(t, x);
      ASSERT_EQ(static_cast<int>(nodes.size()), sizes[x]);
      const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
      ASSERT_EQ(*hi - *lo + 1, sizes[x]);
    }
  }
}

TEST(Shapes, LabelInOrderRoundTrip) {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 200; ++iter) {
    const int k = 2 + iter % 3;
    const auto t = oracle::random_tree(rng, 1 + static_cast<int>(rng() % 40), k);
    EXPECT_EQ(label_in_order(shape_of(t), k), t);
  }
}

TEST(Shapes, BalancedTree) {
  const auto full = balanced_tree(7, 2);
  EXPECT_TRUE(validate(full));
  EXPECT_EQ(full.root(), 4);
  EXPECT_EQ(distance(full, 1, 7), 4u);
  for (int k = 2; k <= 5; ++k)
    for (int n = 1; n <= 200; ++n) {
      const auto t = balanced_tree(n, k);
      ASSERT_TRUE(validate(t)) << "n=" << n << " k=" << k << ": " << *find_violation(t);
      int height = 0;
      for (NodeId x = 1; x <= n; ++x) height = std::max(height, t.depth(x));
      // a node of a balanced tree splits its descendants into at most k parts
      // whose sizes differ by one, so the height is logarithmic
      int bound = 0;
      for (long long cap = 1, level = 1; cap < n; level *= k, cap += level) ++bound;
      ASSERT_LE(height, bound + 1) << "n=" << n << " k=" << k;
    }
}

TEST(Serialization, RoundTripAndErrors) {
  std::mt19937_64 rng(17);
  const auto t = oracle::random_tree(rng, 25, 3);
  std::stringstream ss;
  write_tree(ss, t);
  EXPECT_EQ(read_tree(ss), t);

  std::istringstream bad_header("x y z\n");
  EXPECT_THROW(read_tree(bad_header), std::runtime_error);
  std::istringstream missing("2 2 1\n1:0\n");
  EXPECT_THROW(read_tree(missing), std::runtime_error);
  std::istringstream malformed("2 2 1\n1:0\n2-1\n");
  EXPECT_THROW(read_tree(malformed), std::runtime_error);
  std::istringstream wrong_root("2 2 2\n1:0\n2:1\n");
  EXPECT_THROW(read_tree(wrong_root), std::runtime_error);
}
