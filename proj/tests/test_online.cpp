#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "santree/offline_opt.hpp"
#include "santree/online.hpp"
#include "santree/workloads.hpp"

using namespace santree;

namespace {

// Snapshot-based check of one serve against the oracles.
void serve_checked(Strategy& s, NodeId u, NodeId v) {
  const auto d = oracle::all_distances(s.topology());
  const auto before = oracle::edge_snapshot(s.topology());
  const auto out = s.serve(u, v);
  ASSERT_EQ(out.routing, static_cast<Cost>(d[u][v]));
  ASSERT_EQ(out.adjustment, oracle::symmetric_difference(before, oracle::edge_snapshot(s.topology())));
  ASSERT_TRUE(validate(s.topology())) << *find_violation(s.topology());
  const auto extra = s.check_invariants();
  ASSERT_FALSE(extra.has_value()) << *extra;
}

}  // namespace

TEST(Static, Serve) {
  StaticNetwork s(balanced_tree(7, 2));
  EXPECT_EQ(s.serve(1, 7).routing, 4u);
  for (NodeId u = 1; u <= 7; ++u) {
    const auto out = s.serve(u, u);
    EXPECT_EQ(out.routing, 0u);
    EXPECT_EQ(out.adjustment, 0u);
  }
  EXPECT_EQ(s.serve(2, 6).adjustment, 0u);
  EXPECT_THROW(s.serve(0, 3), std::out_of_range);
  EXPECT_THROW(s.serve(8, 8), std::out_of_range);
}

TEST(Static, OptimalTreeRoutesNoWorseThanBalanced) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto trace = gen_temporal(40, 3000, {0.3, 16, seed});
    StaticNetwork balanced(balanced_tree(40, 2));
    StaticNetwork optimal(optimal_tree_generic(tally(trace), 2).tree);
    Cost rb = 0, ro = 0;
    for (const auto& r : trace.requests) {
      rb += balanced.serve(r.src, r.dst).routing;
      ro += optimal.serve(r.src, r.dst).routing;
    }
    EXPECT_LE(ro, rb);
  }
}

TEST(Splay, StopMustBeAnAncestor) {
  auto t = balanced_tree(7, 2);
  LinkJournal j(7);
  ServeOutcome out;
  EXPECT_THROW(splay(t, 1, 7, j, out), std::logic_error);
}

TEST(SplayNet, ChainExample) {
  const std::vector<NodeId> chain{0, 1, 2};
  SplayNet s(KaryTree::from_parents(2, chain));
  const auto out = s.serve(3, 1);
  EXPECT_EQ(out.routing, 2u);
  EXPECT_EQ(distance(s.topology(), 1, 3), 1u);
  EXPECT_TRUE(validate(s.topology()));
  EXPECT_EQ(s.topology().root(), 3);
}

TEST(SplayNet, SelfRequestIsANoOp) {
  SplayNet s(31, 2);
  const auto before = s.topology();
  const auto out = s.serve(5, 5);
  EXPECT_EQ(out.routing, 0u);
  EXPECT_EQ(out.adjustment, 0u);
  EXPECT_EQ(s.topology(), before);
  EXPECT_THROW(s.serve(0, 0), std::out_of_range);
}

TEST(SplayNet, StartsBalanced) { EXPECT_EQ(SplayNet(50, 3).topology(), balanced_tree(50, 3)); }

TEST(SplayNet, ClassicRandomServes) {
  SplayNet s(63, 2);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    const auto u = static_cast<NodeId>(1 + rng() % 63), v = static_cast<NodeId>(1 + rng() % 63);
    serve_checked(s, u, v);
    if (u != v) ASSERT_EQ(distance(s.topology(), u, v), 1u);
  }
}

TEST(SplayNet, HigherArityRandomServes) {
  for (int k = 3; k <= 5; ++k) {
    SplayNet s(80, k);
    std::mt19937_64 rng(k);
    for (int i = 0; i < 2000; ++i) {
      const auto u = static_cast<NodeId>(1 + rng() % 80), v = static_cast<NodeId>(1 + rng() % 80);
      serve_checked(s, u, v);
      // v ends up directly below u
      if (u != v) ASSERT_EQ(s.topology().parent(v), u);
    }
  }
}

TEST(SplayNet, AdjustmentIsNetNotPerRotationSum) {
  SplayNet s(127, 2);
  std::mt19937_64 rng(2);
  bool saw_gap = false;
  for (int i = 0; i < 2000; ++i) {
    const auto u = static_cast<NodeId>(1 + rng() % 127), v = static_cast<NodeId>(1 + rng() % 127);
    const auto out = s.serve(u, v);
    ASSERT_LE(out.adjustment, out.rotation_link_sum);
    saw_gap |= out.adjustment < out.rotation_link_sum;
  }
  EXPECT_TRUE(saw_gap);
}

TEST(CentroidLayout, Examples) {
  {
    const auto [layout, tree] = build_centroid_splaynet(11, 2);
    EXPECT_EQ(layout.c1, 4);
    EXPECT_EQ(layout.c2, 8);
    using R = std::pair<NodeId, NodeId>;
    EXPECT_EQ(layout.ranges, (std::vector<R>{{1, 3}, {5, 7}, {9, 11}}));
    EXPECT_TRUE(validate(tree));
    EXPECT_EQ(tree.root(), 4);
    EXPECT_EQ(tree.parent(8), 4);
  }
  {
    const auto [layout, tree] = build_centroid_splaynet(5, 2);
    EXPECT_EQ(layout.c1, 2);
    EXPECT_EQ(layout.c2, 4);
    using R = std::pair<NodeId, NodeId>;
    EXPECT_EQ(layout.ranges, (std::vector<R>{{1, 1}, {3, 3}, {5, 5}}));
  }
  EXPECT_THROW(build_centroid_splaynet(4, 2), std::invalid_argument);
  EXPECT_THROW(build_centroid_splaynet(10, 1), std::invalid_argument);
}

TEST(CentroidLayout, StructureForManySizes) {
  for (int k = 2; k <= 5; ++k)
    for (int n = k + 3; n <= 120; ++n) {
      const auto [layout, tree] = build_centroid_splaynet(n, k);
      ASSERT_TRUE(validate(tree)) << *find_violation(tree);
      ASSERT_EQ(static_cast<int>(layout.ranges.size()), 2 * k - 1);
      ASSERT_LT(layout.c1, layout.c2);
      // ranges, c1 and c2 partition 1..n in ascending order
      NodeId next = 1;
      for (int r = 0; r < 2 * k - 1; ++r) {
        if (r == k - 1) {
          ASSERT_EQ(layout.c1, next++);
        }
        if (r == k - 1 + k / 2) {
          ASSERT_EQ(layout.c2, next++);
        }
        ASSERT_EQ(layout.ranges[static_cast<std::size_t>(r)].first, next);
        next = layout.ranges[static_cast<std::size_t>(r)].second + 1;
      }
      ASSERT_EQ(next, n + 1);
      // sizes: c2's subtrees within one of each other and of the c1 group
      const int s = (n - 2) / (k + 1);
      for (int r = k - 1; r < 2 * k - 1; ++r) {
        const auto [lo, hi] = layout.ranges[static_cast<std::size_t>(r)];
        ASSERT_TRUE(hi - lo + 1 == s || hi - lo + 1 == s + 1);
      }
      int nonempty_c1 = 0, nonempty_c2 = 0;
      for (int r = 0; r < 2 * k - 1; ++r) (r < k - 1 ? nonempty_c1 : nonempty_c2) += layout.empty(r) ? 0 : 1;
      ASSERT_EQ(static_cast<int>(tree.children(layout.c1).size()), nonempty_c1 + 1);
      ASSERT_EQ(static_cast<int>(tree.children(layout.c2).size()), nonempty_c2);
      ASSERT_EQ(nonempty_c2, k);
      for (NodeId x = 1; x <= n; ++x) {
        const int r = layout.subtree_of[static_cast<std::size_t>(x)];
        if (x == layout.c1 || x == layout.c2) {
          ASSERT_EQ(r, -1);
        } else {
          ASSERT_GE(x, layout.ranges[static_cast<std::size_t>(r)].first);
          ASSERT_LE(x, layout.ranges[static_cast<std::size_t>(r)].second);
        }
      }
    }
}

TEST(CentroidSplayNet, PinnedEndpoints) {
  CentroidSplayNet s(11, 2);
  const auto before = s.topology();
  const auto out = s.serve(4, 8);
  EXPECT_EQ(out.routing, 1u);
  EXPECT_EQ(out.adjustment, 0u);
  EXPECT_EQ(s.topology(), before);
}

TEST(CentroidSplayNet, RandomServesKeepLayout) {
  for (int k = 2; k <= 4; ++k) {
    const int n = 90;
    CentroidSplayNet s(n, k);
    std::mt19937_64 rng(10 + k);
    for (int i = 0; i < 3000; ++i) {
      const auto u = static_cast<NodeId>(1 + rng() % n), v = static_cast<NodeId>(1 + rng() % n);
      serve_checked(s, u, v);
    }
  }
}

TEST(CentroidSplayNet, CrossSubtreeEndpointsBecomeSubtreeRoots) {
  CentroidSplayNet s(60, 2);
  std::mt19937_64 rng(4);
  const auto& layout = s.layout();
  for (int i = 0; i < 500; ++i) {
    const auto u = static_cast<NodeId>(1 + rng() % 60), v = static_cast<NodeId>(1 + rng() % 60);
    const int su = layout.subtree_of[static_cast<std::size_t>(u)];
    const int sv = layout.subtree_of[static_cast<std::size_t>(v)];
    s.serve(u, v);
    if (su == sv) continue;
    if (su >= 0) ASSERT_EQ(s.topology().parent(u), layout.anchor(su));
    if (sv >= 0) ASSERT_EQ(s.topology().parent(v), layout.anchor(sv));
  }
}

// A request inside one subtree behaves like SplayNet on that subtree alone.
TEST(CentroidSplayNet, SameSubtreeMatchesIsolatedSplayNet) {
  const int n = 47, k = 2;
  CentroidSplayNet s(n, k);
  const auto& layout = s.layout();
  std::mt19937_64 rng(6);
  for (int range = 0; range < 2 * k - 1; ++range) {
    const auto [lo, hi] = layout.ranges[static_cast<std::size_t>(range)];
    const int m = hi - lo + 1;
    // isolated copy of the current subtree, keys shifted to 1..m
    auto extract = [&]() {
      std::vector<NodeId> parents(static_cast<std::size_t>(m));
      for (NodeId x = lo; x <= hi; ++x) {
        const NodeId p = s.topology().parent(x);
        parents[static_cast<std::size_t>(x - lo)] = (p >= lo && p <= hi) ? p - lo + 1 : kNoNode;
      }
      return KaryTree::from_parents(k, parents);
    };
    SplayNet iso(extract());
    for (int i = 0; i < 300; ++i) {
      const auto u = static_cast<NodeId>(lo + static_cast<NodeId>(rng() % m));
      const auto v = static_cast<NodeId>(lo + static_cast<NodeId>(rng() % m));
      const NodeId root_before = range_root(s.topology(), layout, range);
      const auto a = s.serve(u, v);
      const auto b = iso.serve(u - lo + 1, v - lo + 1);
      const NodeId root_after = range_root(s.topology(), layout, range);
      ASSERT_EQ(a.routing, b.routing);
      ASSERT_EQ(a.adjustment, b.adjustment + (root_before != root_after ? 2u : 0u));
      ASSERT_EQ(extract(), iso.topology());
    }
  }
}
