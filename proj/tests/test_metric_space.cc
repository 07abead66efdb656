// Copyright 2026 The btow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "btow/error.h"
#include "btow/generators.h"
#include "btow/metric_space.h"
#include "btow/space_io.h"

namespace btow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All-pairs shortest paths by Floyd-Warshall, for small graphs.
std::vector<std::vector<double>> floyd(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (int i = 0; i < n; ++i) d[i][i] = 0.0;
  for (const Edge& e : edges) {
    d[e.a][e.b] = std::min(d[e.a][e.b], e.length);
    d[e.b][e.a] = std::min(d[e.b][e.a], e.length);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

// Hop counts on a grid mask by breadth-first search.
int bfs_hops(int nx, int ny, const std::vector<bool>& blocked, int from,
             int to) {
  std::vector<int> hops(nx * ny, -1);
  std::queue<int> q;
  hops[from] = 0;
  q.push(from);
  while (!q.empty()) {
    const int c = q.front();
    q.pop();
    const int x = c % nx, y = c / nx;
    const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
    for (const auto& p : nb) {
      if (p[0] < 0 || p[0] >= nx || p[1] < 0 || p[1] >= ny) continue;
      const int k = p[1] * nx + p[0];
      if (blocked[k] || hops[k] >= 0) continue;
      hops[k] = hops[c] + 1;
      q.push(k);
    }
  }
  return hops[to];
}

int vertex_at(const DiscretizedSpace& sp, double x, double y) {
  for (int v = 0; v < sp.size(); ++v) {
    const auto c = sp.coord(v);
    if (std::abs(c[0] - x) < 1e-12 && std::abs(c[1] - y) < 1e-12) return v;
  }
  return -1;
}

TEST(Interval, TwoCells) {
  const auto sp = build_interval(2, 1.0);
  ASSERT_EQ(sp.size(), 3);
  EXPECT_DOUBLE_EQ(sp.coord(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(sp.coord(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(sp.coord(2)[0], 1.0);
  EXPECT_DOUBLE_EQ(sp.dist(0, 2), 1.0);
  EXPECT_EQ(sp.boundary().vertices, (std::vector<int>{0, 2}));
}

TEST(Interval, UniformSpacing) {
  EXPECT_NEAR(build_interval(10, 1.0).dist(3, 7), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(build_interval(4, 2.0).mesh_width(), 0.5);
}

TEST(Interval, RejectsBadInput) {
  EXPECT_THROW(build_interval(1, 1.0), ValidationError);
  EXPECT_THROW(build_interval(4, 0.0), ValidationError);
}

TEST(Grid, ManhattanCorner) {
  GridSpec g;
  g.nx = g.ny = 3;
  const auto sp = build_grid_domain(g);
  EXPECT_DOUBLE_EQ(sp.dist(vertex_at(sp, 0, 0), vertex_at(sp, 2, 2)), 4.0);
}

TEST(Grid, PathAroundBlockedCenter) {
  GridSpec g;
  g.nx = g.ny = 3;
  g.obstacle.assign(9, false);
  g.obstacle[4] = true;
  g.boundary = BoundarySelect::kExplicit;
  g.explicit_cells = {0};
  const auto sp = build_grid_domain(g);
  const int a = vertex_at(sp, 0, 1), b = vertex_at(sp, 2, 1);
  ASSERT_GE(a, 0);
  ASSERT_GE(b, 0);
  EXPECT_DOUBLE_EQ(sp.dist(a, b), bfs_hops(3, 3, g.obstacle, 3, 5));
  EXPECT_DOUBLE_EQ(sp.dist(a, b), 4.0);
}

TEST(Grid, SpiralDistancesMatchBfs) {
  SpiralSpec s;
  s.size = 21;
  const GridSpec g = spiral_grid(s);
  const auto sp = build_grid_domain(g);
  const auto ids = grid_vertex_ids(g);
  int from = -1;
  for (int c = 0; c < g.nx * g.ny; ++c) {
    if (ids[c] >= 0) {
      from = c;
      break;
    }
  }
  for (int c = 0; c < g.nx * g.ny; c += 7) {
    if (ids[c] < 0) continue;
    EXPECT_DOUBLE_EQ(sp.dist(ids[from], ids[c]),
                     bfs_hops(g.nx, g.ny, g.obstacle, from, c) * s.spacing);
  }
}

TEST(Grid, StripReducesToInterval) {
  GridSpec g;
  g.nx = 9;
  g.ny = 1;
  g.spacing = 0.125;
  g.boundary = BoundarySelect::kExplicit;
  g.explicit_cells = {0, 8};
  const auto strip = build_grid_domain(g);
  const auto line = build_interval(8, 1.0);
  ASSERT_EQ(strip.size(), line.size());
  for (int i = 0; i < line.size(); ++i) {
    for (int j = 0; j < line.size(); ++j) {
      EXPECT_NEAR(strip.dist(i, j), line.dist(i, j), 1e-15);
    }
  }
}

TEST(Distances, MatchFloydOnRandomGraphs) {
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> len(0.1, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 30;
    std::vector<Edge> edges;
    for (int i = 1; i < n; ++i) edges.push_back({i - 1, i, len(gen)});
    for (int k = 0; k < 40; ++k) {
      const int a = gen() % n, b = gen() % n;
      if (a != b) edges.push_back({a, b, len(gen)});
    }
    const DiscretizedSpace sp(n, edges, {{0, 0.0}, {n - 1, 1.0}});
    const auto ref = floyd(n, edges);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) EXPECT_NEAR(sp.dist(i, j), ref[i][j], 1e-12);
    }
    double diam = 0.0;
    for (const auto& row : ref) diam = std::max(diam, *std::max_element(row.begin(), row.end()));
    EXPECT_NEAR(sp.diameter(), diam, 1e-12);
    EXPECT_GE(sp.diameter_upper_bound(), diam - 1e-12);
  }
}

TEST(Space, RejectsMalformedGraphs) {
  EXPECT_THROW(DiscretizedSpace(3, {{0, 1, 1.0}}, {{0, 0.0}}), ValidationError);
  EXPECT_THROW(DiscretizedSpace(2, {{0, 1, -1.0}}, {{0, 0.0}}), ValidationError);
  EXPECT_THROW(DiscretizedSpace(2, {{0, 0, 1.0}}, {{0, 0.0}}), ValidationError);
  EXPECT_THROW(DiscretizedSpace(2, {{0, 1, 1.0}}, {}), ValidationError);
  EXPECT_THROW(DiscretizedSpace(2, {{0, 1, 1.0}}, {{0, 0.0}, {1, 1.0}}),
               ValidationError);
  EXPECT_THROW(DiscretizedSpace(2, {{0, 1, 1.0}}, {{5, 0.0}}), ValidationError);
}

TEST(DEps, Examples) {
  EXPECT_NEAR(d_eps_from_distance(0.35, 0.1, false), 0.4, 1e-15);
  EXPECT_DOUBLE_EQ(d_eps_from_distance(0.0, 0.1, true), 0.0);
  EXPECT_NEAR(d_eps_from_distance(0.05, 0.1, false), 0.1, 1e-15);
  const auto sp = build_interval(10, 1.0);
  EXPECT_DOUBLE_EQ(d_eps(sp, 4, 4, 0.1), 0.0);
  EXPECT_THROW(d_eps_from_distance(0.3, 0.0, false), ValidationError);
}

TEST(Balls, IntervalOpenBall) {
  const auto sp = build_interval(10, 1.0);
  const BallIndex b = BallIndex::build(sp, 0.25);
  const auto ball = b.ball(5);
  EXPECT_EQ(std::vector<int>(ball.begin(), ball.end()),
            (std::vector<int>{3, 4, 5, 6, 7}));
}

TEST(Balls, MinimalBall) {
  GridSpec g;
  g.nx = g.ny = 5;
  g.spacing = 0.1;
  const auto sp = build_grid_domain(g);
  const BallIndex b = BallIndex::build(sp, 0.1 * (1 + 1e-9));
  for (int v = 0; v < sp.size(); ++v) {
    std::vector<int> expect = {v};
    for (const Neighbor& n : sp.neighbors(v)) expect.push_back(n.vertex);
    std::sort(expect.begin(), expect.end());
    const auto ball = b.ball(v);
    EXPECT_EQ(std::vector<int>(ball.begin(), ball.end()), expect);
  }
}

TEST(Balls, SymmetricAndEqualToBruteForce) {
  AnnulusSpec a;
  a.spacing = 1.0 / 24;
  const auto sp = build_annulus(a);
  for (BallClosure c : {BallClosure::kOpen, BallClosure::kClosed}) {
    const double r = 7.0 / 24;
    const BallIndex b = BallIndex::build(sp, r, c);
    std::mt19937 gen(3);
    for (int k = 0; k < 400; ++k) {
      const int x = gen() % sp.size(), y = gen() % sp.size();
      EXPECT_EQ(b.contains(x, y), b.contains(y, x));
      const double d = sp.dist(x, y);
      const bool inside = c == BallClosure::kOpen ? d < r - kBallTieGuard
                                                  : d <= r + kBallTieGuard;
      EXPECT_EQ(b.contains(x, y), inside) << x << " " << y << " d " << d;
    }
  }
}

TEST(Balls, WithinMatchesIndex) {
  const auto sp = build_interval(40, 1.0);
  const BallIndex b = BallIndex::build(sp, 0.1, BallClosure::kClosed);
  for (int v = 0; v < sp.size(); ++v) {
    const auto ball = b.ball(v);
    EXPECT_EQ(sp.within(v, 0.1, true), std::vector<int>(ball.begin(), ball.end()));
  }
}

TEST(Boundary, ExtensionAndOscillation) {
  const auto sp = build_interval(4, 1.0, -1.0, 3.0);
  EXPECT_DOUBLE_EQ(sp.boundary().oscillation(), 4.0);
  const auto ext = sp.boundary_extension(7.0);
  EXPECT_EQ(ext, (std::vector<double>{-1.0, 7.0, 7.0, 7.0, 3.0}));
  const auto dy = sp.distance_to_boundary();
  EXPECT_DOUBLE_EQ((*dy)[2], 0.5);
}

TEST(Boundary, LipschitzOnInterval) {
  const auto sp = build_interval(8, 2.0, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(sp.lipschitz_constant(), 0.5);
  EXPECT_TRUE(sp.lipschitz_is_exact());
}

TEST(SpaceIo, RoundTripIsLossless) {
  AnnulusSpec a;
  a.spacing = 1.0 / 16;
  a.boundary_value = [](double x, double y) { return std::sin(x + 3 * y); };
  const auto sp = build_annulus(a);
  const auto back = parse_space_json(write_space_json(sp));
  ASSERT_EQ(back.size(), sp.size());
  EXPECT_EQ(back.boundary().vertices, sp.boundary().vertices);
  EXPECT_EQ(back.boundary().values, sp.boundary().values);
  for (int v = 0; v < sp.size(); v += 5) {
    for (int w = 0; w < sp.size(); w += 3) {
      EXPECT_EQ(back.dist(v, w), sp.dist(v, w));
    }
  }
  for (int v = 0; v < sp.size(); ++v) {
    EXPECT_EQ(back.coord(v)[0], sp.coord(v)[0]);
  }
}

TEST(SpaceIo, RejectsUnknownKeysAndBadIds) {
  EXPECT_THROW(parse_space_json(R"({"vertices": [], "edges": [], "boundary": [], "extra": 1})"),
               ValidationError);
  EXPECT_THROW(
      parse_space_json(R"({"vertices": [{"id": 0}, {"id": 5}], "edges": [[0, 1, 1]], "boundary": [{"id": 0, "F": 0}]})"),
      ValidationError);
  EXPECT_THROW(parse_space_json("not json"), ValidationError);
}

TEST(Generators, AnnulusBothRimsCarryConeValues) {
  AnnulusSpec a;
  a.inner_radius = 3;
  a.outer_radius = 8;
  a.spacing = 1;
  a.boundary_value = [](double x, double y) {
    return 1 - std::exp(-std::hypot(x, y));
  };
  const auto sp = build_annulus(a);
  bool inner = false, outer = false;
  for (std::size_t i = 0; i < sp.boundary().vertices.size(); ++i) {
    const auto c = sp.coord(sp.boundary().vertices[i]);
    const double r = std::hypot(c[0], c[1]);
    inner |= r < 4.0;
    outer |= r > 7.0;
    EXPECT_NEAR(sp.boundary().values[i], 1 - std::exp(-r), 1e-15);
  }
  EXPECT_TRUE(inner);
  EXPECT_TRUE(outer);
}

TEST(Generators, SpiralPathFarExceedsEuclidean) {
  SpiralSpec s;
  s.size = 29;
  s.corridor = 3;
  const auto sp = build_spiral(s);
  double best = 0.0;
  for (int v = 0; v < sp.size(); v += 3) {
    const auto e = euclidean_distances_to(sp, sp.coord(v));
    const auto row = sp.distances_from(v);
    for (int w = 0; w < sp.size(); ++w) {
      if (w != v && e[w] <= 5.0) best = std::max(best, (*row)[w] / e[w]);
    }
  }
  EXPECT_GT(best, 5.0);
}

}  // namespace
}  // namespace btow
