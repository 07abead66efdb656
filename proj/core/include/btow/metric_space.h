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

// Finite metric graphs standing in for compact length spaces: vertices,
// weighted edges, shortest-path distances, boundary data and epsilon-balls.

#ifndef BTOW_METRIC_SPACE_H_
#define BTOW_METRIC_SPACE_H_

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace btow {

struct Edge {
  int a = 0;
  int b = 0;
  double length = 0.0;
};

struct Neighbor {
  int vertex = 0;
  double length = 0.0;
};

// Boundary subset Y with the boundary function F on it.
struct BoundaryData {
  std::vector<int> vertices;   // sorted ascending
  std::vector<double> values;  // F, aligned with vertices
  double min_value = 0.0;
  double max_value = 0.0;

  // M = sup_Y F - inf_Y F.
  double oscillation() const { return max_value - min_value; }
};

// A connected weighted graph with its path metric. Copies share the
// (immutable) topology and the distance cache; boundary values are per copy.
class DiscretizedSpace {
 public:
  // boundary: (vertex, F) pairs. coords: optional flat array of
  // num_vertices * dim Euclidean positions. Throws ValidationError when the
  // graph is disconnected, an edge is degenerate, or Y is empty or all of X.
  DiscretizedSpace(int num_vertices, std::vector<Edge> edges,
                   std::vector<std::pair<int, double>> boundary,
                   std::vector<double> coords = {}, int dim = 0);

  int size() const;
  int dim() const;
  bool has_coords() const { return dim() > 0; }
  std::span<const double> coord(int v) const;

  std::span<const Edge> edges() const;
  std::span<const Neighbor> neighbors(int v) const;

  // Maximum edge length h.
  double mesh_width() const;

  bool is_boundary(int v) const { return boundary_mask_[v] != 0; }
  const BoundaryData& boundary() const { return boundary_; }
  std::span<const int> interior() const { return interior_; }
  // F(v) for v in Y; 0 for interior vertices.
  double boundary_value(int v) const { return boundary_value_[v]; }

  // Same graph, new boundary function; values is indexed like
  // boundary().vertices.
  DiscretizedSpace with_boundary_values(std::span<const double> values) const;

  // Field equal to F on Y and to fill elsewhere.
  std::vector<double> boundary_extension(double fill) const;

  // Shortest-path distance. Rows are computed on demand and cached.
  using DistanceRow = std::shared_ptr<const std::vector<double>>;
  double dist(int x, int y) const;
  DistanceRow distances_from(int source) const;

  // Vertices with dist(source, v) below (or, if closed, at most) radius,
  // sorted by vertex index.
  std::vector<int> within(int source, double radius, bool closed) const;
  // Allocation-free form of within: scratch must hold size() entries of
  // +inf and is left that way; reached / reached_d are workspace.
  void within_into(int source, double radius, bool closed,
                   std::vector<double>& scratch, std::vector<int>& reached,
                   std::vector<double>& reached_d,
                   std::vector<int>& out) const;

  // dist(v, Y) for every vertex.
  DistanceRow distance_to_boundary() const;

  // Exact diameter (touches every distance row; use on small spaces).
  double diameter() const;
  // Cheap bound: 2 * eccentricity of vertex 0 >= diameter.
  double diameter_upper_bound() const;

  // Lip_Y F with respect to the path metric. Exact when |Y| <= 2000,
  // otherwise a seeded sample of boundary pairs (a lower estimate).
  double lipschitz_constant() const;
  bool lipschitz_is_exact() const;

 private:
  struct Topology;
  struct Cache;

  DiscretizedSpace() = default;
  void set_boundary(std::vector<std::pair<int, double>> boundary);

  std::shared_ptr<const Topology> topo_;
  std::shared_ptr<Cache> cache_;
  BoundaryData boundary_;
  std::vector<char> boundary_mask_;
  std::vector<double> boundary_value_;
  std::vector<int> interior_;
  mutable std::shared_ptr<double> lipschitz_;
};

// epsilon times the minimum number of sub-epsilon steps between two points:
// 0 if equal, otherwise eps + eps * floor(d / eps).
double d_eps_from_distance(double d, double eps, bool same_point);
double d_eps(const DiscretizedSpace& space, int x, int y, double eps);

enum class BallClosure {
  kOpen,    // dist < r (with a 1e-12 guard against ties)
  kClosed,  // dist <= r (lattice-aligned step lengths)
};

// Ball B_r(x) for every vertex, stored in one flat array sorted by vertex
// index within each ball.
class BallIndex {
 public:
  // Throws ValidationError("epsilon must exceed mesh width") when an open
  // ball's radius is <= h or a closed ball's radius is < h.
  static BallIndex build(const DiscretizedSpace& space, double radius,
                         BallClosure closure = BallClosure::kOpen);

  double radius() const { return radius_; }
  BallClosure closure() const { return closure_; }
  int size() const { return static_cast<int>(offsets_.size()) - 1; }
  std::span<const int> ball(int v) const {
    return {members_.data() + offsets_[v],
            members_.data() + offsets_[v + 1]};
  }
  bool contains(int center, int v) const;
  std::size_t total_size() const { return members_.size(); }

 private:
  double radius_ = 0.0;
  BallClosure closure_ = BallClosure::kOpen;
  std::vector<std::size_t> offsets_;
  std::vector<int> members_;
};

// Numerical guard for strict / non-strict ball membership.
inline constexpr double kBallTieGuard = 1e-12;

}  // namespace btow

#endif  // BTOW_METRIC_SPACE_H_
