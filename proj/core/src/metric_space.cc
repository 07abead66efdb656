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

#include "btow/metric_space.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>
#include <sstream>
#include <unordered_map>

#include "btow/error.h"

namespace btow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kLipschitzExactLimit = 2000;
constexpr int kLipschitzSamplePairs = 200000;
constexpr std::size_t kRowCacheLimit = 5000;

using HeapItem = std::pair<double, int>;
using MinHeap =
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

}  // namespace

struct DiscretizedSpace::Topology {
  int n = 0;
  int dim = 0;
  std::vector<double> coords;
  std::vector<Edge> edges;
  std::vector<std::size_t> adj_offsets;
  std::vector<Neighbor> adj;
  double mesh_width = 0.0;

  // Multi-source Dijkstra; stops expanding beyond limit.
  std::vector<double> shortest(std::span<const int> sources,
                               double limit = kInf) const {
    std::vector<double> d(n, kInf);
    MinHeap heap;
    for (int s : sources) {
      d[s] = 0.0;
      heap.emplace(0.0, s);
    }
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (std::size_t k = adj_offsets[u]; k < adj_offsets[u + 1]; ++k) {
        const Neighbor& nb = adj[k];
        double nd = du + nb.length;
        if (nd > limit) break;
        if (nd < d[nb.vertex]) {
          d[nb.vertex] = nd;
          heap.emplace(nd, nb.vertex);
        }
      }
    }
    return d;
  }

  // Single-source Dijkstra truncated at limit. d must be all +inf on entry
  // and is restored before returning; reached vertices are appended to out
  // (unsorted) with their distances in out_d.
  void local(int source, double limit, std::vector<double>& d,
             std::vector<int>& out, std::vector<double>& out_d) const {
    MinHeap heap;
    std::vector<int> touched{source};
    d[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      out.push_back(u);
      out_d.push_back(du);
      for (std::size_t k = adj_offsets[u]; k < adj_offsets[u + 1]; ++k) {
        const Neighbor& nb = adj[k];
        double nd = du + nb.length;
        if (nd > limit) break;
        if (nd < d[nb.vertex]) {
          if (d[nb.vertex] == kInf) touched.push_back(nb.vertex);
          d[nb.vertex] = nd;
          heap.emplace(nd, nb.vertex);
        }
      }
    }
    for (int v : touched) d[v] = kInf;
  }
};

struct DiscretizedSpace::Cache {
  std::mutex mu;
  std::unordered_map<int, std::shared_ptr<const std::vector<double>>> rows;
  std::shared_ptr<const std::vector<double>> to_boundary;
  double diameter = -1.0;
};

DiscretizedSpace::DiscretizedSpace(int num_vertices, std::vector<Edge> edges,
                                   std::vector<std::pair<int, double>> boundary,
                                   std::vector<double> coords, int dim) {
  if (num_vertices < 2) {
    throw ValidationError("space needs at least 2 vertices, got " +
                          std::to_string(num_vertices));
  }
  if (dim < 0 || (dim > 0 && coords.size() !=
                                 static_cast<std::size_t>(num_vertices) * dim) ||
      (dim == 0 && !coords.empty())) {
    throw ValidationError("coords must hold num_vertices * dim values");
  }
  auto topo = std::make_shared<Topology>();
  topo->n = num_vertices;
  topo->dim = dim;
  topo->coords = std::move(coords);

  std::vector<std::size_t> degree(num_vertices + 1, 0);
  for (const Edge& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= num_vertices || e.b >= num_vertices) {
      throw ValidationError("edge (" + std::to_string(e.a) + ", " +
                            std::to_string(e.b) + ") references a missing vertex");
    }
    if (e.a == e.b) {
      throw ValidationError("self-loop at vertex " + std::to_string(e.a));
    }
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      throw ValidationError("edge (" + std::to_string(e.a) + ", " +
                            std::to_string(e.b) + ") has non-positive length");
    }
    ++degree[e.a];
    ++degree[e.b];
    topo->mesh_width = std::max(topo->mesh_width, e.length);
  }
  topo->adj_offsets.assign(num_vertices + 1, 0);
  for (int v = 0; v < num_vertices; ++v) {
    topo->adj_offsets[v + 1] = topo->adj_offsets[v] + degree[v];
  }
  topo->adj.resize(topo->adj_offsets.back());
  std::vector<std::size_t> fill(topo->adj_offsets.begin(),
                                topo->adj_offsets.end() - 1);
  for (const Edge& e : edges) {
    topo->adj[fill[e.a]++] = {e.b, e.length};
    topo->adj[fill[e.b]++] = {e.a, e.length};
  }
  // Shortest edges first, so truncated searches can stop scanning early.
  for (int v = 0; v < num_vertices; ++v) {
    std::sort(topo->adj.begin() + topo->adj_offsets[v],
              topo->adj.begin() + topo->adj_offsets[v + 1],
              [](const Neighbor& x, const Neighbor& y) {
                return x.length != y.length ? x.length < y.length
                                            : x.vertex < y.vertex;
              });
  }
  topo->edges = std::move(edges);

  // Connected components.
  std::vector<int> comp(num_vertices, -1);
  std::vector<std::pair<int, int>> comps;  // (size, representative)
  for (int s = 0; s < num_vertices; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(comps.size());
    int count = 0;
    std::vector<int> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      ++count;
      for (std::size_t k = topo->adj_offsets[u]; k < topo->adj_offsets[u + 1];
           ++k) {
        int w = topo->adj[k].vertex;
        if (comp[w] < 0) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
    comps.emplace_back(count, s);
  }
  if (comps.size() > 1) {
    std::ostringstream msg;
    msg << "space is disconnected: " << comps.size() << " components";
    for (std::size_t i = 0; i < comps.size() && i < 8; ++i) {
      msg << (i == 0 ? " (" : ", ") << "#" << i << ": " << comps[i].first
          << " vertices containing vertex " << comps[i].second;
    }
    msg << (comps.size() > 8 ? ", ...)" : ")");
    throw ValidationError(msg.str());
  }

  topo_ = std::move(topo);
  cache_ = std::make_shared<Cache>();
  set_boundary(std::move(boundary));
}

void DiscretizedSpace::set_boundary(
    std::vector<std::pair<int, double>> boundary) {
  const int n = topo_->n;
  std::sort(boundary.begin(), boundary.end());
  boundary_mask_.assign(n, 0);
  boundary_value_.assign(n, 0.0);
  boundary_ = BoundaryData{};
  for (const auto& [v, f] : boundary) {
    if (v < 0 || v >= n) {
      throw ValidationError("boundary vertex " + std::to_string(v) +
                            " does not exist");
    }
    if (boundary_mask_[v]) {
      throw ValidationError("boundary vertex " + std::to_string(v) +
                            " listed twice");
    }
    if (!std::isfinite(f)) {
      throw ValidationError("boundary value at vertex " + std::to_string(v) +
                            " is not finite");
    }
    boundary_mask_[v] = 1;
    boundary_value_[v] = f;
    boundary_.vertices.push_back(v);
    boundary_.values.push_back(f);
  }
  if (boundary_.vertices.empty()) {
    throw ValidationError("boundary set Y is empty");
  }
  if (static_cast<int>(boundary_.vertices.size()) == n) {
    throw ValidationError("boundary set Y covers every vertex");
  }
  auto [lo, hi] =
      std::minmax_element(boundary_.values.begin(), boundary_.values.end());
  boundary_.min_value = *lo;
  boundary_.max_value = *hi;
  interior_.clear();
  for (int v = 0; v < n; ++v) {
    if (!boundary_mask_[v]) interior_.push_back(v);
  }
  lipschitz_.reset();
}

int DiscretizedSpace::size() const { return topo_->n; }
int DiscretizedSpace::dim() const { return topo_->dim; }

std::span<const double> DiscretizedSpace::coord(int v) const {
  if (topo_->dim == 0) return {};
  return {topo_->coords.data() + static_cast<std::size_t>(v) * topo_->dim,
          static_cast<std::size_t>(topo_->dim)};
}

std::span<const Edge> DiscretizedSpace::edges() const { return topo_->edges; }

std::span<const Neighbor> DiscretizedSpace::neighbors(int v) const {
  return {topo_->adj.data() + topo_->adj_offsets[v],
          topo_->adj.data() + topo_->adj_offsets[v + 1]};
}

double DiscretizedSpace::mesh_width() const { return topo_->mesh_width; }

DiscretizedSpace DiscretizedSpace::with_boundary_values(
    std::span<const double> values) const {
  if (values.size() != boundary_.vertices.size()) {
    throw ValidationError("expected " +
                          std::to_string(boundary_.vertices.size()) +
                          " boundary values, got " +
                          std::to_string(values.size()));
  }
  DiscretizedSpace out;
  out.topo_ = topo_;
  out.cache_ = cache_;
  std::vector<std::pair<int, double>> b;
  for (std::size_t i = 0; i < values.size(); ++i) {
    b.emplace_back(boundary_.vertices[i], values[i]);
  }
  out.set_boundary(std::move(b));
  return out;
}

std::vector<double> DiscretizedSpace::boundary_extension(double fill) const {
  std::vector<double> out(size(), fill);
  for (std::size_t i = 0; i < boundary_.vertices.size(); ++i) {
    out[boundary_.vertices[i]] = boundary_.values[i];
  }
  return out;
}

DiscretizedSpace::DistanceRow DiscretizedSpace::distances_from(
    int source) const {
  if (source < 0 || source >= size()) {
    throw ValidationError("vertex " + std::to_string(source) +
                          " does not exist");
  }
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->rows.find(source);
    if (it != cache_->rows.end()) return it->second;
  }
  int src[] = {source};
  auto row = std::make_shared<const std::vector<double>>(topo_->shortest(src));
  std::lock_guard<std::mutex> lock(cache_->mu);
  // Large spaces keep a bounded row cache, evicted wholesale.
  if (cache_->rows.size() >= kRowCacheLimit &&
      static_cast<std::size_t>(size()) > kRowCacheLimit) {
    cache_->rows.clear();
  }
  auto [it, inserted] = cache_->rows.emplace(source, row);
  return it->second;
}

double DiscretizedSpace::dist(int x, int y) const {
  if (x == y) return 0.0;
  return (*distances_from(x))[y];
}

std::vector<int> DiscretizedSpace::within(int source, double radius,
                                          bool closed) const {
  std::vector<double> scratch(size(), kInf);
  std::vector<int> reached, out;
  std::vector<double> reached_d;
  within_into(source, radius, closed, scratch, reached, reached_d, out);
  return out;
}

void DiscretizedSpace::within_into(int source, double radius, bool closed,
                                   std::vector<double>& scratch,
                                   std::vector<int>& reached,
                                   std::vector<double>& reached_d,
                                   std::vector<int>& out) const {
  reached.clear();
  reached_d.clear();
  out.clear();
  const double limit = closed ? radius + kBallTieGuard : radius;
  topo_->local(source, limit, scratch, reached, reached_d);
  for (std::size_t i = 0; i < reached.size(); ++i) {
    const double d = reached_d[i];
    if (closed ? d <= radius + kBallTieGuard : d < radius - kBallTieGuard) {
      out.push_back(reached[i]);
    }
  }
  std::sort(out.begin(), out.end());
}

// Copies sharing the cache only ever differ in F, never in Y.
DiscretizedSpace::DistanceRow DiscretizedSpace::distance_to_boundary() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  if (!cache_->to_boundary) {
    cache_->to_boundary = std::make_shared<const std::vector<double>>(
        topo_->shortest(boundary_.vertices));
  }
  return cache_->to_boundary;
}

double DiscretizedSpace::diameter() const {
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    if (cache_->diameter >= 0.0) return cache_->diameter;
  }
  double diam = 0.0;
  for (int s = 0; s < size(); ++s) {
    int src[] = {s};
    std::vector<double> d = topo_->shortest(src);
    diam = std::max(diam, *std::max_element(d.begin(), d.end()));
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->diameter = diam;
  return diam;
}

double DiscretizedSpace::diameter_upper_bound() const {
  auto d = distances_from(0);
  return 2.0 * *std::max_element(d->begin(), d->end());
}

bool DiscretizedSpace::lipschitz_is_exact() const {
  return boundary_.vertices.size() <=
         static_cast<std::size_t>(kLipschitzExactLimit);
}

double DiscretizedSpace::lipschitz_constant() const {
  if (lipschitz_) return *lipschitz_;
  const auto& ys = boundary_.vertices;
  const auto& fs = boundary_.values;
  const std::size_t m = ys.size();
  double lip = 0.0;
  if (lipschitz_is_exact()) {
    for (std::size_t i = 0; i < m; ++i) {
      int src[] = {ys[i]};
      std::vector<double> d = topo_->shortest(src);
      for (std::size_t j = i + 1; j < m; ++j) {
        lip = std::max(lip, std::abs(fs[i] - fs[j]) / d[ys[j]]);
      }
    }
  } else {
    std::mt19937_64 gen(0x5eed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    constexpr int kSources = 64;
    for (int s = 0; s < kSources; ++s) {
      std::size_t i = pick(gen);
      int src[] = {ys[i]};
      std::vector<double> d = topo_->shortest(src);
      for (int k = 0; k < kLipschitzSamplePairs / kSources; ++k) {
        std::size_t j = pick(gen);
        if (j == i) continue;
        lip = std::max(lip, std::abs(fs[i] - fs[j]) / d[ys[j]]);
      }
    }
  }
  lipschitz_ = std::make_shared<double>(lip);
  return lip;
}

double d_eps_from_distance(double d, double eps, bool same_point) {
  if (!(eps > 0.0)) {
    throw ValidationError("epsilon must be positive");
  }
  if (same_point) return 0.0;
  return eps + eps * std::floor(d / eps);
}

double d_eps(const DiscretizedSpace& space, int x, int y, double eps) {
  return d_eps_from_distance(space.dist(x, y), eps, x == y);
}

BallIndex BallIndex::build(const DiscretizedSpace& space, double radius,
                           BallClosure closure) {
  const double h = space.mesh_width();
  const bool too_small = closure == BallClosure::kOpen
                             ? !(radius > h + kBallTieGuard)
                             : !(radius >= h - kBallTieGuard);
  if (too_small) {
    std::ostringstream msg;
    msg << "epsilon must exceed mesh width (epsilon = " << radius
        << ", h = " << h << ")";
    throw ValidationError(msg.str());
  }
  BallIndex index;
  index.radius_ = radius;
  index.closure_ = closure;
  index.offsets_.assign(1, 0);
  const bool closed = closure == BallClosure::kClosed;
  std::vector<double> scratch(space.size(),
                              std::numeric_limits<double>::infinity());
  std::vector<int> reached, b;
  std::vector<double> reached_d;
  for (int v = 0; v < space.size(); ++v) {
    space.within_into(v, radius, closed, scratch, reached, reached_d, b);
    index.members_.insert(index.members_.end(), b.begin(), b.end());
    index.offsets_.push_back(index.members_.size());
  }
  return index;
}

bool BallIndex::contains(int center, int v) const {
  auto b = ball(center);
  return std::binary_search(b.begin(), b.end(), v);
}

}  // namespace btow
