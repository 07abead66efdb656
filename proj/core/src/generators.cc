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

#include "btow/generators.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

#include "btow/error.h"

namespace btow {
namespace {

struct Offset {
  int dx;
  int dy;
};

bool blocked(const GridSpec& spec, int x, int y) {
  if (x < 0 || y < 0 || x >= spec.nx || y >= spec.ny) return true;
  return !spec.obstacle.empty() && spec.obstacle[y * spec.nx + x];
}

// True when the segment between two cell centers runs through the interior
// of a blocked cell (touching a corner is allowed).
bool segment_blocked(const GridSpec& spec, int x0, int y0, int x1, int y1) {
  if (spec.obstacle.empty()) return false;
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  for (int cy = std::min(y0, y1); cy <= std::max(y0, y1); ++cy) {
    for (int cx = std::min(x0, x1); cx <= std::max(x0, x1); ++cx) {
      if (!blocked(spec, cx, cy)) continue;
      double t0 = 0.0, t1 = 1.0;
      auto clip = [&](double p, double q) {
        // p * t <= q
        if (p == 0.0) return q >= 0.0;
        double r = q / p;
        if (p < 0.0) {
          t0 = std::max(t0, r);
        } else {
          t1 = std::min(t1, r);
        }
        return true;
      };
      bool inside = clip(-dx, x0 - (cx - 0.5)) && clip(dx, (cx + 0.5) - x0) &&
                    clip(-dy, y0 - (cy - 0.5)) && clip(dy, (cy + 0.5) - y0);
      if (inside && t1 - t0 > 1e-12) return true;
    }
  }
  return false;
}

// Labels 4-connected obstacle components; exterior[c] is true for components
// touching the grid border.
void obstacle_components(const GridSpec& spec, std::vector<int>* label,
                         std::vector<bool>* exterior) {
  const int n = spec.nx * spec.ny;
  label->assign(n, -1);
  exterior->clear();
  if (spec.obstacle.empty()) return;
  const Offset four[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int start = 0; start < n; ++start) {
    if (!spec.obstacle[start] || (*label)[start] >= 0) continue;
    int id = static_cast<int>(exterior->size());
    bool touches = false;
    std::deque<int> queue{start};
    (*label)[start] = id;
    while (!queue.empty()) {
      int c = queue.front();
      queue.pop_front();
      int x = c % spec.nx, y = c / spec.nx;
      if (x == 0 || y == 0 || x == spec.nx - 1 || y == spec.ny - 1) {
        touches = true;
      }
      for (auto [dx, dy] : four) {
        int xx = x + dx, yy = y + dy;
        if (xx < 0 || yy < 0 || xx >= spec.nx || yy >= spec.ny) continue;
        int cc = yy * spec.nx + xx;
        if (spec.obstacle[cc] && (*label)[cc] < 0) {
          (*label)[cc] = id;
          queue.push_back(cc);
        }
      }
    }
    exterior->push_back(touches);
  }
}

}  // namespace

DiscretizedSpace build_interval(int n_cells, double length, double f_left,
                                double f_right) {
  if (n_cells < 2) {
    throw ValidationError("interval needs n_cells >= 2, got " +
                          std::to_string(n_cells));
  }
  if (!(length > 0.0)) {
    throw ValidationError("interval length must be positive");
  }
  const double h = length / n_cells;
  std::vector<Edge> edges;
  std::vector<double> coords;
  for (int j = 0; j <= n_cells; ++j) {
    coords.push_back(j * h);
    if (j < n_cells) edges.push_back({j, j + 1, h});
  }
  return DiscretizedSpace(n_cells + 1, std::move(edges),
                          {{0, f_left}, {n_cells, f_right}}, std::move(coords),
                          1);
}

std::vector<int> grid_vertex_ids(const GridSpec& spec) {
  std::vector<int> id(static_cast<std::size_t>(spec.nx) * spec.ny, -1);
  int next = 0;
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) {
      if (!blocked(spec, x, y)) id[y * spec.nx + x] = next++;
    }
  }
  return id;
}

DiscretizedSpace build_grid_domain(const GridSpec& spec) {
  if (spec.nx < 1 || spec.ny < 1) {
    throw ValidationError("grid dimensions must be positive");
  }
  if (!(spec.spacing > 0.0)) {
    throw ValidationError("grid spacing must be positive");
  }
  if (!spec.obstacle.empty() &&
      spec.obstacle.size() != static_cast<std::size_t>(spec.nx) * spec.ny) {
    throw ValidationError("obstacle mask must have nx * ny entries");
  }
  const std::vector<int> id = grid_vertex_ids(spec);
  const int n = static_cast<int>(
      std::count_if(id.begin(), id.end(), [](int v) { return v >= 0; }));
  if (n == 0) throw ValidationError("grid has no free cells");

  std::vector<Offset> offsets;
  switch (spec.stencil) {
    case Stencil::kFour:
      offsets = {{1, 0}, {0, 1}};
      break;
    case Stencil::kEight:
      offsets = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
      break;
    case Stencil::kEuclidean: {
      const int r = spec.stencil_radius;
      if (r < 1) throw ValidationError("stencil_radius must be >= 1");
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = 0; dx <= r; ++dx) {
          if (dx == 0 && dy <= 0) continue;
          if (dx * dx + dy * dy > r * r) continue;
          // Skip offsets that are integer multiples of a shorter one; the
          // shorter chain already realizes the same length.
          if (std::gcd(dx, std::abs(dy)) != 1) continue;
          offsets.push_back({dx, dy});
        }
      }
      break;
    }
  }

  std::vector<Edge> edges;
  std::vector<double> coords(static_cast<std::size_t>(n) * 2);
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) {
      int u = id[y * spec.nx + x];
      if (u < 0) continue;
      coords[2 * u] = spec.origin_x + x * spec.spacing;
      coords[2 * u + 1] = spec.origin_y + y * spec.spacing;
      for (auto [dx, dy] : offsets) {
        int xx = x + dx, yy = y + dy;
        if (blocked(spec, xx, yy)) continue;
        bool axis = dx == 0 || dy == 0;
        if (!axis && segment_blocked(spec, x, y, xx, yy)) continue;
        edges.push_back({u, id[yy * spec.nx + xx],
                         spec.spacing * std::hypot(double(dx), double(dy))});
      }
    }
  }

  // Boundary selection.
  std::vector<int> label;
  std::vector<bool> exterior;
  obstacle_components(spec, &label, &exterior);
  std::vector<bool> in_y(spec.nx * spec.ny, false);
  if (spec.boundary == BoundarySelect::kExplicit) {
    for (int c : spec.explicit_cells) {
      if (c < 0 || c >= spec.nx * spec.ny || id[c] < 0) {
        throw ValidationError("explicit boundary cell " + std::to_string(c) +
                              " is blocked or off the grid");
      }
      in_y[c] = true;
    }
  } else {
    const bool want_outer = spec.boundary != BoundarySelect::kInnerRim;
    const bool want_inner = spec.boundary != BoundarySelect::kOuterRim;
    const Offset four[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (int y = 0; y < spec.ny; ++y) {
      for (int x = 0; x < spec.nx; ++x) {
        if (id[y * spec.nx + x] < 0) continue;
        bool outer = false, inner = false;
        for (auto [dx, dy] : four) {
          int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= spec.nx || yy >= spec.ny) {
            outer = true;
          } else if (blocked(spec, xx, yy)) {
            (exterior[label[yy * spec.nx + xx]] ? outer : inner) = true;
          }
        }
        if ((outer && want_outer) || (inner && want_inner)) {
          in_y[y * spec.nx + x] = true;
        }
      }
    }
  }
  std::vector<std::pair<int, double>> boundary;
  for (int c = 0; c < spec.nx * spec.ny; ++c) {
    if (!in_y[c]) continue;
    int u = id[c];
    double f = spec.boundary_value
                   ? spec.boundary_value(coords[2 * u], coords[2 * u + 1])
                   : 0.0;
    boundary.emplace_back(u, f);
  }
  if (boundary.empty()) {
    throw ValidationError("boundary selection produced an empty Y");
  }
  return DiscretizedSpace(n, std::move(edges), std::move(boundary),
                          std::move(coords), 2);
}

GridSpec annulus_grid(const AnnulusSpec& spec) {
  if (!(spec.inner_radius > 0.0) || !(spec.outer_radius > spec.inner_radius)) {
    throw ValidationError("annulus needs 0 < inner_radius < outer_radius");
  }
  if (!(spec.spacing > 0.0)) {
    throw ValidationError("annulus spacing must be positive");
  }
  const double strip = spec.boundary_strip;
  if (!(strip >= 0.0) || strip >= spec.inner_radius) {
    throw ValidationError("annulus boundary_strip must be in [0, inner_radius)");
  }
  const double lo = spec.inner_radius - strip, hi = spec.outer_radius + strip;
  const int half = static_cast<int>(std::floor(hi / spec.spacing + 1e-9));
  GridSpec grid;
  grid.nx = grid.ny = 2 * half + 1;
  grid.spacing = spec.spacing;
  grid.origin_x = grid.origin_y = -half * spec.spacing;
  grid.obstacle.assign(grid.nx * grid.ny, false);
  const double tol = 1e-9 * spec.spacing;
  for (int y = 0; y < grid.ny; ++y) {
    for (int x = 0; x < grid.nx; ++x) {
      double r = spec.spacing * std::hypot(double(x - half), double(y - half));
      const int cell = y * grid.nx + x;
      grid.obstacle[cell] = r < lo - tol || r > hi + tol;
      if (strip > 0.0 && !grid.obstacle[cell] &&
          (r < spec.inner_radius - tol || r > spec.outer_radius + tol)) {
        grid.explicit_cells.push_back(cell);
      }
    }
  }
  grid.stencil = spec.stencil;
  grid.stencil_radius = spec.stencil_radius;
  grid.boundary =
      strip > 0.0 ? BoundarySelect::kExplicit : BoundarySelect::kBothRims;
  grid.boundary_value = spec.boundary_value;
  return grid;
}

DiscretizedSpace build_annulus(const AnnulusSpec& spec) {
  return build_grid_domain(annulus_grid(spec));
}

GridSpec lshape_grid(int n, double spacing, Stencil stencil,
                     int stencil_radius, BoundaryFunction f) {
  if (n < 4) throw ValidationError("L-shape needs n >= 4");
  GridSpec grid;
  grid.nx = grid.ny = n;
  grid.spacing = spacing;
  grid.obstacle.assign(n * n, false);
  const int cut = n / 2;
  for (int y = cut + 1; y < n; ++y) {
    for (int x = cut + 1; x < n; ++x) grid.obstacle[y * n + x] = true;
  }
  grid.stencil = stencil;
  grid.stencil_radius = stencil_radius;
  grid.boundary = BoundarySelect::kOuterRim;
  grid.boundary_value = std::move(f);
  return grid;
}

GridSpec spiral_grid(const SpiralSpec& spec) {
  const int n = spec.size;
  const int period = spec.corridor + 1;
  if (spec.corridor < 1 || n < 3 * period + 1) {
    throw ValidationError("spiral needs corridor >= 1 and size >= " +
                          std::to_string(3 * period + 1));
  }
  GridSpec grid;
  grid.nx = grid.ny = n;
  grid.spacing = spec.spacing;
  grid.obstacle.assign(n * n, false);
  // Turtle walk drawing the wall: right, down, left, then inward turns with
  // lengths shrinking by one period every second turn.
  const Offset dirs[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  int x = 0, y = 0;
  grid.obstacle[0] = true;
  std::vector<int> lengths{n - 1, n - 1, n - 1};
  for (int len = n - 1 - period; len > 0; len -= period) {
    lengths.push_back(len);
    lengths.push_back(len);
  }
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    auto [dx, dy] = dirs[k % 4];
    for (int s = 0; s < lengths[k]; ++s) {
      x += dx;
      y += dy;
      grid.obstacle[y * n + x] = true;
    }
  }
  // Entrance: the free cells of the left border column. Center: the free
  // cells farthest (in 4-neighbor steps) from the entrance.
  std::vector<int> entrance;
  for (int yy = 0; yy < n; ++yy) {
    if (!grid.obstacle[yy * n]) entrance.push_back(yy * n);
  }
  std::vector<int> steps(n * n, -1);
  std::deque<int> queue;
  for (int c : entrance) {
    steps[c] = 0;
    queue.push_back(c);
  }
  int far = 0;
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop_front();
    far = std::max(far, steps[c]);
    int cx = c % n, cy = c / n;
    for (auto [dx, dy] : dirs) {
      int xx = cx + dx, yy = cy + dy;
      if (xx < 0 || yy < 0 || xx >= n || yy >= n) continue;
      int cc = yy * n + xx;
      if (!grid.obstacle[cc] && steps[cc] < 0) {
        steps[cc] = steps[c] + 1;
        queue.push_back(cc);
      }
    }
  }
  std::vector<int> center;
  for (int c = 0; c < n * n; ++c) {
    if (steps[c] >= far - (spec.corridor - 1) && steps[c] > 0) {
      center.push_back(c);
    }
  }
  grid.stencil = Stencil::kFour;
  grid.boundary = BoundarySelect::kExplicit;
  grid.explicit_cells = entrance;
  grid.explicit_cells.insert(grid.explicit_cells.end(), center.begin(),
                             center.end());
  const double s = spec.spacing;
  const double fe = spec.f_entrance, fc = spec.f_center;
  grid.boundary_value = [fe, fc, s](double px, double) {
    return px < 0.5 * s ? fe : fc;
  };
  return grid;
}

DiscretizedSpace build_spiral(const SpiralSpec& spec) {
  return build_grid_domain(spiral_grid(spec));
}

std::vector<double> euclidean_distances_to(const DiscretizedSpace& space,
                                           std::span<const double> point) {
  if (!space.has_coords() ||
      point.size() != static_cast<std::size_t>(space.dim())) {
    throw ValidationError("euclidean distances need coords of matching dim");
  }
  std::vector<double> out(space.size());
  for (int v = 0; v < space.size(); ++v) {
    auto c = space.coord(v);
    double s = 0.0;
    for (std::size_t k = 0; k < point.size(); ++k) {
      s += (c[k] - point[k]) * (c[k] - point[k]);
    }
    out[v] = std::sqrt(s);
  }
  return out;
}

}  // namespace btow
