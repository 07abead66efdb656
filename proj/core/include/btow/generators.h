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

// Built-in families of discretized spaces: intervals, lattice domains with
// obstacles, annuli, L-shapes and obstacle spirals.

#ifndef BTOW_GENERATORS_H_
#define BTOW_GENERATORS_H_

#include <functional>
#include <span>
#include <vector>

#include "btow/metric_space.h"

namespace btow {

// Path graph with n_cells + 1 vertices at spacing length / n_cells,
// Y = {0, n_cells}, F(0) = f_left, F(n_cells) = f_right.
DiscretizedSpace build_interval(int n_cells, double length,
                                double f_left = 0.0, double f_right = 1.0);

enum class Stencil {
  kFour,       // axis neighbors, length = spacing
  kEight,      // plus diagonals of length sqrt(2) * spacing
  kEuclidean,  // every visible lattice point within stencil_radius cells
};

enum class BoundarySelect {
  kOuterRim,  // free cells next to the grid border or an exterior obstacle
  kInnerRim,  // free cells next to an obstacle component enclosed by the grid
  kBothRims,
  kExplicit,  // explicit_cells
};

using BoundaryFunction = std::function<double(double x, double y)>;

struct GridSpec {
  int nx = 0;
  int ny = 0;
  double spacing = 1.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  // Row-major (cell = y * nx + x), true = blocked. Empty means no obstacles.
  std::vector<bool> obstacle;
  Stencil stencil = Stencil::kFour;
  int stencil_radius = 2;
  BoundarySelect boundary = BoundarySelect::kOuterRim;
  std::vector<int> explicit_cells;
  BoundaryFunction boundary_value;  // F(x, y); defaults to 0
};

// Vertices are the free cells in row-major order. Edges of the non-axis
// stencils must not cross the interior of a blocked cell.
DiscretizedSpace build_grid_domain(const GridSpec& spec);

// Vertex id of every cell under build_grid_domain's numbering (-1 = blocked).
std::vector<int> grid_vertex_ids(const GridSpec& spec);

struct AnnulusSpec {
  double inner_radius = 0.25;
  double outer_radius = 0.5;
  double spacing = 1.0 / 64;
  Stencil stencil = Stencil::kEuclidean;
  int stencil_radius = 4;
  // 0: Y is both rims. Otherwise Y is the lattice points within this
  // distance outside [inner_radius, outer_radius].
  double boundary_strip = 0.0;
  BoundaryFunction boundary_value;
};

// Lattice points with inner <= |x| <= outer, centered at the origin, with
// both rims as Y.
GridSpec annulus_grid(const AnnulusSpec& spec);
DiscretizedSpace build_annulus(const AnnulusSpec& spec);

// Unit-spacing-free L-shape: an n x n lattice on [0, (n-1) * spacing]^2 with
// the upper-right quadrant removed; Y is the outer rim.
GridSpec lshape_grid(int n, double spacing, Stencil stencil,
                     int stencil_radius, BoundaryFunction f);

struct SpiralSpec {
  int size = 41;      // cells per side
  int corridor = 3;   // corridor width in cells
  double spacing = 1.0;
  double f_entrance = 0.0;
  double f_center = 1.0;
};

// Square obstacle spiral (4-neighbor). Y = the entrance cells on the left
// border (F = f_entrance) and the innermost corridor end (F = f_center).
GridSpec spiral_grid(const SpiralSpec& spec);
DiscretizedSpace build_spiral(const SpiralSpec& spec);

// Euclidean distance of every vertex to a point (coords required).
std::vector<double> euclidean_distances_to(const DiscretizedSpace& space,
                                           std::span<const double> point);

}  // namespace btow

#endif  // BTOW_GENERATORS_H_
