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

// Parametrized space families for refinement experiments, and the catalog of
// shipped test spaces.

#ifndef BTOW_FAMILIES_H_
#define BTOW_FAMILIES_H_

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "btow/metric_space.h"

namespace btow {

// One discretization in a family, ready for solving at step eps.
struct FamilyLevel {
  double eps = 0.0;
  DiscretizedSpace space;
  BallClosure closure = BallClosure::kClosed;
  double min_step_ratio = 1.0;  // passed on to the solver
  double spacing = 0.0;         // lattice spacing, for nested vertex lookup
};

struct SpaceFamily {
  std::string name;
  // Discretization used for step eps. Successive calls with eps / 2 must
  // produce nested lattices.
  std::function<FamilyLevel(double eps)> make;
  // Continuum solution at a coordinate, when known.
  std::function<double(std::span<const double> x)> oracle;
};

// [0, 1] with F(0) = 0, F(1) = 1 and cells_per_step cells per eps. With one
// cell per step the grid has exact spacing eps.
struct IntervalFamilySpec {
  double beta = 1.0;
  int cells_per_step = 1;
};

SpaceFamily interval_family(const IntervalFamilySpec& spec);

// Annulus around the origin with boundary values from the radial cone
// (1 - exp(-beta (r - inner))) / (1 - exp(-beta (outer - inner))), or its
// negative-sign mirror. Euclidean stencil, spacing = eps / R with R =
// step_cells, or R = step_cells * growth_eps / eps when growth_eps > 0 (the
// ball then gains lattice points as eps shrinks).
struct AnnulusFamilySpec {
  double beta = 1.0;
  double inner_radius = 0.25;
  double outer_radius = 0.5;
  int step_cells = 5;
  double growth_eps = 0.0;
  // Y is the eps-wide lattice strip outside the annulus instead of its rims.
  bool strip_boundary = false;
  bool negative_cone = false;
};

SpaceFamily annulus_family(const AnnulusFamilySpec& spec);

// Radial cone used by annulus_family, as a function of r.
double annulus_cone(const AnnulusFamilySpec& spec, double r);

// Unit L-shape (the upper-right quarter removed), 4-neighbor lattice with
// eps = step_cells * spacing and F(x, y) = x + y / 2 on the outer rim.
struct LShapeFamilySpec {
  int step_cells = 4;
};

SpaceFamily lshape_family(const LShapeFamilySpec& spec);

SpaceFamily make_family(const std::string& name, double beta);

// For each vertex of coarse, the vertex of fine at the same coordinates, or
// -1. Coordinates are matched on the lattice of the given spacing.
std::vector<int> nested_vertex_map(const DiscretizedSpace& coarse,
                                   const DiscretizedSpace& fine,
                                   double spacing);

struct TestSpace {
  std::string name;
  DiscretizedSpace space;
  double eps = 0.0;
  BallClosure closure = BallClosure::kOpen;
  double min_step_ratio = 4.0;
};

// 1D interval, 2D rectangle, annulus, obstacle spiral and L-shape, each at
// most 1e4 vertices.
std::vector<TestSpace> test_space_catalog(double beta = 1.0);

}  // namespace btow

#endif  // BTOW_FAMILIES_H_
