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

#include "btow/families.h"

#include <cmath>
#include <map>

#include "btow/error.h"
#include "btow/generators.h"

namespace btow {
namespace {

int cells_for(double length, double spacing) {
  const double n = length / spacing;
  const long r = std::lround(n);
  if (std::abs(n - r) > 1e-6 * std::max(1.0, n)) {
    throw ValidationError("length " + std::to_string(length) +
                          " is not a multiple of spacing " +
                          std::to_string(spacing));
  }
  return static_cast<int>(r);
}

// Positive cone through 0 at r = 0 and 1 at r = length; linear at beta = 0.
double unit_cone(double beta, double r, double length) {
  if (beta == 0.0) return r / length;
  return std::expm1(-beta * r) / std::expm1(-beta * length);
}

}  // namespace

SpaceFamily interval_family(const IntervalFamilySpec& spec) {
  if (spec.cells_per_step < 1) {
    throw ValidationError("interval family needs cells_per_step >= 1");
  }
  SpaceFamily fam;
  fam.name = "interval";
  const int cps = spec.cells_per_step;
  fam.make = [cps](double eps) {
    const double spacing = eps / cps;
    return FamilyLevel{eps,
                       build_interval(cells_for(1.0, spacing), 1.0, 0.0, 1.0),
                       BallClosure::kClosed, 1.0, spacing};
  };
  const double beta = spec.beta;
  fam.oracle = [beta](std::span<const double> x) {
    return unit_cone(beta, x[0], 1.0);
  };
  return fam;
}

double annulus_cone(const AnnulusFamilySpec& spec, double r) {
  const double width = spec.outer_radius - spec.inner_radius;
  if (spec.negative_cone) {
    // Decreasing in the distance to the outer rim, 1 there and 0 inside.
    return 1.0 - unit_cone(-spec.beta, spec.outer_radius - r, width);
  }
  return unit_cone(spec.beta, r - spec.inner_radius, width);
}

SpaceFamily annulus_family(const AnnulusFamilySpec& spec) {
  if (spec.step_cells < 1) {
    throw ValidationError("annulus family needs step_cells >= 1");
  }
  SpaceFamily fam;
  fam.name = "annulus";
  fam.make = [spec](double eps) {
    int cells = spec.step_cells;
    if (spec.growth_eps > 0.0) {
      cells = static_cast<int>(std::lround(cells * spec.growth_eps / eps));
      if (cells < 1) throw ValidationError("annulus stencil radius below 1");
    }
    AnnulusSpec a;
    a.inner_radius = spec.inner_radius;
    a.outer_radius = spec.outer_radius;
    a.spacing = eps / cells;
    a.stencil = Stencil::kEuclidean;
    a.stencil_radius = cells;
    a.boundary_strip = spec.strip_boundary ? eps : 0.0;
    a.boundary_value = [spec](double x, double y) {
      return annulus_cone(spec, std::hypot(x, y));
    };
    // Closed balls of radius step_cells * spacing hold exactly the lattice
    // points of the stencil disk.
    return FamilyLevel{eps, build_annulus(a), BallClosure::kClosed, 1.0,
                       a.spacing};
  };
  fam.oracle = [spec](std::span<const double> x) {
    return annulus_cone(spec, std::hypot(x[0], x[1]));
  };
  return fam;
}

SpaceFamily lshape_family(const LShapeFamilySpec& spec) {
  if (spec.step_cells < 1) {
    throw ValidationError("L-shape family needs step_cells >= 1");
  }
  SpaceFamily fam;
  fam.name = "lshape";
  const int cells = spec.step_cells;
  fam.make = [cells](double eps) {
    const double spacing = eps / cells;
    const int n = cells_for(1.0, spacing) + 1;
    if (n % 2 == 0) {
      throw ValidationError("L-shape family needs an even cell count");
    }
    return FamilyLevel{
        eps,
        build_grid_domain(
            lshape_grid(n, spacing, Stencil::kFour, 1,
                        [](double x, double y) { return x + 0.5 * y; })),
        BallClosure::kClosed, static_cast<double>(cells), spacing};
  };
  return fam;
}

SpaceFamily make_family(const std::string& name, double beta) {
  if (name == "interval") return interval_family({beta, 1});
  if (name == "annulus") {
    AnnulusFamilySpec s;
    s.beta = beta;
    return annulus_family(s);
  }
  if (name == "lshape") return lshape_family({});
  throw ValidationError("unknown family '" + name +
                        "' (expected interval, annulus or lshape)");
}

std::vector<int> nested_vertex_map(const DiscretizedSpace& coarse,
                                   const DiscretizedSpace& fine,
                                   double spacing) {
  if (!coarse.has_coords() || !fine.has_coords() ||
      coarse.dim() != fine.dim()) {
    throw ValidationError("nested lookup needs coords of equal dimension");
  }
  if (!(spacing > 0.0)) throw ValidationError("lookup spacing must be > 0");
  auto key = [spacing](std::span<const double> c) {
    std::vector<long long> k(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      k[i] = std::llround(c[i] / spacing);
    }
    return k;
  };
  std::map<std::vector<long long>, int> index;
  for (int v = 0; v < fine.size(); ++v) index.emplace(key(fine.coord(v)), v);
  std::vector<int> out(coarse.size(), -1);
  for (int v = 0; v < coarse.size(); ++v) {
    auto it = index.find(key(coarse.coord(v)));
    if (it != index.end()) out[v] = it->second;
  }
  return out;
}

std::vector<TestSpace> test_space_catalog(double beta) {
  std::vector<TestSpace> out;
  // 1D, spacing eps / 4, F(0) = 0 and F(1) = 1.
  out.push_back({"interval", build_interval(64, 1.0, 0.0, 1.0), 1.0 / 16,
                 BallClosure::kClosed, 4.0});
  {
    // 4-neighbor rectangle, F = 2 x y on the outer rim.
    GridSpec g;
    g.nx = 41;
    g.ny = 21;
    g.spacing = 1.0 / 40;
    g.stencil = Stencil::kFour;
    g.boundary = BoundarySelect::kOuterRim;
    g.boundary_value = [](double x, double y) { return 2.0 * x * y; };
    out.push_back({"rectangle", build_grid_domain(g), 4.0 / 40,
                   BallClosure::kClosed, 4.0});
  }
  {
    AnnulusFamilySpec s;
    s.beta = beta;
    s.step_cells = 4;
    FamilyLevel lv = annulus_family(s).make(1.0 / 8);
    out.push_back({"annulus", std::move(lv.space), lv.eps, lv.closure,
                   lv.min_step_ratio});
  }
  {
    SpiralSpec s;
    s.size = 29;
    s.corridor = 3;
    s.spacing = 1.0 / 28;
    out.push_back({"spiral", build_spiral(s), 4.0 / 28, BallClosure::kClosed,
                   4.0});
  }
  {
    FamilyLevel lv = lshape_family({4}).make(1.0 / 8);
    out.push_back({"lshape", std::move(lv.space), lv.eps, lv.closure,
                   lv.min_step_ratio});
  }
  return out;
}

}  // namespace btow
