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

#include "btow/analysis.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include "btow/error.h"

namespace btow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

struct SolvedLevel {
  FamilyLevel level;
  std::vector<double> u, v, w;
};

// Boundary sources for the bound checks: all of Y on small spaces.
std::vector<int> bound_sources(const DiscretizedSpace& space) {
  const auto& ys = space.boundary().vertices;
  if (space.size() <= 2000 || ys.size() <= 256) return ys;
  std::vector<int> out;
  const std::size_t stride = (ys.size() + 255) / 256;
  for (std::size_t i = 0; i < ys.size(); i += stride) out.push_back(ys[i]);
  return out;
}

void record(BoundCheck* c, double margin, int x, int y) {
  ++c->pairs;
  if (c->pairs == 1 || margin > c->worst_margin) {
    c->worst_margin = margin;
    c->witness_x = x;
    c->witness_y = y;
  }
}

void finish(BoundCheck* c) {
  c->pass = !c->applicable || c->pairs == 0 || c->worst_margin <= c->slack;
}

void check_size(const DiscretizedSpace& space, std::span<const double> f) {
  if (static_cast<int>(f.size()) != space.size()) {
    throw ValidationError("field has " + std::to_string(f.size()) +
                          " values for " + std::to_string(space.size()) +
                          " vertices");
  }
}

}  // namespace

const char* to_string(RefinementMode mode) {
  return mode == RefinementMode::kRefined ? "refined" : "fixed";
}

bool ConvergenceTable::monotone_ok() const {
  for (const auto& r : rows) {
    if (check_v && !r.v_monotone) return false;
    if (check_w && !r.w_monotone) return false;
  }
  return true;
}

ConvergenceTable dyadic_convergence(const SpaceFamily& family,
                                    const OddsFunction& odds,
                                    const ConvergenceConfig& config) {
  if (config.depth < 2) throw ValidationError("depth must be >= 2");
  if (!(config.eps0 > 0.0)) throw ValidationError("eps0 must be > 0");
  config.solver.validate();

  ConvergenceTable table;
  table.family = family.name;
  table.reference = family.oracle ? "oracle" : "finest";
  table.shape = log_shape(odds);
  table.mode = config.mode;
  table.check_v = config.favored && (table.shape == LogShape::kConcave ||
                                     table.shape == LogShape::kLinear);
  table.check_w = config.favored && (table.shape == LogShape::kConvex ||
                                     table.shape == LogShape::kLinear);

  const double finest_eps = std::ldexp(config.eps0, -(config.depth - 1));
  std::optional<FamilyLevel> fixed;
  if (config.mode == RefinementMode::kFixed) fixed = family.make(finest_eps);

  std::vector<SolvedLevel> solved;
  for (int k = 0; k < config.depth; ++k) {
    const double eps = std::ldexp(config.eps0, -k);
    const auto t0 = std::chrono::steady_clock::now();
    FamilyLevel lv = fixed ? *fixed : family.make(eps);
    lv.eps = eps;
    SolvedLevel s{std::move(lv), {}, {}, {}};
    SolverConfig sc = config.solver;
    sc.closure = s.level.closure;
    sc.min_step_ratio = s.level.min_step_ratio;
    const GameBalls balls(s.level.space, eps, sc.closure, sc.min_step_ratio);
    const GameBias bias = bias_for(odds, eps);
    ValueSolution us = solve_value(balls, bias, sc);
    ConvergenceRow row;
    row.eps = eps;
    row.vertices = s.level.space.size();
    row.sweeps = us.report.sweeps;
    s.u = std::move(us.lower.values);
    if (config.favored) {
      FavoredSolution vs = solve_favored_lower(balls, bias, sc);
      FavoredSolution ws = solve_favored_upper(balls, bias, sc);
      s.v = std::move(vs.field.values);
      s.w = std::move(ws.field.values);
      row.v_gap = sup_abs_diff(s.v, s.u);
      row.w_gap = sup_abs_diff(s.w, s.u);
      row.sweeps += vs.report.sweeps + ws.report.sweeps;
    }
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    table.oscillation = s.level.space.boundary().oscillation();
    table.rows.push_back(row);
    solved.push_back(std::move(s));
  }

  const double scale = table.oscillation > 0.0 ? table.oscillation : 1.0;
  const double slack = config.monotone_slack < 0.0
                           ? 100.0 * config.solver.tol
                           : config.monotone_slack * scale;

  for (int k = 0; k < config.depth; ++k) {
    ConvergenceRow& row = table.rows[k];
    const SolvedLevel& cur = solved[k];
    const DiscretizedSpace& sp = cur.level.space;
    // Reference error.
    if (family.oracle) {
      double m = 0.0;
      for (int x = 0; x < sp.size(); ++x) {
        m = std::max(m, std::abs(cur.u[x] - family.oracle(sp.coord(x))));
      }
      row.ref_error = m;
    } else {
      const SolvedLevel& fin = solved.back();
      std::vector<int> map;
      if (config.mode == RefinementMode::kFixed) {
        map.resize(sp.size());
        for (int x = 0; x < sp.size(); ++x) map[x] = x;
      } else {
        map = nested_vertex_map(sp, fin.level.space, fin.level.spacing);
      }
      double m = 0.0;
      for (int x = 0; x < sp.size(); ++x) {
        if (map[x] >= 0) m = std::max(m, std::abs(cur.u[x] - fin.u[map[x]]));
      }
      row.ref_error = m;
    }
    if (k == 0 || !config.favored) continue;

    // Monotonicity against the previous (coarser) level.
    const SolvedLevel& prev = solved[k - 1];
    const DiscretizedSpace& pp = prev.level.space;
    std::vector<int> map;
    if (config.mode == RefinementMode::kFixed) {
      map.resize(pp.size());
      for (int x = 0; x < pp.size(); ++x) map[x] = x;
    } else {
      map = nested_vertex_map(pp, sp, cur.level.spacing);
    }
    double drop = -std::numeric_limits<double>::infinity();
    double rise = drop;
    for (int x = 0; x < pp.size(); ++x) {
      const int c = map[x];
      if (c < 0 || pp.is_boundary(x) != sp.is_boundary(c)) continue;
      ++row.common;
      const double d = prev.v[x] - cur.v[c];
      if (d > drop) {
        drop = d;
        row.v_witness = c;
      }
      const double r = cur.w[c] - prev.w[x];
      if (r > rise) {
        rise = r;
        row.w_witness = c;
      }
    }
    if (row.common == 0) {
      throw ValidationError("levels " + std::to_string(k - 1) + " and " +
                            std::to_string(k) + " share no vertices");
    }
    row.v_drop = drop / scale;
    row.w_rise = rise / scale;
    row.v_monotone = drop <= slack;
    row.w_monotone = rise <= slack;
    if (config.strict) {
      if (table.check_v && !row.v_monotone) {
        std::ostringstream msg;
        msg << "v decreased by " << drop << " from eps = " << 2 * row.eps
            << " to eps = " << row.eps << " at vertex " << row.v_witness;
        throw PropertyViolation(msg.str(), row.v_witness, drop);
      }
      if (table.check_w && !row.w_monotone) {
        std::ostringstream msg;
        msg << "w increased by " << rise << " from eps = " << 2 * row.eps
            << " to eps = " << row.eps << " at vertex " << row.w_witness;
        throw PropertyViolation(msg.str(), row.w_witness, rise);
      }
    }
  }
  return table;
}

SandwichReport sandwich_check(const GameBalls& balls, const GameBias& bias,
                              std::span<const double> candidate,
                              const SolverConfig& config, double slack) {
  const DiscretizedSpace& space = balls.space();
  check_size(space, candidate);
  const auto& bd = space.boundary();
  const double tie = 1e-12 * std::max(1.0, std::max(std::abs(bd.min_value),
                                                    std::abs(bd.max_value)));
  for (int y : bd.vertices) {
    if (std::abs(candidate[y] - space.boundary_value(y)) > tie) {
      throw ValidationError("candidate differs from F at boundary vertex " +
                            std::to_string(y));
    }
  }
  SandwichReport rep;
  rep.slack = slack < 0.0 ? 100.0 * config.tol : slack;
  rep.v = solve_favored_lower(balls, bias, config).field.values;
  rep.w = solve_favored_upper(balls, bias, config).field.values;
  rep.below = -std::numeric_limits<double>::infinity();
  rep.above = rep.below;
  for (int x = 0; x < space.size(); ++x) {
    const double b = rep.v[x] - candidate[x];
    const double a = candidate[x] - rep.w[x];
    rep.below = std::max(rep.below, b);
    rep.above = std::max(rep.above, a);
    if (b > rep.slack || a > rep.slack) rep.witnesses.push_back(x);
  }
  rep.pass = rep.witnesses.empty();
  return rep;
}

ResidualField residual(const DiscretizedSpace& space,
                       std::span<const double> field,
                       const ResidualConfig& config) {
  check_size(space, field);
  if (!space.has_coords()) {
    throw ValidationError("residual needs a space with coordinates");
  }
  if (config.fd_cells < 1) throw ValidationError("fd_cells must be >= 1");
  const int dim = space.dim();
  double s = std::numeric_limits<double>::infinity();
  for (const Edge& e : space.edges()) s = std::min(s, e.length);

  // Integer lattice keys relative to vertex 0.
  const auto base = space.coord(0);
  std::vector<long long> keys(static_cast<std::size_t>(space.size()) * dim);
  std::vector<long long> lo(dim, 0), hi(dim, 0);
  for (int v = 0; v < space.size(); ++v) {
    const auto c = space.coord(v);
    for (int i = 0; i < dim; ++i) {
      const double q = (c[i] - base[i]) / s;
      const long long k = std::llround(q);
      if (std::abs(q - k) > 1e-6) {
        throw ValidationError("vertex " + std::to_string(v) +
                              " is off the coordinate lattice of spacing " +
                              std::to_string(s));
      }
      keys[static_cast<std::size_t>(v) * dim + i] = k;
      lo[i] = std::min(lo[i], k);
      hi[i] = std::max(hi[i], k);
    }
  }
  for (int i = 0; i < dim; ++i) {
    if (hi[i] - lo[i] + 1 < 3) {
      throw ValidationError("lattice has fewer than 3 points along axis " +
                            std::to_string(i));
    }
  }
  std::map<std::vector<long long>, int> index;
  for (int v = 0; v < space.size(); ++v) {
    std::vector<long long> k(keys.begin() + static_cast<long>(v) * dim,
                             keys.begin() + static_cast<long>(v + 1) * dim);
    index.emplace(std::move(k), v);
  }

  const auto& bd = space.boundary();
  double threshold = config.grad_threshold;
  if (threshold < 0.0) {
    const double diam = space.diameter_upper_bound();
    threshold = 1e-6 * bd.oscillation() / (diam > 0.0 ? diam : 1.0);
  }
  const auto to_y = space.distance_to_boundary();
  const int k = config.fd_cells;
  const double step = k * s;

  ResidualField out;
  out.spacing = s;
  out.fd_step = step;
  out.phi.assign(space.size(), kNaN);
  out.valid.assign(space.size(), 0);

  std::vector<long long> probe(dim);
  auto at = [&](int v, int i, int di, int j, int dj) -> int {
    for (int a = 0; a < dim; ++a) {
      probe[a] = keys[static_cast<std::size_t>(v) * dim + a];
    }
    probe[i] += di * k;
    if (j >= 0) probe[j] += dj * k;
    auto it = index.find(probe);
    return it == index.end() ? -1 : it->second;
  };

  std::vector<double> grad(dim), hess(static_cast<std::size_t>(dim) * dim);
  for (int v = 0; v < space.size(); ++v) {
    if (space.is_boundary(v) || (*to_y)[v] < config.margin) continue;
    bool complete = true;
    for (int i = 0; i < dim && complete; ++i) {
      const int p = at(v, i, 1, -1, 0), m = at(v, i, -1, -1, 0);
      if (p < 0 || m < 0) {
        complete = false;
        break;
      }
      grad[i] = (field[p] - field[m]) / (2 * step);
      hess[i * dim + i] = (field[p] - 2 * field[v] + field[m]) / (step * step);
      for (int j = i + 1; j < dim; ++j) {
        const int pp = at(v, i, 1, j, 1), pm = at(v, i, 1, j, -1);
        const int mp = at(v, i, -1, j, 1), mm = at(v, i, -1, j, -1);
        if (pp < 0 || pm < 0 || mp < 0 || mm < 0) {
          complete = false;
          break;
        }
        const double h = (field[pp] - field[pm] - field[mp] + field[mm]) /
                         (4 * step * step);
        hess[i * dim + j] = hess[j * dim + i] = h;
      }
    }
    if (!complete) continue;
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    const double gn = std::sqrt(g2);
    if (gn < threshold || gn == 0.0) {
      ++out.masked_gradient;
      continue;
    }
    double quad = 0.0;
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        quad += grad[i] * hess[i * dim + j] * grad[j];
      }
    }
    const double phi = quad / g2 + config.beta * gn;
    out.phi[v] = phi;
    out.valid[v] = 1;
    ++out.evaluated;
    if (std::abs(phi) > out.max_abs || out.argmax < 0) {
      out.max_abs = std::abs(phi);
      out.argmax = v;
    }
  }
  return out;
}

double step_distance(double d, double eps, BallClosure closure) {
  if (closure == BallClosure::kOpen) return d_eps_from_distance(d, eps, d == 0);
  if (d == 0.0) return 0.0;
  return eps * std::max(1.0, std::ceil(d / eps - kBallTieGuard));
}

BoundCheck check_vbound(const DiscretizedSpace& space,
                        std::span<const double> v, const GameBias& bias,
                        BallClosure closure, double slack) {
  check_size(space, v);
  BoundCheck c;
  c.name = "vbound";
  c.slack = slack;
  if (bias.theta < 0.0) {
    c.applicable = false;
    c.reason = "needs theta >= 0";
    finish(&c);
    return c;
  }
  const double lip = space.lipschitz_constant();
  for (int y : bound_sources(space)) {
    const auto row = space.distances_from(y);
    const double fy = space.boundary_value(y);
    for (int x = 0; x < space.size(); ++x) {
      const double de = step_distance((*row)[x], bias.eps, closure);
      const double lhs = fy - (2 * bias.eps + de) * lip;
      record(&c, lhs - v[x], x, y);
    }
  }
  finish(&c);
  return c;
}

BoundCheck check_ubound(const DiscretizedSpace& space,
                        std::span<const double> u, const GameBias& bias,
                        BallClosure closure, double slack) {
  check_size(space, u);
  BoundCheck c;
  c.name = "ubound";
  c.slack = slack;
  if (!(bias.rho >= 1.0) || !std::isfinite(bias.rho)) {
    c.applicable = false;
    c.reason = "needs 1 <= rho < inf";
    finish(&c);
    return c;
  }
  const double lip = space.lipschitz_constant();
  const double diam =
      space.size() <= 2000 ? space.diameter() : space.diameter_upper_bound();
  const double hops = step_distance(diam, bias.eps, closure) / bias.eps;
  const double gain = std::exp(hops * std::log(bias.rho)) * bias.eps * lip;
  for (int y : bound_sources(space)) {
    const auto row = space.distances_from(y);
    const double fy = space.boundary_value(y);
    for (int x = 0; x < space.size(); ++x) {
      if (x == y) continue;
      const double de = step_distance((*row)[x], bias.eps, closure);
      if (std::abs(de - bias.eps) > 1e-12 * bias.eps) continue;
      record(&c, u[x] - (fy + gain), x, y);
    }
  }
  finish(&c);
  return c;
}

BoundCheck check_wbound(const DiscretizedSpace& space,
                        std::span<const double> w, const GameBias& bias,
                        double beta, BallClosure closure, double slack) {
  check_size(space, w);
  BoundCheck c;
  c.name = "wbound";
  c.slack = slack;
  const auto& bd = space.boundary();
  if (!(beta > 0.0)) {
    c.reason = "needs beta > 0";
  } else if (!(bias.rho <= 1.0 + 2.0 * beta * bias.eps)) {
    c.reason = "needs rho(eps) <= 1 + 2 beta eps";
  } else if (bd.max_value < 0.0) {
    c.reason = "needs sup_Y F >= 0";
  }
  if (!c.reason.empty()) {
    c.applicable = false;
    finish(&c);
    return c;
  }
  const double lip = space.lipschitz_constant();
  for (int y : bound_sources(space)) {
    const auto row = space.distances_from(y);
    const double fy = space.boundary_value(y);
    for (int x = 0; x < space.size(); ++x) {
      const double eta = step_distance((*row)[x], bias.eps, closure);
      if (eta < bias.eps * (1 - 1e-12) || eta >= 1.0) continue;
      const double r = std::sqrt(eta);
      // At least one full step strictly inside sqrt(eta).
      if (std::floor(r / bias.eps + 1e-12) - 1 < 1) continue;
      const double rhs = fy + r * (lip + std::exp(4 * beta * r) * bd.max_value);
      record(&c, w[x] - rhs, x, y);
    }
  }
  finish(&c);
  return c;
}

}  // namespace btow
