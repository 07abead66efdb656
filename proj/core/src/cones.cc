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

#include "btow/cones.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "btow/error.h"
#include "btow/random.h"

namespace btow {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxWitnesses = 16;

double sgn(double x) { return (x > 0) - (x < 0); }

// Shape g with cone = A g(r) + B.
double shape(double beta, ConeSign sign, double r) {
  if (beta == 0.0) return sign == ConeSign::kPlus ? r : -r;
  const double arg = sign == ConeSign::kPlus ? -beta * r : beta * r;
  return -sgn(beta) * std::expm1(arg);
}

double field_scale(std::span<const double> field) {
  double s = 1.0;
  for (double v : field) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

double cone_eval(const ConeSpec& cone, double r) {
  return cone.A * shape(cone.beta, cone.sign, r) + cone.B;
}

ConeSpec fit_cone(double beta, ConeSign sign, double r1, double val1,
                  double r2, double val2) {
  if (!(r1 >= 0.0) || !(r2 >= 0.0) || r1 == r2) {
    throw ValidationError("fit_cone needs two distinct radii >= 0");
  }
  const double g1 = shape(beta, sign, r1), g2 = shape(beta, sign, r2);
  ConeSpec cone;
  cone.beta = beta;
  cone.sign = sign;
  double a = (val1 - val2) / (g1 - g2);
  const double tiny =
      1e-13 * std::max({1.0, std::abs(val1), std::abs(val2)}) /
      std::abs(g1 - g2);
  if (a < 0.0 && a >= -tiny) a = 0.0;
  if (a < 0.0) {
    std::ostringstream msg;
    msg << "no " << (sign == ConeSign::kPlus ? "positive" : "negative")
        << " cone passes through (" << r1 << ", " << val1 << ") and (" << r2
        << ", " << val2 << ") with A >= 0; try the "
        << (sign == ConeSign::kPlus ? "negative" : "positive") << " sign";
    throw ValidationError(msg.str());
  }
  cone.A = a;
  cone.B = val1 - a * g1;
  return cone;
}

std::vector<double> cone_distances(const DiscretizedSpace& space,
                                   const ConeSpec& cone) {
  if (cone.center >= 0) {
    if (cone.center >= space.size()) {
      throw ValidationError("cone center " + std::to_string(cone.center) +
                            " is not a vertex");
    }
    return *space.distances_from(cone.center);
  }
  if (!space.has_coords() ||
      static_cast<int>(cone.center_point.size()) != space.dim()) {
    throw ValidationError(
        "a held-out cone center needs a coordinate space of matching "
        "dimension");
  }
  std::vector<double> d(space.size());
  for (int v = 0; v < space.size(); ++v) {
    auto c = space.coord(v);
    double s = 0.0;
    for (int k = 0; k < space.dim(); ++k) {
      s += (c[k] - cone.center_point[k]) * (c[k] - cone.center_point[k]);
    }
    d[v] = std::sqrt(s);
  }
  return d;
}

std::vector<double> cone_field(const DiscretizedSpace& space,
                               const ConeSpec& cone) {
  std::vector<double> d = cone_distances(space, cone);
  for (double& r : d) r = cone_eval(cone, r);
  return d;
}

CecReport cec_check(const DiscretizedSpace& space, const BallIndex& balls,
                    std::span<const double> field, std::span<const int> V,
                    const ConeSpec& cone, CecSide side, double slack) {
  const int n = space.size();
  if (static_cast<int>(field.size()) != n) {
    throw ValidationError("field size does not match the space");
  }
  if (V.empty()) throw ValidationError("CEC subdomain V is empty");
  std::vector<char> in_v(n, 0);
  for (int x : V) {
    if (x < 0 || x >= n) {
      throw ValidationError("CEC subdomain vertex " + std::to_string(x) +
                            " out of range");
    }
    if (space.is_boundary(x)) {
      throw ValidationError("CEC subdomain touches Y at vertex " +
                            std::to_string(x));
    }
    in_v[x] = 1;
  }
  std::vector<char> in_vp = in_v;  // V' = V \ {center}
  if (cone.center >= 0) in_vp[cone.center] = 0;

  const std::vector<double> dist = cone_distances(space, cone);
  const double dir = side == CecSide::kAbove ? 1.0 : -1.0;
  // Signed excess of u over the cone (above) or of the cone over u (below).
  auto excess = [&](int x) {
    return dir * (field[x] - cone_eval(cone, dist[x]));
  };
  const double hyp_tol = 1e-12 * field_scale(field);

  CecReport rep;
  rep.trials = 1;
  std::vector<char> seen(n, 0);
  for (int x : V) {
    if (!in_vp[x]) continue;
    for (int y : balls.ball(x)) {
      if (in_vp[y] || seen[y]) continue;
      seen[y] = 1;
      if (excess(y) > hyp_tol) {
        rep.hypothesis_not_met = 1;
        rep.worst_excess = -kInf;
        return rep;
      }
    }
  }
  int worst_vertex = -1;
  double worst = -kInf;
  for (int x : V) {
    if (!in_vp[x]) continue;
    const double e = excess(x);
    if (e > worst) {
      worst = e;
      worst_vertex = x;
    }
  }
  if (worst_vertex < 0) {
    // V' is empty, so there is nothing to compare.
    rep.worst_excess = -kInf;
    return rep;
  }
  rep.worst_violation = std::max(0.0, worst);
  rep.worst_excess = worst - slack;
  rep.pass = worst <= slack;
  if (!rep.pass) {
    CecWitness w;
    w.cone = cone;
    w.vertex = worst_vertex;
    w.violation = worst;
    w.slack = slack;
    rep.witnesses.push_back(w);
  }
  return rep;
}

CecReport cec_scan(const DiscretizedSpace& space, const BallIndex& balls,
                   std::span<const double> field, double beta, CecSide side,
                   int n_trials, std::uint64_t seed, const SlackRule& rule) {
  if (n_trials < 1) throw ValidationError("cec_scan needs n_trials >= 1");
  if (!(rule.c >= 0.0) || !(rule.eps > 0.0)) {
    throw ValidationError("slack rule needs c >= 0 and eps > 0");
  }
  const int n = space.size();
  if (static_cast<int>(field.size()) != n) {
    throw ValidationError("field size does not match the space");
  }
  const auto interior = space.interior();
  const auto dist_y = space.distance_to_boundary();
  const double M = space.boundary().oscillation();
  const double M_draw = M > 0.0 ? M : 1.0;
  const double dir = side == CecSide::kAbove ? 1.0 : -1.0;

  struct Trial {
    CecReport report;
    std::vector<int> v;
    int v_center = -1;
    double v_radius = 0.0;
  };
  std::vector<Trial> trials(n_trials);

#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < n_trials; ++t) {
    CounterRng rng(seed, 0xCEC, static_cast<std::uint64_t>(t));
    Trial& tr = trials[t];
    ConeSpec cone;
    cone.beta = beta;
    cone.center = static_cast<int>(rng.below(n));
    cone.sign = rng.bernoulli(0.5) ? ConeSign::kPlus : ConeSign::kMinus;

    // Ball-shaped V around an interior vertex, clear of Y.
    tr.v_center = interior[rng.below(interior.size())];
    tr.v_radius = (*dist_y)[tr.v_center] * (1.0 - rng.uniform());
    for (int x : space.within(tr.v_center, tr.v_radius, false)) {
      if (!space.is_boundary(x)) tr.v.push_back(x);
    }
    if (tr.v.empty()) tr.v.push_back(tr.v_center);

    const auto row = space.distances_from(cone.center);
    const auto& d = *row;
    // V' and its ball boundary.
    std::vector<int> bd;
    {
      std::vector<char> in_vp(n, 0), seen(n, 0);
      for (int x : tr.v) in_vp[x] = 1;
      in_vp[cone.center] = 0;
      for (int x : tr.v) {
        if (!in_vp[x]) continue;
        for (int y : balls.ball(x)) {
          if (!in_vp[y] && !seen[y]) {
            seen[y] = 1;
            bd.push_back(y);
          }
        }
      }
    }

    bool fitted = false;
    if (t % 2 == 1) {
      // Two-point fit through field values at vertices of V and its boundary.
      const std::size_t pool = tr.v.size() + bd.size();
      auto pick = [&](std::size_t i) {
        return i < tr.v.size() ? tr.v[i] : bd[i - tr.v.size()];
      };
      const int a = pick(rng.below(pool)), b = pick(rng.below(pool));
      if (d[a] != d[b]) {
        for (int attempt = 0; attempt < 2 && !fitted; ++attempt) {
          try {
            ConeSpec f = fit_cone(beta, cone.sign, d[a], field[a], d[b],
                                  field[b]);
            cone.A = f.A;
            cone.B = f.B;
            fitted = true;
          } catch (const ValidationError&) {
            cone.sign = cone.sign == ConeSign::kPlus ? ConeSign::kMinus
                                                     : ConeSign::kPlus;
          }
        }
      }
    }
    if (!fitted) {
      cone.A = M_draw * std::pow(10.0, -3.0 + 6.0 * rng.uniform());
      cone.B = 0.0;
    }
    // Shift B so the boundary hypothesis holds with equality at the tightest
    // boundary vertex.
    double shift = -kInf;
    for (int y : bd) {
      shift = std::max(shift, dir * (field[y] - cone_eval(cone, d[y])));
    }
    if (std::isfinite(shift)) cone.B += dir * shift;

    double s;
    if (!space.is_boundary(cone.center)) {
      s = (*dist_y)[cone.center];
    } else {
      s = kInf;
      for (int x : tr.v) s = std::min(s, (*dist_y)[x]);
    }
    const double slack = rule.c * rule.eps * M / s;
    tr.report = cec_check(space, balls, field, tr.v, cone, side, slack);
  }

  CecReport rep;
  rep.trials = n_trials;
  std::vector<char> covered(n, 0);
  for (const Trial& tr : trials) {
    for (int x : tr.v) covered[x] = 1;
    rep.hypothesis_not_met += tr.report.hypothesis_not_met;
    if (tr.report.hypothesis_not_met) continue;
    rep.worst_violation =
        std::max(rep.worst_violation, tr.report.worst_violation);
    rep.worst_excess = std::max(rep.worst_excess, tr.report.worst_excess);
    for (CecWitness w : tr.report.witnesses) {
      w.v_center = tr.v_center;
      w.v_radius = tr.v_radius;
      rep.witnesses.push_back(w);
    }
  }
  std::sort(rep.witnesses.begin(), rep.witnesses.end(),
            [](const CecWitness& a, const CecWitness& b) {
              return a.violation - a.slack > b.violation - b.slack;
            });
  rep.pass = rep.witnesses.empty();
  if (rep.witnesses.size() > kMaxWitnesses) {
    rep.witnesses.resize(kMaxWitnesses);
  }
  int count = 0;
  for (int x : interior) count += covered[x];
  rep.coverage = interior.empty() ? 0.0 : double(count) / interior.size();
  return rep;
}

double lipschitz_check(const DiscretizedSpace& space,
                       std::span<const double> field, double eps,
                       std::uint64_t seed) {
  if (!(eps > 0.0)) throw ValidationError("epsilon must be positive");
  const auto dist_y = space.distance_to_boundary();
  const double M = space.boundary().oscillation();
  std::vector<int> q;
  for (int x : space.interior()) {
    if ((*dist_y)[x] > 2 * eps) q.push_back(x);
  }
  double worst = 0.0;
  auto visit = [&](int a, int b, double d) {
    const double du = std::abs(field[a] - field[b]);
    if (du == 0.0) return;
    if (M == 0.0) {
      worst = kInf;
      return;
    }
    const double s = std::max((*dist_y)[a], (*dist_y)[b]);
    worst = std::max(worst, du / (d_eps_from_distance(d, eps, false) * M / s));
  };
  constexpr std::size_t kExhaustive = 2000;
  constexpr int kSampleSources = 64;
  if (q.size() <= kExhaustive) {
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto row = space.distances_from(q[i]);
      for (std::size_t j = i + 1; j < q.size(); ++j) {
        visit(q[i], q[j], (*row)[q[j]]);
      }
    }
  } else {
    CounterRng rng(seed, 0x11f, 0);
    for (int k = 0; k < kSampleSources; ++k) {
      const int a = q[rng.below(q.size())];
      const auto row = space.distances_from(a);
      for (int b : q) {
        if (b != a) visit(a, b, (*row)[b]);
      }
    }
  }
  return worst;
}

std::string describe(const ConeSpec& cone) {
  std::ostringstream out;
  out << (cone.sign == ConeSign::kPlus ? "C+" : "C-") << "(center=";
  if (cone.center >= 0) {
    out << cone.center;
  } else {
    out << "[";
    for (std::size_t i = 0; i < cone.center_point.size(); ++i) {
      out << (i ? "," : "") << cone.center_point[i];
    }
    out << "]";
  }
  out << ", A=" << cone.A << ", B=" << cone.B << ", beta=" << cone.beta
      << ")";
  return out.str();
}

}  // namespace btow
