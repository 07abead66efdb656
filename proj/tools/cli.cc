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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btow/analysis.h"
#include "btow/bias.h"
#include "btow/cones.h"
#include "btow/error.h"
#include "btow/families.h"
#include "btow/game.h"
#include "btow/generators.h"
#include "btow/harmonic.h"
#include "btow/metric_space.h"
#include "btow/parallel.h"
#include "btow/space_io.h"
#include "json.hpp"

namespace btow::cli {
namespace {

using json = nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr const char* kFileFormats = R"(File formats:
  space JSON   {"format_version": 1,
                "vertices": [{"id": 0, "coords": [x, y]}, ...],
                "edges": [[i, j, length], ...],
                "boundary": [{"id": i, "F": value}, ...]}
               ("coords" is optional; "config" is ignored on input)
  field JSON   [u0, u1, ...] or any object with a "field" array, such as
               the output of solve
  odds table   text lines "eps rho" (comma or space separated, # comments)
)";

// --- small helpers --------------------------------------------------------

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_artifact(const std::string& path, const std::string& text,
                    std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  f << text;
  if (!f) throw ValidationError("failed writing " + path);
}

std::vector<double> read_field(const std::string& path, int n) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("field file " + path + ": " + e.what());
  }
  const json& arr = doc.is_object() && doc.contains("field") ? doc["field"]
                                                             : doc;
  if (!arr.is_array()) {
    throw ValidationError("field file " + path +
                          ": expected an array or a \"field\" array");
  }
  if (static_cast<int>(arr.size()) != n) {
    throw ValidationError("field file " + path + " has " +
                          std::to_string(arr.size()) + " values, space has " +
                          std::to_string(n) + " vertices");
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    if (!arr[i].is_number()) {
      throw ValidationError("field file " + path + ": entry " +
                            std::to_string(i) + " is not a number");
    }
    out[i] = arr[i].get<double>();
  }
  return out;
}

json field_json(std::span<const double> values) {
  json arr = json::array();
  for (double x : values) arr.push_back(std::isfinite(x) ? json(x) : json());
  return arr;
}

// Every option of the subcommand with its resolved value.
json resolved_config(const CLI::App& sub) {
  json cfg;
  cfg["subcommand"] = sub.get_name();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->get_expected_max() == 0) {
      cfg[name] = opt->count() > 0;
      continue;
    }
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) {
        value += (i ? "," : "") + results[i];
      }
    } else {
      value = opt->get_default_str();
    }
    char* end = nullptr;
    const long long whole = std::strtoll(value.c_str(), &end, 10);
    if (!value.empty() && *end == '\0') {
      cfg[name] = whole;
      continue;
    }
    const double num = std::strtod(value.c_str(), &end);
    if (!value.empty() && *end == '\0' && std::isfinite(num)) {
      cfg[name] = num;
    } else {
      cfg[name] = value;
    }
  }
  return cfg;
}

std::string csv_preamble(const json& config) {
  return "# schema_version=" + std::to_string(kSchemaVersion) +
         "\n# config=" + config.dump() + "\n";
}

bool wants_csv(const std::string& format, const std::string& path) {
  if (format == "csv") return true;
  if (format == "json") return false;
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

void add_threads(CLI::App* sub, int* threads) {
  sub->add_option("--threads", *threads,
                  "Worker thread cap (0: all cores; falls back to "
                  "BTOW_THREADS)")
      ->envname("BTOW_THREADS")
      ->check(CLI::NonNegativeNumber);
}

void apply_threads(int threads) {
  if (threads > 0) set_thread_count(threads);
}

// --- space source ---------------------------------------------------------

struct SpaceArgs {
  std::string space;   // file path or generator name
  std::string family;  // generator name
  int cells = 0;
  int ny = 0;
  double length = 1.0;
  double spacing = 0.0;
  double inner = 0.25;
  double outer = 0.5;
  double strip = 0.0;
  std::string stencil;
  int stencil_radius = 0;
  int corridor = 3;
  std::string boundary = "linear";
  double cone_beta = 1.0;
  std::string cone_sign = "plus";
  double cone_a = kNaN;
  double cone_b = 0.0;
  std::vector<double> cone_center = {0.0, 0.0};
  double f_left = 0.0;
  double f_right = 1.0;
};

const std::vector<std::string> kGenerators = {"interval", "grid", "annulus",
                                              "lshape", "spiral"};

void add_space_options(CLI::App* sub, SpaceArgs* a) {
  sub->add_option("--space", a->space,
                  "Space JSON file, or a generator name (interval, grid, "
                  "annulus, lshape, spiral)");
  sub->add_option("--family", a->family, "Built-in generator")
      ->check(CLI::IsMember(kGenerators));
  sub->add_option("--cells", a->cells,
                  "interval: segments (64); grid, lshape, spiral: lattice "
                  "points per side (33, 33, 41)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--ny", a->ny, "grid: lattice points in y (default --cells)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--length", a->length, "interval: length")
      ->check(CLI::PositiveNumber);
  sub->add_option("--spacing", a->spacing,
                  "Lattice spacing (default: unit side, or (outer-inner)/16 "
                  "for the annulus)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--inner", a->inner, "annulus: inner radius");
  sub->add_option("--outer", a->outer, "annulus: outer radius");
  sub->add_option("--strip", a->strip,
                  "annulus: extend the boundary into strips of this width")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--stencil", a->stencil,
                  "four, eight or euclidean (annulus default euclidean, "
                  "otherwise four)")
      ->check(CLI::IsMember({"four", "eight", "euclidean"}));
  sub->add_option("--stencil-radius", a->stencil_radius,
                  "Euclidean stencil radius in cells (annulus 4, else 2)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--corridor", a->corridor, "spiral: corridor width")
      ->check(CLI::PositiveNumber);
  sub->add_option("--boundary", a->boundary,
                  "grid: F = linear in x from --f-left to --f-right, or cone")
      ->check(CLI::IsMember({"linear", "cone"}));
  sub->add_option("--cone-beta", a->cone_beta, "Boundary cone beta");
  sub->add_option("--cone-sign", a->cone_sign, "Boundary cone sign")
      ->check(CLI::IsMember({"plus", "minus"}));
  sub->add_option("--cone-a", a->cone_a,
                  "Boundary cone A (default: fitted so F = 0 on the inner "
                  "rim and 1 on the outer rim)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--cone-b", a->cone_b, "Boundary cone B");
  sub->add_option("--cone-center", a->cone_center, "Boundary cone center x,y")
      ->expected(2)
      ->delimiter(',');
  sub->add_option("--f-left", a->f_left,
                  "interval: F(0); grid: F at x = 0; spiral: F at the "
                  "entrance");
  sub->add_option("--f-right", a->f_right,
                  "interval: F(length); grid: F at the right edge; spiral: "
                  "F at the center");
}

Stencil parse_stencil(const std::string& s, Stencil fallback) {
  if (s.empty()) return fallback;
  if (s == "four") return Stencil::kFour;
  if (s == "eight") return Stencil::kEight;
  return Stencil::kEuclidean;
}

ConeSpec boundary_cone(const SpaceArgs& a, double r_lo, double r_hi) {
  const ConeSign sign =
      a.cone_sign == "minus" ? ConeSign::kMinus : ConeSign::kPlus;
  ConeSpec cone;
  if (std::isnan(a.cone_a)) {
    cone = fit_cone(a.cone_beta, sign, r_lo, 0.0, r_hi, 1.0);
  } else {
    cone.beta = a.cone_beta;
    cone.sign = sign;
    cone.A = a.cone_a;
    cone.B = a.cone_b;
  }
  cone.center_point = a.cone_center;
  return cone;
}

BoundaryFunction cone_function(const ConeSpec& cone) {
  return [cone](double x, double y) {
    return cone_eval(cone, std::hypot(x - cone.center_point[0],
                                      y - cone.center_point[1]));
  };
}

DiscretizedSpace build_space(const SpaceArgs& a) {
  std::string gen = a.family;
  if (!a.space.empty()) {
    if (!gen.empty()) {
      throw ValidationError("give either --space or --family, not both");
    }
    const bool is_gen = std::find(kGenerators.begin(), kGenerators.end(),
                                  a.space) != kGenerators.end();
    if (!is_gen || std::filesystem::exists(a.space)) {
      return load_space(a.space);
    }
    gen = a.space;
  }
  if (gen.empty()) throw ValidationError("--space or --family is required");

  if (gen == "interval") {
    const int n = a.cells > 0 ? a.cells : 64;
    return build_interval(n, a.length, a.f_left, a.f_right);
  }
  if (gen == "grid") {
    GridSpec g;
    g.nx = a.cells > 0 ? a.cells : 33;
    g.ny = a.ny > 0 ? a.ny : g.nx;
    if (g.nx < 3 || g.ny < 3) {
      throw ValidationError("grid needs at least 3 points per side");
    }
    g.spacing = a.spacing > 0 ? a.spacing : 1.0 / (g.nx - 1);
    g.stencil = parse_stencil(a.stencil, Stencil::kFour);
    g.stencil_radius = a.stencil_radius > 0 ? a.stencil_radius : 2;
    if (a.boundary == "cone") {
      g.boundary_value = cone_function(boundary_cone(a, 0.0, 1.0));
    } else {
      const double width = g.spacing * (g.nx - 1);
      const double l = a.f_left, r = a.f_right;
      g.boundary_value = [=](double x, double) {
        return l + (r - l) * x / width;
      };
    }
    return build_grid_domain(g);
  }
  if (gen == "annulus") {
    if (!(a.inner > 0.0) || !(a.outer > a.inner)) {
      throw ValidationError("annulus needs 0 < --inner < --outer");
    }
    AnnulusSpec s;
    s.inner_radius = a.inner;
    s.outer_radius = a.outer;
    s.spacing = a.spacing > 0 ? a.spacing : (a.outer - a.inner) / 16;
    s.stencil = parse_stencil(a.stencil, Stencil::kEuclidean);
    s.stencil_radius = a.stencil_radius > 0 ? a.stencil_radius : 4;
    s.boundary_strip = a.strip;
    s.boundary_value = cone_function(boundary_cone(a, a.inner, a.outer));
    return build_annulus(s);
  }
  if (gen == "lshape") {
    const int n = a.cells > 0 ? a.cells : 33;
    const double h = a.spacing > 0 ? a.spacing : 1.0 / (n - 1);
    auto g = lshape_grid(n, h, parse_stencil(a.stencil, Stencil::kFour),
                         a.stencil_radius > 0 ? a.stencil_radius : 2,
                         [](double x, double y) { return x + 0.5 * y; });
    return build_grid_domain(g);
  }
  SpiralSpec s;
  s.size = a.cells > 0 ? a.cells : 41;
  s.corridor = a.corridor;
  s.spacing = a.spacing > 0 ? a.spacing : 1.0 / (s.size - 1);
  s.f_entrance = a.f_left;
  s.f_center = a.f_right;
  return build_spiral(s);
}

// --- bias and solver ------------------------------------------------------

struct BiasArgs {
  double beta = 1.0;
  std::string odds = "exp";
  double theta = kNaN;
  double eps = kNaN;
  bool closed = false;
  double min_step_ratio = 4.0;
};

void add_bias_options(CLI::App* sub, BiasArgs* b, bool with_eps = true) {
  sub->add_option("--beta", b->beta, "Bias parameter beta");
  sub->add_option("--odds", b->odds,
                  "Odds family: exp (rho = e^(beta eps)), linear (theta = "
                  "beta eps / 2), const (theta = --theta) or table:<path>");
  sub->add_option("--theta", b->theta, "Constant theta for --odds const")
      ->check(CLI::Range(0.0, 1.0));
  if (!with_eps) return;
  sub->add_option("--eps", b->eps, "Step size epsilon")
      ->required()
      ->check(CLI::PositiveNumber);
  sub->add_flag("--closed", b->closed,
                "Closed balls dist <= eps (default open dist < eps)");
  sub->add_option("--min-step-ratio", b->min_step_ratio,
                  "Minimum eps / mesh width")
      ->check(CLI::NonNegativeNumber);
}

OddsFunction make_odds(const BiasArgs& b) {
  if (b.odds == "exp") return OddsFunction::exponential(b.beta);
  if (b.odds == "linear") return OddsFunction::linear_theta(b.beta);
  if (b.odds == "const") {
    if (std::isnan(b.theta)) {
      throw ValidationError("--odds const needs --theta");
    }
    return OddsFunction::constant_theta(b.theta);
  }
  if (b.odds.rfind("table:", 0) == 0) {
    return OddsFunction::load_table(b.odds.substr(6));
  }
  throw ValidationError("--odds: unknown family '" + b.odds +
                        "' (exp, linear, const, table:<path>)");
}

BallClosure closure_of(const BiasArgs& b) {
  return b.closed ? BallClosure::kClosed : BallClosure::kOpen;
}

json bias_json(const GameBias& bias) {
  return {{"eps", bias.eps},
          {"theta", bias.theta},
          {"p", bias.p},
          {"rho", std::isfinite(bias.rho) ? json(bias.rho) : json("inf")}};
}

struct SolverArgs {
  double tol = 1e-10;
  long max_sweeps = 1000000;
  bool single_sided = false;
};

void add_solver_options(CLI::App* sub, SolverArgs* s) {
  sub->add_option("--tol", s->tol, "Sup-norm stopping tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-sweeps", s->max_sweeps, "Sweep limit")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--single-sided", s->single_sided,
                "Iterate from below only (no gap certificate)");
}

SolverConfig solver_config(const SolverArgs& s, const BiasArgs& b) {
  SolverConfig c;
  c.tol = s.tol;
  c.max_sweeps = s.max_sweeps;
  c.two_sided = !s.single_sided;
  c.closure = closure_of(b);
  c.min_step_ratio = b.min_step_ratio;
  c.validate();
  return c;
}

json report_json(const SolveReport& r) {
  json j = {{"sweeps", r.sweeps},
            {"residual", r.residual},
            {"gap", std::isfinite(r.gap) ? json(r.gap) : json()},
            {"dpp_residual", r.dpp_residual},
            {"stalled", r.stalled},
            {"warnings", r.warnings}};
  return j;
}

std::string field_csv(const DiscretizedSpace& space, const json& config,
                      const std::vector<std::pair<std::string,
                                                  std::span<const double>>>&
                          columns) {
  std::ostringstream s;
  s << csv_preamble(config) << "vertex";
  for (int k = 0; k < space.dim(); ++k) s << ",x" << k;
  s << ",boundary";
  for (const auto& [name, _] : columns) s << "," << name;
  s << "\n";
  for (int v = 0; v < space.size(); ++v) {
    s << v;
    for (double c : space.coord(v)) s << "," << format_double(c);
    s << "," << (space.is_boundary(v) ? 1 : 0);
    for (const auto& [_, values] : columns) {
      s << "," << format_double(values[v]);
    }
    s << "\n";
  }
  return s.str();
}

// --- solve ----------------------------------------------------------------

struct SolveArgs {
  SpaceArgs space;
  BiasArgs bias;
  SolverArgs solver;
  std::string favored;
  std::string running_payoff;
  std::string out = "-";
  std::string format = "auto";
  int threads = 0;
};

std::vector<double> running_payoff_values(const std::string& spec, int n) {
  if (spec.rfind("const:", 0) == 0) {
    const std::string rest = spec.substr(6);
    char* end = nullptr;
    const double c = std::strtod(rest.c_str(), &end);
    if (rest.empty() || *end != '\0' || !std::isfinite(c)) {
      throw ValidationError("--running-payoff: bad constant '" + rest + "'");
    }
    return std::vector<double>(n, c);
  }
  return read_field(spec, n);
}

int run_solve(const CLI::App& sub, const SolveArgs& a, std::ostream& out) {
  apply_threads(a.threads);
  const DiscretizedSpace space = build_space(a.space);
  const OddsFunction odds = make_odds(a.bias);
  const GameBias bias = bias_for(odds, a.bias.eps);
  const SolverConfig config = solver_config(a.solver, a.bias);
  std::vector<double> running;
  if (!a.running_payoff.empty()) {
    if (!a.favored.empty()) {
      throw ValidationError(
          "--running-payoff cannot be combined with --favored");
    }
    running = running_payoff_values(a.running_payoff, space.size());
  }
  const GameBalls balls(space, a.bias.eps, config.closure,
                        config.min_step_ratio);

  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "solve";
  doc["config"] = resolved_config(sub);
  doc["odds"] = odds.describe();
  doc["bias"] = bias_json(bias);
  std::vector<std::pair<std::string, std::span<const double>>> columns;
  std::optional<ValueSolution> value;
  std::optional<FavoredSolution> fav;
  if (a.favored.empty()) {
    value = solve_value(balls, bias, config, running);
    doc["tag"] = to_string(value->lower.tag);
    doc["field"] = field_json(value->lower.values);
    doc["report"] = report_json(value->report);
    columns.emplace_back("value", value->lower.values);
    if (config.two_sided) {
      doc["upper"] = field_json(value->upper.values);
      columns.emplace_back("upper", value->upper.values);
    }
  } else {
    fav = a.favored == "lower" ? solve_favored_lower(balls, bias, config)
                               : solve_favored_upper(balls, bias, config);
    doc["tag"] = to_string(fav->field.tag);
    doc["field"] = field_json(fav->field.values);
    doc["report"] = report_json(fav->report);
    columns.emplace_back("value", fav->field.values);
  }
  if (wants_csv(a.format, a.out)) {
    write_artifact(a.out, field_csv(space, doc["config"], columns), out);
  } else {
    write_artifact(a.out, doc.dump(1) + "\n", out);
  }
  return kExitOk;
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  SpaceArgs space;
  BiasArgs bias;
  std::string s1;
  std::string s2;
  int start = -1;
  long n = 1000;
  std::uint64_t seed = 1;
  long max_steps = 0;
  std::string running_payoff;
  std::string trace;
  std::string out = "-";
  int threads = 0;
};

Strategy parse_strategy(const std::string& spec, const std::string& flag,
                        const DiscretizedSpace& space) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  if (head == "random" && arg.empty()) return Strategy::random_uniform();
  if (head == "stay" && arg.empty()) return Strategy::stay();
  if (head == "pull" && !arg.empty()) {
    char* end = nullptr;
    const long v = std::strtol(arg.c_str(), &end, 10);
    if (*end != '\0' || v < 0 || v >= space.size()) {
      throw ValidationError(flag + ": pull target '" + arg +
                            "' is not a vertex (space has " +
                            std::to_string(space.size()) + " vertices)");
    }
    return Strategy::pull_toward(static_cast<int>(v));
  }
  if ((head == "greedy-max" || head == "greedy-min") && !arg.empty()) {
    auto field = read_field(arg, space.size());
    return head == "greedy-max" ? Strategy::greedy_max(std::move(field))
                                : Strategy::greedy_min(std::move(field));
  }
  throw ValidationError(flag + ": bad strategy '" + spec +
                        "' (pull:<vertex>, greedy-max:<file>, "
                        "greedy-min:<file>, random, stay)");
}

int run_simulate(const CLI::App& sub, const SimulateArgs& a,
                 std::ostream& out) {
  apply_threads(a.threads);
  const DiscretizedSpace space = build_space(a.space);
  if (a.start < 0 || a.start >= space.size()) {
    throw ValidationError("--start: vertex " + std::to_string(a.start) +
                          " is not in the space (vertices 0.." +
                          std::to_string(space.size() - 1) + ")");
  }
  if (space.is_boundary(a.start)) {
    throw ValidationError("--start: vertex " + std::to_string(a.start) +
                          " is a boundary vertex");
  }
  const OddsFunction odds = make_odds(a.bias);
  const GameBias bias = bias_for(odds, a.bias.eps);
  const Strategy one = parse_strategy(a.s1, "--s1", space);
  const Strategy two = parse_strategy(a.s2, "--s2", space);
  std::vector<double> running;
  if (!a.running_payoff.empty()) {
    running = running_payoff_values(a.running_payoff, space.size());
  }
  const GameBalls balls(space, a.bias.eps, closure_of(a.bias),
                        a.bias.min_step_ratio);
  PlayOptions options;
  options.max_steps = a.max_steps;
  options.record = false;
  options.running_payoff = running;

  const SimReport r = estimate_value(space, balls.ball(), bias, one, two,
                                     a.start, a.n, a.seed, options,
                                     a.bias.beta);
  if (!a.trace.empty()) {
    options.max_steps = r.max_steps;
    std::ostringstream t;
    t << csv_preamble(resolved_config(sub))
      << "playout,tau,capped,payoff,final_vertex\n";
    for (long i = 0; i < a.n; ++i) {
      const Playout p = play(space, balls.ball(), bias, one, two, a.start,
                             a.seed, static_cast<std::uint64_t>(i), [&] {
                               PlayOptions o = options;
                               o.record = true;
                               return o;
                             }());
      t << i << "," << p.tau << "," << (p.capped ? 1 : 0) << ","
        << format_double(p.payoff) << "," << p.trajectory.back() << "\n";
    }
    write_artifact(a.trace, t.str(), out);
  }
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "simulate";
  doc["config"] = resolved_config(sub);
  doc["bias"] = bias_json(bias);
  doc["player_one"] = one.describe();
  doc["player_two"] = two.describe();
  doc["report"] = {{"n", r.n},
                   {"terminated", r.terminated},
                   {"capped", r.capped},
                   {"mean_payoff", r.terminated ? json(r.mean_payoff) : json()},
                   {"payoff_stderr", r.payoff_stderr},
                   {"mean_tau", r.mean_tau},
                   {"tau_stderr", r.tau_stderr},
                   {"max_steps", r.max_steps}};
  write_artifact(a.out, doc.dump(1) + "\n", out);
  return kExitOk;
}

// --- cec-check ------------------------------------------------------------

struct CecArgs {
  SpaceArgs space;
  BiasArgs bias;
  std::string field;
  std::string side = "above";
  int trials = 200;
  std::uint64_t seed = 1;
  double slack = 8.0;
  std::string out = "-";
  int threads = 0;
};

json cone_json(const ConeSpec& c) {
  json j = {{"sign", c.sign == ConeSign::kPlus ? "plus" : "minus"},
            {"A", c.A},
            {"B", c.B},
            {"beta", c.beta}};
  if (c.center >= 0) j["center"] = c.center;
  if (!c.center_point.empty()) j["center_point"] = c.center_point;
  return j;
}

int run_cec(const CLI::App& sub, const CecArgs& a, std::ostream& out) {
  apply_threads(a.threads);
  const DiscretizedSpace space = build_space(a.space);
  const std::vector<double> u = read_field(a.field, space.size());
  const GameBalls balls(space, a.bias.eps, closure_of(a.bias),
                        a.bias.min_step_ratio);
  const CecSide side = a.side == "below" ? CecSide::kBelow : CecSide::kAbove;
  const CecReport r = cec_scan(space, balls.ball(), u, a.bias.beta, side,
                               a.trials, a.seed, {a.slack, a.bias.eps});
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "cec-check";
  doc["config"] = resolved_config(sub);
  json witnesses = json::array();
  for (const CecWitness& w : r.witnesses) {
    witnesses.push_back({{"cone", cone_json(w.cone)},
                         {"v_center", w.v_center},
                         {"v_radius", w.v_radius},
                         {"vertex", w.vertex},
                         {"violation", w.violation},
                         {"slack", w.slack}});
  }
  doc["report"] = {{"pass", r.pass},
                   {"worst_violation", r.worst_violation},
                   {"worst_excess", r.worst_excess},
                   {"trials", r.trials},
                   {"hypothesis_not_met", r.hypothesis_not_met},
                   {"coverage", r.coverage},
                   {"witnesses", witnesses}};
  write_artifact(a.out, doc.dump(1) + "\n", out);
  return r.pass ? kExitOk : kExitPropertyFailed;
}

// --- converge -------------------------------------------------------------

struct ConvergeArgs {
  std::string family = "interval";
  BiasArgs bias;
  SolverArgs solver;
  double eps0 = 0.125;
  int depth = 4;
  std::string mode = "refined";
  int step_cells = 0;
  bool strip = false;
  bool no_favored = false;
  std::string out = "-";
  int threads = 0;
};

constexpr const char* kConvergeColumns = R"(CSV columns (one row per level):
  level       0 for eps0, then one per halving
  eps         step size of the level
  vertices    vertex count of the level
  ref_error   sup |u - reference| on the reference vertices (the exact
              solution when the family has one, else the finest level)
  v_gap       sup |v - u| for the II-favored value v
  w_gap       sup |w - u| for the I-favored value w
  v_monotone  1 when v did not decrease from the previous level (0 when
              it is checked and fails, blank when not implied by the odds)
  w_monotone  same for w not increasing
  v_drop      largest decrease of v against the previous level, units of M
  w_rise      largest increase of w, units of M
  common      vertices shared with the previous level
  sweeps      solver sweeps for u
  seconds     wall time of the level
)";

SpaceFamily converge_family(const ConvergeArgs& a) {
  if (a.family == "interval") {
    return interval_family({a.bias.beta, a.step_cells > 0 ? a.step_cells : 4});
  }
  if (a.family == "annulus") {
    AnnulusFamilySpec s;
    s.beta = a.bias.beta;
    if (a.step_cells > 0) s.step_cells = a.step_cells;
    s.strip_boundary = a.strip;
    return annulus_family(s);
  }
  LShapeFamilySpec s;
  if (a.step_cells > 0) s.step_cells = a.step_cells;
  return lshape_family(s);
}

int run_converge(const CLI::App& sub, const ConvergeArgs& a,
                 std::ostream& out) {
  apply_threads(a.threads);
  const OddsFunction odds = make_odds(a.bias);
  ConvergenceConfig config;
  config.eps0 = a.eps0;
  config.depth = a.depth;
  config.mode =
      a.mode == "fixed" ? RefinementMode::kFixed : RefinementMode::kRefined;
  config.solver = solver_config(a.solver, a.bias);
  config.favored = !a.no_favored;
  const SpaceFamily family = converge_family(a);
  const ConvergenceTable t = dyadic_convergence(family, odds, config);

  json cfg = resolved_config(sub);
  cfg["reference"] = t.reference;
  cfg["log_shape"] = to_string(t.shape);
  std::ostringstream s;
  s << csv_preamble(cfg)
    << "level,eps,vertices,ref_error,v_gap,w_gap,v_monotone,w_monotone,"
       "v_drop,w_rise,common,sweeps,seconds\n";
  auto flag = [](bool checked, bool ok) {
    return checked ? std::string(ok ? "1" : "0") : std::string();
  };
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const ConvergenceRow& r = t.rows[i];
    const bool fav = config.favored;
    s << i << "," << format_double(r.eps) << "," << r.vertices << ","
      << format_double(r.ref_error) << ","
      << (fav ? format_double(r.v_gap) : "") << ","
      << (fav ? format_double(r.w_gap) : "") << ","
      << flag(fav && t.check_v && i > 0, r.v_monotone) << ","
      << flag(fav && t.check_w && i > 0, r.w_monotone) << ","
      << (fav ? format_double(r.v_drop) : "") << ","
      << (fav ? format_double(r.w_rise) : "") << "," << r.common << ","
      << r.sweeps << "," << format_double(r.seconds) << "\n";
  }
  write_artifact(a.out, s.str(), out);
  return config.favored && !t.monotone_ok() ? kExitPropertyFailed : kExitOk;
}

// --- residual -------------------------------------------------------------

struct ResidualArgs {
  SpaceArgs space;
  std::string field;
  double beta = 1.0;
  double grad_threshold = -1.0;
  int fd_cells = 1;
  double margin = 0.0;
  std::string out = "-";
  int threads = 0;
};

constexpr const char* kResidualColumns = R"(CSV columns (one row per vertex):
  vertex, x0, x1, ...   id and coordinates
  boundary              1 for boundary vertices
  phi                   <D^2u grad u, grad u>/|grad u|^2 + beta |grad u|
                        from central differences, nan where not evaluated
  valid                 1 where phi was evaluated
The preamble carries the summary (max |phi|, its vertex, counts).
)";

int run_residual(const CLI::App& sub, const ResidualArgs& a,
                 std::ostream& out) {
  apply_threads(a.threads);
  const DiscretizedSpace space = build_space(a.space);
  const std::vector<double> u = read_field(a.field, space.size());
  ResidualConfig config;
  config.beta = a.beta;
  config.grad_threshold = a.grad_threshold;
  config.fd_cells = a.fd_cells;
  config.margin = a.margin;
  const ResidualField r = residual(space, u, config);
  std::vector<double> valid(r.valid.begin(), r.valid.end());
  json cfg = resolved_config(sub);
  cfg["summary"] = {{"max_abs", r.max_abs},
                    {"argmax", r.argmax},
                    {"evaluated", r.evaluated},
                    {"masked_gradient", r.masked_gradient},
                    {"spacing", r.spacing},
                    {"fd_step", r.fd_step}};
  write_artifact(a.out,
                 field_csv(space, cfg, {{"phi", r.phi}, {"valid", valid}}),
                 out);
  return kExitOk;
}

// --- gen-space ------------------------------------------------------------

struct GenArgs {
  SpaceArgs space;
  std::string out = "-";
};

int run_gen(const CLI::App& sub, const GenArgs& a, std::ostream& out) {
  const DiscretizedSpace space = build_space(a.space);
  json cfg = resolved_config(sub);
  cfg["schema_version"] = kSchemaVersion;
  write_artifact(a.out, write_space_json(space, cfg.dump()) + "\n", out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Biased tug-of-war games on discretized metric spaces",
               "btow"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.footer(kFileFormats);

  SolveArgs solve;
  CLI::App* s_solve = app.add_subcommand("solve", "Solve the game value");
  add_space_options(s_solve, &solve.space);
  add_bias_options(s_solve, &solve.bias);
  add_solver_options(s_solve, &solve.solver);
  s_solve
      ->add_option("--favored", solve.favored,
                   "Solve the favored game instead: lower (II-favored v) or "
                   "upper (I-favored w)")
      ->check(CLI::IsMember({"lower", "upper"}));
  s_solve->add_option("--running-payoff", solve.running_payoff,
                      "Running payoff f: a field file or const:<c>");
  s_solve->add_option("--out", solve.out, "Output path (- for stdout)");
  s_solve
      ->add_option("--format", solve.format,
                   "json, csv, or auto (csv when --out ends in .csv)")
      ->check(CLI::IsMember({"auto", "json", "csv"}));
  add_threads(s_solve, &solve.threads);
  s_solve->footer(
      "JSON output: {schema_version, command, config, odds, bias, tag, "
      "field, upper?, report: {sweeps, residual, gap, dpp_residual, "
      "stalled, warnings}}\nCSV output: vertex, x0.., boundary, value, "
      "upper?");

  SimulateArgs sim;
  CLI::App* s_sim =
      app.add_subcommand("simulate", "Monte Carlo playouts of the game");
  add_space_options(s_sim, &sim.space);
  add_bias_options(s_sim, &sim.bias);
  s_sim->add_option("--s1", sim.s1, "Strategy of player I")->required();
  s_sim->add_option("--s2", sim.s2, "Strategy of player II")->required();
  s_sim->add_option("--start", sim.start, "Start vertex")->required();
  s_sim->add_option("--n", sim.n, "Number of playouts")
      ->check(CLI::PositiveNumber);
  s_sim->add_option("--seed", sim.seed, "Random seed");
  s_sim->add_option("--max-steps", sim.max_steps,
                    "Step cap per playout (0: automatic)")
      ->check(CLI::NonNegativeNumber);
  s_sim->add_option("--running-payoff", sim.running_payoff,
                    "Running payoff f: a field file or const:<c>");
  s_sim->add_option("--trace", sim.trace,
                    "Per-playout CSV: playout, tau, capped, payoff, "
                    "final_vertex");
  s_sim->add_option("--out", sim.out, "Report path (- for stdout)");
  add_threads(s_sim, &sim.threads);
  s_sim->footer(
      "Strategies: pull:<vertex>, greedy-max:<field file>, "
      "greedy-min:<field file>, random, stay\nJSON output: {schema_version, "
      "command, config, bias, player_one, player_two, report: {n, "
      "terminated, capped, mean_payoff, payoff_stderr, mean_tau, "
      "tau_stderr, max_steps}}");

  CecArgs cec;
  CLI::App* s_cec = app.add_subcommand(
      "cec-check", "Sample cone comparison checks on a field");
  add_space_options(s_cec, &cec.space);
  add_bias_options(s_cec, &cec.bias);
  s_cec->add_option("--field", cec.field, "Field file")->required();
  s_cec->add_option("--side", cec.side, "above or below")
      ->check(CLI::IsMember({"above", "below"}));
  s_cec->add_option("--trials", cec.trials, "Sampled (V, cone) pairs")
      ->check(CLI::PositiveNumber);
  s_cec->add_option("--seed", cec.seed, "Random seed");
  s_cec->add_option("--slack", cec.slack,
                    "Slack rule multiplier c: slack = c eps M / s")
      ->check(CLI::NonNegativeNumber);
  s_cec->add_option("--out", cec.out, "Report path (- for stdout)");
  add_threads(s_cec, &cec.threads);
  s_cec->footer(
      "Exit 3 when a sampled pair violates the comparison; the witnesses "
      "are in the report.");

  ConvergeArgs conv;
  CLI::App* s_conv = app.add_subcommand(
      "converge", "Dyadic eps refinement study on a built-in family");
  s_conv->add_option("--family", conv.family, "Family")
      ->check(CLI::IsMember({"interval", "annulus", "lshape"}));
  add_bias_options(s_conv, &conv.bias, false);
  add_solver_options(s_conv, &conv.solver);
  s_conv->add_option("--eps0", conv.eps0, "Coarsest eps")
      ->check(CLI::PositiveNumber);
  s_conv->add_option("--depth", conv.depth, "Number of levels")
      ->check(CLI::Range(2, 12));
  s_conv->add_option("--mode", conv.mode,
                     "refined (new lattice per eps) or fixed (finest "
                     "lattice throughout)")
      ->check(CLI::IsMember({"refined", "fixed"}));
  s_conv->add_option("--step-cells", conv.step_cells,
                     "Lattice cells per eps (interval 4, annulus 5, "
                     "lshape 4)")
      ->check(CLI::NonNegativeNumber);
  s_conv->add_flag("--strip", conv.strip,
                   "annulus: boundary strips of width eps instead of rims");
  s_conv->add_flag("--no-favored", conv.no_favored,
                   "Skip the favored values v and w");
  s_conv->add_option("--out", conv.out, "CSV path (- for stdout)");
  add_threads(s_conv, &conv.threads);
  s_conv->footer(std::string(kConvergeColumns) +
                 "Exit 3 when an implied monotonicity fails.");

  ResidualArgs res;
  CLI::App* s_res = app.add_subcommand(
      "residual", "Finite-difference biased infinity Laplacian of a field");
  add_space_options(s_res, &res.space);
  s_res->add_option("--field", res.field, "Field file")->required();
  s_res->add_option("--beta", res.beta, "beta of the operator");
  s_res->add_option("--grad-threshold", res.grad_threshold,
                    "Skip points with |grad u| below this (negative: "
                    "1e-6 M / diam)");
  s_res->add_option("--fd-cells", res.fd_cells,
                    "Difference step in lattice cells")
      ->check(CLI::PositiveNumber);
  s_res->add_option("--margin", res.margin,
                    "Skip points closer than this to the boundary")
      ->check(CLI::NonNegativeNumber);
  s_res->add_option("--out", res.out, "CSV path (- for stdout)");
  add_threads(s_res, &res.threads);
  s_res->footer(kResidualColumns);

  GenArgs gen;
  CLI::App* s_gen =
      app.add_subcommand("gen-space", "Write a generated space as JSON");
  add_space_options(s_gen, &gen.space);
  s_gen->add_option("--out", gen.out, "Output path (- for stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (s_solve->parsed()) return run_solve(*s_solve, solve, out);
    if (s_sim->parsed()) return run_simulate(*s_sim, sim, out);
    if (s_cec->parsed()) return run_cec(*s_cec, cec, out);
    if (s_conv->parsed()) return run_converge(*s_conv, conv, out);
    if (s_res->parsed()) return run_residual(*s_res, res, out);
    if (s_gen->parsed()) return run_gen(*s_gen, gen, out);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (sweeps " << e.sweeps()
        << ", residual " << e.residual() << ")\n";
    return kExitNoConvergence;
  } catch (const ConsistencyError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNoConvergence;
  } catch (const PropertyViolation& e) {
    err << "error: " << e.what() << " (vertex " << e.witness()
        << ", magnitude " << e.magnitude() << ")\n";
    return kExitPropertyFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace btow::cli
