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

#include "btow/bias.h"

#include <algorithm>
// pchip.hpp in Boost 1.74 calls unqualified isnan.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "btow/error.h"

namespace btow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

LogShape classify(const std::vector<double>& second_differences,
                  double scale) {
  const double tol = 1e-12 * std::max(scale, 1e-300);
  bool all_zero = true, non_neg = true, non_pos = true;
  for (double d : second_differences) {
    if (std::abs(d) > tol) all_zero = false;
    if (d < -tol) non_neg = false;
    if (d > tol) non_pos = false;
  }
  if (all_zero) return LogShape::kLinear;
  if (non_neg) return LogShape::kConvex;
  if (non_pos) return LogShape::kConcave;
  return LogShape::kUnknown;
}

}  // namespace

struct OddsFunction::Table {
  std::vector<double> eps;
  boost::math::interpolators::pchip<std::vector<double>> log_rho;

  Table(std::vector<double> e, std::vector<double> lr)
      : eps(e), log_rho(std::move(e), std::move(lr)) {}
};

const char* to_string(OddsFamily family) {
  switch (family) {
    case OddsFamily::kExponential: return "exp";
    case OddsFamily::kLinearTheta: return "linear";
    case OddsFamily::kConstantTheta: return "const";
    case OddsFamily::kCustom: return "table";
  }
  return "?";
}

const char* to_string(LogShape shape) {
  switch (shape) {
    case LogShape::kConcave: return "concave";
    case LogShape::kConvex: return "convex";
    case LogShape::kLinear: return "linear";
    case LogShape::kUnknown: return "unknown";
  }
  return "?";
}

OddsFunction OddsFunction::exponential(double beta) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  OddsFunction f;
  f.family_ = OddsFamily::kExponential;
  f.param_ = beta;
  return f;
}

OddsFunction OddsFunction::linear_theta(double beta) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  OddsFunction f;
  f.family_ = OddsFamily::kLinearTheta;
  f.param_ = beta;
  return f;
}

OddsFunction OddsFunction::constant_theta(double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) {
    throw ValidationError("constant theta must lie in [-1, 1]");
  }
  OddsFunction f;
  f.family_ = OddsFamily::kConstantTheta;
  f.param_ = theta;
  return f;
}

OddsFunction OddsFunction::custom(std::vector<double> eps,
                                  std::vector<double> rho) {
  if (eps.size() != rho.size() || eps.size() < 2) {
    throw ValidationError("odds table needs >= 2 matching (eps, rho) rows");
  }
  std::vector<double> lr(rho.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(rho[i] > 0.0) || !std::isfinite(rho[i])) {
      throw ValidationError("odds table rho must be positive and finite");
    }
    if (eps[i] < 0.0 || (i > 0 && !(eps[i] > eps[i - 1]))) {
      throw ValidationError("odds table eps must be >= 0 and increasing");
    }
    lr[i] = std::log(rho[i]);
  }
  if (eps.size() < 4) {
    // The monotone cubic needs four knots; densify linearly in log rho.
    std::vector<double> e2, l2;
    for (std::size_t i = 0; i + 1 < eps.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        double t = k / 3.0;
        e2.push_back(eps[i] + t * (eps[i + 1] - eps[i]));
        l2.push_back(lr[i] + t * (lr[i + 1] - lr[i]));
      }
    }
    e2.push_back(eps.back());
    l2.push_back(lr.back());
    eps = std::move(e2);
    lr = std::move(l2);
  }
  OddsFunction f;
  f.family_ = OddsFamily::kCustom;
  f.table_ = std::make_shared<const Table>(std::move(eps), std::move(lr));
  return f;
}

OddsFunction OddsFunction::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open odds table " + path);
  std::vector<double> eps, rho;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double e, r;
    if (!(fields >> e)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (eps.empty()) continue;  // header
      throw ValidationError("odds table " + path + ": bad line " +
                            std::to_string(lineno));
    }
    if (!(fields >> r)) {
      throw ValidationError("odds table " + path + ": missing rho on line " +
                            std::to_string(lineno));
    }
    eps.push_back(e);
    rho.push_back(r);
  }
  return custom(std::move(eps), std::move(rho));
}

double OddsFunction::beta() const {
  switch (family_) {
    case OddsFamily::kExponential:
    case OddsFamily::kLinearTheta:
      return param_;
    case OddsFamily::kConstantTheta:
      return kNaN;
    case OddsFamily::kCustom:
      if (table_->eps.front() == 0.0) return table_->log_rho.prime(0.0);
      return kNaN;
  }
  return kNaN;
}

double OddsFunction::min_eps() const {
  return family_ == OddsFamily::kCustom ? table_->eps.front() : 0.0;
}

double OddsFunction::max_eps() const {
  return family_ == OddsFamily::kCustom ? table_->eps.back() : kInf;
}

std::vector<double> OddsFunction::knots() const {
  return family_ == OddsFamily::kCustom ? table_->eps : std::vector<double>{};
}

double OddsFunction::log_rho(double eps) const {
  switch (family_) {
    case OddsFamily::kExponential:
      return param_ * eps;
    case OddsFamily::kLinearTheta: {
      double t = 0.5 * param_ * eps;
      return std::log1p(t) - std::log1p(-t);
    }
    case OddsFamily::kConstantTheta:
      return std::log1p(param_) - std::log1p(-param_);
    case OddsFamily::kCustom:
      if (eps < min_eps() || eps > max_eps()) {
        std::ostringstream msg;
        msg << "odds table covers eps in [" << min_eps() << ", " << max_eps()
            << "], not " << eps;
        throw ValidationError(msg.str());
      }
      return table_->log_rho(eps);
  }
  return kNaN;
}

double OddsFunction::rho(double eps) const { return std::exp(log_rho(eps)); }

double OddsFunction::theta(double eps) const {
  switch (family_) {
    case OddsFamily::kExponential:
      return theta0(param_, eps);
    case OddsFamily::kLinearTheta:
      return 0.5 * param_ * eps;
    case OddsFamily::kConstantTheta:
      return param_;
    case OddsFamily::kCustom:
      return std::tanh(0.5 * log_rho(eps));
  }
  return kNaN;
}

std::string OddsFunction::describe() const {
  std::ostringstream out;
  out << to_string(family_);
  if (family_ == OddsFamily::kConstantTheta) {
    out << "(theta=" << param_ << ")";
  } else if (family_ != OddsFamily::kCustom) {
    out << "(beta=" << param_ << ")";
  } else {
    out << "(" << table_->eps.size() << " knots)";
  }
  return out.str();
}

double rho_from_theta(double theta) {
  if (theta >= 1.0) return kInf;
  return (1.0 + theta) / (1.0 - theta);
}

double theta_from_rho(double rho) {
  if (std::isinf(rho)) return 1.0;
  return (rho - 1.0) / (rho + 1.0);
}

double theta0(double beta, double eps) { return std::tanh(0.5 * beta * eps); }

GameBias GameBias::from_theta(double eps, double theta) {
  if (!(theta >= -1.0 && theta <= 1.0)) {
    throw ValidationError("theta must lie in [-1, 1]");
  }
  GameBias b;
  b.eps = eps;
  b.theta = theta;
  b.p = 0.5 * (1.0 + theta);
  b.rho = rho_from_theta(theta);
  return b;
}

GameBias GameBias::from_rho(double eps, double rho) {
  if (!(rho >= 0.0)) throw ValidationError("odds rho must be >= 0");
  GameBias b;
  b.eps = eps;
  b.rho = rho;
  b.theta = theta_from_rho(rho);
  b.p = std::isinf(rho) ? 1.0 : rho / (1.0 + rho);
  return b;
}

GameBias bias_for(const OddsFunction& odds, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ValidationError("epsilon must be positive");
  }
  const double theta = odds.theta(eps);
  const bool closed = odds.family() == OddsFamily::kConstantTheta;
  if (!std::isfinite(theta) || (closed ? std::abs(theta) > 1.0
                                       : std::abs(theta) >= 1.0)) {
    std::ostringstream msg;
    msg << odds.describe() << " at eps = " << eps << " gives theta = " << theta
        << " outside (-1, 1)";
    throw ValidationError(msg.str());
  }
  GameBias b = GameBias::from_theta(eps, theta);
  if (std::abs(theta) < 1.0) b.rho = std::exp(odds.log_rho(eps));
  return b;
}

LogShape log_shape(const OddsFunction& odds) {
  switch (odds.family()) {
    case OddsFamily::kExponential:
    case OddsFamily::kConstantTheta:
      return LogShape::kLinear;
    case OddsFamily::kLinearTheta: {
      const double beta = odds.beta();
      if (beta == 0.0) return LogShape::kLinear;
      // Dyadic second differences log rho(2e) - 2 log rho(e) + log rho(0)
      // on e = e_max / 2^k, staying where theta <= 1/2.
      const double e_max = 0.5 / std::abs(beta);
      std::vector<double> d;
      double scale = 0.0;
      for (int k = 0; k < 24; ++k) {
        double e = e_max / std::ldexp(1.0, k);
        double lr1 = odds.log_rho(e), lr2 = odds.log_rho(2 * e);
        d.push_back(lr2 - 2 * lr1);
        scale = std::max(scale, std::abs(lr2));
      }
      // Cubic-order differences shrink like e^3; rescale so the tolerance
      // does not swallow the sign at small e.
      for (int k = 0; k < static_cast<int>(d.size()); ++k) {
        d[k] *= std::ldexp(1.0, 3 * k);
      }
      return classify(d, scale);
    }
    case OddsFamily::kCustom: {
      // Shape of the tabulated data: second divided differences on the
      // knots. The interpolant's end slopes need not follow it.
      const std::vector<double> e = odds.knots();
      std::vector<double> slope, d;
      double scale = 0.0;
      for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        const double a = odds.log_rho(e[i]), b = odds.log_rho(e[i + 1]);
        slope.push_back((b - a) / (e[i + 1] - e[i]));
        scale = std::max({scale, std::abs(a), std::abs(b)});
      }
      for (std::size_t i = 0; i + 1 < slope.size(); ++i) {
        d.push_back((slope[i + 1] - slope[i]) * (e[i + 2] - e[i]));
      }
      return classify(d, scale);
    }
  }
  return LogShape::kUnknown;
}

}  // namespace btow
