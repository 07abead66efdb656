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

// Odds and bias arithmetic. A coin that player I wins with probability
// p = (1 + theta) / 2 has odds rho = (1 + theta) / (1 - theta) to 1.

#ifndef BTOW_BIAS_H_
#define BTOW_BIAS_H_

#include <memory>
#include <string>
#include <vector>

namespace btow {

enum class OddsFamily {
  kExponential,    // rho(eps) = exp(beta * eps)
  kLinearTheta,    // theta(eps) = beta * eps / 2
  kConstantTheta,  // theta(eps) = theta_bar
  kCustom,         // tabulated eps -> rho, monotone cubic in log rho
};

enum class LogShape { kConcave, kConvex, kLinear, kUnknown };

const char* to_string(OddsFamily family);
const char* to_string(LogShape shape);

class OddsFunction {
 public:
  static OddsFunction exponential(double beta);
  static OddsFunction linear_theta(double beta);
  static OddsFunction constant_theta(double theta);
  // eps must be strictly increasing with at least 2 samples, rho > 0.
  static OddsFunction custom(std::vector<double> eps, std::vector<double> rho);
  // Two-column text table "eps,rho" (comma or whitespace separated, '#'
  // comments and a non-numeric header line allowed).
  static OddsFunction load_table(const std::string& path);

  OddsFamily family() const { return family_; }
  // Drift coefficient rho'(0). NaN for constant theta and for tables that do
  // not reach eps = 0.
  double beta() const;
  double rho(double eps) const;
  double theta(double eps) const;
  double log_rho(double eps) const;
  // Range of eps covered (custom tables only; [0, inf) otherwise).
  double min_eps() const;
  double max_eps() const;
  // Tabulated eps values; empty unless custom.
  std::vector<double> knots() const;
  std::string describe() const;

 private:
  struct Table;

  OddsFamily family_ = OddsFamily::kExponential;
  double param_ = 0.0;
  std::shared_ptr<const Table> table_;
};

struct GameBias {
  double eps = 0.0;
  double theta = 0.0;
  double p = 0.5;    // P(player I wins the toss)
  double rho = 1.0;  // +inf when theta = 1

  // theta in [-1, 1].
  static GameBias from_theta(double eps, double theta);
  // rho in [0, inf].
  static GameBias from_rho(double eps, double rho);
};

double rho_from_theta(double theta);
double theta_from_rho(double rho);

// tanh(beta * eps / 2), the bias of the odds exp(beta * eps).
double theta0(double beta, double eps);

// Throws ValidationError for eps <= 0, |theta| >= 1 (|theta| > 1 for
// constant theta) or eps outside a custom table.
GameBias bias_for(const OddsFunction& odds, double eps);

// Concavity of eps -> log rho(eps). Exponential and constant-theta odds are
// linear; the rest are classified from second differences.
LogShape log_shape(const OddsFunction& odds);

}  // namespace btow

#endif  // BTOW_BIAS_H_
