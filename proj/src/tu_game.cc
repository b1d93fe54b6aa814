// Copyright 2026 The pmarket Authors.
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

#include "pmarket/tu_game.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pmarket {
namespace {

// The indifference formulas are only trusted above this denominator.
constexpr double kDenominatorFloor = 1e-12;

struct LinearPiece {
  double slope;
  double intercept;
  double operator()(double x) const { return slope * x + intercept; }
};

// argmin over x in [0, 1] of max(f1(x), f2(x)). The envelope is convex, so
// the minimum sits at an endpoint or at the crossing of the two pieces.
double ArgminUpperEnvelope(const LinearPiece& f1, const LinearPiece& f2) {
  auto envelope = [&](double x) { return std::max(f1(x), f2(x)); };
  double best_x = 0.0;
  double best = envelope(0.0);
  auto consider = [&](double x) {
    const double v = envelope(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  };
  const double ds = f1.slope - f2.slope;
  if (ds != 0.0) {
    const double cross = (f2.intercept - f1.intercept) / ds;
    if (cross > 0.0 && cross < 1.0) consider(cross);
  }
  consider(1.0);
  return best_x;
}

}  // namespace

PayoffMatrix::PayoffMatrix(double a11, double a12, double a21, double a22)
    : entries_{a11, a12, a21, a22} {}

int PayoffMatrix::Index(int m, int n) {
  if (m < 1 || m > 2 || n < 1 || n > 2) {
    throw std::out_of_range("payoff matrix index out of range");
  }
  return (m - 1) * 2 + (n - 1);
}

bool PayoffMatrix::AllFinite() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double x) { return std::isfinite(x); });
}

PayoffMatrix PayoffMatrix::Transposed() const {
  return PayoffMatrix(at(1, 1), at(2, 1), at(1, 2), at(2, 2));
}

PayoffMatrix operator-(const PayoffMatrix& lhs, const PayoffMatrix& rhs) {
  PayoffMatrix out;
  for (int i = 0; i < 4; ++i) out.entries_[i] = lhs.entries_[i] - rhs.entries_[i];
  return out;
}

PayoffMatrix operator+(const PayoffMatrix& lhs, const PayoffMatrix& rhs) {
  PayoffMatrix out;
  for (int i = 0; i < 4; ++i) out.entries_[i] = lhs.entries_[i] + rhs.entries_[i];
  return out;
}

PayoffMatrix operator*(double k, const PayoffMatrix& m) {
  PayoffMatrix out;
  for (int i = 0; i < 4; ++i) out.entries_[i] = k * m.entries_[i];
  return out;
}

std::string PayoffMatrix::ToString() const {
  std::ostringstream os;
  os << "[[" << at(1, 1) << ", " << at(1, 2) << "], [" << at(2, 1) << ", "
     << at(2, 2) << "]]";
  return os.str();
}

double ExpectedPayoff(const PayoffMatrix& m, double p, double q) {
  return p * q * m.at(1, 1) + p * (1.0 - q) * m.at(1, 2) +
         (1.0 - p) * q * m.at(2, 1) + (1.0 - p) * (1.0 - q) * m.at(2, 2);
}

BestAction BestJointAction(const PayoffMatrix& a, const PayoffMatrix& b) {
  BestAction best{{1, 1}, a.at(1, 1) + b.at(1, 1)};
  for (int m = 1; m <= 2; ++m) {
    for (int n = 1; n <= 2; ++n) {
      const double total = a.at(m, n) + b.at(m, n);
      if (total > best.omega_star) best = {{m, n}, total};
    }
  }
  return best;
}

bool FindSaddlePoint(const PayoffMatrix& c, JointAction* saddle) {
  // Row player maximizes, column player minimizes.
  int best_row = 1;
  double max_min = std::min(c.at(1, 1), c.at(1, 2));
  if (std::min(c.at(2, 1), c.at(2, 2)) > max_min) {
    best_row = 2;
    max_min = std::min(c.at(2, 1), c.at(2, 2));
  }
  int best_col = 1;
  double min_max = std::max(c.at(1, 1), c.at(2, 1));
  if (std::max(c.at(1, 2), c.at(2, 2)) < min_max) {
    best_col = 2;
    min_max = std::max(c.at(1, 2), c.at(2, 2));
  }
  if (max_min != min_max) return false;
  if (saddle != nullptr) *saddle = {best_row, best_col};
  return true;
}

MinimaxSolution SolveMinimax2x2(const PayoffMatrix& c) {
  // Column player: minimize the row player's best response.
  const LinearPiece row1{c.at(1, 1) - c.at(1, 2), c.at(1, 2)};
  const LinearPiece row2{c.at(2, 1) - c.at(2, 2), c.at(2, 2)};
  const double q = ArgminUpperEnvelope(row1, row2);

  // Row player: the same program on -C^T.
  const LinearPiece col1{-(c.at(1, 1) - c.at(2, 1)), -c.at(2, 1)};
  const LinearPiece col2{-(c.at(1, 2) - c.at(2, 2)), -c.at(2, 2)};
  const double p = ArgminUpperEnvelope(col1, col2);

  return {p, q, ExpectedPayoff(c, p, q)};
}

ThreatPoint ThreatStrategy(const PayoffMatrix& a, const PayoffMatrix& b) {
  const PayoffMatrix c = a - b;
  ThreatPoint threat;
  JointAction saddle;
  if (FindSaddlePoint(c, &saddle)) {
    threat.kind = ThreatKind::kSaddle;
    threat.p = saddle.m == 1 ? 1.0 : 0.0;
    threat.q = saddle.n == 1 ? 1.0 : 0.0;
  } else {
    threat.kind = ThreatKind::kMixed;
    const double denom = c.at(1, 1) + c.at(2, 2) - c.at(1, 2) - c.at(2, 1);
    bool closed_form = false;
    if (std::abs(denom) > kDenominatorFloor) {
      const double p = (c.at(2, 2) - c.at(2, 1)) / denom;
      const double q = (c.at(2, 2) - c.at(1, 2)) / denom;
      if (p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0) {
        threat.p = p;
        threat.q = q;
        closed_form = true;
      }
    }
    if (!closed_form) {
      const MinimaxSolution mm = SolveMinimax2x2(c);
      threat.p = mm.p;
      threat.q = mm.q;
    }
  }
  threat.s_a = ExpectedPayoff(a, threat.p, threat.q);
  threat.s_b = ExpectedPayoff(b, threat.p, threat.q);
  return threat;
}

TuSolution SolveTuGame(const PayoffMatrix& a, const PayoffMatrix& b) {
  if (!a.AllFinite() || !b.AllFinite()) {
    throw std::invalid_argument("payoff matrices must be finite");
  }
  TuSolution sol;
  const BestAction best = BestJointAction(a, b);
  sol.action = best.action;
  sol.omega_star = best.omega_star;
  sol.threat = ThreatStrategy(a, b);

  const double a_star = a.at(sol.action.m, sol.action.n);
  const double b_star = b.at(sol.action.m, sol.action.n);
  const double s_a = sol.threat.s_a;
  const double s_b = sol.threat.s_b;
  const double sigma_from_a = (-sol.omega_star - s_a + s_b) / 2.0 + a_star;
  const double sigma_from_b = (sol.omega_star - s_a + s_b) / 2.0 - b_star;
  if (std::abs(sigma_from_a - sigma_from_b) > kGameTolerance) {
    std::ostringstream os;
    os << "side payment formulas disagree: " << sigma_from_a << " vs "
       << sigma_from_b << " for A=" << a.ToString() << " B=" << b.ToString();
    throw InconsistencyError(os.str());
  }
  sol.sigma = sigma_from_a;
  return sol;
}

}  // namespace pmarket
