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

#ifndef PMARKET_TU_GAME_H_
#define PMARKET_TU_GAME_H_

#include <array>
#include <stdexcept>
#include <string>

// Two-player 2x2 transferable-utility games.
//
// Player A picks the row m, player B picks the column n. Action 1 is the
// action each player prefers, action 2 the one it dislikes. All payoffs are
// in cents.

namespace pmarket {

// Absolute tolerance (cents) for every equality check in the game layer.
inline constexpr double kGameTolerance = 1e-9;

class PayoffMatrix {
 public:
  PayoffMatrix() = default;
  PayoffMatrix(double a11, double a12, double a21, double a22);

  // 1-based access, m and n in {1, 2}.
  double at(int m, int n) const { return entries_[Index(m, n)]; }
  double& at(int m, int n) { return entries_[Index(m, n)]; }

  bool AllFinite() const;
  PayoffMatrix Transposed() const;

  friend PayoffMatrix operator-(const PayoffMatrix& lhs,
                                const PayoffMatrix& rhs);
  friend PayoffMatrix operator+(const PayoffMatrix& lhs,
                                const PayoffMatrix& rhs);
  friend PayoffMatrix operator*(double k, const PayoffMatrix& m);
  bool operator==(const PayoffMatrix&) const = default;

  std::string ToString() const;

 private:
  static int Index(int m, int n);
  std::array<double, 4> entries_{0.0, 0.0, 0.0, 0.0};
};

// Expected payoff [p, 1-p] M [q, 1-q]^T.
double ExpectedPayoff(const PayoffMatrix& m, double p, double q);

struct JointAction {
  int m = 1;
  int n = 1;
  bool operator==(const JointAction&) const = default;
};

enum class ThreatKind { kSaddle, kMixed };

// The disagreement point. p is the probability A plays m = 1, q the
// probability B plays n = 1.
struct ThreatPoint {
  double p = 1.0;
  double q = 1.0;
  double s_a = 0.0;
  double s_b = 0.0;
  ThreatKind kind = ThreatKind::kSaddle;
};

struct TuSolution {
  JointAction action;
  double omega_star = 0.0;
  ThreatPoint threat;
  // Positive when A pays B.
  double sigma = 0.0;

  double PayoffA(const PayoffMatrix& a) const {
    return a.at(action.m, action.n) - sigma;
  }
  double PayoffB(const PayoffMatrix& b) const {
    return b.at(action.m, action.n) + sigma;
  }
};

struct MinimaxSolution {
  double p = 0.0;
  double q = 0.0;
  double value = 0.0;
};

// Raised when the two algebraically identical side-payment formulas disagree.
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Joint action maximizing A + B. Ties go to the lexicographically smallest
// (m, n).
struct BestAction {
  JointAction action;
  double omega_star = 0.0;
};
BestAction BestJointAction(const PayoffMatrix& a, const PayoffMatrix& b);

// Pure saddle point of the zero-sum game C, if one exists. Exact comparison.
bool FindSaddlePoint(const PayoffMatrix& c, JointAction* saddle);

// Minimax mixed strategies of the zero-sum game C (row player maximizes)
// by closed-form evaluation of the two linear pieces on [0, 1].
MinimaxSolution SolveMinimax2x2(const PayoffMatrix& c);

// Threat strategies of the zero-sum game A - B; saddle point when one exists,
// otherwise the indifference formulas, otherwise the minimax program.
ThreatPoint ThreatStrategy(const PayoffMatrix& a, const PayoffMatrix& b);

// Natural-compromise solution. Throws InconsistencyError if the two side
// payment formulas disagree by more than kGameTolerance.
TuSolution SolveTuGame(const PayoffMatrix& a, const PayoffMatrix& b);

}  // namespace pmarket

#endif  // PMARKET_TU_GAME_H_
