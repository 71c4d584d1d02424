// Copyright 2026 The contest-lab Authors
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

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "contest/automaton.hpp"
#include "contest/kernels.hpp"
#include "contest/success.hpp"

namespace contest {

enum class SolveMethod { kBackward, kClosedTow, kClosedCw, kFixedPoint };
std::string to_string(SolveMethod m);

/// Equilibrium values for every state, indexed by StateId. Terminal entries
/// hold (v, 0) or (0, v) and zero efforts.
struct ValueSolution {
  SolveMethod method = SolveMethod::kBackward;
  double prize = 1.0;
  double residual = 0.0;
  long iterations = 0;
  StateId start = 0;
  std::vector<StateValue> states;

  double v0_a() const { return states.at(start).value_a; }
  double v0_b() const { return states.at(start).value_b; }
  std::vector<double> values_a() const;
  std::vector<double> values_b() const;
};

enum class CyclicStart { kZero, kLinear };

struct CyclicOptions {
  /// kZero starts every nonterminal value at 0. kLinear interpolates by
  /// family coordinate; under steep SFs it can settle on a zero-stake
  /// plateau instead of the equilibrium.
  CyclicStart start = CyclicStart::kZero;
  double damping = 0.5;
  double tol = 0.0;  // 0 selects 1e-12 * prize
  long max_iter = 1'000'000;
  bool parallel = true;
  /// Every polish_every sweeps, once the residual is below 1e-4 v, a Newton
  /// step with a finite-difference Jacobian is tried and kept if it lowers
  /// the residual. 0 disables. Damped Jacobi alone needs more than 10^5
  /// sweeps for reset tug-of-war at margin 30.
  long polish_every = 25;
};

ValueSolution solve_finite(const ContestSpec& spec);

ValueSolution solve_cyclic(const ContestSpec& spec, const CyclicOptions& opts = {});

/// Backward induction when acyclic, damped fixed point otherwise.
ValueSolution solve(const ContestSpec& spec, const CyclicOptions& opts = {});

/// Sup over nonterminal states and players of |V - T(V)|.
double residual(const ContestSpec& spec, const std::vector<double>& va,
                const std::vector<double>& vb);
double residual(const ContestSpec& spec, const ValueSolution& sol);

/// Fills stakes, efforts and win probabilities from given values and
/// records the Bellman residual.
ValueSolution complete_solution(const ContestSpec& spec, std::vector<double> va,
                                std::vector<double> vb, SolveMethod method, long iterations);

// ---- tug-of-war closed form -----------------------------------------------

struct TowTrace {
  int margin = 0;
  std::vector<double> delta_tilde;  // index i + margin, i in [-margin, margin]
  std::vector<double> theta;        // theta[k-1] for k = 1..margin-1
};

ValueSolution solve_tow_closed(int margin, double reset_p, int head_start,
                               const SuccessFunctionSpec& sf, double prize,
                               TowTrace* trace = nullptr);

// ---- consecutive-win closed form ------------------------------------------

struct CwTrace {
  double rho = 1.0;
  double p_k = 1.0;
  double w = 0.0;  // value after a single win
  double u = 0.0;  // value after a single loss
  double xi_residual = 0.0;
  std::vector<double> a;  // a[j] = V(-K + j)
  std::vector<double> b;  // b[j] = V(K - j)
};

/// Root of r -> psi^{K-1}(r) = 1 on [1, inf).
double cw_rho(const SuccessFunctionSpec& sf, int k);

/// Runs the K-1 step iteration from (0, v) using the candidate (u, w) and
/// returns the end point; (u, w) is a fixed point iff the result equals it.
std::pair<double, double> cw_xi(const SuccessFunctionSpec& sf, int k, double prize, double u,
                                double w);

ValueSolution solve_consecutive_closed(int k, const SuccessFunctionSpec& sf, double prize,
                                       CwTrace* trace = nullptr);

// ---- shipped families -----------------------------------------------------

enum class Family { kBestOf, kTugOfWar, kConsecutiveWin, kMk1 };
Family parse_family(std::string_view name);
std::string to_string(Family f);

struct FamilyParams {
  Family family = Family::kBestOf;
  int size = 1;  // K for best-of, consecutive-win, mk1; margin for tug-of-war
  double reset_p = 0.0;
  int head_start = 0;
};

ContestAutomaton build_family(const FamilyParams& fp);

/// Closed forms where available for the SF, generic solvers otherwise.
ValueSolution solve_family(const FamilyParams& fp, const SuccessFunctionSpec& sf, double prize,
                           const CyclicOptions& opts = {});

}  // namespace contest
