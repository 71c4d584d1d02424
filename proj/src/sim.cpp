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

#include "contest/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "contest/error.hpp"
#include "contest/kernels.hpp"
#include "contest/metrics.hpp"

namespace contest {

std::uint64_t SplitMix64::mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix(state_);
}

std::uint64_t SplitMix64::path_seed(std::uint64_t seed, std::uint64_t path) noexcept {
  return mix(seed + (path + 1) * 0x9e3779b97f4a7c15ULL);
}

namespace {

struct PathResult {
  double effort = 0.0;
  long length = 0;
  signed char outcome = 2;  // 0 A, 1 B, 2 truncated
};

struct Tally {
  std::vector<long> visits, visiting, a_after;
  std::vector<std::uint64_t> stamp;
  std::vector<StateId> first_seen;
  explicit Tally(std::size_t n)
      : visits(n, 0), visiting(n, 0), a_after(n, 0),
        stamp(n, std::numeric_limits<std::uint64_t>::max()) {}
};

PathResult run_path(const ContestSpec& spec, const ValueSolution& sol, const SimOptions& opts,
                    std::uint64_t path, Tally& t) {
  const auto& m = spec.automaton;
  SplitMix64 rng(SplitMix64::path_seed(opts.seed, path));
  PathResult r;
  t.first_seen.clear();
  StateId s = m.start();
  while (!m.is_terminal(s)) {
    if (r.length >= opts.max_steps) return r;
    const StateValue& st = sol.states[s];
    ++t.visits[s];
    if (t.stamp[s] != path) {
      t.stamp[s] = path;
      t.first_seen.push_back(s);
    }
    r.effort += st.effort_a + st.effort_b;
    ++r.length;
    const Player w = rng.uniform() < st.win_prob_a ? Player::kA : Player::kB;
    const Outcome& out = m.next(s, w);
    if (out.size() == 1) {
      s = out.front().to;
    } else {
      double u = rng.uniform();
      s = out.back().to;
      for (const Branch& b : out) {
        if (u < b.prob) {
          s = b.to;
          break;
        }
        u -= b.prob;
      }
    }
  }
  r.outcome = *m.winner(s) == Player::kA ? 0 : 1;
  for (StateId f : t.first_seen) {
    ++t.visiting[f];
    if (r.outcome == 0) ++t.a_after[f];
  }
  return r;
}

void check_inputs(const ValueSolution& sol, const ContestSpec& spec, const SimOptions& opts) {
  if (sol.states.size() != spec.automaton.size()) {
    throw DomainError("simulate: solution does not belong to this contest (unsolved spec?)");
  }
  if (opts.paths < 1) throw DomainError("simulate: paths must be at least 1");
  if (opts.max_steps < 1) throw DomainError("simulate: max_steps must be at least 1");
}

// Neumaier compensated sum in path order.
double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + c;
}

SimulationSummary summarize(const SimOptions& opts, const std::vector<PathResult>& results,
                            std::vector<Tally>& tallies, std::size_t n_states) {
  SimulationSummary out;
  out.paths = opts.paths;
  out.seed = opts.seed;
  out.max_steps = opts.max_steps;
  out.visits.assign(n_states, 0);
  out.paths_visiting.assign(n_states, 0);
  out.a_wins_after.assign(n_states, 0);
  for (const Tally& t : tallies) {
    for (std::size_t s = 0; s < n_states; ++s) {
      out.visits[s] += t.visits[s];
      out.paths_visiting[s] += t.visiting[s];
      out.a_wins_after[s] += t.a_after[s];
    }
  }
  const auto n = static_cast<double>(results.size());
  std::vector<double> buf(results.size());
  long a_wins = 0, length = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    buf[i] = results[i].effort;
    a_wins += results[i].outcome == 0;
    out.truncated_paths += results[i].outcome == 2;
    length += results[i].length;
  }
  out.mean_total_effort = compensated_sum(buf) / n;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double d = results[i].effort - out.mean_total_effort;
    buf[i] = d * d;
  }
  const double var = results.size() > 1 ? compensated_sum(buf) / (n - 1.0) : 0.0;
  out.se_total_effort = std::sqrt(var / n);
  out.win_freq_a = static_cast<double>(a_wins) / n;
  const double win_var =
      results.size() > 1 ? out.win_freq_a * (1.0 - out.win_freq_a) * n / (n - 1.0) : 0.0;
  out.se_win = std::sqrt(win_var / n);
  out.mean_length = static_cast<double>(length) / n;
  return out;
}

SimulationSummary simulate_impl(const ValueSolution& sol, const ContestSpec& spec,
                                const SimOptions& opts, int threads) {
  check_inputs(sol, spec, opts);
  const std::size_t n_states = spec.automaton.size();
  std::vector<PathResult> results(static_cast<std::size_t>(opts.paths));
  std::vector<Tally> tallies(static_cast<std::size_t>(threads), Tally(n_states));
  const long paths = opts.paths;
#pragma omp parallel for schedule(static) num_threads(threads)
  for (long p = 0; p < paths; ++p) {
    Tally& t = tallies[static_cast<std::size_t>(omp_get_thread_num())];
    results[static_cast<std::size_t>(p)] =
        run_path(spec, sol, opts, static_cast<std::uint64_t>(p), t);
  }
  return summarize(opts, results, tallies, n_states);
}

}  // namespace

SimulationSummary simulate(const ValueSolution& sol, const ContestSpec& spec,
                           const SimOptions& opts) {
  const int cap = thread_cap_from_env();
  return simulate_impl(sol, spec, opts, cap > 0 ? cap : omp_get_max_threads());
}

SimulationSummary simulate_serial(const ValueSolution& sol, const ContestSpec& spec,
                                  const SimOptions& opts) {
  return simulate_impl(sol, spec, opts, 1);
}

namespace {

ZRow make_row(std::string name, double analytic, double empirical, double se, double z_limit) {
  ZRow r{std::move(name), analytic, empirical, se, 0.0, true};
  const double diff = empirical - analytic;
  if (se > 0.0) {
    r.z = diff / se;
  } else {
    r.z = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  r.pass = std::abs(r.z) <= z_limit;
  return r;
}

}  // namespace

SimComparison compare_sim_analytic(const SimulationSummary& summary, const ValueSolution& sol,
                                   const ContestSpec& spec, double z_limit, long min_paths) {
  SimComparison cmp;
  if (summary.paths < 2) {
    cmp.skipped = true;
    cmp.notice = "fewer than 2 paths: standard errors undefined, comparison skipped";
    return cmp;
  }
  if (summary.visits.size() != spec.automaton.size() ||
      sol.states.size() != spec.automaton.size()) {
    throw DomainError("compare_sim_analytic: summary, solution and contest do not match");
  }
  const double n = static_cast<double>(summary.paths);
  const double effort = spec.prize - sol.v0_a() - sol.v0_b();
  cmp.rows.push_back(make_row("total_effort", effort, summary.mean_total_effort,
                              summary.se_total_effort, z_limit));
  const WinProbabilities q = win_probabilities(sol, spec);
  const double qa = q.q_a[spec.automaton.start()];
  cmp.rows.push_back(
      make_row("win_freq_a", qa, summary.win_freq_a, std::sqrt(qa * (1.0 - qa) / n), z_limit));
  for (StateId s = 0; s < spec.automaton.size(); ++s) {
    const long k = summary.paths_visiting[s];
    if (k < min_paths || s == spec.automaton.start()) continue;
    const double p = q.q_a[s];
    const double emp = static_cast<double>(summary.a_wins_after[s]) / static_cast<double>(k);
    cmp.rows.push_back(make_row("Q_A|" + spec.automaton.label(s), p, emp,
                                std::sqrt(p * (1.0 - p) / static_cast<double>(k)), z_limit));
  }
  for (const ZRow& r : cmp.rows) {
    cmp.all_pass = cmp.all_pass && r.pass;
    cmp.max_abs_z = std::max(cmp.max_abs_z, std::abs(r.z));
  }
  return cmp;
}

}  // namespace contest
