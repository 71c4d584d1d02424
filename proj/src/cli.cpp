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

#include "contest/cli.hpp"

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "contest/error.hpp"
#include "contest/report.hpp"

namespace contest::cli {
namespace {

struct SourceOpts {
  std::string family;
  std::string automaton;
  std::string size;  // --k or --margin; may be a range for sweep
  std::string margin;
  double reset_p = 0.0;
  int head_start = 0;
};

struct Common {
  std::string sf = "tullock:r=1";
  double prize = 1.0;
  std::string format = "json";
  std::string output;
  double damping = 0.5;
  double tol = 0.0;
  long max_iter = 1'000'000;
};

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    throw ValidationError(std::string("invalid integer for ") + what + ": '" + s + "'");
  }
  return v;
}

std::pair<int, int> parse_range(const std::string& s, const char* what) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const int v = parse_int(s, what);
    return {v, v};
  }
  const int lo = parse_int(s.substr(0, dots), what);
  const int hi = parse_int(s.substr(dots + 2), what);
  if (hi < lo) throw ValidationError(std::string("empty range for ") + what + ": '" + s + "'");
  return {lo, hi};
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--sf", c.sf, "success function, e.g. tullock:r=1")->capture_default_str();
  app->add_option("--prize", c.prize, "prize value v")->capture_default_str();
  app->add_option("--format", c.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app->add_option("--output", c.output, "write the report here instead of stdout");
  app->add_option("--damping", c.damping, "fixed-point damping in (0, 1]")->capture_default_str();
  app->add_option("--tol", c.tol, "fixed-point tolerance (0: 1e-12 v)")->capture_default_str();
  app->add_option("--max-iter", c.max_iter, "fixed-point iteration cap")->capture_default_str();
}

void add_source(CLI::App* app, SourceOpts& s) {
  app->add_option("--family", s.family, "best-of, tug-of-war, consecutive-win, mk1");
  app->add_option("--automaton", s.automaton, "contest rule as a JSON automaton file");
  app->add_option("--k", s.size, "K for best-of, consecutive-win, mk1 (sweep: a..b)");
  app->add_option("--margin", s.margin, "tug-of-war margin N (sweep: a..b)");
  app->add_option("--reset-p", s.reset_p, "tug-of-war reset probability")->capture_default_str();
  app->add_option("--head-start", s.head_start, "tug-of-war initial lead")->capture_default_str();
}

std::string size_text(const SourceOpts& s) {
  if (!s.size.empty() && !s.margin.empty()) {
    throw ValidationError("give either --k or --margin, not both");
  }
  const std::string& t = s.margin.empty() ? s.size : s.margin;
  if (t.empty()) throw ValidationError("--k or --margin is required with --family");
  return t;
}

FamilyParams family_params(const SourceOpts& s, int size) {
  FamilyParams fp;
  fp.family = parse_family(s.family);
  fp.size = size;
  fp.reset_p = s.reset_p;
  fp.head_start = s.head_start;
  if (fp.family != Family::kTugOfWar && (s.reset_p != 0.0 || s.head_start != 0)) {
    throw ValidationError("--reset-p and --head-start apply to tug-of-war only");
  }
  return fp;
}

CyclicOptions cyclic_options(const Common& c) {
  CyclicOptions o;
  o.damping = c.damping;
  o.tol = c.tol * c.prize;
  o.max_iter = c.max_iter;
  return o;
}

struct Loaded {
  std::optional<FamilyParams> fp;
  ContestSpec spec;
  ValueSolution sol;
};

Loaded load_and_solve(const SourceOpts& s, const Common& c) {
  if (s.family.empty() == s.automaton.empty()) {
    throw ValidationError("exactly one of --family and --automaton is required");
  }
  const SuccessFunctionSpec sf = SuccessFunctionSpec::parse(c.sf);
  const CyclicOptions opts = cyclic_options(c);
  if (!s.automaton.empty()) {
    if (!s.size.empty() || !s.margin.empty()) {
      throw ValidationError("--k/--margin cannot be combined with --automaton");
    }
    ContestSpec spec(load_automaton(s.automaton), sf, c.prize);
    ValueSolution sol = solve(spec, opts);
    return {std::nullopt, std::move(spec), std::move(sol)};
  }
  const FamilyParams fp = family_params(s, parse_int(size_text(s), "--k/--margin"));
  ContestSpec spec(build_family(fp), sf, c.prize);
  ValueSolution sol = solve_family(fp, sf, c.prize, opts);
  return {fp, std::move(spec), std::move(sol)};
}

void emit(const Common& c, const std::string& bytes, std::ostream& out) {
  if (c.output.empty()) {
    out << bytes;
  } else {
    write_atomic(c.output, bytes);
  }
}

void require_json(const Common& c, const char* cmd) {
  if (c.format != "json") throw ValidationError(std::string(cmd) + " emits JSON only");
}

int cmd_solve(const SourceOpts& s, const Common& c, std::ostream& out) {
  const Loaded l = load_and_solve(s, c);
  if (c.format == "csv") {
    emit(c, to_csv(l.sol, l.spec), out);
    return kExitOk;
  }
  Json j;
  j["solution"] = to_json(l.sol, l.spec);
  j["dissipation"] = to_json(rent_dissipation(l.sol, l.spec));
  const WinProbabilities q = win_probabilities(l.sol, l.spec);
  j["win_probabilities"] = to_json(q, l.spec.automaton);
  emit(c, dump_json(j), out);
  return kExitOk;
}

int cmd_sweep(const SourceOpts& s, const Common& c, std::ostream& out) {
  if (s.family.empty() || !s.automaton.empty()) {
    throw ValidationError("sweep needs --family (automaton files have no size parameter)");
  }
  const auto [lo, hi] = parse_range(size_text(s), "--k/--margin");
  const FamilyParams base = family_params(s, lo);
  const SuccessFunctionSpec sf = SuccessFunctionSpec::parse(c.sf);
  const SweepTable t = sweep(base, lo, hi, sf, c.prize, cyclic_options(c), true);
  emit(c, c.format == "csv" ? to_csv(t) : dump_json(to_json(t)), out);
  for (const SweepRow& r : t.rows) {
    if (!r.error.empty()) return kExitConvergence;
  }
  return kExitOk;
}

int cmd_simulate(const SourceOpts& s, const Common& c, const SimOptions& so, std::ostream& out) {
  require_json(c, "simulate");
  const Loaded l = load_and_solve(s, c);
  const SimulationSummary sum = simulate(l.sol, l.spec, so);
  Json j;
  j["summary"] = to_json(sum, l.spec.automaton);
  j["comparison"] = to_json(compare_sim_analytic(sum, l.sol, l.spec));
  emit(c, dump_json(j), out);
  return kExitOk;
}

std::optional<double> parse_epsilon(const std::string& e, bool& automatic) {
  automatic = e == "auto";
  if (e.empty() || automatic) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(e, &used);
    if (used != e.size()) throw std::invalid_argument(e);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("--epsilon must be a number or 'auto'");
  }
}

int cmd_check(const SourceOpts& s, const Common& c, const std::string& eps_text, int depth,
              std::ostream& out) {
  require_json(c, "check");
  const Loaded l = load_and_solve(s, c);
  const auto& m = l.spec.automaton;
  Json j;
  j["min_length"] = min_length(m) ? Json(*min_length(m)) : Json(nullptr);
  j["acyclic"] = is_acyclic(m);
  j["symmetric"] = find_mirror(m).has_value();
  j["exchangeability"] = to_json(check_exchangeable(m, depth > 0 ? depth : default_exchange_depth(m)));
  j["dissipation"] = to_json(rent_dissipation(l.sol, l.spec));
  j["residual"] = l.sol.residual;
  bool automatic = false;
  const auto eps = parse_epsilon(eps_text, automatic);
  if (automatic) {
    j["transient_dominance"] = to_json(transient_dominance_search(l.sol, l.spec));
  } else if (eps) {
    j["transient_dominance"] = to_json(transient_dominance(l.sol, l.spec, *eps));
  }
  emit(c, dump_json(j), out);
  return kExitOk;
}

struct IncOpts {
  std::string rounds = "1";
  double shock_q = 1.0;
  std::string sub = "mk1";
  int k = 1;
};

int cmd_incumbency(const IncOpts& io, const Common& c, const std::string& eps_text,
                   std::ostream& out) {
  require_json(c, "incumbency");
  IncumbencySpec spec;
  spec.shock_q = io.shock_q;
  spec.sub = {parse_sub_kind(io.sub), io.k};
  spec.sf = SuccessFunctionSpec::parse(c.sf);
  spec.prize = c.prize;
  bool automatic = false;
  const auto eps = parse_epsilon(eps_text, automatic);
  if (automatic) throw ValidationError("incumbency takes a numeric --epsilon");
  if (io.rounds == "auto") {
    if (!eps) throw ValidationError("--rounds auto needs --epsilon");
    const SubValues u = sub_values(spec.sub, spec.sf, 1.0);
    spec.rounds = rounds_for_reach(u.upset, spec.shock_q, *eps);
  } else {
    spec.rounds = parse_int(io.rounds, "--rounds");
  }
  const IncumbencyReport rep = solve_incumbency(spec);
  Json j = to_json(rep, spec);
  if (eps) j["transient_dominance"] = to_json(incumbency_transient_dominance(rep, spec, *eps));
  emit(c, dump_json(j), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium values, rent dissipation and diagnostics for dynamic contests",
               "contest"};
  app.require_subcommand(1);

  SourceOpts src;
  Common common;
  SimOptions sim;
  IncOpts inc;
  std::string eps_text;
  int depth = 0;

  auto* solve_cmd = app.add_subcommand("solve", "solve a contest and report values");
  auto* sweep_cmd = app.add_subcommand("sweep", "solve a family over a size range");
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo play of the equilibrium");
  auto* check_cmd = app.add_subcommand("check", "structure and transient-dominance diagnostics");
  auto* inc_cmd = app.add_subcommand("incumbency", "iterated incumbency contest");
  for (auto* cmd : {solve_cmd, sweep_cmd, sim_cmd, check_cmd}) {
    add_source(cmd, src);
    add_common(cmd, common);
  }
  add_common(inc_cmd, common);
  sim_cmd->add_option("--paths", sim.paths, "number of simulated contests")->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "generator seed")->capture_default_str();
  sim_cmd->add_option("--max-steps", sim.max_steps, "battle cap per path")->capture_default_str();
  check_cmd->add_option("--epsilon", eps_text, "epsilon in (0, 1/4) or 'auto'");
  check_cmd->add_option("--depth", depth, "exchangeability depth (default from the state graph)");
  inc_cmd->add_option("--rounds", inc.rounds, "number of rounds N, or 'auto'")->capture_default_str();
  inc_cmd->add_option("--shock-q", inc.shock_q, "shock probability q")->capture_default_str();
  inc_cmd->add_option("--sub", inc.sub, "mk1 or tow-head-start")->capture_default_str();
  inc_cmd->add_option("--k", inc.k, "subcontest size K")->capture_default_str();
  inc_cmd->add_option("--epsilon", eps_text, "certificate epsilon in (0, 1/4)");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "contest: " << e.what() << "\n" << "run 'contest --help' for usage\n";
    return kExitValidation;
  }

  try {
    if (*solve_cmd) return cmd_solve(src, common, out);
    if (*sweep_cmd) return cmd_sweep(src, common, out);
    if (*sim_cmd) return cmd_simulate(src, common, sim, out);
    if (*check_cmd) return cmd_check(src, common, eps_text, depth, out);
    if (*inc_cmd) return cmd_incumbency(inc, common, eps_text, out);
  } catch (const ConvergenceError& e) {
    Json j;
    j["error"] = e.what();
    j["residual"] = e.residual();
    j["iterations"] = e.iterations();
    try {
      emit(common, dump_json(j), out);
    } catch (const std::exception&) {
    }
    err << "contest: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const ValidationError& e) {
    err << "contest: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "contest: " << e.what() << "\n";
    return kExitValidation;
  } catch (const StructureError& e) {
    err << "contest: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "contest: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

int run(int argc, const char* const* argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace contest::cli
