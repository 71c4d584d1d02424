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

#include "contest/report.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "contest/error.hpp"

namespace contest {
namespace {

std::string fmt17(double x) {
  if (!std::isfinite(x)) throw ValidationError("refusing to serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void emit(const Json& j, std::string& out, int indent, int level) {
  const bool pretty = indent >= 0;
  const auto newline = [&](int lvl) {
    if (!pretty) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * lvl), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        out += Json(it.key()).dump();
        out += pretty ? ": " : ":";
        emit(it.value(), out, indent, level + 1);
      }
      newline(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        newline(level + 1);
        emit(v, out, indent, level + 1);
      }
      newline(level);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      out += fmt17(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Json or_null(const std::optional<double>& x) {
  return x && std::isfinite(*x) ? Json(*x) : Json(nullptr);
}

Json or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json or_null(const std::optional<int>& x) { return x ? Json(*x) : Json(nullptr); }

Json terminal_json(const std::optional<Player>& p) {
  if (!p) return nullptr;
  return std::string(1, to_char(*p));
}

Json family_json(const FamilyParams& fp) {
  Json j;
  j["family"] = to_string(fp.family);
  j["size"] = fp.size;
  if (fp.family == Family::kTugOfWar) {
    j["reset_p"] = fp.reset_p;
    j["head_start"] = fp.head_start;
  }
  return j;
}

Json ids_json(const std::vector<StateId>& ids) {
  Json a = Json::array();
  for (StateId s : ids) a.push_back(s);
  return a;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, out, indent, 0);
  if (indent >= 0) out += '\n';
  return out;
}

Json to_json(const ValueSolution& sol, const ContestSpec& spec) {
  const auto& m = spec.automaton;
  Json j;
  j["method"] = to_string(sol.method);
  j["sf"] = spec.sf.to_string();
  j["prize"] = sol.prize;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["start"] = sol.start;
  j["V0_A"] = sol.v0_a();
  j["V0_B"] = sol.v0_b();
  Json states = Json::array();
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    const StateValue& v = sol.states[s];
    Json row;
    row["id"] = s;
    row["label"] = m.label(s);
    row["V_A"] = v.value_a;
    row["V_B"] = v.value_b;
    row["stake_A"] = v.stake_a;
    row["stake_B"] = v.stake_b;
    row["x_A"] = v.effort_a;
    row["x_B"] = v.effort_b;
    row["p_A"] = v.win_prob_a;
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  return j;
}

Json to_json(const DissipationReport& r) {
  Json j;
  j["prize"] = r.prize;
  j["total_effort"] = r.total_effort;
  j["dissipation_ratio"] = r.dissipation_ratio;
  j["V0_A"] = r.v0_a;
  j["V0_B"] = r.v0_b;
  j["min_length"] = or_null(r.min_length);
  j["balanced_gain"] = r.balanced_gain;
  j["thm1_bound"] = r.thm1_bound;
  j["bound_satisfied"] = r.bound_satisfied;
  return j;
}

DissipationReport dissipation_from_json(const Json& j) {
  try {
    DissipationReport r;
    r.prize = j.at("prize").get<double>();
    r.total_effort = j.at("total_effort").get<double>();
    r.dissipation_ratio = j.at("dissipation_ratio").get<double>();
    r.v0_a = j.at("V0_A").get<double>();
    r.v0_b = j.at("V0_B").get<double>();
    if (!j.at("min_length").is_null()) r.min_length = j.at("min_length").get<int>();
    r.balanced_gain = j.at("balanced_gain").get<double>();
    r.thm1_bound = j.at("thm1_bound").get<double>();
    r.bound_satisfied = j.at("bound_satisfied").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("dissipation report: ") + e.what());
  }
}

Json to_json(const WinProbabilities& q, const ContestAutomaton& m) {
  Json rows = Json::array();
  for (StateId s = 0; s < m.size(); ++s) {
    Json row;
    row["id"] = s;
    row["label"] = m.label(s);
    row["Q_A"] = q.q_a[s];
    row["Q_B"] = q.q_b[s];
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const AdvantageProfile& p) {
  Json j;
  j["family"] = to_string(p.family);
  j["size"] = p.size;
  j["tail_start"] = or_null(p.tail_start);
  j["log10_tail_bound"] = or_null(p.log10_tail_bound);
  Json rows = Json::array();
  for (const AdvantageRow& r : p.rows) {
    Json row;
    row["i"] = r.coord;
    row["Q"] = r.q;
    row["one_minus_Q"] = r.one_minus_q;
    row["log10_one_minus_Q"] = or_null(r.log10_one_minus_q);
    row["gain_ratio"] = r.gain_ratio;
    row["log10_odds"] = or_null(r.log10_odds);
    row["tail_ratio"] = or_null(r.tail_ratio);
    row["log10_tail_ratio"] = or_null(r.log10_tail_ratio);
    row["tail_identity_residual"] = or_null(r.tail_identity_residual);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const std::vector<ReinforcementRow>& rows) {
  Json a = Json::array();
  for (const ReinforcementRow& r : rows) {
    Json row;
    row["i"] = r.i;
    row["log10_lhs"] = or_null(r.log10_lhs);
    Json f = Json::array();
    for (double x : r.log10_factors) f.push_back(or_null(x));
    row["log10_factors"] = std::move(f);
    row["rel_residual"] = r.rel_residual;
    a.push_back(std::move(row));
  }
  return a;
}

Json to_json(const TransientDominanceReport& r) {
  Json j;
  j["epsilon"] = r.epsilon;
  j["searched"] = r.searched;
  j["set_a_minus"] = ids_json(r.set_a_minus);
  j["set_b_minus"] = ids_json(r.set_b_minus);
  j["labels_a_minus"] = r.labels_a_minus;
  j["labels_b_minus"] = r.labels_b_minus;
  j["reach_both_prob"] = r.reach_both_prob;
  j["satisfied"] = r.satisfied;
  j["implied_effort_floor"] = r.implied_effort_floor;
  j["measured_effort"] = r.measured_effort;
  j["floor_holds"] = r.floor_holds;
  j["max_weak_value"] = r.max_weak_value;
  return j;
}

Json to_json(const SweepTable& t) {
  Json j;
  j["base"] = family_json(t.base);
  j["sf"] = t.sf;
  j["prize"] = t.prize;
  Json rows = Json::array();
  for (const SweepRow& r : t.rows) {
    Json row;
    row["param"] = r.param;
    if (!r.error.empty()) {
      row["error"] = r.error;
    } else {
      row["V0_A"] = r.v0_a;
      row["V0_B"] = r.v0_b;
      row["total_effort"] = r.total_effort;
      row["dissipation"] = r.dissipation;
      row["thm1_bound"] = r.thm1_bound;
      row["min_length"] = or_null(r.min_length);
    }
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const TowPlateau& p) {
  Json j;
  j["dissipation"] = p.dissipation;
  Json inc = Json::array();
  for (double x : p.log10_increment) inc.push_back(or_null(x));
  j["log10_increment"] = std::move(inc);
  j["increment_sign"] = p.increment_sign;
  j["increments_positive"] = p.increments_positive;
  j["increments_shrinking"] = p.increments_shrinking;
  j["extrapolated_supremum"] = or_null(p.extrapolated_supremum);
  j["margin_below_one"] = or_null(p.margin_below_one);
  return j;
}

Json to_json(const IncumbencyReport& r, const IncumbencySpec& spec) {
  Json j;
  j["rounds_total"] = spec.rounds;
  j["shock_q"] = spec.shock_q;
  j["sub"] = {{"kind", to_string(spec.sub.kind)}, {"k", spec.sub.k}};
  j["sf"] = spec.sf.to_string();
  j["prize"] = spec.prize;
  j["v_plus_unit"] = r.v_plus_unit;
  j["v_minus_unit"] = r.v_minus_unit;
  j["upset_unit"] = r.upset_unit;
  j["bias_ratio"] = or_null(r.bias_ratio);
  j["log10_bias_ratio"] = r.log10_bias_ratio;
  j["scaled"] = r.scaled;
  j["start_value"] = r.start_value;
  j["dissipation"] = to_json(r.dissipation);
  Json rounds = Json::array();
  for (const RoundValues& v : r.rounds) {
    Json row;
    row["round"] = v.round;
    row["w_plus"] = v.w_plus;
    row["w_minus"] = v.w_minus;
    row["v_n"] = v.v_n;
    row["upset"] = v.upset;
    row["log10_bias_ratio"] = v.log10_bias_ratio;
    rounds.push_back(std::move(row));
  }
  j["rounds"] = std::move(rounds);
  Json traj = Json::array();
  for (const TrajectoryPoint& p : r.trajectory) {
    Json row;
    row["round"] = p.round;
    row["incumbent"] = std::string(1, to_char(p.incumbent));
    row["V_A"] = p.value_a;
    row["V_B"] = p.value_b;
    traj.push_back(std::move(row));
  }
  j["trajectory"] = std::move(traj);
  j["notes"] = r.notes;
  return j;
}

Json to_json(const SimulationSummary& s, const ContestAutomaton& m) {
  Json j;
  j["paths"] = s.paths;
  j["seed"] = s.seed;
  j["max_steps"] = s.max_steps;
  j["generator"] = "splitmix64";
  j["mean_total_effort"] = s.mean_total_effort;
  j["se_total_effort"] = s.se_total_effort;
  j["win_freq_a"] = s.win_freq_a;
  j["se_win"] = s.se_win;
  j["mean_length"] = s.mean_length;
  j["truncated_paths"] = s.truncated_paths;
  Json states = Json::array();
  for (StateId id = 0; id < m.size(); ++id) {
    if (m.is_terminal(id)) continue;
    Json row;
    row["id"] = id;
    row["label"] = m.label(id);
    row["visits"] = s.visits[id];
    row["paths_visiting"] = s.paths_visiting[id];
    row["a_wins_after"] = s.a_wins_after[id];
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  return j;
}

Json to_json(const SimComparison& c) {
  Json j;
  j["skipped"] = c.skipped;
  if (!c.notice.empty()) j["notice"] = c.notice;
  j["all_pass"] = c.all_pass;
  j["max_abs_z"] = or_null(c.max_abs_z);
  Json rows = Json::array();
  for (const ZRow& r : c.rows) {
    Json row;
    row["name"] = r.name;
    row["analytic"] = r.analytic;
    row["empirical"] = r.empirical;
    row["se"] = r.se;
    row["z"] = or_null(r.z);
    row["pass"] = r.pass;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const ExchangeabilityResult& r) {
  Json j;
  j["exchangeable"] = r.exchangeable;
  j["depth"] = r.depth;
  if (r.witness) {
    j["witness"] = {to_string(r.witness->first), to_string(r.witness->second)};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

std::string to_csv(const SweepTable& t) {
  std::ostringstream os;
  os << kSweepCsvHeader << '\n';
  for (const SweepRow& r : t.rows) {
    os << r.param;
    if (r.error.empty()) {
      os << ',' << fmt17(r.v0_a) << ',' << fmt17(r.v0_b) << ',' << fmt17(r.total_effort) << ','
         << fmt17(r.dissipation) << ',' << fmt17(r.thm1_bound) << ',';
      if (r.min_length) os << *r.min_length;
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string to_csv(const ValueSolution& sol, const ContestSpec& spec) {
  std::ostringstream os;
  os << "id,label,V_A,V_B,stake_A,stake_B,x_A,x_B,p_A\n";
  const auto& m = spec.automaton;
  for (StateId s = 0; s < m.size(); ++s) {
    if (m.is_terminal(s)) continue;
    const StateValue& v = sol.states[s];
    os << s << ",\"" << m.label(s) << "\"," << fmt17(v.value_a) << ',' << fmt17(v.value_b) << ','
       << fmt17(v.stake_a) << ',' << fmt17(v.stake_b) << ',' << fmt17(v.effort_a) << ','
       << fmt17(v.effort_b) << ',' << fmt17(v.win_prob_a) << '\n';
  }
  return os.str();
}

Json automaton_to_json(const ContestAutomaton& m) {
  Json j;
  Json states = Json::array();
  Json edges = Json::array();
  for (StateId s = 0; s < m.size(); ++s) {
    Json st;
    st["id"] = s;
    st["label"] = m.label(s);
    st["terminal"] = terminal_json(m.winner(s));
    states.push_back(std::move(st));
    if (m.is_terminal(s)) continue;
    for (Player w : {Player::kA, Player::kB}) {
      Json e;
      e["from"] = s;
      e["winner"] = std::string(1, to_char(w));
      Json to = Json::array();
      for (const Branch& b : m.next(s, w)) to.push_back({{"state", b.to}, {"prob", b.prob}});
      e["to"] = std::move(to);
      edges.push_back(std::move(e));
    }
  }
  j["states"] = std::move(states);
  j["start"] = m.start();
  j["edges"] = std::move(edges);
  return j;
}

ContestAutomaton automaton_from_json(const Json& j) {
  try {
    std::map<long long, StateId> index;
    std::vector<StateInfo> infos;
    for (const auto& st : j.at("states")) {
      const long long id = st.at("id").get<long long>();
      if (!index.emplace(id, infos.size()).second) {
        throw ValidationError("automaton: duplicate state id " + std::to_string(id));
      }
      StateInfo info;
      info.label = st.contains("label") ? st.at("label").get<std::string>() : std::to_string(id);
      const auto& term = st.at("terminal");
      if (!term.is_null()) {
        const auto w = term.get<std::string>();
        if (w != "A" && w != "B") throw ValidationError("automaton: terminal must be A, B or null");
        info.terminal = w == "A" ? Player::kA : Player::kB;
      }
      infos.push_back(std::move(info));
    }
    const auto lookup = [&](long long id) {
      const auto it = index.find(id);
      if (it == index.end()) throw ValidationError("automaton: unknown state id " + std::to_string(id));
      return it->second;
    };
    std::vector<std::array<Outcome, 2>> outcomes(infos.size());
    std::vector<std::array<bool, 2>> seen(infos.size(), {false, false});
    for (const auto& e : j.at("edges")) {
      const StateId from = lookup(e.at("from").get<long long>());
      const auto w = e.at("winner").get<std::string>();
      if (w != "A" && w != "B") throw ValidationError("automaton: edge winner must be A or B");
      const std::size_t k = w == "A" ? 0 : 1;
      if (seen[from][k]) throw ValidationError("automaton: duplicate edge from state " + infos[from].label);
      seen[from][k] = true;
      for (const auto& b : e.at("to")) {
        outcomes[from][k].push_back({lookup(b.at("state").get<long long>()), b.at("prob").get<double>()});
      }
    }
    return ContestAutomaton(std::move(infos), lookup(j.at("start").get<long long>()),
                            std::move(outcomes));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("automaton JSON: ") + e.what());
  }
}

ContestAutomaton load_automaton(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open automaton file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("automaton file '" + path + "': " + e.what());
  }
  return automaton_from_json(j);
}

void write_atomic(const std::string& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ContestError("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ContestError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ContestError("cannot replace '" + path + "': " + ec.message());
  }
}

}  // namespace contest
