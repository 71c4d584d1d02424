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

#include "contest/automaton.hpp"
#include "contest/incumbency.hpp"
#include "contest/metrics.hpp"
#include "contest/sim.hpp"
#include "contest/solver.hpp"

#include "json.hpp"

namespace contest {

using Json = nlohmann::ordered_json;

/// Serializes with 17 significant digits per float. Non-finite numbers are
/// rejected with ValidationError; optional quantities are emitted as null.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const ValueSolution& sol, const ContestSpec& spec);
Json to_json(const DissipationReport& r);
DissipationReport dissipation_from_json(const Json& j);
Json to_json(const WinProbabilities& q, const ContestAutomaton& m);
Json to_json(const AdvantageProfile& p);
Json to_json(const std::vector<ReinforcementRow>& rows);
Json to_json(const TransientDominanceReport& r);
Json to_json(const SweepTable& t);
Json to_json(const TowPlateau& p);
Json to_json(const IncumbencyReport& r, const IncumbencySpec& spec);
Json to_json(const SimulationSummary& s, const ContestAutomaton& m);
Json to_json(const SimComparison& c);
Json to_json(const ExchangeabilityResult& r);

inline constexpr std::string_view kSweepCsvHeader =
    "param,V0_A,V0_B,total_effort,dissipation,thm1_bound,min_length";

/// Failed rows keep their param and leave the other cells empty.
std::string to_csv(const SweepTable& t);
/// One row per state: id,label,V_A,V_B,stake_A,stake_B,x_A,x_B,p_A.
std::string to_csv(const ValueSolution& sol, const ContestSpec& spec);

Json automaton_to_json(const ContestAutomaton& m);
ContestAutomaton automaton_from_json(const Json& j);
ContestAutomaton load_automaton(const std::string& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, std::string_view bytes);

}  // namespace contest
