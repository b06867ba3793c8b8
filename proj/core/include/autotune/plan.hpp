#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "autotune/tournament.hpp"

namespace autotune {

/// Parses and validates a YAML plan document. Unknown keys are rejected.
/// Throws PlanError carrying the offending key and line.
TournamentPlan parse_plan(std::string_view text);
TournamentPlan load_plan(const std::filesystem::path& path);

/// Fully resolved plan with every default written out. Parsing the dump
/// yields an identical plan.
std::string dump_plan(const TournamentPlan& plan);

}  // namespace autotune
