#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "approxnfa/nfa.hpp"

namespace approxnfa {

/// LUT estimate for a synthesized automaton: a linear model in the number of
/// states and (src, dst) transition classes, or a per-candidate override.
struct CostModel {
    double per_state = 2.0;
    double per_transition = 0.25;
    double overhead = 50.0;
    std::map<std::string, double, std::less<>> overrides;  ///< candidate id -> LUTs

    /// Throws ParameterError on negative weights or non-positive overrides.
    void validate() const;
};

/// Override for candidate_id when present, otherwise
/// overhead + per_state * |Q| + per_transition * (number of transitions).
double lut_estimate(const CostModel& model, const Nfa& nfa, std::string_view candidate_id = {});

/// key=value lines (per_state, per_transition, overhead); '#' comments.
CostModel parse_cost_model(std::istream& in);
CostModel read_cost_model(const std::filesystem::path& path);
/// CSV "candidate_id,luts" with an optional header line.
void read_overrides(std::istream& in, CostModel& model);
void read_overrides(const std::filesystem::path& path, CostModel& model);

} // namespace approxnfa
