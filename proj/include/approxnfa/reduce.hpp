#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "approxnfa/labelling.hpp"
#include "approxnfa/nfa.hpp"
#include "approxnfa/traffic.hpp"

namespace approxnfa {

enum class ReductionMethod { prune, merge, merge_prune, bfs };

std::string to_string(ReductionMethod m);
/// Accepts "prune", "merge", "merge-prune" and "bfs".
ReductionMethod parse_method(const std::string& name);

struct ReductionReport {
    ReductionMethod method = ReductionMethod::prune;
    std::size_t states_before = 0;
    std::size_t states_after = 0;
    /// Upper bound on the number of sample packets wrongly accepted after
    /// pruning: the summed significance of the border states. Absent for
    /// merge, and for bfs run without a labeling.
    std::optional<std::uint64_t> error_bound;
    std::optional<double> theta;
    std::optional<double> distance_ceiling;
    std::optional<double> frequency_ceiling;
    std::vector<StateId> removed;  ///< pruned states, original numbering
    std::vector<StateId> border;   ///< border states, original numbering

    double ratio_achieved() const {
        return states_before ? static_cast<double>(states_after) / static_cast<double>(states_before) : 1.0;
    }
    std::string to_json() const;
};

struct Reduction {
    Nfa nfa;
    ReductionReport report;
};

/// m = ceil(theta * n) computed so that e.g. 0.6 * 5 yields exactly 3.
/// Throws ParameterError unless theta is in (0, 1].
std::size_t target_states(double theta, std::size_t n);

/// Removes `removed` (which must not contain the initial state) and makes
/// every surviving state with a transition into it final. Surviving states
/// keep their relative order. Border states inherit the rule tags of the
/// final states they could reach through removed states.
Reduction prune_states(const Nfa& nfa, const std::vector<StateId>& removed, const Labeling* labeling);

/// Removes the |Q| - ceil(theta*|Q|) least significant states (ties: higher
/// id removed first; the initial state is never removed).
Reduction prune(const Nfa& nfa, const Labeling& labeling, double theta);

/// Significance ratio of two neighbouring states. Both zero gives 1, exactly
/// one zero gives infinity.
double state_distance(std::uint64_t a, std::uint64_t b);

/// Equivalence classes (sorted, one entry per state) of the closure of
/// { (q, r) neighbours | d(q, r) <= D, f(q) <= F, f(r) <= F }.
std::vector<std::vector<StateId>> merge_classes(const Nfa& nfa, const Labeling& labeling, double distance_ceiling,
                                                double frequency_ceiling);

struct MergeResult {
    Reduction reduction;
    std::vector<StateId> class_of;  ///< original state -> merged state
    Labeling labeling;              ///< significance of merged states: max over members
};

/// Collapses every class of merge_classes into one state. Transitions among
/// members become self-loops; duplicate transitions are coalesced.
MergeResult merge_detailed(const Nfa& nfa, const Labeling& labeling, double distance_ceiling,
                           double frequency_ceiling);
Reduction merge(const Nfa& nfa, const Labeling& labeling, double distance_ceiling, double frequency_ceiling);

/// Merge, then prune to ceil(theta * |Q_original|) states using the merged labeling.
Reduction merge_prune(const Nfa& nfa, const Labeling& labeling, double distance_ceiling,
                      double frequency_ceiling, double theta);

/// Prunes the states farthest (BFS depth) from the initial state; unreachable
/// states count as deepest. A labeling, when given, only feeds the error bound.
Reduction bfs_reduce(const Nfa& nfa, double theta, const Labeling* labeling = nullptr);

/// Parameters of one reduction run, used by sweeps and the CLI.
struct ReductionParams {
    ReductionMethod method = ReductionMethod::prune;
    double theta = 1.0;
    double distance_ceiling = 1.0;
    double frequency_ceiling = 1.0;
};

Reduction reduce(const Nfa& nfa, const Labeling& labeling, const ReductionParams& params);

/// Spot check for externally produced automata: returns the first packet of
/// the sample accepted by `precise` but not by `candidate`, if any.
std::optional<std::string> find_inclusion_violation(const Nfa& precise, const Nfa& candidate,
                                                    const TrafficSample& sample);

} // namespace approxnfa
