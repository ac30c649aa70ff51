#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "approxnfa/cost.hpp"
#include "approxnfa/evaluate.hpp"
#include "approxnfa/labelling.hpp"
#include "approxnfa/reduce.hpp"

namespace approxnfa {

/// Parameter grid of a reduction sweep. prune and bfs use thetas, merge uses
/// distances x frequencies, merge-prune the full product.
struct SweepGrid {
    std::vector<ReductionMethod> methods;
    std::vector<double> thetas;
    std::vector<double> distances;
    std::vector<double> frequencies;
    bool include_precise = true;

    /// Expands the grid; throws ParameterError when a method lacks a parameter list.
    std::vector<ReductionParams> points() const;
};

/// Stable identifier of a grid point, e.g. "prune-t0.5" or "merge-prune-D1.5-F0.1-t0.2".
std::string candidate_id(const ReductionParams& p);

struct SweepEntry {
    std::string id;
    bool precise = false;
    std::optional<ReductionParams> params;  ///< empty for the precise automaton
    Nfa nfa;
    std::optional<ReductionReport> report;
    EvalResult eval;
    double cost = 0;
};

/// Reduces the precise automaton at every grid point, evaluates each result on
/// the test sample and attaches its cost. Grid points run in parallel; the
/// output order is the grid order (precise first) independent of workers.
std::vector<SweepEntry> sweep(const Nfa& precise, const Labeling& training, const TrafficSample& test,
                              const SweepGrid& grid, const CostModel& cost, unsigned workers = 1);

/// a dominates b on (cost, prob, inexactness) where only the precise automaton
/// is exact: no worse in all three and strictly better in one.
bool dominates(const SweepEntry& a, const SweepEntry& b);

/// Indices of the non-dominated entries, in input order. Of several entries
/// with identical (cost, prob, exactness) only the first is kept.
std::vector<std::size_t> pareto_front(const std::vector<SweepEntry>& entries);

/// CSV columns: id,method,theta,D,F,states,cost,ap,prob,precise.
void write_sweep_csv(const std::vector<SweepEntry>& entries, const std::vector<std::size_t>& rows, std::ostream& out);

} // namespace approxnfa
