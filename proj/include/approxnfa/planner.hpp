#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace approxnfa {

/// One element of the Pareto set offered to the planner.
struct Candidate {
    std::string id;
    double lut = 0;      ///< resources of one instance
    double accpt = 0;    ///< probability that an input packet is accepted
    bool precise = false;
};

enum class Objective {
    min_resources,  ///< minimise total LUTs subject to out_n <= max_output
    min_output,     ///< minimise out_n subject to total LUTs <= budget
};

struct PlanProblem {
    std::vector<Candidate> candidates;
    double input_rate = 0;         ///< out_0, Gbps
    double engine_throughput = 0;  ///< Gbps handled by one automaton instance
    std::size_t max_stages = 1;
    bool exact_stages = false;     ///< only plans with exactly max_stages stages
    Objective objective = Objective::min_resources;
    std::optional<double> max_output;  ///< X, Gbps; required for min_resources
    std::optional<double> budget;      ///< Y, LUTs; required for min_output, optional otherwise

    /// Throws ParameterError on any violated precondition.
    void validate() const;
    /// The designated precise candidate: the flagged one, else the lowest accpt.
    std::size_t precise_index() const;
};

struct Stage {
    std::size_t candidate = 0;     ///< index into PlanProblem::candidates
    std::string candidate_id;
    std::uint64_t replicas = 0;    ///< ceil(input / throughput)
    double input_rate = 0;         ///< out_{i-1}
    double output_rate = 0;        ///< out_i = out_0 * accpt
    double resources = 0;          ///< replicas * lut
};

struct StagePlan {
    std::vector<Stage> stages;
    double total_resources = 0;
    double output_rate = 0;

    std::string to_json() const;
    std::vector<std::string> candidate_ids() const;
};

struct PlanOutcome {
    std::optional<StagePlan> plan;
    /// When infeasible: "output" if no plan meets max_output regardless of the
    /// budget, "resources" if some do but all exceed the budget.
    std::string binding_constraint;
    std::size_t explored = 0;  ///< search nodes visited

    bool feasible() const noexcept { return plan.has_value(); }
};

/// ceil(rate / throughput), robust to representation error (20/6.4 -> 4, 16/1.6 -> 10).
std::uint64_t replicas_needed(double rate, double throughput);

/// Builds the plan for a fixed stage assignment (indices into candidates).
StagePlan evaluate_assignment(const PlanProblem& problem, const std::vector<std::size_t>& assignment);
StagePlan evaluate_assignment(const PlanProblem& problem, const std::vector<std::string>& ids);

/// True when the plan respects max_output and budget (when set).
bool within_bounds(const PlanProblem& problem, const StagePlan& plan);

/// Strict preference between two plans under the problem's objective:
/// objective value, then the other metric, then fewer stages, then lower
/// final accpt, then lexicographic candidate ids.
bool plan_better(const PlanProblem& problem, const StagePlan& a, const StagePlan& b);

/// Exact branch-and-bound search over stage assignments with non-increasing accpt.
PlanOutcome solve(const PlanProblem& problem);

/// Every assignment with 1..max_stages (or exactly max_stages) stages and
/// non-increasing accpt, in enumeration order, regardless of bounds.
std::vector<StagePlan> enumerate_plans(const PlanProblem& problem);

/// Fixed-width table with one row per plan ("16xA2  4xA3  7200").
std::string format_plan_table(const std::vector<StagePlan>& plans, const PlanProblem& problem);

/// Candidates CSV: header naming at least id, cost (or lut) and prob (or accpt);
/// an optional "precise" column holds 0/1.
std::vector<Candidate> parse_candidates_csv(std::istream& in);
std::vector<Candidate> read_candidates_csv(const std::filesystem::path& path);

/// Problem JSON: {"candidates":[{"id","lut","accpt","precise"?}...] | "candidates_csv": path,
/// "input_rate", "throughput", "stages", "exact_stages"?, "objective": "rsc"|"out",
/// "max_output"?, "budget"?}. A relative candidates_csv is resolved against base_dir.
PlanProblem parse_problem_json(const std::string& text, const std::filesystem::path& base_dir = {});
PlanProblem read_problem(const std::filesystem::path& path);

} // namespace approxnfa
