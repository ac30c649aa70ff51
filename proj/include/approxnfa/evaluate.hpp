#pragma once

#include <cstdint>
#include <string>

#include "approxnfa/nfa.hpp"
#include "approxnfa/traffic.hpp"

namespace approxnfa {

/// Comparison of a reduced automaton against the precise one on a test sample.
/// Counts are per packet occurrence.
struct EvalResult {
    std::uint64_t a_tp = 0;  ///< accepted by both
    std::uint64_t a_fp = 0;  ///< accepted by the reduced automaton only
    std::uint64_t a_fn = 0;  ///< accepted by the precise automaton only
    std::uint64_t sample_size = 0;
    double ap = 1.0;    ///< a_tp / (a_tp + a_fp); 1.0 when nothing was accepted
    double prob = 0.0;  ///< (a_tp + a_fp) / sample_size
    bool no_acceptances = false;

    /// A valid over-approximation never loses an accepted packet.
    bool violates_inclusion() const noexcept { return a_fn != 0; }
    std::string to_json() const;

    friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

/// Throws ParameterError on an empty sample.
EvalResult evaluate(const Nfa& precise, const Nfa& reduced, const TrafficSample& test, unsigned workers = 1);

/// Fraction of packet occurrences the automaton accepts.
double estimate_accept_prob(const Nfa& nfa, const TrafficSample& sample, unsigned workers = 1);

/// Number of packet occurrences the automaton accepts.
std::uint64_t count_accepted(const Nfa& nfa, const TrafficSample& sample, unsigned workers = 1);

} // namespace approxnfa
