#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "approxnfa/error.hpp"
#include "approxnfa/nfa.hpp"

namespace approxnfa {

// Supported regex subset (bytes, not code points):
//   literals, \xNN, \n \r \t \f \v \e \a \0, escaped metacharacters,
//   \d \D \w \W \s \S, classes [...] with ranges, negation and [:posix:] names,
//   ., *, +, ?, {m}, {m,}, {m,n}, |, (...), (?:...), named groups,
//   ^ at the start of a top-level alternative,
//   flags: leading (?i) / (?s), or /pattern/flags delimiters with i, s
//   (m is accepted when the pattern has no ^).
// Matching is a search: an alternative without ^ may start anywhere in the
// packet. Backreferences, lookaround, lazy/possessive quantifiers, $ and word
// boundaries raise UnsupportedFeature.

struct CompileOptions {
    bool case_insensitive = false;
    bool dot_all = false;                 ///< '.' also matches '\n'
    std::size_t repetition_cap = 64;      ///< largest m or n allowed in {m,n}
};

/// Compiles one pattern into an epsilon-free automaton with prefix-acceptance
/// semantics. Transitions leaving final states are dropped and states that
/// cannot reach a final state are trimmed; numbering follows BFS order.
Nfa compile_regex(std::string_view pattern, const CompileOptions& options = {});

struct Rule {
    std::string id;
    std::string pattern;
};
using RuleSet = std::vector<Rule>;

/// Error raised while compiling one member of a rule set.
class RuleCompileError : public Error {
public:
    RuleCompileError(const std::string& rule_id, const Error& inner)
        : Error(inner.kind(), inner.code(), "rule '" + rule_id + "': " + inner.what()), rule_id_(rule_id) {}

    const std::string& rule_id() const noexcept { return rule_id_; }

private:
    std::string rule_id_;
};

/// Union automaton of all rules sharing one initial state. Final states are
/// tagged with the ids of the rules they complete. An empty set yields an
/// automaton that accepts nothing.
Nfa compile_ruleset(const RuleSet& rules, const CompileOptions& options = {});

/// Rule file: one "id<TAB>pattern" per line; lines starting with '#' and blank
/// lines are skipped. Duplicate ids are rejected.
RuleSet parse_rules(std::istream& in);
RuleSet read_rules(const std::filesystem::path& path);

} // namespace approxnfa
