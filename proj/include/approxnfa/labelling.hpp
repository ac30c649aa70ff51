#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "approxnfa/nfa.hpp"
#include "approxnfa/traffic.hpp"

namespace approxnfa {

/// Significance of every state: the number of sample packets over which the
/// state is reachable by some prefix. The initial state is reached by the
/// empty prefix of every packet, so counts[initial] == sample_size.
struct Labeling {
    std::vector<std::uint64_t> counts;
    std::uint64_t sample_size = 0;

    std::uint64_t operator[](StateId q) const { return counts.at(q); }
    std::size_t size() const noexcept { return counts.size(); }

    friend bool operator==(const Labeling&, const Labeling&) = default;
};

/// Runs the subset construction over every packet of the sample. With more
/// than one worker, packets are split across threads and the per-worker count
/// vectors are summed; the result equals the sequential one exactly.
Labeling label(const Nfa& nfa, const TrafficSample& sample, unsigned workers = 1);

/// counts[q] / sample_size. Throws ParameterError when the sample was empty.
double frequency(const Labeling& labeling, StateId q);

/// Throws ParameterError unless the labeling covers exactly the states of nfa.
void check_labeling(const Nfa& nfa, const Labeling& labeling);

struct LabelingFile {
    Labeling labeling;
    std::string nfa_hash;
};

// CSV with a two-line comment header:
//   # sample_size=<n>
//   # nfa_hash=<16 hex digits>
//   state,count
//   0,<count>
//   ...
void write_labeling(const Labeling& labeling, const Nfa& nfa, std::ostream& out);
void write_labeling(const Labeling& labeling, const Nfa& nfa, const std::filesystem::path& path);
LabelingFile parse_labeling(std::istream& in);
/// Reads a labeling and rejects it when its hash does not match nfa.
Labeling read_labeling(const std::filesystem::path& path, const Nfa& nfa);

} // namespace approxnfa
