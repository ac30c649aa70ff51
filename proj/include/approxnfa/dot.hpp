#pragma once

#include <filesystem>
#include <iosfwd>

#include "approxnfa/labelling.hpp"
#include "approxnfa/nfa.hpp"

namespace approxnfa {

/// Position of a significance count on the heat gradient, in [0, 1]:
/// log(1 + count) / log(1 + sample_size). Zero when the sample is empty.
double heat_level(std::uint64_t count, std::uint64_t sample_size);

/// Graphviz digraph. With a labeling, nodes are filled on a blue (cold) to
/// red (hot) gradient of their log-scaled significance and carry the count
/// in their label. Output is deterministic.
void export_dot(const Nfa& nfa, const Labeling* labeling, std::ostream& out);
void export_dot(const Nfa& nfa, const Labeling* labeling, const std::filesystem::path& path);

} // namespace approxnfa
