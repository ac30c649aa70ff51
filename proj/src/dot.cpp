#include "approxnfa/dot.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "approxnfa/error.hpp"
#include "approxnfa/nfa_io.hpp"

namespace approxnfa {
namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

std::string edge_label(const ByteClass& cls) {
    if (cls == ByteClass::all()) return "any";
    std::string out;
    auto render = [](std::uint8_t b) {
        char buf[8];
        if (b > 0x20 && b < 0x7f && b != '"' && b != '\\' && b != ',' && b != '-')
            return std::string(1, static_cast<char>(b));
        std::snprintf(buf, sizeof buf, "\\\\x%02x", b);
        return std::string(buf);
    };
    for (auto [lo, hi] : cls.ranges()) {
        if (!out.empty()) out += ',';
        out += render(lo);
        if (hi != lo) out += '-' + render(hi);
    }
    return out;
}

} // namespace

double heat_level(std::uint64_t count, std::uint64_t sample_size) {
    if (sample_size == 0) return 0.0;
    return std::log1p(static_cast<double>(count)) / std::log1p(static_cast<double>(sample_size));
}

void export_dot(const Nfa& nfa, const Labeling* labeling, std::ostream& out) {
    if (labeling) check_labeling(nfa, *labeling);
    out << "digraph nfa {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle";
    if (labeling) out << ", style=filled";
    out << "];\n";
    out << "  __start [shape=point];\n";
    out << "  __start -> " << nfa.initial() << ";\n";
    for (StateId q = 0; q < nfa.num_states(); ++q) {
        out << "  " << q << " [label=\"" << escape(nfa.display_name(q));
        if (labeling) out << "\\n" << labeling->counts[q];
        out << '"';
        if (nfa.is_final(q)) out << ", shape=doublecircle";
        if (labeling) {
            // Hue 0.667 is blue, 0.0 is red.
            double t = heat_level(labeling->counts[q], labeling->sample_size);
            char color[32];
            std::snprintf(color, sizeof color, "%.3f 0.700 1.000", 0.667 * (1.0 - t));
            out << ", fillcolor=\"" << color << '"';
        }
        out << "];\n";
    }
    for (const auto& t : nfa.transitions())
        out << "  " << t.src << " -> " << t.dst << " [label=\"" << edge_label(t.symbols) << "\"];\n";
    out << "}\n";
}

void export_dot(const Nfa& nfa, const Labeling* labeling, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    export_dot(nfa, labeling, out);
}

} // namespace approxnfa
