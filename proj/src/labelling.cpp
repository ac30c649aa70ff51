#include "approxnfa/labelling.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "approxnfa/error.hpp"
#include "approxnfa/nfa_io.hpp"
#include "approxnfa/parallel.hpp"

namespace approxnfa {

unsigned default_workers() {
    if (const char* env = std::getenv("APPROXNFA_WORKERS")) {
        unsigned v = 0;
        auto [p, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (ec == std::errc{} && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Labeling label(const Nfa& nfa, const TrafficSample& sample, unsigned workers) {
    std::vector<const TrafficSample::Entries::value_type*> packets;
    packets.reserve(sample.distinct());
    for (const auto& e : sample.entries()) packets.push_back(&e);

    std::vector<std::vector<std::uint64_t>> partial;
    auto run = [&](unsigned w, std::size_t begin, std::size_t end) {
        Simulator sim(nfa);
        auto& counts = partial[w];
        for (std::size_t i = begin; i < end; ++i) {
            const auto& [packet, occurrences] = *packets[i];
            sim.for_each_reached(packet, [&counts, n = occurrences](StateId q) { counts[q] += n; });
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(packets.size(), 1))));
    partial.assign(workers, std::vector<std::uint64_t>(nfa.num_states(), 0));
    parallel_chunks(packets.size(), workers, run);

    Labeling result{std::move(partial[0]), sample.total_packets()};
    for (std::size_t w = 1; w < partial.size(); ++w)
        for (std::size_t q = 0; q < result.counts.size(); ++q) result.counts[q] += partial[w][q];
    return result;
}

double frequency(const Labeling& labeling, StateId q) {
    if (labeling.sample_size == 0) throw ParameterError("frequency is undefined for an empty sample");
    return static_cast<double>(labeling[q]) / static_cast<double>(labeling.sample_size);
}

void check_labeling(const Nfa& nfa, const Labeling& labeling) {
    if (labeling.counts.size() != nfa.num_states())
        throw ParameterError("labeling covers " + std::to_string(labeling.counts.size()) + " states, automaton has " +
                             std::to_string(nfa.num_states()));
}

void write_labeling(const Labeling& labeling, const Nfa& nfa, std::ostream& out) {
    check_labeling(nfa, labeling);
    out << "# sample_size=" << labeling.sample_size << '\n';
    out << "# nfa_hash=" << nfa_hash_hex(nfa) << '\n';
    out << "state,count\n";
    for (std::size_t q = 0; q < labeling.counts.size(); ++q) out << q << ',' << labeling.counts[q] << '\n';
}

void write_labeling(const Labeling& labeling, const Nfa& nfa, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_labeling(labeling, nfa, out);
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw ParseError(line, "bad integer '" + std::string(s) + "'");
    return v;
}

} // namespace

LabelingFile parse_labeling(std::istream& in) {
    LabelingFile file;
    bool have_size = false, have_header = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view body = std::string_view(line).substr(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            if (body.rfind("sample_size=", 0) == 0) {
                file.labeling.sample_size = parse_u64(body.substr(12), lineno);
                have_size = true;
            } else if (body.rfind("nfa_hash=", 0) == 0) {
                file.nfa_hash = std::string(body.substr(9));
            }
            continue;
        }
        if (!have_header) {
            if (line != "state,count") throw ParseError(lineno, "expected header 'state,count'");
            have_header = true;
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(lineno, "expected '<state>,<count>'");
        auto q = parse_u64(std::string_view(line).substr(0, comma), lineno);
        auto c = parse_u64(std::string_view(line).substr(comma + 1), lineno);
        if (q != file.labeling.counts.size()) throw ParseError(lineno, "states must be listed densely in order");
        file.labeling.counts.push_back(c);
    }
    if (!have_size) throw ParseError(0, "labeling is missing its sample_size header");
    if (!have_header) throw ParseError(0, "labeling is missing its column header");
    for (auto c : file.labeling.counts)
        if (c > file.labeling.sample_size) throw ParseError(0, "count exceeds sample size");
    return file;
}

Labeling read_labeling(const std::filesystem::path& path, const Nfa& nfa) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open labeling file " + path.string());
    auto file = parse_labeling(in);
    auto expected = nfa_hash_hex(nfa);
    if (file.nfa_hash != expected)
        throw InputError("labeling " + path.string() + " was computed for automaton " + file.nfa_hash +
                         ", not " + expected);
    check_labeling(nfa, file.labeling);
    return std::move(file.labeling);
}

} // namespace approxnfa
