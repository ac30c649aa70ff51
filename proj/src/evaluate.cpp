#include "approxnfa/evaluate.hpp"

#include <vector>

#include "approxnfa/error.hpp"
#include "approxnfa/parallel.hpp"
#include "json.hpp"

namespace approxnfa {
namespace {

using EntryPtr = const TrafficSample::Entries::value_type*;

std::vector<EntryPtr> entry_list(const TrafficSample& sample) {
    std::vector<EntryPtr> v;
    v.reserve(sample.distinct());
    for (const auto& e : sample.entries()) v.push_back(&e);
    return v;
}

} // namespace

std::string EvalResult::to_json() const {
    nlohmann::ordered_json j;
    j["a_tp"] = a_tp;
    j["a_fp"] = a_fp;
    j["a_fn"] = a_fn;
    j["sample_size"] = sample_size;
    j["ap"] = ap;
    j["prob"] = prob;
    j["no_acceptances"] = no_acceptances;
    j["inclusion_violation"] = violates_inclusion();
    return j.dump(2);
}

EvalResult evaluate(const Nfa& precise, const Nfa& reduced, const TrafficSample& test, unsigned workers) {
    if (test.empty()) throw ParameterError("evaluation needs a non-empty test sample");
    auto packets = entry_list(test);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(packets.size(), 1))));
    std::vector<EvalResult> partial(workers);
    parallel_chunks(packets.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        Simulator p(precise), r(reduced);
        auto& acc = partial[w];
        for (std::size_t i = begin; i < end; ++i) {
            const auto& [packet, count] = *packets[i];
            bool in_precise = p.accepts_prefix(packet);
            bool in_reduced = r.accepts_prefix(packet);
            if (in_precise && in_reduced) acc.a_tp += count;
            else if (in_reduced) acc.a_fp += count;
            else if (in_precise) acc.a_fn += count;
        }
    });
    EvalResult res;
    for (const auto& p : partial) {
        res.a_tp += p.a_tp;
        res.a_fp += p.a_fp;
        res.a_fn += p.a_fn;
    }
    res.sample_size = test.total_packets();
    std::uint64_t accepted = res.a_tp + res.a_fp;
    res.no_acceptances = accepted == 0;
    res.ap = accepted ? static_cast<double>(res.a_tp) / static_cast<double>(accepted) : 1.0;
    res.prob = static_cast<double>(accepted) / static_cast<double>(res.sample_size);
    return res;
}

std::uint64_t count_accepted(const Nfa& nfa, const TrafficSample& sample, unsigned workers) {
    auto packets = entry_list(sample);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(packets.size(), 1))));
    std::vector<std::uint64_t> partial(workers, 0);
    parallel_chunks(packets.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        Simulator sim(nfa);
        for (std::size_t i = begin; i < end; ++i)
            if (sim.accepts_prefix(packets[i]->first)) partial[w] += packets[i]->second;
    });
    std::uint64_t total = 0;
    for (auto c : partial) total += c;
    return total;
}

double estimate_accept_prob(const Nfa& nfa, const TrafficSample& sample, unsigned workers) {
    if (sample.empty()) throw ParameterError("acceptance probability needs a non-empty sample");
    return static_cast<double>(count_accepted(nfa, sample, workers)) / static_cast<double>(sample.total_packets());
}

} // namespace approxnfa
