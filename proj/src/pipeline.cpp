#include "approxnfa/pipeline.hpp"

#include <cstdio>
#include <ostream>

#include "approxnfa/error.hpp"
#include "approxnfa/parallel.hpp"

namespace approxnfa {
namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

std::vector<ReductionParams> SweepGrid::points() const {
    if (methods.empty()) throw ParameterError("sweep grid has no reduction methods");
    auto need = [](const std::vector<double>& v, const char* what, ReductionMethod m) {
        if (v.empty()) throw ParameterError(to_string(m) + " needs a non-empty " + what + " list");
    };
    std::vector<ReductionParams> out;
    for (auto m : methods) {
        switch (m) {
        case ReductionMethod::prune:
        case ReductionMethod::bfs:
            need(thetas, "theta", m);
            for (double t : thetas) out.push_back({m, t, 1.0, 1.0});
            break;
        case ReductionMethod::merge:
            need(distances, "distance", m);
            need(frequencies, "frequency", m);
            for (double d : distances)
                for (double f : frequencies) out.push_back({m, 1.0, d, f});
            break;
        case ReductionMethod::merge_prune:
            need(thetas, "theta", m);
            need(distances, "distance", m);
            need(frequencies, "frequency", m);
            for (double d : distances)
                for (double f : frequencies)
                    for (double t : thetas) out.push_back({m, t, d, f});
            break;
        }
    }
    return out;
}

std::string candidate_id(const ReductionParams& p) {
    std::string id = to_string(p.method);
    if (p.method == ReductionMethod::merge || p.method == ReductionMethod::merge_prune)
        id += "-D" + num(p.distance_ceiling) + "-F" + num(p.frequency_ceiling);
    if (p.method != ReductionMethod::merge) id += "-t" + num(p.theta);
    return id;
}

std::vector<SweepEntry> sweep(const Nfa& precise, const Labeling& training, const TrafficSample& test,
                              const SweepGrid& grid, const CostModel& cost, unsigned workers) {
    check_labeling(precise, training);
    cost.validate();
    auto points = grid.points();
    std::vector<std::optional<SweepEntry>> slots(points.size());
    parallel_chunks(points.size(), workers, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            auto r = reduce(precise, training, points[i]);
            SweepEntry e{candidate_id(points[i]), false, points[i], std::move(r.nfa), std::move(r.report), {}, 0};
            e.eval = evaluate(precise, e.nfa, test);
            e.cost = lut_estimate(cost, e.nfa, e.id);
            slots[i] = std::move(e);
        }
    });
    std::vector<SweepEntry> out;
    if (grid.include_precise) {
        SweepEntry e{"precise", true, std::nullopt, precise, std::nullopt, evaluate(precise, precise, test), 0};
        e.cost = lut_estimate(cost, precise, e.id);
        out.push_back(std::move(e));
    }
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

bool dominates(const SweepEntry& a, const SweepEntry& b) {
    int ia = a.precise ? 0 : 1, ib = b.precise ? 0 : 1;
    bool no_worse = a.cost <= b.cost && a.eval.prob <= b.eval.prob && ia <= ib;
    bool better = a.cost < b.cost || a.eval.prob < b.eval.prob || ia < ib;
    return no_worse && better;
}

std::vector<std::size_t> pareto_front(const std::vector<SweepEntry>& entries) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < entries.size() && keep; ++j) {
            if (j == i) continue;
            if (dominates(entries[j], entries[i])) keep = false;
            bool same = entries[j].cost == entries[i].cost && entries[j].eval.prob == entries[i].eval.prob &&
                        entries[j].precise == entries[i].precise;
            if (same && j < i) keep = false;
        }
        if (keep) front.push_back(i);
    }
    return front;
}

void write_sweep_csv(const std::vector<SweepEntry>& entries, const std::vector<std::size_t>& rows, std::ostream& out) {
    out << "id,method,theta,D,F,states,cost,ap,prob,precise\n";
    for (std::size_t i : rows) {
        const auto& e = entries.at(i);
        out << e.id << ',';
        if (e.params) {
            const auto& p = *e.params;
            bool has_theta = p.method != ReductionMethod::merge;
            bool has_merge = p.method == ReductionMethod::merge || p.method == ReductionMethod::merge_prune;
            out << to_string(p.method) << ',' << (has_theta ? num(p.theta) : "") << ','
                << (has_merge ? num(p.distance_ceiling) : "") << ',' << (has_merge ? num(p.frequency_ceiling) : "");
        } else {
            out << "precise,,,";
        }
        out << ',' << e.nfa.num_states() << ',' << num(e.cost) << ',' << num(e.eval.ap) << ',' << num(e.eval.prob)
            << ',' << (e.precise ? 1 : 0) << '\n';
    }
}

} // namespace approxnfa
