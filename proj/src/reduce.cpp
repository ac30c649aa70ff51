#include "approxnfa/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "approxnfa/error.hpp"
#include "json.hpp"

namespace approxnfa {

std::string to_string(ReductionMethod m) {
    switch (m) {
    case ReductionMethod::prune: return "prune";
    case ReductionMethod::merge: return "merge";
    case ReductionMethod::merge_prune: return "merge-prune";
    case ReductionMethod::bfs: return "bfs";
    }
    return "?";
}

ReductionMethod parse_method(const std::string& name) {
    if (name == "prune") return ReductionMethod::prune;
    if (name == "merge") return ReductionMethod::merge;
    if (name == "merge-prune" || name == "merge_prune") return ReductionMethod::merge_prune;
    if (name == "bfs") return ReductionMethod::bfs;
    throw ParameterError("unknown reduction method '" + name + "'");
}

std::string ReductionReport::to_json() const {
    nlohmann::ordered_json j;
    j["method"] = to_string(method);
    j["states_before"] = states_before;
    j["states_after"] = states_after;
    j["ratio_achieved"] = ratio_achieved();
    j["error_bound"] = error_bound ? nlohmann::ordered_json(*error_bound) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    if (theta) params["theta"] = *theta;
    if (distance_ceiling) params["D"] = *distance_ceiling;
    if (frequency_ceiling) params["F"] = *frequency_ceiling;
    j["parameters"] = params;
    j["removed"] = removed;
    j["border"] = border;
    return j.dump(2);
}

std::size_t target_states(double theta, std::size_t n) {
    if (!(theta > 0.0 && theta <= 1.0)) throw ParameterError("reduction ratio must lie in (0, 1]");
    double x = theta * static_cast<double>(n);
    double nearest = std::round(x);
    double m = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
    return std::clamp<std::size_t>(static_cast<std::size_t>(m), 1, n);
}

namespace {

bool is_identity(const std::vector<StateId>& map) {
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map[i] != i) return false;
    return true;
}

/// Picks `count` states from `order` (best removal candidates first), never the initial one.
std::vector<StateId> first_removable(const Nfa& nfa, std::vector<StateId> order, std::size_t count) {
    std::vector<StateId> removed;
    for (StateId q : order) {
        if (removed.size() == count) break;
        if (q != nfa.initial()) removed.push_back(q);
    }
    std::sort(removed.begin(), removed.end());
    return removed;
}

} // namespace

Reduction prune_states(const Nfa& nfa, const std::vector<StateId>& removed, const Labeling* labeling) {
    if (labeling) check_labeling(nfa, *labeling);
    const std::size_t n = nfa.num_states();
    std::vector<bool> gone(n, false);
    for (StateId q : removed) {
        if (q >= n) throw ParameterError("cannot remove unknown state " + std::to_string(q));
        if (q == nfa.initial()) throw ParameterError("the initial state cannot be pruned");
        gone[q] = true;
    }

    std::vector<StateId> new_id(n, std::numeric_limits<StateId>::max());
    std::vector<StateId> kept;
    for (StateId q = 0; q < n; ++q)
        if (!gone[q]) {
            new_id[q] = static_cast<StateId>(kept.size());
            kept.push_back(q);
        }

    std::vector<StateId> border;
    for (StateId q : kept)
        for (const auto& e : nfa.out(q))
            if (gone[e.dst]) {
                border.push_back(q);
                break;
            }

    std::vector<Transition> transitions;
    for (const auto& t : nfa.transitions())
        if (!gone[t.src] && !gone[t.dst]) transitions.push_back({new_id[t.src], new_id[t.dst], t.symbols});

    std::vector<StateId> finals;
    for (StateId q : kept)
        if (nfa.is_final(q)) finals.push_back(new_id[q]);
    for (StateId b : border) finals.push_back(new_id[b]);

    bool renumbered = !is_identity(kept);
    std::vector<StateInfo> info;
    if (nfa.has_info() || renumbered) {
        info.resize(kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            info[i] = {renumbered ? nfa.display_name(kept[i]) : nfa.info(kept[i]).name, nfa.info(kept[i]).tags};
        // A border state may now report the rules whose matches it cut short.
        for (StateId b : border) {
            std::vector<bool> seen(n, false);
            std::vector<StateId> stack;
            for (const auto& e : nfa.out(b))
                if (gone[e.dst] && !seen[e.dst]) {
                    seen[e.dst] = true;
                    stack.push_back(e.dst);
                }
            auto& tags = info[new_id[b]].tags;
            while (!stack.empty()) {
                StateId q = stack.back();
                stack.pop_back();
                const auto& t = nfa.info(q).tags;
                tags.insert(tags.end(), t.begin(), t.end());
                for (const auto& e : nfa.out(q))
                    if (gone[e.dst] && !seen[e.dst]) {
                        seen[e.dst] = true;
                        stack.push_back(e.dst);
                    }
            }
        }
    }

    Reduction r{Nfa(kept.size(), new_id[nfa.initial()], finals, std::move(transitions), std::move(info)), {}};
    r.report.method = ReductionMethod::prune;
    r.report.states_before = n;
    r.report.states_after = kept.size();
    std::vector<StateId> removed_sorted = removed;
    std::sort(removed_sorted.begin(), removed_sorted.end());
    removed_sorted.erase(std::unique(removed_sorted.begin(), removed_sorted.end()), removed_sorted.end());
    r.report.removed = std::move(removed_sorted);
    r.report.border = border;
    if (labeling) {
        std::uint64_t bound = 0;
        for (StateId b : border) bound += labeling->counts[b];
        r.report.error_bound = bound;
    }
    return r;
}

namespace {

Reduction prune_to(const Nfa& nfa, const Labeling& labeling, std::size_t keep) {
    check_labeling(nfa, labeling);
    std::vector<StateId> order(nfa.num_states());
    std::iota(order.begin(), order.end(), StateId{0});
    std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
        if (labeling.counts[a] != labeling.counts[b]) return labeling.counts[a] < labeling.counts[b];
        return a > b;
    });
    std::size_t count = keep < nfa.num_states() ? nfa.num_states() - keep : 0;
    return prune_states(nfa, first_removable(nfa, std::move(order), count), &labeling);
}

} // namespace

Reduction prune(const Nfa& nfa, const Labeling& labeling, double theta) {
    std::size_t m = target_states(theta, nfa.num_states());
    Reduction r = prune_to(nfa, labeling, m);
    r.report.theta = theta;
    return r;
}

double state_distance(std::uint64_t a, std::uint64_t b) {
    if (a == 0 && b == 0) return 1.0;
    if (a == 0 || b == 0) return std::numeric_limits<double>::infinity();
    double x = static_cast<double>(a), y = static_cast<double>(b);
    return std::max(x / y, y / x);
}

std::vector<std::vector<StateId>> merge_classes(const Nfa& nfa, const Labeling& labeling, double distance_ceiling,
                                                double frequency_ceiling) {
    check_labeling(nfa, labeling);
    if (labeling.sample_size == 0) throw ParameterError("merging needs a labeling over a non-empty sample");
    if (!(distance_ceiling >= 1.0)) throw ParameterError("distance ceiling must be >= 1");
    if (!(frequency_ceiling > 0.0 && frequency_ceiling <= 1.0))
        throw ParameterError("frequency ceiling must lie in (0, 1]");

    const std::size_t n = nfa.num_states();
    std::vector<StateId> parent(n);
    std::iota(parent.begin(), parent.end(), StateId{0});
    auto find = [&](StateId q) {
        while (parent[q] != q) q = parent[q] = parent[parent[q]];
        return q;
    };
    std::vector<bool> low(n);
    for (StateId q = 0; q < n; ++q) low[q] = frequency(labeling, q) <= frequency_ceiling;

    for (StateId q = 0; q < n; ++q) {
        if (!low[q]) continue;
        for (const auto& e : nfa.out(q)) {
            StateId r = e.dst;
            if (r == q || !low[r]) continue;
            if (state_distance(labeling.counts[q], labeling.counts[r]) <= distance_ceiling) {
                StateId a = find(q), b = find(r);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<StateId>> classes;
    std::vector<std::size_t> slot(n, static_cast<std::size_t>(-1));
    for (StateId q = 0; q < n; ++q) {
        StateId root = find(q);
        if (slot[root] == static_cast<std::size_t>(-1)) {
            slot[root] = classes.size();
            classes.emplace_back();
        }
        classes[slot[root]].push_back(q);
    }
    return classes;
}

MergeResult merge_detailed(const Nfa& nfa, const Labeling& labeling, double distance_ceiling,
                           double frequency_ceiling) {
    auto classes = merge_classes(nfa, labeling, distance_ceiling, frequency_ceiling);
    const std::size_t n = nfa.num_states();
    std::vector<StateId> class_of(n);
    for (std::size_t c = 0; c < classes.size(); ++c)
        for (StateId q : classes[c]) class_of[q] = static_cast<StateId>(c);

    std::vector<Transition> transitions;
    for (const auto& t : nfa.transitions()) transitions.push_back({class_of[t.src], class_of[t.dst], t.symbols});

    std::vector<StateId> finals;
    Labeling merged_labeling{std::vector<std::uint64_t>(classes.size(), 0), labeling.sample_size};
    std::vector<StateInfo> info;
    bool renumbered = classes.size() != n;
    if (renumbered || nfa.has_info()) info.resize(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        bool fin = false;
        for (StateId q : classes[c]) {
            fin = fin || nfa.is_final(q);
            merged_labeling.counts[c] = std::max(merged_labeling.counts[c], labeling.counts[q]);
            if (!info.empty()) {
                auto& si = info[c];
                if (!si.name.empty()) si.name += '+';
                si.name += renumbered ? nfa.display_name(q) : nfa.info(q).name;
                const auto& tags = nfa.info(q).tags;
                si.tags.insert(si.tags.end(), tags.begin(), tags.end());
            }
        }
        if (fin) finals.push_back(static_cast<StateId>(c));
    }

    MergeResult out{{Nfa(classes.size(), class_of[nfa.initial()], finals, std::move(transitions), std::move(info)),
                     {}},
                    std::move(class_of), std::move(merged_labeling)};
    auto& rep = out.reduction.report;
    rep.method = ReductionMethod::merge;
    rep.states_before = n;
    rep.states_after = classes.size();
    rep.distance_ceiling = distance_ceiling;
    rep.frequency_ceiling = frequency_ceiling;
    return out;
}

Reduction merge(const Nfa& nfa, const Labeling& labeling, double distance_ceiling, double frequency_ceiling) {
    return merge_detailed(nfa, labeling, distance_ceiling, frequency_ceiling).reduction;
}

Reduction merge_prune(const Nfa& nfa, const Labeling& labeling, double distance_ceiling, double frequency_ceiling,
                      double theta) {
    std::size_t m = target_states(theta, nfa.num_states());
    auto merged = merge_detailed(nfa, labeling, distance_ceiling, frequency_ceiling);
    Reduction r = prune_to(merged.reduction.nfa, merged.labeling, m);
    r.report.method = ReductionMethod::merge_prune;
    r.report.states_before = nfa.num_states();
    r.report.theta = theta;
    r.report.distance_ceiling = distance_ceiling;
    r.report.frequency_ceiling = frequency_ceiling;
    return r;
}

Reduction bfs_reduce(const Nfa& nfa, double theta, const Labeling* labeling) {
    std::size_t m = target_states(theta, nfa.num_states());
    auto depth = bfs_depths(nfa);
    std::vector<StateId> order(nfa.num_states());
    std::iota(order.begin(), order.end(), StateId{0});
    std::sort(order.begin(), order.end(), [&](StateId a, StateId b) {
        if (depth[a] != depth[b]) return depth[a] > depth[b];
        return a > b;
    });
    Reduction r = prune_states(nfa, first_removable(nfa, std::move(order), nfa.num_states() - m), labeling);
    r.report.method = ReductionMethod::bfs;
    r.report.theta = theta;
    return r;
}

Reduction reduce(const Nfa& nfa, const Labeling& labeling, const ReductionParams& p) {
    switch (p.method) {
    case ReductionMethod::prune: return prune(nfa, labeling, p.theta);
    case ReductionMethod::merge: return merge(nfa, labeling, p.distance_ceiling, p.frequency_ceiling);
    case ReductionMethod::merge_prune:
        return merge_prune(nfa, labeling, p.distance_ceiling, p.frequency_ceiling, p.theta);
    case ReductionMethod::bfs: return bfs_reduce(nfa, p.theta, &labeling);
    }
    throw ParameterError("unknown reduction method");
}

std::optional<std::string> find_inclusion_violation(const Nfa& precise, const Nfa& candidate,
                                                    const TrafficSample& sample) {
    Simulator a(precise), b(candidate);
    for (const auto& [w, c] : sample.entries())
        if (a.accepts_prefix(w) && !b.accepts_prefix(w)) return w;
    return std::nullopt;
}

} // namespace approxnfa
