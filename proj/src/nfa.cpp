#include "approxnfa/nfa.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>

#include "approxnfa/error.hpp"

namespace approxnfa {

std::size_t ByteClass::count() const noexcept {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<std::pair<std::uint8_t, std::uint8_t>> ByteClass::ranges() const {
    std::vector<std::pair<std::uint8_t, std::uint8_t>> out;
    int start = -1;
    for (int b = 0; b <= 256; ++b) {
        bool on = b < 256 && test(static_cast<std::uint8_t>(b));
        if (on && start < 0) {
            start = b;
        } else if (!on && start >= 0) {
            out.emplace_back(static_cast<std::uint8_t>(start), static_cast<std::uint8_t>(b - 1));
            start = -1;
        }
    }
    return out;
}

StateSet::StateSet(std::initializer_list<StateId> ids) : StateSet(std::vector<StateId>(ids)) {}

StateSet::StateSet(std::vector<StateId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

void StateSet::insert(StateId q) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), q);
    if (it == ids_.end() || *it != q) ids_.insert(it, q);
}

bool StateSet::contains(StateId q) const { return std::binary_search(ids_.begin(), ids_.end(), q); }

bool StateSet::is_subset_of(const StateSet& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
}

Nfa::Nfa() : Nfa(1, 0, {}, {}) {}

Nfa::Nfa(std::size_t num_states, StateId initial, const std::vector<StateId>& finals,
         std::vector<Transition> transitions, std::vector<StateInfo> info)
    : initial_(initial), final_(num_states, 0), info_(std::move(info)) {
    if (num_states == 0) throw ParameterError("automaton needs at least one state");
    if (num_states > std::numeric_limits<StateId>::max()) throw ParameterError("too many states");
    if (initial >= num_states) throw ParameterError("initial state " + std::to_string(initial) + " out of range");
    if (!info_.empty() && info_.size() != num_states)
        throw ParameterError("state annotations do not cover all states");
    for (StateId f : finals) {
        if (f >= num_states) throw ParameterError("final state " + std::to_string(f) + " out of range");
        final_[f] = 1;
    }
    for (const auto& t : transitions) {
        if (t.src >= num_states || t.dst >= num_states)
            throw ParameterError("transition " + std::to_string(t.src) + "->" + std::to_string(t.dst) +
                                 " references an undeclared state");
    }
    std::sort(transitions.begin(), transitions.end(), [](const Transition& a, const Transition& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    offsets_.assign(num_states + 1, 0);
    edges_.reserve(transitions.size());
    for (std::size_t i = 0; i < transitions.size();) {
        Transition merged = transitions[i];
        std::size_t j = i + 1;
        for (; j < transitions.size() && transitions[j].src == merged.src && transitions[j].dst == merged.dst; ++j)
            merged.symbols |= transitions[j].symbols;
        if (!merged.symbols.empty()) {
            edges_.push_back({merged.dst, merged.symbols});
            ++offsets_[merged.src + 1];
        }
        i = j;
    }
    for (std::size_t q = 0; q < num_states; ++q) offsets_[q + 1] += offsets_[q];
    bool any_info = std::any_of(info_.begin(), info_.end(), [](const StateInfo& s) {
        return !s.name.empty() || !s.tags.empty();
    });
    if (!any_info) info_.clear();
    for (auto& s : info_) {
        std::sort(s.tags.begin(), s.tags.end());
        s.tags.erase(std::unique(s.tags.begin(), s.tags.end()), s.tags.end());
    }
}

StateSet Nfa::finals() const {
    std::vector<StateId> ids;
    for (std::size_t q = 0; q < final_.size(); ++q)
        if (final_[q]) ids.push_back(static_cast<StateId>(q));
    return StateSet(std::move(ids));
}

std::size_t Nfa::num_finals() const noexcept {
    return static_cast<std::size_t>(std::count(final_.begin(), final_.end(), std::uint8_t{1}));
}

std::vector<Transition> Nfa::transitions() const {
    std::vector<Transition> result;
    result.reserve(edges_.size());
    for (std::size_t q = 0; q < num_states(); ++q)
        for (const auto& e : out(static_cast<StateId>(q))) result.push_back({static_cast<StateId>(q), e.dst, e.symbols});
    return result;
}

const StateInfo& Nfa::info(StateId q) const {
    static const StateInfo empty;
    if (info_.empty()) return empty;
    return info_.at(q);
}

std::string Nfa::display_name(StateId q) const {
    const auto& n = info(q).name;
    return n.empty() ? std::to_string(q) : n;
}

StateSet step(const Nfa& nfa, const StateSet& current, std::uint8_t symbol) {
    std::vector<StateId> next;
    for (StateId q : current)
        for (const auto& e : nfa.out(q))
            if (e.symbols.test(symbol)) next.push_back(e.dst);
    return StateSet(std::move(next));
}

bool accepts_prefix(const Nfa& nfa, std::string_view packet) {
    Simulator sim(nfa);
    return sim.accepts_prefix(packet);
}

Simulator::Simulator(const Nfa& nfa)
    : nfa_(&nfa), in_next_(nfa.num_states(), 0), seen_(nfa.num_states(), 0) {
    current_.reserve(nfa.num_states());
    next_.reserve(nfa.num_states());
}

void Simulator::begin_packet() { ++packet_epoch_; }

void Simulator::advance(std::uint8_t symbol) {
    ++step_epoch_;
    next_.clear();
    for (StateId q : current_) {
        for (const auto& e : nfa_->out(q)) {
            if (e.symbols.test(symbol) && in_next_[e.dst] != step_epoch_) {
                in_next_[e.dst] = step_epoch_;
                next_.push_back(e.dst);
            }
        }
    }
    current_.swap(next_);
}

bool Simulator::accepts_prefix(std::string_view packet) {
    if (nfa_->is_final(nfa_->initial())) return true;
    current_.assign(1, nfa_->initial());
    for (std::size_t i = 0; i < packet.size(); ++i) {
        advance(byte_at(packet, i));
        if (current_.empty()) return false;
        for (StateId q : current_)
            if (nfa_->is_final(q)) return true;
    }
    return false;
}

std::vector<bool> reachable_states(const Nfa& nfa) {
    auto depth = bfs_depths(nfa);
    std::vector<bool> out(depth.size());
    for (std::size_t q = 0; q < depth.size(); ++q) out[q] = depth[q] != std::numeric_limits<std::size_t>::max();
    return out;
}

std::vector<std::size_t> bfs_depths(const Nfa& nfa) {
    std::vector<std::size_t> depth(nfa.num_states(), std::numeric_limits<std::size_t>::max());
    std::deque<StateId> queue{nfa.initial()};
    depth[nfa.initial()] = 0;
    while (!queue.empty()) {
        StateId q = queue.front();
        queue.pop_front();
        for (const auto& e : nfa.out(q)) {
            if (depth[e.dst] == std::numeric_limits<std::size_t>::max()) {
                depth[e.dst] = depth[q] + 1;
                queue.push_back(e.dst);
            }
        }
    }
    return depth;
}

} // namespace approxnfa
