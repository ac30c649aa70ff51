#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace approxnfa {

using StateId = std::uint32_t;

/// A set of byte values, stored as a 256-bit bitmap.
class ByteClass {
public:
    constexpr ByteClass() = default;

    static ByteClass single(std::uint8_t b) {
        ByteClass c;
        c.set(b);
        return c;
    }
    static ByteClass range(std::uint8_t lo, std::uint8_t hi) {
        ByteClass c;
        c.set_range(lo, hi);
        return c;
    }
    static ByteClass all() { return ~ByteClass{}; }
    /// Every byte of the given string.
    static ByteClass of(std::string_view bytes) {
        ByteClass c;
        for (char ch : bytes) c.set(static_cast<std::uint8_t>(ch));
        return c;
    }

    void set(std::uint8_t b) noexcept { words_[b >> 6] |= std::uint64_t{1} << (b & 63); }
    void reset(std::uint8_t b) noexcept { words_[b >> 6] &= ~(std::uint64_t{1} << (b & 63)); }
    void set_range(std::uint8_t lo, std::uint8_t hi) noexcept {
        for (unsigned b = lo; b <= hi; ++b) set(static_cast<std::uint8_t>(b));
    }
    bool test(std::uint8_t b) const noexcept { return (words_[b >> 6] >> (b & 63)) & 1u; }
    bool empty() const noexcept { return (words_[0] | words_[1] | words_[2] | words_[3]) == 0; }
    std::size_t count() const noexcept;
    bool intersects(const ByteClass& o) const noexcept {
        return ((words_[0] & o.words_[0]) | (words_[1] & o.words_[1]) | (words_[2] & o.words_[2]) |
                (words_[3] & o.words_[3])) != 0;
    }

    ByteClass& operator|=(const ByteClass& o) noexcept {
        for (int i = 0; i < 4; ++i) words_[i] |= o.words_[i];
        return *this;
    }
    ByteClass& operator&=(const ByteClass& o) noexcept {
        for (int i = 0; i < 4; ++i) words_[i] &= o.words_[i];
        return *this;
    }
    friend ByteClass operator|(ByteClass a, const ByteClass& b) noexcept { return a |= b; }
    friend ByteClass operator&(ByteClass a, const ByteClass& b) noexcept { return a &= b; }
    ByteClass operator~() const noexcept {
        ByteClass c;
        for (int i = 0; i < 4; ++i) c.words_[i] = ~words_[i];
        return c;
    }
    friend bool operator==(const ByteClass&, const ByteClass&) = default;

    /// Maximal runs [lo, hi] of set bytes, ascending.
    std::vector<std::pair<std::uint8_t, std::uint8_t>> ranges() const;

private:
    std::array<std::uint64_t, 4> words_{};
};

struct Transition {
    StateId src;
    StateId dst;
    ByteClass symbols;

    friend bool operator==(const Transition&, const Transition&) = default;
};

struct Edge {
    StateId dst;
    ByteClass symbols;
};

/// Sorted set of state identifiers.
class StateSet {
public:
    StateSet() = default;
    StateSet(std::initializer_list<StateId> ids);
    explicit StateSet(std::vector<StateId> ids);

    void insert(StateId q);
    bool contains(StateId q) const;
    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    auto begin() const noexcept { return ids_.begin(); }
    auto end() const noexcept { return ids_.end(); }
    const std::vector<StateId>& ids() const noexcept { return ids_; }
    bool is_subset_of(const StateSet& other) const;

    friend bool operator==(const StateSet&, const StateSet&) = default;

private:
    std::vector<StateId> ids_;
};

/// Optional per-state annotations carried through reductions.
struct StateInfo {
    std::string name;               ///< original identifier(s), e.g. "q2+q3"; empty means none
    std::vector<std::string> tags;  ///< rule ids reported when this state accepts

    friend bool operator==(const StateInfo&, const StateInfo&) = default;
};

/// NFA over the byte alphabet with a single initial state.
///
/// Words are accepted by prefix: a packet matches when any of its prefixes
/// (the empty one included) drives the automaton from the initial state into
/// a final state. Transitions with the same (src, dst) pair are stored as one
/// merged byte class. Immutable once constructed.
class Nfa {
public:
    /// Single non-final state, no transitions.
    Nfa();

    /// Validates endpoints and coalesces transitions with equal (src, dst).
    /// Empty symbol classes are dropped. Throws ParameterError on dangling ids.
    Nfa(std::size_t num_states, StateId initial, const std::vector<StateId>& finals,
        std::vector<Transition> transitions, std::vector<StateInfo> info = {});

    std::size_t num_states() const noexcept { return final_.size(); }
    StateId initial() const noexcept { return initial_; }
    bool is_final(StateId q) const { return final_.at(q) != 0; }
    StateSet finals() const;
    std::size_t num_finals() const noexcept;

    /// Outgoing edges of q, sorted by destination.
    std::span<const Edge> out(StateId q) const {
        return {edges_.data() + offsets_[q], edges_.data() + offsets_[q + 1]};
    }
    std::size_t num_transitions() const noexcept { return edges_.size(); }
    /// All transitions ordered by (src, dst).
    std::vector<Transition> transitions() const;

    bool has_info() const noexcept { return !info_.empty(); }
    /// Annotation of q; an empty record when none was attached.
    const StateInfo& info(StateId q) const;
    const std::vector<StateInfo>& all_info() const noexcept { return info_; }
    /// The annotated name, or the numeric id.
    std::string display_name(StateId q) const;

    friend bool operator==(const Nfa&, const Nfa&) = default;

private:
    StateId initial_ = 0;
    std::vector<std::uint8_t> final_;
    std::vector<std::size_t> offsets_;
    std::vector<Edge> edges_;
    std::vector<StateInfo> info_;
};

inline bool operator==(const Edge& a, const Edge& b) { return a.dst == b.dst && a.symbols == b.symbols; }

/// Packet bytes viewed as a string of bytes.
inline std::uint8_t byte_at(std::string_view w, std::size_t i) { return static_cast<std::uint8_t>(w[i]); }

/// { q' | q in current, (q, symbol, q') in delta }.
StateSet step(const Nfa& nfa, const StateSet& current, std::uint8_t symbol);

/// True iff some prefix of the packet (the empty one included) reaches a final state.
bool accepts_prefix(const Nfa& nfa, std::string_view packet);

/// Reusable scratch space for running one automaton over many packets.
///
/// Not thread-safe; use one Simulator per thread. The automaton must outlive it.
class Simulator {
public:
    explicit Simulator(const Nfa& nfa);

    bool accepts_prefix(std::string_view packet);

    /// Runs the subset construction over the whole packet and calls visit(q)
    /// exactly once for every state in the union of all frontiers.
    template <class Visit>
    void for_each_reached(std::string_view packet, Visit&& visit) {
        begin_packet();
        mark_seen(nfa_->initial(), visit);
        current_.assign(1, nfa_->initial());
        for (std::size_t i = 0; i < packet.size() && !current_.empty(); ++i) {
            advance(byte_at(packet, i));
            for (StateId q : current_) mark_seen(q, visit);
        }
    }

    const Nfa& nfa() const noexcept { return *nfa_; }

private:
    void begin_packet();
    void advance(std::uint8_t symbol);

    template <class Visit>
    void mark_seen(StateId q, Visit& visit) {
        if (seen_[q] != packet_epoch_) {
            seen_[q] = packet_epoch_;
            visit(q);
        }
    }

    const Nfa* nfa_;
    std::vector<StateId> current_;
    std::vector<StateId> next_;
    std::vector<std::uint64_t> in_next_;
    std::vector<std::uint64_t> seen_;
    std::uint64_t step_epoch_ = 0;
    std::uint64_t packet_epoch_ = 0;
};

/// States reachable from the initial state (in any number of steps).
std::vector<bool> reachable_states(const Nfa& nfa);

/// Breadth-first depth from the initial state; unreachable states get SIZE_MAX.
std::vector<std::size_t> bfs_depths(const Nfa& nfa);

} // namespace approxnfa
