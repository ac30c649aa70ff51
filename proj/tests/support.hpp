#pragma once

// Shared fixtures and independent oracles for the test suites. Nothing here
// calls into Simulator or label(); the oracles walk runs explicitly.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "approxnfa/approxnfa.hpp"

namespace approxnfa::testing {

inline ByteClass sym(const char* s) { return ByteClass::of(s); }

/// Pruning example, left automaton: q0 -a-> q1, q1 -a-> q1, q1 -a-> q3,
/// q1 -b-> q2, q2 -b-> q4; q3 and q4 final.
inline Nfa fig3_left() {
    return Nfa(5, 0, {3, 4},
               {{0, 1, sym("a")}, {1, 1, sym("a")}, {1, 2, sym("b")}, {2, 4, sym("b")}, {1, 3, sym("a")}});
}

/// Pruning example, middle automaton (states q0, q1, q3 renumbered 0, 1, 2).
inline Nfa fig3_middle() { return Nfa(3, 0, {1, 2}, {{0, 1, sym("a")}, {1, 1, sym("a")}, {1, 2, sym("a")}}); }

/// Merging example, left automaton: q0 -a-> q1, q0 -b-> q2, q2 -c-> q3,
/// q3 -d-> q4, q4 -a-> q5, q4 -c-> q7, q5 -b-> q6; q1, q6, q7 final.
inline Nfa fig5_left() {
    return Nfa(8, 0, {1, 6, 7},
               {{0, 1, sym("a")},
                {0, 2, sym("b")},
                {2, 3, sym("c")},
                {3, 4, sym("d")},
                {4, 5, sym("a")},
                {4, 7, sym("c")},
                {5, 6, sym("b")}});
}

/// A labeling for fig5_left under which only d(q2,q3) and d(q3,q4) are <= 1.5
/// and q2..q4 have frequency 0.1.
inline Labeling fig5_labeling() { return Labeling{{100, 50, 10, 10, 10, 3, 1, 5}, 100}; }

/// Brute-force prefix acceptance: depth-first over every run, no subset sets.
inline bool oracle_accepts(const Nfa& nfa, const std::string& w) {
    std::function<bool(StateId, std::size_t)> run = [&](StateId q, std::size_t i) {
        if (nfa.is_final(q)) return true;
        if (i == w.size()) return false;
        for (const auto& t : nfa.transitions())
            if (t.src == q && t.symbols.test(static_cast<std::uint8_t>(w[i])) && run(t.dst, i + 1)) return true;
        return false;
    };
    return run(nfa.initial(), 0);
}

/// Significance by definition: for each packet, the states q for which some
/// prefix w1 has q in delta^(q_I, w1), found by enumerating runs.
inline std::vector<std::uint64_t> oracle_label(const Nfa& nfa, const TrafficSample& sample) {
    std::vector<std::uint64_t> counts(nfa.num_states(), 0);
    auto ts = nfa.transitions();
    for (const auto& [w, c] : sample.entries()) {
        std::set<std::pair<StateId, std::size_t>> visited;
        std::set<StateId> reached;
        std::function<void(StateId, std::size_t)> run = [&](StateId q, std::size_t i) {
            if (!visited.insert({q, i}).second) return;
            reached.insert(q);
            if (i == w.size()) return;
            for (const auto& t : ts)
                if (t.src == q && t.symbols.test(static_cast<std::uint8_t>(w[i]))) run(t.dst, i + 1);
        };
        run(nfa.initial(), 0);
        for (StateId q : reached) counts[q] += c;
    }
    return counts;
}

/// All words over `alphabet` of length 0..max_len.
inline std::vector<std::string> all_words(const std::string& alphabet, std::size_t max_len) {
    std::vector<std::string> out{""};
    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_len; ++len) {
        std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i)
            for (char c : alphabet) out.push_back(out[i] + c);
        begin = end;
    }
    return out;
}

/// Random automaton over `alphabet` with 1..max_states states.
inline Nfa random_nfa(std::mt19937_64& rng, std::size_t max_states, const std::string& alphabet = "abcd",
                      double density = 0.25) {
    std::uniform_int_distribution<std::size_t> nstates(1, max_states);
    std::bernoulli_distribution coin(density), fin(0.25), letter(0.5);
    std::size_t n = nstates(rng);
    std::vector<Transition> ts;
    for (StateId q = 0; q < n; ++q)
        for (StateId r = 0; r < n; ++r) {
            if (!coin(rng)) continue;
            ByteClass c;
            for (char a : alphabet)
                if (letter(rng)) c.set(static_cast<std::uint8_t>(a));
            if (!c.empty()) ts.push_back({q, r, c});
        }
    std::vector<StateId> finals;
    for (StateId q = 0; q < n; ++q)
        if (fin(rng)) finals.push_back(q);
    std::uniform_int_distribution<StateId> pick(0, static_cast<StateId>(n - 1));
    return Nfa(n, pick(rng), finals, std::move(ts));
}

/// Random multiset of up to max_packets packets of length <= max_len.
inline TrafficSample random_sample(std::mt19937_64& rng, std::size_t max_packets, std::size_t max_len,
                                   const std::string& alphabet = "abcd") {
    std::uniform_int_distribution<std::size_t> npk(1, max_packets), len(0, max_len), ch(0, alphabet.size() - 1);
    std::uniform_int_distribution<std::uint64_t> mult(1, 3);
    TrafficSample s;
    std::size_t n = npk(rng);
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        std::size_t l = len(rng);
        for (std::size_t k = 0; k < l; ++k) w += alphabet[ch(rng)];
        s.add(w, mult(rng));
    }
    return s;
}

/// True when a and b are equal up to a renaming of states (exhaustive search;
/// meant for the small automata of golden tests).
inline bool isomorphic(const Nfa& a, const Nfa& b) {
    if (a.num_states() != b.num_states() || a.num_transitions() != b.num_transitions() ||
        a.num_finals() != b.num_finals())
        return false;
    std::vector<StateId> perm(a.num_states());
    for (StateId i = 0; i < perm.size(); ++i) perm[i] = i;
    auto ta = a.transitions();
    auto tb = b.transitions();
    auto key = [](const Transition& t) { return std::make_pair(t.src, t.dst); };
    do {
        if (perm[a.initial()] != b.initial()) continue;
        bool ok = true;
        for (StateId q = 0; q < a.num_states() && ok; ++q) ok = a.is_final(q) == b.is_final(perm[q]);
        for (const auto& t : ta) {
            if (!ok) break;
            Transition mapped{perm[t.src], perm[t.dst], t.symbols};
            bool found = false;
            for (const auto& u : tb)
                if (key(u) == key(mapped) && u.symbols == mapped.symbols) found = true;
            ok = found;
        }
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

// ---------------------------------------------------------------------------
// planner problems with exact integer arithmetic

/// A problem whose numbers are exact in integers: accpt = accpt_pct / 100,
/// throughput = tp_tenths / 10, output bound X = input_rate * x_pct / 100.
struct IntProblem {
    std::vector<std::string> ids;
    std::vector<std::uint64_t> lut;
    std::vector<std::uint64_t> accpt_pct;
    std::uint64_t input_rate = 0;
    std::uint64_t tp_tenths = 0;
    std::size_t stages = 1;
    bool exact_stages = false;
    bool min_output = false;
    std::optional<std::uint64_t> x_pct;
    std::optional<std::uint64_t> budget;

    PlanProblem to_problem() const {
        PlanProblem p;
        for (std::size_t i = 0; i < ids.size(); ++i)
            p.candidates.push_back({ids[i], static_cast<double>(lut[i]), static_cast<double>(accpt_pct[i]) / 100.0});
        p.input_rate = static_cast<double>(input_rate);
        p.engine_throughput = static_cast<double>(tp_tenths) / 10.0;
        p.max_stages = stages;
        p.exact_stages = exact_stages;
        p.objective = min_output ? Objective::min_output : Objective::min_resources;
        if (x_pct) p.max_output = static_cast<double>(input_rate * *x_pct) / 100.0;
        if (budget) p.budget = static_cast<double>(*budget);
        return p;
    }
};

/// Optimum by full enumeration: (resources, output in units of input_rate/100),
/// or nullopt when nothing satisfies the bounds.
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> oracle_plan(const IntProblem& p) {
    std::optional<std::pair<std::uint64_t, std::uint64_t>> best;
    std::vector<std::size_t> seq;
    std::function<void()> rec = [&] {
        if (!seq.empty() && (!p.exact_stages || seq.size() == p.stages)) {
            bool monotone = true;
            for (std::size_t i = 1; i < seq.size(); ++i)
                monotone = monotone && p.accpt_pct[seq[i]] <= p.accpt_pct[seq[i - 1]];
            if (monotone) {
                std::uint64_t rsc = 0;
                std::uint64_t in_pct = 100;
                for (std::size_t c : seq) {
                    // ceil((R * in_pct / 100) / (tp / 10)) = ceil(R * in_pct / (10 * tp))
                    std::uint64_t num = p.input_rate * in_pct, den = 10 * p.tp_tenths;
                    rsc += (num + den - 1) / den * p.lut[c];
                    in_pct = p.accpt_pct[c];
                }
                bool ok = (!p.x_pct || in_pct <= *p.x_pct) && (!p.budget || rsc <= *p.budget);
                if (ok) {
                    auto key = p.min_output ? std::make_pair(in_pct, rsc) : std::make_pair(rsc, in_pct);
                    if (!best || key < *best) best = key;
                }
            }
        }
        if (seq.size() == p.stages) return;
        for (std::size_t c = 0; c < p.ids.size(); ++c) {
            seq.push_back(c);
            rec();
            seq.pop_back();
        }
    };
    rec();
    if (best && p.min_output) std::swap(best->first, best->second);
    return best;
}

inline IntProblem random_int_problem(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> ncand(1, 6), nstage(1, 4), pct(0, 20), lut(1, 100), rate(1, 40), tp(1, 128);
    std::bernoulli_distribution coin(0.5);
    IntProblem p;
    int n = ncand(rng);
    for (int i = 0; i < n; ++i) {
        p.ids.push_back("C" + std::to_string(i));
        p.lut.push_back(static_cast<std::uint64_t>(lut(rng)) * 10);
        p.accpt_pct.push_back(static_cast<std::uint64_t>(pct(rng)) * 5);
    }
    p.input_rate = static_cast<std::uint64_t>(rate(rng)) * 5;
    p.tp_tenths = static_cast<std::uint64_t>(tp(rng));
    p.stages = static_cast<std::size_t>(nstage(rng));
    p.exact_stages = coin(rng) && coin(rng);
    p.min_output = coin(rng);
    std::uniform_int_distribution<int> xdist(1, 20);
    if (!p.min_output || coin(rng)) p.x_pct = static_cast<std::uint64_t>(xdist(rng)) * 5;
    std::uniform_int_distribution<std::uint64_t> bdist(100, 20000);
    if (p.min_output || coin(rng)) p.budget = bdist(rng);
    return p;
}

// ---------------------------------------------------------------------------
// pcap fixtures

inline void put16be(std::string& s, std::uint16_t v) {
    s += static_cast<char>(v >> 8);
    s += static_cast<char>(v & 0xff);
}
inline void put32(std::string& s, std::uint32_t v, bool big_endian) {
    for (int i = 0; i < 4; ++i) {
        int shift = big_endian ? 8 * (3 - i) : 8 * i;
        s += static_cast<char>((v >> shift) & 0xff);
    }
}

/// Ethernet + IPv4 + UDP frame carrying payload; optional 802.1Q tag.
inline std::string udp_frame(const std::string& payload, bool vlan = false) {
    std::string f(12, '\x11');
    if (vlan) {
        put16be(f, 0x8100);
        put16be(f, 0x0005);
    }
    put16be(f, 0x0800);
    std::string ip;
    ip += '\x45';
    ip += '\0';
    put16be(ip, static_cast<std::uint16_t>(20 + 8 + payload.size()));
    put16be(ip, 0x1234);
    put16be(ip, 0x4000);  // DF
    ip += '\x40';
    ip += '\x11';
    put16be(ip, 0);
    ip += std::string("\x0a\x00\x00\x01\x0a\x00\x00\x02", 8);
    put16be(ip, 1234);
    put16be(ip, 80);
    put16be(ip, static_cast<std::uint16_t>(8 + payload.size()));
    put16be(ip, 0);
    return f + ip + payload;
}

/// Ethernet + IPv4 + TCP (20-byte header) frame.
inline std::string tcp_frame(const std::string& payload) {
    std::string f(12, '\x22');
    put16be(f, 0x0800);
    f += '\x45';
    f += '\0';
    put16be(f, static_cast<std::uint16_t>(20 + 20 + payload.size()));
    put16be(f, 1);
    put16be(f, 0);
    f += '\x40';
    f += '\x06';
    put16be(f, 0);
    f += std::string("\x0a\x00\x00\x01\x0a\x00\x00\x02", 8);
    std::string tcp(12, '\0');
    tcp += '\x50';
    tcp += std::string(7, '\0');
    return f + tcp + payload;
}

/// Ethernet + IPv6 + UDP frame.
inline std::string udp6_frame(const std::string& payload) {
    std::string f(12, '\x33');
    put16be(f, 0x86dd);
    f += '\x60';
    f += std::string(3, '\0');
    put16be(f, static_cast<std::uint16_t>(8 + payload.size()));
    f += '\x11';
    f += '\x40';
    f += std::string(32, '\x01');
    put16be(f, 1);
    put16be(f, 2);
    put16be(f, static_cast<std::uint16_t>(8 + payload.size()));
    put16be(f, 0);
    return f + payload;
}

/// Ethernet frame with an ARP ethertype (no IP).
inline std::string arp_frame() {
    std::string f(12, '\x44');
    put16be(f, 0x0806);
    f += std::string(28, '\0');
    return f;
}

inline std::string pcap_file(const std::vector<std::string>& frames, bool big_endian = false,
                             std::uint32_t linktype = 1) {
    std::string s;
    put32(s, 0xa1b2c3d4u, big_endian);
    s += big_endian ? std::string("\x00\x02\x00\x04", 4) : std::string("\x02\x00\x04\x00", 4);
    put32(s, 0, big_endian);
    put32(s, 0, big_endian);
    put32(s, 65535, big_endian);
    put32(s, linktype, big_endian);
    std::uint32_t ts = 1;
    for (const auto& f : frames) {
        put32(s, ts++, big_endian);
        put32(s, 0, big_endian);
        put32(s, static_cast<std::uint32_t>(f.size()), big_endian);
        put32(s, static_cast<std::uint32_t>(f.size()), big_endian);
        s += f;
    }
    return s;
}

} // namespace approxnfa::testing
