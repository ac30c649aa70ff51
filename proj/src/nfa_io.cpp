#include "approxnfa/nfa_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "approxnfa/error.hpp"

namespace approxnfa {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

StateId parse_id(const std::string& tok, std::size_t line) {
    StateId v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) throw ParseError(line, "bad state id '" + tok + "'");
    return v;
}

unsigned parse_hex_byte(std::string_view tok, std::size_t line) {
    if (tok.size() < 3 || tok[0] != '0' || (tok[1] != 'x' && tok[1] != 'X'))
        throw ParseError(line, "bad symbol '" + std::string(tok) + "', expected 0xNN");
    unsigned v = 0;
    auto [p, ec] = std::from_chars(tok.data() + 2, tok.data() + tok.size(), v, 16);
    if (ec != std::errc{} || p != tok.data() + tok.size() || v > 255)
        throw ParseError(line, "bad symbol '" + std::string(tok) + "'");
    return v;
}

std::string hex_byte(unsigned b) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "0x%02x", b);
    return buf;
}

} // namespace

std::string format_symspec(const ByteClass& cls) {
    std::string out;
    for (auto [lo, hi] : cls.ranges()) {
        if (!out.empty()) out += ',';
        out += hex_byte(lo);
        if (hi != lo) out += '-' + hex_byte(hi);
    }
    return out;
}

ByteClass parse_symspec(const std::string& spec, std::size_t line) {
    ByteClass cls;
    std::string_view rest(spec);
    if (rest.empty()) throw ParseError(line, "empty symbol specification");
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) throw ParseError(line, "empty item in symbol specification");
        auto dash = item.find('-');
        if (dash == std::string::npos) {
            cls.set(static_cast<std::uint8_t>(parse_hex_byte(item, line)));
        } else {
            unsigned lo = parse_hex_byte(std::string_view(item).substr(0, dash), line);
            unsigned hi = parse_hex_byte(std::string_view(item).substr(dash + 1), line);
            if (lo > hi) throw ParseError(line, "reversed range '" + item + "'");
            cls.set_range(static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi));
        }
    }
    return cls;
}

Nfa parse_nfa(std::istream& in) {
    struct PendingTransition {
        Transition t;
        std::size_t line;
    };
    std::optional<StateId> initial;
    std::optional<std::size_t> declared_states;
    std::optional<std::vector<StateId>> finals;
    std::size_t final_line = 0;
    std::vector<PendingTransition> transitions;
    std::vector<std::pair<StateId, std::string>> names, tags;
    StateId max_id = 0;

    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (raw.rfind("#@", 0) == 0) {
            auto toks = split_ws(raw.substr(2));
            if (toks.size() < 2 || (toks[0] != "name" && toks[0] != "tag")) continue;
            StateId q = parse_id(toks[1], lineno);
            auto pos = raw.find(toks[1], raw.find(toks[0]) + toks[0].size()) + toks[1].size();
            std::string value = trim(std::string_view(raw).substr(pos));
            (toks[0] == "name" ? names : tags).emplace_back(q, value);
            continue;
        }
        std::string line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (finals) throw ParseError(lineno, "content after the final line");
        auto toks = split_ws(line);
        if (!initial) {
            if (toks[0] != "initial") throw ParseError(lineno, "expected 'initial <id>' as first line");
            if (toks.size() != 2)
                throw ParseError(lineno, toks.size() < 2 ? "missing initial state"
                                                         : "multiple initial states are not supported");
            initial = parse_id(toks[1], lineno);
            max_id = std::max(max_id, *initial);
            continue;
        }
        if (toks[0] == "initial") throw ParseError(lineno, "duplicate initial line");
        if (toks[0] == "states") {
            if (toks.size() != 2 || !transitions.empty()) throw ParseError(lineno, "misplaced 'states' line");
            declared_states = parse_id(toks[1], lineno);
            if (*declared_states == 0) throw ParseError(lineno, "state count must be positive");
            continue;
        }
        if (toks[0] == "final") {
            finals.emplace();
            final_line = lineno;
            for (std::size_t i = 1; i < toks.size(); ++i) {
                finals->push_back(parse_id(toks[i], lineno));
                max_id = std::max(max_id, finals->back());
            }
            continue;
        }
        if (toks.size() < 3) throw ParseError(lineno, "expected '<src> <dst> <symspec>'");
        std::string spec;
        for (std::size_t i = 2; i < toks.size(); ++i) spec += toks[i];
        Transition t{parse_id(toks[0], lineno), parse_id(toks[1], lineno), parse_symspec(spec, lineno)};
        max_id = std::max({max_id, t.src, t.dst});
        transitions.push_back({t, lineno});
    }
    if (!initial) throw ParseError(0, "missing 'initial' line");
    if (!finals) throw ParseError(lineno, "missing 'final' line");

    std::size_t n = declared_states.value_or(std::size_t{max_id} + 1);
    if (*initial >= n) throw ParseError(1, "initial state " + std::to_string(*initial) + " is not declared");
    for (const auto& pt : transitions)
        if (pt.t.src >= n || pt.t.dst >= n)
            throw ParseError(pt.line, "transition references undeclared state");
    for (StateId f : *finals)
        if (f >= n) throw ParseError(final_line, "final state " + std::to_string(f) + " is not declared");

    std::vector<StateInfo> info;
    if (!names.empty() || !tags.empty()) {
        info.resize(n);
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i].first >= n) throw ParseError(0, "annotation references undeclared state");
            info[names[i].first].name = names[i].second;
        }
        for (const auto& [q, tag] : tags) {
            if (q >= n) throw ParseError(0, "annotation references undeclared state");
            info[q].tags.push_back(tag);
        }
    }
    std::vector<Transition> ts;
    ts.reserve(transitions.size());
    for (auto& pt : transitions) ts.push_back(pt.t);
    return Nfa(n, *initial, *finals, std::move(ts), std::move(info));
}

Nfa parse_nfa(const std::string& text) {
    std::istringstream is(text);
    return parse_nfa(is);
}

namespace {

void write_body(const Nfa& nfa, std::ostream& out, bool with_info) {
    out << "initial " << nfa.initial() << '\n';
    out << "states " << nfa.num_states() << '\n';
    if (with_info && nfa.has_info()) {
        for (StateId q = 0; q < nfa.num_states(); ++q) {
            const auto& si = nfa.info(q);
            if (!si.name.empty()) out << "#@name " << q << ' ' << si.name << '\n';
            for (const auto& t : si.tags) out << "#@tag " << q << ' ' << t << '\n';
        }
    }
    for (const auto& t : nfa.transitions()) out << t.src << ' ' << t.dst << ' ' << format_symspec(t.symbols) << '\n';
    out << "final";
    for (StateId f : nfa.finals()) out << ' ' << f;
    out << '\n';
}

} // namespace

void write_nfa(const Nfa& nfa, std::ostream& out) { write_body(nfa, out, true); }

std::string to_text(const Nfa& nfa) {
    std::ostringstream os;
    write_nfa(nfa, os);
    return os.str();
}

Nfa read_nfa(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open automaton file " + path.string());
    return parse_nfa(in);
}

void write_nfa(const Nfa& nfa, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    write_nfa(nfa, out);
    if (!out) throw InputError("write failed for " + path.string());
}

std::uint64_t nfa_hash(const Nfa& nfa) {
    std::ostringstream os;
    write_body(nfa, os, false);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : os.str()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string nfa_hash_hex(const Nfa& nfa) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(nfa_hash(nfa)));
    return buf;
}

} // namespace approxnfa
