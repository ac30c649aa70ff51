#include "approxnfa/recompile.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <unordered_set>

namespace approxnfa {
namespace {

// ---------------------------------------------------------------------------
// Syntax tree

struct Node {
    enum class Kind { empty, bytes, concat, alt, repeat };
    Kind kind = Kind::empty;
    ByteClass cls;
    std::vector<Node> kids;
    std::size_t min = 0;
    std::size_t max = 0;  // kUnbounded for *, +, {m,}
};

constexpr std::size_t kUnbounded = static_cast<std::size_t>(-1);

Node make_bytes(const ByteClass& c) {
    Node n;
    n.kind = Node::Kind::bytes;
    n.cls = c;
    return n;
}

struct Alternative {
    Node body;
    bool anchored = false;
};

ByteClass widen_case(ByteClass c) {
    for (unsigned b = 'a'; b <= 'z'; ++b) {
        auto lower = static_cast<std::uint8_t>(b);
        auto upper = static_cast<std::uint8_t>(b - 32);
        if (c.test(lower) || c.test(upper)) {
            c.set(lower);
            c.set(upper);
        }
    }
    return c;
}

ByteClass digit_class() { return ByteClass::range('0', '9'); }
ByteClass word_class() {
    return ByteClass::range('a', 'z') | ByteClass::range('A', 'Z') | digit_class() | ByteClass::single('_');
}
ByteClass space_class() { return ByteClass::of(" \t\n\v\f\r"); }

bool posix_class(std::string_view name, ByteClass& out) {
    if (name == "alpha") out = ByteClass::range('a', 'z') | ByteClass::range('A', 'Z');
    else if (name == "digit") out = digit_class();
    else if (name == "alnum") out = ByteClass::range('a', 'z') | ByteClass::range('A', 'Z') | digit_class();
    else if (name == "word") out = word_class();
    else if (name == "space") out = space_class();
    else if (name == "blank") out = ByteClass::of(" \t");
    else if (name == "upper") out = ByteClass::range('A', 'Z');
    else if (name == "lower") out = ByteClass::range('a', 'z');
    else if (name == "xdigit") out = digit_class() | ByteClass::range('a', 'f') | ByteClass::range('A', 'F');
    else if (name == "cntrl") out = ByteClass::range(0, 0x1f) | ByteClass::single(0x7f);
    else if (name == "print") out = ByteClass::range(0x20, 0x7e);
    else if (name == "graph") out = ByteClass::range(0x21, 0x7e);
    else if (name == "punct")
        out = ByteClass::range(0x21, 0x2f) | ByteClass::range(0x3a, 0x40) | ByteClass::range(0x5b, 0x60) |
              ByteClass::range(0x7b, 0x7e);
    else return false;
    return true;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser over the supported subset

class Parser {
public:
    Parser(std::string_view pattern, const CompileOptions& options) : options_(options) {
        strip_delimiters(pattern);
        src_ = pattern;
        strip_leading_flags();
    }

    std::vector<Alternative> parse_top() {
        std::vector<Alternative> alts;
        do {
            Alternative alt;
            if (peek('^')) {
                ++pos_;
                alt.anchored = true;
            }
            alt.body = parse_concat();
            alts.push_back(std::move(alt));
        } while (eat('|'));
        if (pos_ != src_.size()) {
            if (src_[pos_] == ')') fail("unbalanced ')'");
            fail("unexpected character");
        }
        if (multiline_ && std::any_of(alts.begin(), alts.end(), [](const Alternative& a) { return a.anchored; }))
            throw UnsupportedFeature("multiline flag", "'m' changes the meaning of '^'");
        return alts;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(0, "regex: " + what + " at offset " + std::to_string(pos_));
    }
    [[noreturn]] void unsupported(const std::string& feature) const {
        throw UnsupportedFeature(feature, "at offset " + std::to_string(pos_));
    }

    void strip_delimiters(std::string_view& p) {
        if (p.size() < 2 || p.front() != '/') return;
        auto close = p.rfind('/');
        if (close == 0) return;
        // "/etc/passwd" is a path, not a delimited pattern with flags "passwd".
        auto flags = p.substr(close + 1);
        if (flags.find_first_not_of("ismxAEGRUBPHDMCOIKSY") != std::string_view::npos) return;
        for (char f : flags) apply_flag(f, true);
        p = p.substr(1, close - 1);
    }

    void apply_flag(char f, bool delimited) {
        switch (f) {
        case 'i': icase_ = true; break;
        case 's': dot_all_ = true; break;
        case 'm':
            if (!delimited) unsupported("inline flag m");
            multiline_ = true;
            break;
        default: unsupported(std::string("flag '") + f + "'");
        }
    }

    void strip_leading_flags() {
        while (src_.substr(pos_).rfind("(?", 0) == 0) {
            std::size_t i = pos_ + 2;
            while (i < src_.size() && (src_[i] == 'i' || src_[i] == 's')) ++i;
            if (i == pos_ + 2 || i >= src_.size() || src_[i] != ')') return;
            for (std::size_t k = pos_ + 2; k < i; ++k) apply_flag(src_[k], false);
            pos_ = i + 1;
        }
    }

    bool peek(char c) const { return pos_ < src_.size() && src_[pos_] == c; }
    bool eat(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }
    bool at_end() const { return pos_ >= src_.size(); }

    Node parse_alt() {
        Node first = parse_concat();
        if (!peek('|')) return first;
        Node alt;
        alt.kind = Node::Kind::alt;
        alt.kids.push_back(std::move(first));
        while (eat('|')) alt.kids.push_back(parse_concat());
        return alt;
    }

    Node parse_concat() {
        Node seq;
        seq.kind = Node::Kind::concat;
        while (!at_end() && !peek('|') && !peek(')')) seq.kids.push_back(parse_repeat());
        if (seq.kids.size() == 1) return std::move(seq.kids.front());
        if (seq.kids.empty()) return Node{};
        return seq;
    }

    bool parse_braces(std::size_t& lo, std::size_t& hi) {
        // {m}, {m,}, {m,n}; anything else is a literal '{'.
        std::size_t i = pos_ + 1;
        auto read_num = [&](std::size_t& out) {
            std::size_t start = i;
            out = 0;
            while (i < src_.size() && src_[i] >= '0' && src_[i] <= '9') {
                out = std::min<std::size_t>(out * 10 + static_cast<std::size_t>(src_[i] - '0'), 1u << 30);
                ++i;
            }
            return i > start;
        };
        if (!read_num(lo)) return false;
        hi = lo;
        if (i < src_.size() && src_[i] == ',') {
            ++i;
            if (!read_num(hi)) hi = kUnbounded;
        }
        if (i >= src_.size() || src_[i] != '}') return false;
        pos_ = i + 1;
        return true;
    }

    Node parse_repeat() {
        Node atom = parse_atom();
        bool quantified = false;
        for (;;) {
            std::size_t lo = 0, hi = 0;
            std::size_t at = pos_;
            if (eat('*')) {
                lo = 0, hi = kUnbounded;
            } else if (eat('+')) {
                lo = 1, hi = kUnbounded;
            } else if (eat('?')) {
                lo = 0, hi = 1;
            } else if (peek('{') && parse_braces(lo, hi)) {
                if (hi != kUnbounded && hi < lo) {
                    pos_ = at;
                    fail("repetition bounds out of order");
                }
                std::size_t largest = hi == kUnbounded ? lo : hi;
                if (largest > options_.repetition_cap) {
                    pos_ = at;
                    unsupported("bounded repetition above cap " + std::to_string(options_.repetition_cap));
                }
            } else {
                break;
            }
            if (quantified) {
                pos_ = at;
                fail("nothing to repeat");
            }
            if (peek('?')) unsupported("lazy quantifier");
            if (peek('+')) unsupported("possessive quantifier");
            quantified = true;
            Node rep;
            rep.kind = Node::Kind::repeat;
            rep.min = lo;
            rep.max = hi;
            rep.kids.push_back(std::move(atom));
            atom = std::move(rep);
        }
        return atom;
    }

    Node parse_group() {
        // '(' already consumed
        if (eat('?')) {
            if (eat(':')) {
            } else if (peek('=') || peek('!')) {
                unsupported("lookahead");
            } else if (src_.substr(pos_).rfind("<=", 0) == 0 || src_.substr(pos_).rfind("<!", 0) == 0) {
                unsupported("lookbehind");
            } else if (peek('<') || peek('\'') || src_.substr(pos_).rfind("P<", 0) == 0) {
                eat('P');
                char close = src_[pos_] == '<' ? '>' : '\'';
                ++pos_;
                auto end = src_.find(close, pos_);
                if (end == std::string_view::npos) fail("unterminated group name");
                pos_ = end + 1;
            } else if (peek('>')) {
                unsupported("atomic group");
            } else if (peek('#')) {
                unsupported("comment group");
            } else {
                unsupported("group construct (?" + std::string(src_.substr(pos_, 1)) + "...)");
            }
        }
        Node inner = parse_alt();
        if (!eat(')')) fail("missing ')'");
        return inner;
    }

    // Escape outside or inside a class. Returns the class it denotes; sets
    // `single` when it denotes exactly one byte (usable as a range endpoint).
    ByteClass parse_escape(bool in_class, bool& single) {
        single = false;
        if (at_end()) fail("trailing backslash");
        char c = src_[pos_++];
        auto one = [&](unsigned b) {
            single = true;
            return ByteClass::single(static_cast<std::uint8_t>(b));
        };
        switch (c) {
        case 'x': {
            if (peek('{')) unsupported("\\x{...} escape");
            int h1 = pos_ < src_.size() ? hex_value(src_[pos_]) : -1;
            int h2 = pos_ + 1 < src_.size() ? hex_value(src_[pos_ + 1]) : -1;
            if (h1 < 0 || h2 < 0) fail("\\x needs two hex digits");
            pos_ += 2;
            return one(static_cast<unsigned>(h1 * 16 + h2));
        }
        case 'n': return one('\n');
        case 'r': return one('\r');
        case 't': return one('\t');
        case 'f': return one('\f');
        case 'v': return one('\v');
        case 'e': return one(0x1b);
        case 'a': return one(0x07);
        case '0': {
            unsigned v = 0;
            for (int k = 0; k < 2 && pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '7'; ++k)
                v = v * 8 + static_cast<unsigned>(src_[pos_++] - '0');
            return one(v);
        }
        case 'd': return digit_class();
        case 'D': return ~digit_class();
        case 'w': return word_class();
        case 'W': return ~word_class();
        case 's': return space_class();
        case 'S': return ~space_class();
        case 'b':
            if (in_class) return one(0x08);
            unsupported("word boundary \\b");
        case 'B': unsupported("word boundary \\B");
        case 'A': case 'z': case 'Z': case 'G': unsupported(std::string("anchor \\") + c);
        case 'k': case 'g': unsupported("backreference");
        case 'p': case 'P': unsupported("unicode property");
        case 'Q': case 'E': unsupported("quoting \\Q...\\E");
        case 'c': unsupported("control escape \\c");
        default: break;
        }
        if (c >= '1' && c <= '9') unsupported("backreference");
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) unsupported(std::string("escape \\") + c);
        return one(static_cast<std::uint8_t>(c));
    }

    ByteClass parse_class() {
        // '[' already consumed
        bool negate = eat('^');
        ByteClass cls;
        bool first = true;
        for (;;) {
            if (at_end()) fail("unterminated character class");
            if (peek(']') && !first) {
                ++pos_;
                break;
            }
            first = false;
            if (src_.substr(pos_).rfind("[:", 0) == 0) {
                auto end = src_.find(":]", pos_ + 2);
                if (end == std::string_view::npos) fail("unterminated POSIX class");
                ByteClass named;
                if (!posix_class(src_.substr(pos_ + 2, end - pos_ - 2), named))
                    unsupported("POSIX class " + std::string(src_.substr(pos_, end + 2 - pos_)));
                cls |= named;
                pos_ = end + 2;
                continue;
            }
            bool single = true;
            ByteClass item;
            std::uint8_t lo = 0;
            if (eat('\\')) {
                item = parse_escape(true, single);
            } else {
                lo = static_cast<std::uint8_t>(src_[pos_++]);
                item = ByteClass::single(lo);
            }
            if (single && peek('-') && pos_ + 1 < src_.size() && src_[pos_ + 1] != ']') {
                for (unsigned b = 0; b < 256; ++b)
                    if (item.test(static_cast<std::uint8_t>(b))) lo = static_cast<std::uint8_t>(b);
                ++pos_;
                std::uint8_t hi = 0;
                if (eat('\\')) {
                    bool hi_single = false;
                    ByteClass h = parse_escape(true, hi_single);
                    if (!hi_single) fail("invalid range endpoint");
                    for (unsigned b = 0; b < 256; ++b)
                        if (h.test(static_cast<std::uint8_t>(b))) hi = static_cast<std::uint8_t>(b);
                } else {
                    hi = static_cast<std::uint8_t>(src_[pos_++]);
                }
                if (hi < lo) fail("character range out of order");
                item = ByteClass::range(lo, hi);
            }
            cls |= item;
        }
        if (icase_ || options_.case_insensitive) cls = widen_case(cls);
        return negate ? ~cls : cls;
    }

    Node parse_atom() {
        if (at_end()) fail("unexpected end of pattern");
        char c = src_[pos_];
        switch (c) {
        case '(': ++pos_; return parse_group();
        case '[': ++pos_; return make_bytes(parse_class());
        case '.': {
            ++pos_;
            ByteClass any = ByteClass::all();
            if (!(dot_all_ || options_.dot_all)) any.reset('\n');
            return make_bytes(any);
        }
        case '\\': {
            ++pos_;
            bool single = false;
            return make_bytes(case_fold(parse_escape(false, single)));
        }
        case '^': unsupported("anchor ^ inside the pattern");
        case '$': unsupported("end anchor $");
        case '*': case '+': case '?': fail("nothing to repeat");
        case ')': fail("unbalanced ')'");
        case '{': {
            std::size_t lo = 0, hi = 0, save = pos_;
            if (parse_braces(lo, hi)) {
                pos_ = save;
                fail("nothing to repeat");
            }
            break;
        }
        default: break;
        }
        ++pos_;
        return make_bytes(case_fold(ByteClass::single(static_cast<std::uint8_t>(c))));
    }

    ByteClass case_fold(const ByteClass& c) const {
        return (icase_ || options_.case_insensitive) ? widen_case(c) : c;
    }

    const CompileOptions& options_;
    std::string_view src_;
    std::size_t pos_ = 0;
    bool icase_ = false;
    bool dot_all_ = false;
    bool multiline_ = false;
};

// ---------------------------------------------------------------------------
// Thompson construction with epsilon edges

class EpsilonNfa {
public:
    struct Fragment {
        std::size_t start;
        std::size_t end;
    };

    std::size_t add_state() {
        sym_.emplace_back();
        eps_.emplace_back();
        return sym_.size() - 1;
    }
    void add_eps(std::size_t from, std::size_t to) { eps_[from].push_back(to); }
    void add_sym(std::size_t from, const ByteClass& c, std::size_t to) {
        if (!c.empty()) sym_[from].push_back({to, c});
    }

    Fragment build(const Node& n) {
        switch (n.kind) {
        case Node::Kind::empty: {
            auto s = add_state();
            return {s, s};
        }
        case Node::Kind::bytes: {
            auto s = add_state(), t = add_state();
            add_sym(s, n.cls, t);
            return {s, t};
        }
        case Node::Kind::concat: {
            Fragment f = build(n.kids.front());
            for (std::size_t i = 1; i < n.kids.size(); ++i) {
                Fragment g = build(n.kids[i]);
                add_eps(f.end, g.start);
                f.end = g.end;
            }
            return f;
        }
        case Node::Kind::alt: {
            auto s = add_state(), t = add_state();
            for (const auto& k : n.kids) {
                Fragment g = build(k);
                add_eps(s, g.start);
                add_eps(g.end, t);
            }
            return {s, t};
        }
        case Node::Kind::repeat: return build_repeat(n.kids.front(), n.min, n.max);
        }
        return {0, 0};
    }

    /// Epsilon closure membership for every state.
    std::vector<std::vector<std::size_t>> closures() const {
        std::vector<std::vector<std::size_t>> out(sym_.size());
        std::vector<std::size_t> mark(sym_.size(), static_cast<std::size_t>(-1));
        for (std::size_t s = 0; s < sym_.size(); ++s) {
            std::vector<std::size_t> stack{s};
            mark[s] = s;
            while (!stack.empty()) {
                auto q = stack.back();
                stack.pop_back();
                out[s].push_back(q);
                for (auto r : eps_[q])
                    if (mark[r] != s) {
                        mark[r] = s;
                        stack.push_back(r);
                    }
            }
        }
        return out;
    }

    struct SymEdge {
        std::size_t dst;
        ByteClass cls;
    };
    const std::vector<SymEdge>& sym(std::size_t q) const { return sym_[q]; }
    std::size_t size() const { return sym_.size(); }

private:
    Fragment build_repeat(const Node& body, std::size_t min, std::size_t max) {
        auto s = add_state();
        Fragment f{s, s};
        for (std::size_t i = 0; i < min; ++i) {
            Fragment g = build(body);
            add_eps(f.end, g.start);
            f.end = g.end;
        }
        if (max == kUnbounded) {
            auto hub = add_state();
            Fragment g = build(body);
            add_eps(f.end, hub);
            add_eps(hub, g.start);
            add_eps(g.end, hub);
            f.end = hub;
        } else {
            for (std::size_t i = min; i < max; ++i) {
                auto t = add_state();
                Fragment g = build(body);
                add_eps(f.end, g.start);
                add_eps(f.end, t);
                add_eps(g.end, t);
                f.end = t;
            }
        }
        return f;
    }

    std::vector<std::vector<SymEdge>> sym_;
    std::vector<std::vector<std::size_t>> eps_;
};

struct Branch {
    const Node* body;
    bool anchored;
    const std::string* tag;  // rule id, null for a bare pattern
};

/// Builds the union automaton over all branches, eliminates epsilon edges and
/// normalises the result for prefix acceptance.
Nfa assemble(const std::vector<Branch>& branches) {
    EpsilonNfa enfa;
    auto start = enfa.add_state();
    bool any_unanchored = std::any_of(branches.begin(), branches.end(), [](const Branch& b) { return !b.anchored; });
    bool any_anchored = std::any_of(branches.begin(), branches.end(), [](const Branch& b) { return b.anchored; });
    std::size_t hub = start;
    if (any_unanchored) {
        if (any_anchored) {
            hub = enfa.add_state();
            enfa.add_eps(start, hub);
        }
        enfa.add_sym(hub, ByteClass::all(), hub);
    }
    std::vector<std::pair<std::size_t, const std::string*>> accepts;
    for (const auto& b : branches) {
        auto f = enfa.build(*b.body);
        enfa.add_eps(b.anchored ? start : hub, f.start);
        accepts.emplace_back(f.end, b.tag);
    }

    // Epsilon elimination: keep the start state and every target of a symbol edge.
    auto closure = enfa.closures();
    std::vector<bool> accepting(enfa.size(), false);
    for (auto [q, tag] : accepts) accepting[q] = true;
    std::vector<bool> kept(enfa.size(), false);
    kept[start] = true;
    for (std::size_t q = 0; q < enfa.size(); ++q)
        for (const auto& e : enfa.sym(q)) kept[e.dst] = true;

    struct Edge2 {
        std::size_t dst;
        ByteClass cls;
    };
    std::vector<std::vector<Edge2>> out(enfa.size());
    std::vector<bool> is_final(enfa.size(), false);
    std::vector<std::set<std::string>> tags(enfa.size());
    for (std::size_t p = 0; p < enfa.size(); ++p) {
        if (!kept[p]) continue;
        for (auto q : closure[p]) {
            if (accepting[q]) {
                is_final[p] = true;
                for (auto [acc, tag] : accepts)
                    if (acc == q && tag) tags[p].insert(*tag);
            }
        }
        if (is_final[p]) continue;  // a prefix already matched; later input is irrelevant
        for (auto q : closure[p])
            for (const auto& e : enfa.sym(q)) out[p].push_back({e.dst, e.cls});
    }

    // Trim to states that are reachable and can still reach a final state.
    std::vector<std::vector<std::size_t>> rev(enfa.size());
    for (std::size_t p = 0; p < enfa.size(); ++p)
        for (const auto& e : out[p]) rev[e.dst].push_back(p);
    std::vector<bool> useful(enfa.size(), false);
    std::vector<std::size_t> stack;
    for (std::size_t p = 0; p < enfa.size(); ++p)
        if (kept[p] && is_final[p]) {
            useful[p] = true;
            stack.push_back(p);
        }
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (auto p : rev[q])
            if (!useful[p]) {
                useful[p] = true;
                stack.push_back(p);
            }
    }

    // Breadth-first renumbering from the start state.
    std::vector<std::size_t> index(enfa.size(), static_cast<std::size_t>(-1));
    std::vector<std::size_t> order{start};
    index[start] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto p = order[i];
        if (!useful[p]) continue;
        for (const auto& e : out[p]) {
            if (useful[e.dst] && index[e.dst] == static_cast<std::size_t>(-1)) {
                index[e.dst] = order.size();
                order.push_back(e.dst);
            }
        }
    }

    std::vector<Transition> transitions;
    std::vector<StateId> finals;
    std::vector<StateInfo> info(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto p = order[i];
        if (is_final[p]) finals.push_back(static_cast<StateId>(i));
        info[i].tags.assign(tags[p].begin(), tags[p].end());
        if (!useful[p]) continue;
        for (const auto& e : out[p])
            if (useful[e.dst])
                transitions.push_back({static_cast<StateId>(i), static_cast<StateId>(index[e.dst]), e.cls});
    }
    return Nfa(order.size(), 0, finals, std::move(transitions), std::move(info));
}

} // namespace

Nfa compile_regex(std::string_view pattern, const CompileOptions& options) {
    auto alts = Parser(pattern, options).parse_top();
    std::vector<Branch> branches;
    for (const auto& a : alts) branches.push_back({&a.body, a.anchored, nullptr});
    return assemble(branches);
}

Nfa compile_ruleset(const RuleSet& rules, const CompileOptions& options) {
    std::unordered_set<std::string> seen;
    std::vector<std::vector<Alternative>> parsed;
    parsed.reserve(rules.size());
    for (const auto& r : rules) {
        if (!seen.insert(r.id).second) throw ParameterError("duplicate rule id '" + r.id + "'");
        try {
            parsed.push_back(Parser(r.pattern, options).parse_top());
        } catch (const Error& e) {
            throw RuleCompileError(r.id, e);
        }
    }
    std::vector<Branch> branches;
    for (std::size_t i = 0; i < rules.size(); ++i)
        for (const auto& a : parsed[i]) branches.push_back({&a.body, a.anchored, &rules[i].id});
    return assemble(branches);
}

RuleSet parse_rules(std::istream& in) {
    RuleSet rules;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) throw ParseError(lineno, "expected '<id><TAB><pattern>'");
        Rule r{line.substr(0, tab), line.substr(tab + 1)};
        if (r.pattern.empty()) throw ParseError(lineno, "empty pattern");
        if (!ids.insert(r.id).second) throw ParseError(lineno, "duplicate rule id '" + r.id + "'");
        rules.push_back(std::move(r));
    }
    return rules;
}

RuleSet read_rules(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open rule file " + path.string());
    return parse_rules(in);
}

} // namespace approxnfa
