#include <doctest.h>

#include <regex>
#include <sstream>

#include "support.hpp"

using namespace approxnfa;
using namespace approxnfa::testing;

namespace {

// std::regex search is the reference: a packet is accepted iff some prefix
// of it contains a match, i.e. iff the packet contains one.
void check_against_std(const std::string& pattern, const std::string& alphabet, std::size_t max_len,
                       const CompileOptions& opts = {}) {
    auto flags = std::regex::ECMAScript;
    if (opts.case_insensitive) flags |= std::regex::icase;
    std::regex re(pattern, flags);
    auto n = compile_regex(pattern, opts);
    Simulator sim(n);
    for (const auto& w : all_words(alphabet, max_len)) {
        INFO("pattern " << pattern << " word '" << w << "'");
        REQUIRE(sim.accepts_prefix(w) == std::regex_search(w, re));
    }
}

} // namespace

TEST_CASE("literal chain") {
    auto n = compile_regex("^ab");
    CHECK(isomorphic(n, Nfa(3, 0, {2}, {{0, 1, sym("a")}, {1, 2, sym("b")}})));
}

TEST_CASE("small anchored patterns") {
    auto n = compile_regex("^a+b?");
    CHECK(accepts_prefix(n, "a"));
    CHECK(accepts_prefix(n, "ab"));
    CHECK(accepts_prefix(n, "aaa"));
    CHECK_FALSE(accepts_prefix(n, "b"));
    check_against_std("^a+b?", "ab", 3);
    check_against_std("^a.*bb", "ab", 5);
}

TEST_CASE("language agrees with std::regex") {
    const char* patterns[] = {
        "ab",        "^ab|cd",    "a(b|c)*d",   "^(ab)+", "[a-c]d",  "[^a]b",
        "a{2}",      "^a{1,3}b",  "(a|b){2,}c", "^.c",       "a?b?c",  "^(a|bc|)d", "d*",
        "^[ab]*c{0,2}d", "(?:ab|ba)c", "b.d",  "^(a(b(c)?)?)d", "a|^b",
    };
    for (const char* p : patterns)
        check_against_std(p, "abcd", 5);
}

TEST_CASE("flags") {
    CompileOptions icase;
    icase.case_insensitive = true;
    check_against_std("^aB", "aAbB", 3, icase);
    auto inline_flag = compile_regex("(?i)^ab");
    CHECK(accepts_prefix(inline_flag, "AB"));
    auto delimited = compile_regex("/^ab/i");
    CHECK(accepts_prefix(delimited, "aB"));

    CHECK_FALSE(accepts_prefix(compile_regex("^a.b"), "a\nb"));
    CHECK(accepts_prefix(compile_regex("(?s)^a.b"), "a\nb"));
    CHECK(accepts_prefix(compile_regex("/a.b/s"), "a\nb"));
}

TEST_CASE("escapes and classes") {
    auto n = compile_regex("^\\x41\\d[[:alpha:]]\\.");
    CHECK(accepts_prefix(n, "A7z."));
    CHECK_FALSE(accepts_prefix(n, "A7z!"));
    CHECK_FALSE(accepts_prefix(n, "Axz."));
    auto any = compile_regex("^[\\x00-\\xff]");
    CHECK(accepts_prefix(any, std::string(1, '\xff')));
    CHECK_FALSE(accepts_prefix(any, ""));
}

TEST_CASE("unanchored search shape") {
    auto n = compile_regex("GET /admin");
    CHECK(accepts_prefix(n, "xxGET /admin/x"));
    CHECK_FALSE(accepts_prefix(n, "GET /admi"));
    // No transition leaves a final state.
    for (const auto& t : n.transitions()) CHECK_FALSE(n.is_final(t.src));
}

TEST_CASE("unsupported constructs") {
    for (const char* p : {"(a)\\1", "a(?=b)", "a(?!b)", "(?<=a)b", "a*?", "a+?", "a*+", "ab$", "\\bab", "a{100}",
                          "a{3,2}", "(ab", "ab)", "[ab", "*a", "a**"}) {
        INFO(p);
        CHECK_THROWS_AS(compile_regex(p), Error);
    }
    CHECK_THROWS_AS(compile_regex("(a)\\1"), UnsupportedFeature);
    CHECK_THROWS_AS(compile_regex("ab$"), UnsupportedFeature);
    CHECK_THROWS_AS(compile_regex("a(?=b)"), UnsupportedFeature);
    CompileOptions big;
    big.repetition_cap = 200;
    CHECK_NOTHROW(compile_regex("a{100}", big));
}

TEST_CASE("rule sets") {
    RuleSet rules{{"r1", "^ab"}, {"r2", "^cd"}};
    auto n = compile_ruleset(rules);
    for (const auto& w : all_words("abcd", 3)) {
        bool expect = w.rfind("ab", 0) == 0 || w.rfind("cd", 0) == 0;
        CHECK(accepts_prefix(n, w) == expect);
    }
    std::vector<std::string> tags;
    for (StateId q = 0; q < n.num_states(); ++q)
        if (n.is_final(q))
            for (const auto& t : n.info(q).tags) tags.push_back(t);
    std::sort(tags.begin(), tags.end());
    CHECK(tags == std::vector<std::string>{"r1", "r2"});

    auto single = compile_ruleset({{"x", "a(b|c)d"}});
    auto direct = compile_regex("a(b|c)d");
    for (const auto& w : all_words("abcd", 5)) CHECK(accepts_prefix(single, w) == accepts_prefix(direct, w));

    auto none = compile_ruleset({});
    CHECK(none.num_finals() == 0);
    CHECK_FALSE(accepts_prefix(none, ""));

    CHECK_THROWS_AS(compile_ruleset({{"a", "x"}, {"a", "y"}}), ParameterError);
    try {
        compile_ruleset({{"ok", "x"}, {"bad", "a$"}});
        FAIL("expected failure");
    } catch (const RuleCompileError& e) {
        CHECK(e.rule_id() == "bad");
        CHECK(e.exit_code() == 3);
    }
}

TEST_CASE("rule file parsing") {
    std::istringstream in("# comment\nr1\t^ab\n\nr2\tc d\n");
    auto rules = parse_rules(in);
    REQUIRE(rules.size() == 2);
    CHECK(rules[1].id == "r2");
    CHECK(rules[1].pattern == "c d");
    std::istringstream bad("r1 no tab\n");
    CHECK_THROWS_AS(parse_rules(bad), ParseError);
}

TEST_CASE("slashes are only delimiters when followed by flags") {
    auto path = compile_regex("/etc/passwd");
    CHECK(accepts_prefix(path, "cat /etc/passwd"));
    CHECK_FALSE(accepts_prefix(path, "etc"));
    CHECK(accepts_prefix(compile_regex("/etc/"), "etc"));
    CHECK_THROWS_AS(compile_regex("/ab/R"), UnsupportedFeature);
}
