#include <doctest.h>

#include "support.hpp"

using namespace approxnfa;
using namespace approxnfa::testing;

namespace {

Nfa fig5_right() {
    // 0 = q0, 1 = q1, 2 = {q2,q3,q4}, 3 = q5, 4 = q6, 5 = q7
    return Nfa(6, 0, {1, 4, 5},
               {{0, 1, sym("a")}, {0, 2, sym("b")}, {2, 2, sym("cd")}, {2, 3, sym("a")}, {2, 5, sym("c")},
                {3, 4, sym("b")}});
}

Labeling fig3_labeling() { return Labeling{{2, 2, 1, 2, 0}, 2}; }

bool over_approximates(const Nfa& precise, const Nfa& reduced, const std::vector<std::string>& words) {
    Simulator a(precise), b(reduced);
    for (const auto& w : words)
        if (a.accepts_prefix(w) && !b.accepts_prefix(w)) return false;
    return true;
}

} // namespace

TEST_CASE("target state count") {
    CHECK(target_states(0.6, 5) == 3);
    CHECK(target_states(0.5, 5) == 3);
    CHECK(target_states(1.0, 7) == 7);
    CHECK(target_states(0.01, 7) == 1);
    CHECK(target_states(0.7, 10) == 7);
    CHECK(target_states(0.3, 10) == 3);
    CHECK_THROWS_AS(target_states(0.0, 5), ParameterError);
    CHECK_THROWS_AS(target_states(1.5, 5), ParameterError);
}

TEST_CASE("pruning example") {
    auto r = prune(fig3_left(), fig3_labeling(), 0.6);
    CHECK(r.report.removed == std::vector<StateId>{2, 4});
    CHECK(r.report.border == std::vector<StateId>{1});
    CHECK(r.report.error_bound == 2u);
    CHECK(isomorphic(r.nfa, fig3_middle()));
    CHECK(r.nfa.display_name(2) == "3");

    auto explicit_r = prune_states(fig3_left(), {2, 4}, nullptr);
    CHECK(isomorphic(explicit_r.nfa, fig3_middle()));
    CHECK_FALSE(explicit_r.report.error_bound.has_value());
    CHECK_THROWS_AS(prune_states(fig3_left(), {0}, nullptr), ParameterError);
}

TEST_CASE("theta one is the identity") {
    auto r = prune(fig3_left(), fig3_labeling(), 1.0);
    CHECK(r.nfa == fig3_left());
    CHECK(r.report.error_bound == 0u);
    CHECK(bfs_reduce(fig3_left(), 1.0).nfa == fig3_left());
}

TEST_CASE("initial state survives even when least significant") {
    Nfa n(3, 2, {0}, {{2, 1, sym("a")}, {1, 0, sym("b")}});
    Labeling l{{5, 5, 0}, 5};  // deliberately inconsistent, only the ordering matters
    auto r = prune(n, l, 0.34);
    REQUIRE(r.nfa.num_states() == 2);
    CHECK(r.report.removed == std::vector<StateId>{1});
}

TEST_CASE("ties remove the higher id first") {
    Nfa star(5, 0, {1, 2, 3, 4},
             {{0, 1, sym("a")}, {0, 2, sym("b")}, {0, 3, sym("c")}, {0, 4, sym("d")}});
    Labeling l{{4, 1, 1, 1, 1}, 4};
    CHECK(prune(star, l, 0.5).report.removed == std::vector<StateId>{3, 4});
    CHECK(bfs_reduce(star, 0.5).report.removed == std::vector<StateId>{3, 4});
}

TEST_CASE("merging example") {
    auto r = merge(fig5_left(), fig5_labeling(), 1.5, 0.1);
    CHECK(isomorphic(r.nfa, fig5_right()));
    CHECK(r.nfa.display_name(2) == "2+3+4");
    CHECK_FALSE(r.report.error_bound.has_value());

    auto classes = merge_classes(fig5_left(), fig5_labeling(), 1.5, 0.1);
    CHECK(classes.size() == 6);
    CHECK(classes[2] == std::vector<StateId>{2, 3, 4});

    auto d = merge_detailed(fig5_left(), fig5_labeling(), 1.5, 0.1);
    CHECK(d.class_of == std::vector<StateId>{0, 1, 2, 2, 2, 3, 4, 5});
    CHECK(d.labeling.counts == std::vector<std::uint64_t>{100, 50, 10, 3, 1, 5});
}

TEST_CASE("frequency ceiling blocks merging") {
    auto r = merge(fig5_left(), fig5_labeling(), 1.5, 0.05);
    CHECK(r.nfa == fig5_left());
}

TEST_CASE("distance ceiling below all distances leaves the automaton alone") {
    Labeling distinct{{100, 50, 20, 9, 4, 2, 1, 3}, 100};
    auto r = merge(fig5_left(), distinct, 1.2, 1.0);
    CHECK(r.nfa == fig5_left());
    CHECK(merge_prune(fig5_left(), distinct, 1.2, 1.0, 0.5).nfa == prune(fig5_left(), distinct, 0.5).nfa);
    CHECK(merge_prune(fig5_left(), distinct, 1.2, 1.0, 1.0).nfa == fig5_left());
}

TEST_CASE("equal neighbours merge") {
    Nfa n(3, 0, {2}, {{0, 1, sym("a")}, {1, 2, sym("b")}});
    Labeling l{{10, 10, 10}, 10};
    CHECK(merge(n, l, 1.0, 1.0).nfa.num_states() == 1);
    CHECK(state_distance(10, 10) == 1.0);
    CHECK(state_distance(0, 0) == 1.0);
    CHECK(std::isinf(state_distance(0, 3)));
    CHECK(state_distance(2, 8) == 4.0);
}

TEST_CASE("merge-prune keeping every merged state equals merge") {
    auto mp = merge_prune(fig5_left(), fig5_labeling(), 1.5, 0.1, 0.75);
    CHECK(isomorphic(mp.nfa, fig5_right()));
    CHECK(mp.report.method == ReductionMethod::merge_prune);
    CHECK(mp.report.states_before == 8);
}

TEST_CASE("bfs on a chain") {
    Nfa chain(4, 0, {3}, {{0, 1, sym("a")}, {1, 2, sym("a")}, {2, 3, sym("a")}});
    auto r = bfs_reduce(chain, 0.5);
    CHECK(r.nfa.num_states() == 2);
    CHECK(r.nfa.is_final(1));
    CHECK(r.report.removed == std::vector<StateId>{2, 3});
    CHECK(r.report.border == std::vector<StateId>{1});
}

TEST_CASE("unreachable states go first under bfs") {
    Nfa n(4, 0, {1}, {{0, 1, sym("a")}, {1, 2, sym("a")}});
    CHECK(bfs_reduce(n, 0.75).report.removed == std::vector<StateId>{3});
}

TEST_CASE("border states inherit rule tags") {
    Nfa n(3, 0, {2}, {{0, 1, sym("a")}, {1, 2, sym("b")}}, {{"", {}}, {"", {}}, {"", {"r7"}}});
    auto r = prune_states(n, {2}, nullptr);
    CHECK(r.nfa.info(1).tags == std::vector<std::string>{"r7"});
}

TEST_CASE("every method over-approximates random automata") {
    std::mt19937_64 rng(23);
    auto words = all_words("abcd", 5);
    for (int i = 0; i < 40; ++i) {
        auto n = random_nfa(rng, 8);
        auto s = random_sample(rng, 40, 8);
        auto l = label(n, s);
        for (ReductionParams p : {ReductionParams{ReductionMethod::prune, 0.5, 1, 1},
                                  ReductionParams{ReductionMethod::merge, 1.0, 2.0, 0.5},
                                  ReductionParams{ReductionMethod::merge_prune, 0.4, 3.0, 1.0},
                                  ReductionParams{ReductionMethod::bfs, 0.3, 1, 1}}) {
            auto r = reduce(n, l, p);
            INFO(to_string(p.method) << " on\n" << to_text(n));
            CHECK(over_approximates(n, r.nfa, words));
        }
    }
}

TEST_CASE("report json") {
    auto r = prune(fig3_left(), fig3_labeling(), 0.6);
    auto j = r.report.to_json();
    CHECK(j.find("\"error_bound\": 2") != std::string::npos);
    CHECK(j.find("\"theta\": 0.6") != std::string::npos);
    CHECK(parse_method("merge-prune") == ReductionMethod::merge_prune);
    CHECK_THROWS_AS(parse_method("magic"), ParameterError);
}

TEST_CASE("inclusion spot check") {
    TrafficSample s;
    s.add("ab");
    s.add("aa");
    CHECK_FALSE(find_inclusion_violation(fig3_left(), fig3_middle(), s).has_value());
    CHECK(find_inclusion_violation(fig3_middle(), fig3_left(), s) == std::optional<std::string>("ab"));
}

TEST_CASE("identity reductions keep annotations unchanged") {
    auto n = compile_ruleset({{"r1", "abc"}, {"r2", "^x[yz]+"}});
    TrafficSample s;
    s.add("xxabc");
    s.add("xyz");
    auto l = label(n, s);
    CHECK(prune(n, l, 1.0).nfa == n);
    CHECK(bfs_reduce(n, 1.0).nfa == n);
}
