#include <doctest.h>

#include "support.hpp"

using namespace approxnfa;
using namespace approxnfa::testing;

TEST_CASE("byte classes") {
    auto c = ByteClass::range('a', 'c');
    CHECK(c.count() == 3);
    CHECK(c.test('b'));
    CHECK_FALSE(c.test('d'));
    CHECK((~c).count() == 253);
    CHECK(ByteClass::all().count() == 256);
    CHECK((c & ByteClass::of("cz")) == ByteClass::single('c'));
    CHECK(c.intersects(ByteClass::of("xyc")));
    CHECK_FALSE(c.intersects(ByteClass::of("xyz")));
    auto r = (ByteClass::range(0, 5) | ByteClass::range(10, 10) | ByteClass::single(255)).ranges();
    REQUIRE(r.size() == 3);
    CHECK(r[0] == std::pair<std::uint8_t, std::uint8_t>{0, 5});
    CHECK(r[1] == std::pair<std::uint8_t, std::uint8_t>{10, 10});
    CHECK(r[2] == std::pair<std::uint8_t, std::uint8_t>{255, 255});
}

TEST_CASE("state sets stay sorted and unique") {
    StateSet s;
    s.insert(4);
    s.insert(1);
    s.insert(4);
    CHECK(s.ids() == std::vector<StateId>{1, 4});
    CHECK(s.contains(1));
    CHECK_FALSE(s.contains(2));
    StateSet t{{1, 2, 4}};
    CHECK(s.is_subset_of(t));
    CHECK_FALSE(t.is_subset_of(s));
}

TEST_CASE("construction validates and coalesces") {
    CHECK_THROWS_AS(Nfa(2, 2, {}, {}), ParameterError);
    CHECK_THROWS_AS(Nfa(2, 0, {5}, {}), ParameterError);
    CHECK_THROWS_AS(Nfa(2, 0, {}, {{0, 3, sym("a")}}), ParameterError);
    CHECK_THROWS_AS(Nfa(0, 0, {}, {}), ParameterError);

    Nfa n(2, 0, {1}, {{0, 1, sym("a")}, {0, 1, sym("b")}, {1, 1, ByteClass{}}});
    CHECK(n.num_transitions() == 1);
    CHECK(n.transitions()[0].symbols == sym("ab"));
}

TEST_CASE("step on the pruning example") {
    auto n = fig3_left();
    CHECK(step(n, StateSet{1}, 'b').ids() == std::vector<StateId>{2});
    CHECK(step(n, StateSet{}, 'a').empty());
    CHECK(step(n, StateSet{0, 1}, 'a').ids() == std::vector<StateId>{1, 3});
}

TEST_CASE("prefix acceptance") {
    auto n = fig3_left();
    CHECK(accepts_prefix(n, "aab"));
    CHECK(accepts_prefix(n, "aa"));
    CHECK_FALSE(accepts_prefix(n, "b"));
    CHECK_FALSE(accepts_prefix(n, "ab"));
    CHECK_FALSE(accepts_prefix(n, ""));
    CHECK(accepts_prefix(n, "abb"));

    Nfa everything(1, 0, {0}, {});
    CHECK(accepts_prefix(everything, ""));
    CHECK(accepts_prefix(everything, "xyz"));
}

TEST_CASE("simulator agrees with brute force and is prefix closed") {
    std::mt19937_64 rng(11);
    auto words = all_words("abc", 5);
    for (int i = 0; i < 40; ++i) {
        auto n = random_nfa(rng, 7, "abc");
        Simulator sim(n);
        for (const auto& w : words) {
            bool acc = sim.accepts_prefix(w);
            REQUIRE(acc == oracle_accepts(n, w));
            if (acc) CHECK(sim.accepts_prefix(w + "c"));
        }
    }
}

TEST_CASE("reachability and depths") {
    Nfa n(4, 0, {}, {{0, 1, sym("a")}, {1, 2, sym("a")}, {3, 0, sym("a")}});
    auto reach = reachable_states(n);
    CHECK(reach == std::vector<bool>{true, true, true, false});
    auto d = bfs_depths(n);
    CHECK(d[0] == 0);
    CHECK(d[1] == 1);
    CHECK(d[2] == 2);
    CHECK(d[3] == SIZE_MAX);
}
