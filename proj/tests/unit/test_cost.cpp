#include <doctest.h>

#include <sstream>

#include "support.hpp"

using namespace approxnfa;
using namespace approxnfa::testing;

TEST_CASE("linear model") {
    CostModel states_only{1.0, 0.0, 0.0, {}};
    CHECK(lut_estimate(states_only, fig3_left()) == 5.0);
    CostModel m{2.0, 0.0, 3.0, {}};
    CHECK(lut_estimate(m, Nfa()) == 5.0);
    CostModel with_edges{1.0, 0.5, 10.0, {}};
    CHECK(lut_estimate(with_edges, fig3_left()) == 10.0 + 5.0 + 0.5 * 5);
}

TEST_CASE("overrides win") {
    CostModel m;
    m.overrides["A3"] = 1000;
    CHECK(lut_estimate(m, fig3_left(), "A3") == 1000.0);
    CHECK(lut_estimate(m, fig3_left(), "A2") == lut_estimate(m, fig3_left()));
}

TEST_CASE("validation") {
    CostModel neg{-1.0, 0.0, 0.0, {}};
    CHECK_THROWS_AS(neg.validate(), ParameterError);
    CostModel bad_override;
    bad_override.overrides["x"] = 0;
    CHECK_THROWS_AS(bad_override.validate(), ParameterError);
}

TEST_CASE("model and override files") {
    std::istringstream in("# fitted\nper_state = 3\nper_transition=1\noverhead=0\n");
    auto m = parse_cost_model(in);
    CHECK(m.per_state == 3.0);
    CHECK(m.per_transition == 1.0);
    CHECK(m.overhead == 0.0);
    std::istringstream bad("per_banana=3\n");
    CHECK_THROWS_AS(parse_cost_model(bad), ParseError);

    std::istringstream ov("candidate_id,luts\nA1,100\nA2,200\n");
    read_overrides(ov, m);
    CHECK(m.overrides.at("A2") == 200.0);
    std::istringstream headerless("A3,1000\n");
    read_overrides(headerless, m);
    CHECK(m.overrides.size() == 3);
}
