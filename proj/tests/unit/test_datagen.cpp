#include <cmath>

#include "doctest.h"
#include "pwe/datagen.hpp"
#include "pwe/error.hpp"
#include "pwe/grounder.hpp"
#include "pwe/oracle.hpp"

using namespace pwe;

namespace {

// Probability of the conjunction of the given points' events (negated when
// the index is negative, as -(l+1)).
double prob(const Dataset& d, std::vector<int> literals) {
    std::vector<ExprPtr> kids;
    for (int l : literals) kids.push_back(l >= 0 ? d.points[l].event_expr : ex::neg(d.points[-l - 1].event_expr));
    EventProgram p;
    EventDecl decl;
    decl.base = "Q";
    decl.rhs = kids.size() == 1 ? kids[0] : ex::conj(kids);
    p.items.push_back(EventItem::declaration(decl));
    GroundedProgram g = ground(p, {"Q"}, d.vars);
    return oracle_probabilities_serial(g).probability[0];
}

GenOptions opts(Correlation c, int n, int group) {
    GenOptions o;
    o.scheme = c;
    o.n = n;
    o.group = group;
    o.seed = 3;
    return o;
}

}  // namespace

TEST_CASE("mutex sets are exclusive inside and independent across") {
    GenOptions o = opts(Correlation::Mutex, 6, 1);
    o.mutex_size = 3;
    Dataset d = gen_correlations(o);
    CHECK(d.vars.size() == 6);
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b) {
            double both = prob(d, {a, b});
            if (a / 3 == b / 3) CHECK(both == 0.0);
            else CHECK(both == doctest::Approx(prob(d, {a}) * prob(d, {b})).epsilon(1e-12));
        }
}

TEST_CASE("markov chain conditionals") {
    Dataset d = gen_correlations(opts(Correlation::Markov, 5, 1));
    CHECK(d.vars.size() == 9);
    for (int i = 0; i + 1 < 5; ++i) {
        double pt = d.vars.p(d.vars.find("t" + std::to_string(i + 1)));
        double pf = d.vars.p(d.vars.find("f" + std::to_string(i + 1)));
        CHECK(prob(d, {i, i + 1}) / prob(d, {i}) == doctest::Approx(pt).epsilon(1e-12));
        CHECK(prob(d, {-(i + 1), i + 1}) / prob(d, {-(i + 1)}) == doctest::Approx(pf).epsilon(1e-12));
    }
}

TEST_CASE("positive events are disjunctions of distinct pool variables") {
    GenOptions o = opts(Correlation::Positive, 24, 4);
    o.literals = 3;
    Dataset d = gen_correlations(o);
    CHECK(d.vars.size() == 6);
    for (int l = 0; l < d.vars.size(); ++l) {
        CHECK(d.vars.p(l) >= 0.5);
        CHECK(d.vars.p(l) <= 0.8);
    }
    for (auto& pt : d.points) {
        REQUIRE(pt.event_expr->op == Op::Or);
        CHECK(pt.event_expr->kids.size() == 3);
    }
}

TEST_CASE("groups share lineage and certain points lead") {
    for (Correlation c : {Correlation::Positive, Correlation::Mutex, Correlation::Markov}) {
        GenOptions o = opts(c, 18, 4);
        o.certain = 0.25;
        Dataset d = gen_correlations(o);
        REQUIRE(d.points.size() == 18);
        for (int i = 0; i < 4; ++i) CHECK(d.points[i].event == "true");
        for (int i = 4; i < 18; ++i) {
            CHECK(d.points[i].event != "true");
            CHECK(d.points[i].event_expr == d.points[i / 4 * 4].event_expr);
            CHECK(d.points[i].coords.size() == 2);
        }
        CHECK(dataset_to_json(gen_correlations(o)) == dataset_to_json(d));
        o.seed = 4;
        CHECK(dataset_to_json(gen_correlations(o)) != dataset_to_json(d));
        CHECK(parse_dataset(dataset_to_json(d)).points.size() == 18);
    }
}

TEST_CASE("all-certain data has one world") {
    GenOptions o = opts(Correlation::Positive, 8, 2);
    o.certain = 1.0;
    Dataset d = gen_correlations(o);
    CHECK(d.vars.size() == 0);
    for (auto& p : d.points) CHECK(p.event == "true");
    CHECK(prob(d, {0, 7}) == 1.0);
}

TEST_CASE("invalid generator options") {
    GenOptions o;
    o.certain = 1.5;
    CHECK_THROWS_AS(gen_correlations(o), ConfigError);
    o = GenOptions{};
    o.p_lo = 0.9;
    o.p_hi = 0.5;
    CHECK_THROWS_AS(gen_correlations(o), ConfigError);
    o = GenOptions{};
    o.p_hi = 1.0;
    CHECK_THROWS_AS(gen_correlations(o), ConfigError);
    o = GenOptions{};
    o.n = 0;
    CHECK_THROWS_AS(gen_correlations(o), ConfigError);
    o = GenOptions{};
    o.literals = 9;
    CHECK_THROWS_AS(gen_correlations(o), ConfigError);
    CHECK_THROWS_AS(parse_correlation("anti"), ConfigError);
}
