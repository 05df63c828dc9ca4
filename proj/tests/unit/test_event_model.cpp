#include <cmath>
#include <random>

#include "doctest.h"
#include "pwe/error.hpp"
#include "pwe/eval.hpp"
#include "pwe/event_text.hpp"

using namespace pwe;

namespace {

VarTable four_vars() {
    VarTable vt;
    vt.add("x1", 0.6);
    vt.add("x2", 0.7);
    vt.add("x3", 0.5);
    vt.add("x4", 0.8);
    return vt;
}

}  // namespace

TEST_CASE("object events of the line example") {
    VarTable vt = four_vars();
    Env env;
    Valuation nu{1, 0, 1, 1};
    CHECK(eval_event(parse_event_expr("x1 | x3"), nu, env, vt));
    CHECK(eval_event(parse_event_expr("!x2 & x4"), nu, env, vt));
    CHECK_FALSE(eval_event(parse_event_expr("x2"), nu, env, vt));
    CHECK(eval_event(ex::boolean(true), nu, env, vt));
}

TEST_CASE("comparison with an undefined operand holds") {
    VarTable vt;
    vt.add("x", 0.5);
    Env env;
    auto a = parse_event_expr("x @ 2 <= false @ 5");
    CHECK(eval_event(a, {1}, env, vt));
    CHECK(eval_event(parse_event_expr("x @ 7 <= 5"), {0}, env, vt));
    CHECK_FALSE(eval_event(parse_event_expr("x @ 7 <= 5"), {1}, env, vt));
    CHECK(eval_event(parse_event_expr("undef(2) = [1, 2]"), {1}, env, vt));
}

TEST_CASE("guarded sums select the true branches") {
    VarTable vt;
    vt.add("a", 0.5);
    vt.add("b", 0.5);
    Env env;
    Value v = eval_cval(parse_event_expr("a @ 3 + b @ 4"), {1, 0}, env, vt);
    CHECK(v.defined);
    CHECK(v.v[0] == 3.0);
    Value none = eval_cval(parse_event_expr("a @ 3 + b @ 4"), {0, 0}, env, vt);
    CHECK_FALSE(none.defined);
}

TEST_CASE("inverse of zero is undefined and absorbs products") {
    VarTable vt;
    Env env;
    Value v = eval_cval(parse_event_expr("5 * inv(3 + -3)"), {}, env, vt);
    CHECK_FALSE(v.defined);
    CHECK_FALSE(eval_cval(parse_event_expr("pow(0, -2)"), {}, env, vt).defined);
    CHECK(eval_cval(parse_event_expr("pow(2, 3)"), {}, env, vt).v[0] == 8.0);
}

TEST_CASE("disjunctive guard differs from a sum of guards") {
    VarTable vt;
    vt.add("p", 0.5);
    vt.add("q", 0.5);
    Env env;
    Value a = eval_cval(parse_event_expr("(p | q) @ 4"), {1, 1}, env, vt);
    Value b = eval_cval(parse_event_expr("p @ 4 + q @ 4"), {1, 1}, env, vt);
    CHECK(a.v[0] == 4.0);
    CHECK(b.v[0] == 8.0);
}

TEST_CASE("vector operations") {
    VarTable vt;
    Env env;
    CHECK(eval_cval(parse_event_expr("dist([0, 0], [3, 4])"), {}, env, vt).v[0] == 5.0);
    CHECK(eval_cval(parse_event_expr("[1, 2] * [3, 4]"), {}, env, vt).v[0] == 11.0);
    Value s = eval_cval(parse_event_expr("2 * [1, 2]"), {}, env, vt);
    CHECK(s.type == Type::vector(2));
    CHECK(s.v == std::vector<double>{2, 4});
    CHECK_THROWS_AS(eval_cval(parse_event_expr("dist(1, 2)"), {}, env, vt), TypeError);
    CHECK_THROWS_AS(eval_cval(parse_event_expr("inv([1, 2])"), {}, env, vt), TypeError);
}

TEST_CASE("resolution and cycles") {
    VarTable vt;
    vt.add("x", 0.5);
    Env env;
    env["A"] = parse_event_expr("B | x");
    env["B"] = parse_event_expr("A");
    env["C"] = parse_event_expr("x & D");
    CHECK_THROWS_AS(eval_event(parse_event_expr("A"), {1}, env, vt), CycleError);
    CHECK_THROWS_AS(eval_event(parse_event_expr("C"), {1}, env, vt), ResolutionError);
    CHECK_THROWS_AS(eval_event(parse_event_expr("y"), {1}, env, vt), ResolutionError);
}

TEST_CASE("folds with explicit ranges") {
    VarTable vt;
    Env env;
    CHECK(eval_cval(parse_event_expr("sum(i in 1..4: i)"), {}, env, vt).v[0] == 10.0);
    CHECK(eval_cval(parse_event_expr("prod(i in 1..4: i)"), {}, env, vt).v[0] == 24.0);
    CHECK(eval_event(parse_event_expr("and(i in 1..0: false)"), {}, env, vt));
    CHECK_FALSE(eval_cval(parse_event_expr("sum(i in 1..0: i)"), {}, env, vt).defined);
}

TEST_CASE("world probabilities") {
    VarTable two;
    two.add("a", 0.5);
    two.add("b", 0.5);
    CHECK(world_probability({1, 0}, two) == doctest::Approx(0.25));
    VarTable one;
    one.add("x", 0.7);
    CHECK(world_probability({1}, one) == doctest::Approx(0.7));
    VarTable vt = four_vars();
    CHECK(world_probability({1, 0, 1, 1}, vt) == doctest::Approx(0.6 * 0.3 * 0.5 * 0.8));
    double total = 0;
    for (int w = 0; w < 16; ++w) {
        Valuation nu(4);
        for (int i = 0; i < 4; ++i) nu[i] = (w >> i) & 1;
        total += world_probability(nu, vt);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("variable table validation") {
    VarTable vt;
    vt.add("x", 0.2);
    CHECK_THROWS_AS(vt.add("x", 0.3), ConfigError);
    CHECK_THROWS_AS(vt.add("y", 1.5), ConfigError);
}

TEST_CASE("undefined algebra identities under fuzzing") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> d(-10, 10);
    Value us = Value::undefined(Type::scalar());
    Value uv = Value::undefined(Type::vector(3));
    for (int i = 0; i < 200; ++i) {
        Value x = Value::scalar(d(rng));
        Value v = Value::vector({d(rng), d(rng), d(rng)});
        CHECK(add(us, x) == x);
        CHECK(add(x, us) == x);
        CHECK_FALSE(mul(us, x).defined);
        CHECK_FALSE(mul(us, v).defined);
        CHECK(mul(us, v).type == Type::vector(3));
        CHECK(add(uv, v) == v);
        CHECK_FALSE(mul(x, uv).defined);
        CHECK_FALSE(distance(uv, v).defined);
        CHECK(compare(Cmp::Lt, us, x));
        CHECK(compare(Cmp::Eq, uv, v));
    }
    CHECK_FALSE(inverse(Value::scalar(0.0)).defined);
}

TEST_CASE("event text round trip") {
    const char* samples[] = {
        "x1 | x3",
        "!x2 & x4",
        "(a | b) & !(c & d)",
        "x @ 2 + y @ [1, 2] * 3",
        "dist(O[l]_0, M[i]_{-1.(2*it-1)}) <= dist(O[l]_0, M[j]_{-1.(2*it-1)})",
        "sum(p in 0..i-1: InCl[p,l]_{1.3} @ 1)",
        "inv(pow(N[0,1]_2, 3) + -1.5)",
        "undef(2) = [0.1, 2e-07]",
        "!(a <= b) | (x @ (y @ 2)) > 1",
    };
    for (auto* s : samples) {
        std::set<std::string> ctr{"i", "it", "j", "l"};
        ExprPtr e = parse_event_expr(s, ctr);
        std::string t = to_text(e);
        CHECK(to_text(parse_event_expr(t, ctr)) == t);
    }
    CHECK(to_text(parse_event_expr("a & (b & c)")) == "a & (b & c)");
    CHECK(to_text(parse_event_expr("M_{1.-1}")) == "M_{1.-1}");
    CHECK(to_text(parse_event_expr("M_3")) == "M_3");
}

TEST_CASE("event program text round trip") {
    std::string text =
        "M_0 := 7\n"
        "M_1 := M_0 + 2\n"
        "M_{1.-1} := M_1\n"
        "forall i in 0..1:\n"
        "  M_{1.(2*i)} := M_{1.(2*i-1)} + i\n"
        "  M_{1.(2*i).-1} := M_{1.(2*i)}\n"
        "  forall j in 0..2:\n"
        "    M_{1.(2*i).j} := M_{1.(2*i).(j-1)} + 1\n"
        "  M_{1.(2*i+1)} := M_{1.(2*i).2}\n"
        "M_2 := M_{1.3}\n"
        "M_3 := M_2 + 1\n";
    EventProgram p = parse_event_program(text);
    CHECK(p.items.size() == 6);
    CHECK(print_event_program(p) == text);
    CHECK_THROWS_AS(parse_event_program("A := x |\n"), SyntaxError);
    CHECK_THROWS_AS(parse_event_program("A := x\n  B := y\n"), SyntaxError);
}
