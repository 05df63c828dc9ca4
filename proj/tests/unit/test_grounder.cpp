#include "doctest.h"
#include "pwe/error.hpp"
#include "pwe/eval.hpp"
#include "pwe/event_text.hpp"
#include "pwe/grounder.hpp"

using namespace pwe;

TEST_CASE("loops instantiate one declaration per counter value") {
    VarTable vt;
    vt.add("x[0]", 0.5);
    vt.add("x[1]", 0.5);
    GroundedProgram g = ground(parse_event_program("forall i in 0..1:\n  D[i] := x[i]\n"), {"D*"}, vt);
    REQUIRE(g.decls.size() == 2);
    CHECK(g.decls[0].eid == "D[0]");
    CHECK(g.decls[1].eid == "D[1]");
    CHECK(g.decls[1].expr->op == Op::Var);
    CHECK(g.decls[1].expr->var == 1);
    CHECK(g.targets == std::vector<int>{0, 1});
}

TEST_CASE("label arithmetic of the nested-loop example") {
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
    VarTable vt;
    GroundedProgram g = ground(parse_event_program(text), {"M_3"}, vt);
    CHECK(g.find("M_{1.2.0}") >= 0);
    CHECK(g.find("M_{1.3}") >= 0);
    Env env = env_of(g);
    CHECK(eval_cval(ex::grounded_ref("M_3"), {}, env, vt).v[0] == 17.0);
    ProgramEvaluator pe(g);
    auto s = pe.scratch();
    pe.run({}, s);
    CHECK(pe.value(g.find("M_3"), s).v[0] == 17.0);
}

TEST_CASE("grounding errors") {
    VarTable vt;
    vt.add("x", 0.5);
    CHECK_THROWS_AS(ground(parse_event_program("M_0 := x\nM_0 := !x\n"), {}, vt), SingleAssignmentError);
    CHECK_THROWS_AS(ground(parse_event_program("A := B\n"), {}, vt), ResolutionError);
    CHECK_THROWS_AS(ground(parse_event_program("A := B | x\nB := A\n"), {}, vt), CycleError);
    CHECK_THROWS_AS(ground(parse_event_program("A := x\n"), {"Z*"}, vt), ConfigError);
    CHECK_THROWS_AS(ground(parse_event_program("A := dist(1, 2)\n"), {}, vt), TypeError);
}

TEST_CASE("forward references are resolved") {
    VarTable vt;
    vt.add("x", 0.5);
    GroundedProgram g = ground(parse_event_program("A := B & x\nB := !x\n"), {"A"}, vt);
    CHECK_FALSE(eval_event(ex::grounded_ref("A"), {1}, env_of(g), vt));
}

TEST_CASE("glob matching") {
    CHECK(glob_match("Centre[*]_*", "Centre[0,1]_2"));
    CHECK(glob_match("M?", "M1"));
    CHECK_FALSE(glob_match("M?", "M12"));
    CHECK(glob_match("*", ""));
    CHECK_FALSE(glob_match("A*B", "AxBx"));
}

TEST_CASE("flat evaluator agrees with recursive evaluation") {
    VarTable vt;
    vt.add("a", 0.3);
    vt.add("b", 0.6);
    vt.add("c", 0.5);
    std::string text =
        "S := a @ 2 + b @ 3 + c @ 4\n"
        "T := (a | c) @ [1, 1] + b @ [2, 0]\n"
        "U := dist(T, [0, 0]) <= S\n"
        "V := inv(S + -5) * 2\n"
        "W := sum(i in 0..2: (S >= i) @ i)\n"
        "X := prod(i in 1..2: (a & b) @ i) * T\n"
        "Y := T = [1, 1] | !U\n";
    GroundedProgram g = ground(parse_event_program(text), {"*"}, vt);
    ProgramEvaluator pe(g);
    Env env = env_of(g);
    auto s = pe.scratch();
    for (int w = 0; w < 8; ++w) {
        Valuation nu{std::uint8_t(w & 1), std::uint8_t((w >> 1) & 1), std::uint8_t((w >> 2) & 1)};
        pe.run(nu, s);
        for (size_t d = 0; d < g.decls.size(); ++d) {
            Value a = pe.value(static_cast<int>(d), s);
            Value b = eval_value(ex::grounded_ref(g.decls[d].eid), nu, env, vt);
            CHECK(a.str() == b.str());
        }
    }
}

TEST_CASE("grounded text round trip") {
    VarTable vt;
    vt.add("x", 0.5);
    GroundedProgram g = ground(parse_event_program("forall i in 0..2:\n  A[i]_0 := x @ i\nB := sum(i in 0..2: A[i]_0)\n"),
                               {"B"}, vt);
    std::string t = print_grounded(g);
    GroundedProgram h = ground(parse_event_program(t), {"B"}, vt);
    CHECK(print_grounded(h) == t);
}
