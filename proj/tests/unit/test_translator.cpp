#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "kmedoids_direct.hpp"
#include "pwe/error.hpp"
#include "pwe/eval.hpp"
#include "pwe/event_text.hpp"
#include "pwe/grounder.hpp"
#include "pwe/translator.hpp"
#include "user_interp.hpp"

using namespace pwe;
using testing::IValue;

namespace {
std::string slurp(const std::string& name) {
    std::ifstream f(std::string(PWE_DATA_DIR) + "/" + name);
    REQUIRE(f.good());
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

IValue grounded_value(const GroundedProgram& g, const Env& env, const std::string& eid, const Valuation& nu) {
    int at = g.find(eid);
    REQUIRE(at >= 0);
    const GroundedDecl* d = &g.decls[at];
    if (d->type.kind == Type::Kind::Bool) return IValue::boolean(eval_event(ex::grounded_ref(eid), nu, env, g.vars));
    Value v = eval_value(ex::grounded_ref(eid), nu, env, g.vars);
    if (!v.defined) return IValue::undef(v.type.kind == Type::Kind::Vector);
    return v.type.kind == Type::Kind::Vector ? IValue::vector(v.v) : IValue::num(v.v[0]);
}

// Every element of every final variable agrees with the interpreter in every world.
void check_against_interpreter(const std::string& program, const Dataset& d) {
    ul::UserProgram up = ul::parse_user_program(program);
    Translation t = translate_to_event_program(up, d);
    GroundedProgram g = ground(t.program, {}, d.vars);
    Env env = env_of(g);
    const int m = d.vars.size();
    for (std::uint32_t w = 0; w < (1u << m); ++w) {
        Valuation nu(m);
        for (int i = 0; i < m; ++i) nu[i] = (w >> i) & 1;
        testing::IEnv ienv = testing::interpret(up, d, nu);
        for (auto& [name, fin] : t.finals) {
            if (!fin.has_label) continue;
            const IValue& want = ienv.at(name);
            if (!fin.is_array) {
                CHECK(testing::same_value(grounded_value(g, env, t.final_eid(name), nu), want));
                continue;
            }
            for (size_t i = 0; i < want.items.size(); ++i) {
                if (fin.shape.size() == 1) {
                    CAPTURE(t.final_eid(name, {static_cast<std::int64_t>(i)}));
                    CHECK(testing::same_value(
                        grounded_value(g, env, t.final_eid(name, {static_cast<std::int64_t>(i)}), nu), want.items[i]));
                    continue;
                }
                for (size_t l = 0; l < want.items[i].items.size(); ++l) {
                    std::string eid = t.final_eid(name, {static_cast<std::int64_t>(i), static_cast<std::int64_t>(l)});
                    CAPTURE(eid);
                    CHECK(testing::same_value(grounded_value(g, env, eid, nu), want.items[i].items[l]));
                }
            }
        }
    }
}
}  // namespace

TEST_CASE("nested loops get the affine label table") {
    Dataset none;
    Translation t = translate_to_event_program(ul::parse_user_program(slurp("nested_labels.pwl")), none);
    const std::string want =
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
    CHECK(print_event_program(t.program) == want);
    CHECK(t.final_eid("M") == "M_3");
    GroundedProgram g = ground(t.program, {"M_3"}, none.vars);
    Value v = eval_value(ex::grounded_ref("M_3"), {}, env_of(g), g.vars);
    REQUIRE(v.defined);
    CHECK(v.v[0] == 17);
    auto ienv = testing::interpret(ul::parse_user_program(slurp("nested_labels.pwl")), none, {});
    CHECK(ienv.at("M").x[0] == 17);
}

TEST_CASE("k-medoids translation agrees with the interpreter and direct k-medoids in all worlds") {
    Dataset d = load_dataset(std::string(PWE_DATA_DIR) + "/line4.json");
    check_against_interpreter(slurp("kmedoids.pwl"), d);
    check_against_interpreter(slurp("kmedoids_fig1.pwl"), d);
    check_against_interpreter(slurp("kmeans_fig2.pwl"), d);

    ul::UserProgram up = ul::parse_user_program(slurp("kmedoids.pwl"));
    Translation t = translate_to_event_program(up, d);
    GroundedProgram g = ground(t.program, {}, d.vars);
    Env env = env_of(g);
    for (std::uint32_t w = 0; w < 16; ++w) {
        Valuation nu(4);
        for (int i = 0; i < 4; ++i) nu[i] = (w >> i) & 1;
        testing::Clustering c = testing::kmedoids_direct(d, nu, 2, 3);
        for (int i = 0; i < 2; ++i)
            for (int l = 0; l < 4; ++l)
                CHECK(eval_event(ex::grounded_ref(t.final_eid("InCl", {i, l})), nu, env, g.vars) ==
                      (c.cluster[l] == i));
    }
}

TEST_CASE("markov clustering translation agrees with the interpreter") {
    Dataset d = load_dataset(std::string(PWE_DATA_DIR) + "/mcl_small.json");
    check_against_interpreter(slurp("mcl_fig3.pwl"), d);
}

TEST_CASE("reduce variants follow filter semantics") {
    Dataset d;
    d.vars.add("a", 0.5);
    d.vars.add("b", 0.5);
    d.vars.add("c", 0.5);
    for (const char* ev : {"a", "b", "c"}) {
        Dataset::Point p;
        p.id = ev;
        p.coords = {static_cast<double>(d.points.size() + 1)};
        p.event = ev;
        p.event_expr = ex::var(ev);
        d.points.push_back(p);
    }
    d.params = {{"k", 2}};
    d.load = {"objects", "count", "exists"};
    const std::string prog =
        "(O, n, E) = loadData()\n"
        "k = loadParams()\n"
        "s = reduce_sum([O[l] for l in range(0,n) if E[l]])\n"
        "p = reduce_mult([l + 2 for l in range(0,n) if E[l]])\n"
        "c = reduce_count([1 for l in range(0,n) if E[l]])\n"
        "a = reduce_and([E[l] for l in range(0,n) if l < 2])\n"
        "o = reduce_or([E[l] for l in range(1,n) if E[0]])\n"
        "e = reduce_sum([l for l in range(0,0)])\n"
        "B = [None] * n\n"
        "for l in range(0,n):\n"
        "  B[l] = E[l]\n"
        "T = breakTies(B)\n"
        "q = invert(c) + pow(c * 2, 2) + dist(s, s * 2)\n";
    check_against_interpreter(prog, d);
}

TEST_CASE("translation errors") {
    Dataset d;
    CHECK_THROWS_AS(translate_to_event_program(ul::parse_user_program("(k) = loadParams()\n"), d), ConfigError);
    CHECK_THROWS_AS(translate_to_event_program(ul::parse_user_program("M = init()\n"), d), ConfigError);
    CHECK_THROWS_AS(translate_to_event_program(
                        ul::parse_user_program("for i in range(0,2):\n  for i in range(0,2):\n    x = i\n"), d),
                    SyntaxError);
}

TEST_CASE("break_ties_encode keeps one true entry per line") {
    std::vector<std::vector<ExprPtr>> in(3, std::vector<ExprPtr>(2));
    VarTable vt;
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 2; ++l) {
            std::string id = "v" + std::to_string(i) + std::to_string(l);
            vt.add(id, 0.5);
            in[i][l] = ex::var(id);
        }
    auto second = break_ties_encode(in, TieAxis::Second);
    auto first = break_ties_encode(in, TieAxis::First);
    for (std::uint32_t w = 0; w < 64; ++w) {
        Valuation nu(6);
        for (int b = 0; b < 6; ++b) nu[b] = (w >> b) & 1;
        Env env;
        for (int l = 0; l < 2; ++l) {
            int count = 0, lowest = -1;
            for (int i = 0; i < 3; ++i) {
                bool src = eval_event(in[i][l], nu, env, vt);
                if (src && lowest < 0) lowest = i;
                count += eval_event(second[i][l], nu, env, vt);
                CHECK(eval_event(second[i][l], nu, env, vt) == (i == lowest));
            }
            CHECK(count == (lowest >= 0 ? 1 : 0));
        }
        for (int i = 0; i < 3; ++i) {
            int lowest = -1;
            for (int l = 0; l < 2; ++l) {
                if (lowest < 0 && eval_event(in[i][l], nu, env, vt)) lowest = l;
                CHECK(eval_event(first[i][l], nu, env, vt) == (l == lowest));
            }
        }
    }
    std::vector<std::vector<ExprPtr>> ragged = {{ex::boolean(true)}, {}};
    CHECK_THROWS_AS(break_ties_encode(ragged, TieAxis::First), ConfigError);
}
