#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pwe/error.hpp"
#include "pwe/user_lang.hpp"

using namespace pwe;

namespace {
std::string slurp(const std::string& name) {
    std::ifstream f(std::string(PWE_DATA_DIR) + "/" + name);
    REQUIRE(f.good());
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

bool has_rule(const std::vector<ul::Diagnostic>& ds, const std::string& rule) {
    for (auto& d : ds)
        if (d.rule == rule) return true;
    return false;
}
}  // namespace

TEST_CASE("figure programs parse, validate and print back to the same tree") {
    for (const char* f : {"kmedoids_fig1.pwl", "kmeans_fig2.pwl", "mcl_fig3.pwl", "kmedoids.pwl",
                          "kmedoids_pairs.pwl", "nested_labels.pwl"}) {
        CAPTURE(f);
        ul::UserProgram p = ul::parse_user_program(slurp(f));
        CHECK(ul::validate_user_program(p).empty());
        std::string printed = ul::print_user_program(p);
        ul::UserProgram q = ul::parse_user_program(printed);
        CHECK(ul::same_program(p, q));
        CHECK(ul::print_user_program(q) == printed);
    }
}

TEST_CASE("a single assignment parses") {
    ul::UserProgram p = ul::parse_user_program("M = 7\n");
    REQUIRE(p.items.size() == 1);
    CHECK(p.items[0].target->name == "M");
    CHECK(p.items[0].value->kind == ul::Kind::Int);
    CHECK(p.items[0].value->ival == 7);
}

TEST_CASE("loop bounds must be constants") {
    CHECK_THROWS_AS(ul::parse_user_program("x = 3\nx = x + 1\nfor i in range(0,x):\n  y = i\n"), SyntaxError);
    CHECK_NOTHROW(ul::parse_user_program("x = 3\nfor i in range(0,x):\n  y = i\n"));
}

TEST_CASE("syntax errors carry positions") {
    try {
        ul::parse_user_program("x = 1\ny = (2 +\n");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line >= 2);
    }
    CHECK_THROWS_AS(ul::parse_user_program("x = foo(1)\n"), SyntaxError);
    CHECK_THROWS_AS(ul::parse_user_program("x = 1 < 2 < 3\n"), SyntaxError);
    CHECK_THROWS_AS(ul::parse_user_program("x = reduce_sum(3)\n"), SyntaxError);
}

TEST_CASE("validator reports each rule") {
    auto diag = [](const char* src) { return ul::validate_user_program(ul::parse_user_program(src)); };
    CHECK(has_rule(diag("y = z + 1\n"), "undefined-identifier"));
    CHECK(has_rule(diag("x = 1\ny = x[0]\n"), "index-non-array"));
    CHECK(has_rule(diag("(O, n) = loadData()\ny = reduce_sum([reduce_sum([1 for a in range(0,n)]) + 1 for b in range(0,n)])\nz = [1 for c in range(0,n)]\n"),
                   "comprehension-placement"));
    CHECK(has_rule(diag("(O, n) = loadData()\nA = [None] * n\nfor i in range(0,n):\n  A[i] = [None] * n\n  for j in range(0,n):\n    A[i][j] = 1\ny = reduce_sum([A[i] for i in range(0,n)])\n"),
                   "comprehension-dimension"));
    CHECK(has_rule(diag("x = dist(1)\n"), "call-arity"));
    CHECK(has_rule(diag("x = 2\ny = pow(x, 1.5)\n"), "pow-exponent"));
}

TEST_CASE("diagnostics are formatted with file, position and rule") {
    auto ds = ul::validate_user_program(ul::parse_user_program("y = z\n"));
    REQUIRE(!ds.empty());
    std::string s = ul::format_diagnostic("p.pwl", ds[0]);
    CHECK(s.rfind("p.pwl:1:", 0) == 0);
    CHECK(s.find("[undefined-identifier]") != std::string::npos);
}
