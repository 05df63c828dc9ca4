#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pwe/expr.hpp"

namespace pwe::ul {

struct Pos {
    int line = 0;
    int col = 0;
};

enum class Kind : std::uint8_t {
    Int, Float, Bool, Name, Index, ArrayInit, Compare, Reduce, ListComp, Call, Add, Mul
};

struct UExpr;
using UExprPtr = std::shared_ptr<const UExpr>;

// Index: kids = {base, index}. ArrayInit: kids = {size}. Reduce: name is the
// reduce function, kids = {comprehension}. ListComp: name is the bound
// variable, kids = {body, from, to[, condition]}. Call: name is the function.
struct UExpr {
    Kind kind = Kind::Int;
    Pos pos;
    std::int64_t ival = 0;
    double fval = 0;
    bool bval = false;
    std::string name;
    Cmp cmp = Cmp::Le;
    std::vector<UExprPtr> kids;
};

struct UStmt {
    enum class Kind : std::uint8_t { Assign, ExtBind, For } kind = Kind::Assign;
    Pos pos;
    UExprPtr target;                 // Assign: Name or Index chain
    UExprPtr value;                  // Assign
    std::vector<std::string> names;  // ExtBind
    std::string ext;                 // ExtBind: loadData, loadParams, init
    std::string var;                 // For
    UExprPtr from, to;               // For
    std::vector<UStmt> body;         // For
};

struct UserProgram {
    std::vector<UStmt> items;
};

struct Diagnostic {
    std::string rule;
    Pos pos;
    std::string message;
};

UserProgram parse_user_program(const std::string& text);
std::vector<Diagnostic> validate_user_program(const UserProgram& p);
std::string print_user_program(const UserProgram& p);
std::string print_user_expr(const UExprPtr& e);
bool same_program(const UserProgram& a, const UserProgram& b);
std::string format_diagnostic(const std::string& file, const Diagnostic& d);

// Name of the base variable of a Name/Index chain and its indices, outermost first.
std::string target_base(const UExprPtr& e, std::vector<UExprPtr>* indices = nullptr);

}  // namespace pwe::ul
