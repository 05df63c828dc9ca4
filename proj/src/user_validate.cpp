#include <map>
#include <set>
#include <sstream>

#include "pwe/error.hpp"
#include "pwe/user_lang.hpp"

namespace pwe::ul {

namespace {

// Rank of a loadData() result whose shape depends on the dataset.
constexpr int kAnyRank = -1;

int level(const UExpr& e) {
    switch (e.kind) {
        case Kind::Compare: return 1;
        case Kind::Add: return 2;
        case Kind::Mul: case Kind::ArrayInit: return 3;
        default: return 4;
    }
}

void print(const UExprPtr& e, int need, std::string& out) {
    bool paren = level(*e) < need;
    if (paren) out += "(";
    switch (e->kind) {
        case Kind::Int: out += std::to_string(e->ival); break;
        case Kind::Float: {
            std::string s = format_number(e->fval);
            if (s.find_first_of(".e") == std::string::npos) s += ".0";
            out += s;
            break;
        }
        case Kind::Bool: out += e->bval ? "True" : "False"; break;
        case Kind::Name: out += e->name; break;
        case Kind::Index:
            print(e->kids[0], 4, out);
            out += "[";
            print(e->kids[1], 0, out);
            out += "]";
            break;
        case Kind::ArrayInit:
            out += "[None] * ";
            print(e->kids[0], 4, out);
            break;
        case Kind::Compare:
            print(e->kids[0], 2, out);
            out += std::string(" ") + (e->cmp == Cmp::Eq ? "==" : cmp_symbol(e->cmp)) + " ";
            print(e->kids[1], 2, out);
            break;
        case Kind::Add:
            print(e->kids[0], 2, out);
            out += " + ";
            print(e->kids[1], 3, out);
            break;
        case Kind::Mul:
            print(e->kids[0], 3, out);
            out += " * ";
            print(e->kids[1], 4, out);
            break;
        case Kind::Reduce:
            out += e->name + "(";
            print(e->kids[0], 0, out);
            out += ")";
            break;
        case Kind::ListComp:
            out += "[";
            print(e->kids[0], 0, out);
            out += " for " + e->name + " in range(";
            print(e->kids[1], 0, out);
            out += ", ";
            print(e->kids[2], 0, out);
            out += ")";
            if (e->kids.size() > 3) {
                out += " if ";
                print(e->kids[3], 0, out);
            }
            out += "]";
            break;
        case Kind::Call:
            out += e->name + "(";
            for (size_t i = 0; i < e->kids.size(); ++i) {
                if (i) out += ", ";
                print(e->kids[i], 0, out);
            }
            out += ")";
            break;
    }
    if (paren) out += ")";
}

void print_stmts(const std::vector<UStmt>& items, int depth, std::ostringstream& out) {
    std::string pad(2 * depth, ' ');
    for (auto& s : items) {
        switch (s.kind) {
            case UStmt::Kind::Assign:
                out << pad << print_user_expr(s.target) << " = " << print_user_expr(s.value) << "\n";
                break;
            case UStmt::Kind::ExtBind:
                out << pad;
                if (s.names.size() == 1) {
                    out << s.names[0];
                } else {
                    out << "(";
                    for (size_t i = 0; i < s.names.size(); ++i) out << (i ? ", " : "") << s.names[i];
                    out << ")";
                }
                out << " = " << s.ext << "()\n";
                break;
            case UStmt::Kind::For:
                out << pad << "for " << s.var << " in range(" << print_user_expr(s.from) << ", "
                    << print_user_expr(s.to) << "):\n";
                print_stmts(s.body, depth + 1, out);
                break;
        }
    }
}

bool same_expr(const UExprPtr& a, const UExprPtr& b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind || a->ival != b->ival || a->fval != b->fval || a->bval != b->bval ||
        a->name != b->name || a->cmp != b->cmp || a->kids.size() != b->kids.size())
        return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!same_expr(a->kids[i], b->kids[i])) return false;
    return true;
}

bool same_stmts(const std::vector<UStmt>& a, const std::vector<UStmt>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        const UStmt& x = a[i];
        const UStmt& y = b[i];
        if (x.kind != y.kind || x.names != y.names || x.ext != y.ext || x.var != y.var) return false;
        if (!same_expr(x.target, y.target) || !same_expr(x.value, y.value) || !same_expr(x.from, y.from) ||
            !same_expr(x.to, y.to))
            return false;
        if (!same_stmts(x.body, y.body)) return false;
    }
    return true;
}

class Validator {
public:
    std::vector<Diagnostic> run(const UserProgram& p) {
        stmts(p.items);
        return diags_;
    }

private:
    void report(const std::string& rule, Pos pos, const std::string& msg) { diags_.push_back({rule, pos, msg}); }

    bool constant(const UExprPtr& e) const {
        switch (e->kind) {
            case Kind::Int: return true;
            case Kind::Name: return constants_.count(e->name) > 0;
            case Kind::Add: case Kind::Mul: return constant(e->kids[0]) && constant(e->kids[1]);
            default: return false;
        }
    }

    int dims(const UExprPtr& e) const {
        switch (e->kind) {
            case Kind::Name: {
                auto it = dims_.find(e->name);
                return it == dims_.end() ? 0 : it->second;
            }
            case Kind::Index: {
                int d = dims(e->kids[0]);
                return d == kAnyRank ? kAnyRank : std::max(0, d - 1);
            }
            case Kind::ArrayInit: case Kind::ListComp: return 1;
            case Kind::Call:
                if (e->name.rfind("breakTies", 0) == 0 && !e->kids.empty()) return dims(e->kids[0]);
                return 0;
            default: return 0;
        }
    }

    void check(const UExprPtr& e, bool under_reduce = false) {
        switch (e->kind) {
            case Kind::Int: case Kind::Float: case Kind::Bool: break;
            case Kind::Name:
                if (!defined_.count(e->name))
                    report("undefined-identifier", e->pos, "use of undefined identifier '" + e->name + "'");
                break;
            case Kind::Index:
                check(e->kids[0]);
                check(e->kids[1]);
                if (dims(e->kids[0]) == 0 && defined_.count(target_base(e->kids[0])))
                    report("index-non-array", e->pos, "indexing a value that is not an array");
                break;
            case Kind::ArrayInit:
                check(e->kids[0]);
                if (!constant(e->kids[0]))
                    report("array-size", e->pos, "array size is not a compile-time constant");
                break;
            case Kind::Compare: case Kind::Add: case Kind::Mul:
                check(e->kids[0]);
                check(e->kids[1]);
                break;
            case Kind::Reduce: check(e->kids[0], true); break;
            case Kind::ListComp: {
                if (!under_reduce)
                    report("comprehension-placement", e->pos, "list comprehension outside a reduce call");
                check(e->kids[1]);
                check(e->kids[2]);
                if (!constant(e->kids[1]) || !constant(e->kids[2]))
                    report("loop-bounds", e->pos, "comprehension range is not constant");
                bool fresh = defined_.insert(e->name).second;
                check(e->kids[0]);
                if (dims(e->kids[0]) > 0)
                    report("comprehension-dimension", e->kids[0]->pos,
                           "comprehension must build a one-dimensional array of base values");
                if (e->kids.size() > 3) check(e->kids[3]);
                if (fresh) defined_.erase(e->name);
                break;
            }
            case Kind::Call: {
                static const std::map<std::string, size_t> arity = {
                    {"pow", 2}, {"invert", 1}, {"scalar_mult", 2}, {"dist", 2},
                    {"breakTies", 1}, {"breakTies1", 1}, {"breakTies2", 1}};
                for (auto& k : e->kids) check(k);
                if (e->kids.size() != arity.at(e->name)) {
                    report("call-arity", e->pos, e->name + " expects " + std::to_string(arity.at(e->name)) +
                                                     " argument(s)");
                    break;
                }
                if (e->name == "breakTies" && dims(e->kids[0]) != 1 && dims(e->kids[0]) != kAnyRank)
                    report("break-ties-shape", e->pos, "breakTies expects a one-dimensional array");
                if ((e->name == "breakTies1" || e->name == "breakTies2") && dims(e->kids[0]) != 2 &&
                    dims(e->kids[0]) != kAnyRank)
                    report("break-ties-shape", e->pos, e->name + " expects a two-dimensional array");
                if (e->name == "pow" && !constant(e->kids[1]) && e->kids[1]->kind != Kind::Int)
                    report("pow-exponent", e->kids[1]->pos, "exponent must be an integer constant");
                break;
            }
        }
    }

    void stmts(const std::vector<UStmt>& items) {
        for (auto& s : items) {
            switch (s.kind) {
                case UStmt::Kind::ExtBind:
                    for (size_t i = 0; i < s.names.size(); ++i) {
                        int d = 0;
                        if (s.ext == "init") d = 1;
                        if (s.ext == "loadData") d = i == 0 ? 1 : i == 1 ? 0 : kAnyRank;
                        defined_.insert(s.names[i]);
                        dims_[s.names[i]] = d;
                        if (d == 0) constants_.insert(s.names[i]);
                    }
                    break;
                case UStmt::Kind::Assign: {
                    std::vector<UExprPtr> idx;
                    std::string base = target_base(s.target, &idx);
                    for (auto& i : idx) check(i);
                    check(s.value);
                    if (s.value->kind == Kind::ArrayInit && idx.empty() == false) {
                        if (!defined_.count(base))
                            report("undefined-identifier", s.target->pos, "use of undefined identifier '" + base + "'");
                        if (dims_[base] != kAnyRank) dims_[base] = std::max(dims_[base], static_cast<int>(idx.size()) + 1);
                    } else if (!idx.empty()) {
                        if (!defined_.count(base))
                            report("undefined-identifier", s.target->pos, "use of undefined identifier '" + base + "'");
                        else if (dims_[base] != kAnyRank && dims_[base] < static_cast<int>(idx.size()))
                            report("index-non-array", s.target->pos, "too many indices for '" + base + "'");
                    } else {
                        defined_.insert(base);
                        dims_[base] = dims(s.value);
                        if (s.value->kind == Kind::Int && !assigned_.count(base))
                            constants_.insert(base);
                        else
                            constants_.erase(base);
                        assigned_.insert(base);
                    }
                    break;
                }
                case UStmt::Kind::For: {
                    check(s.from);
                    check(s.to);
                    if (!constant(s.from) || !constant(s.to))
                        report("loop-bounds", s.pos, "loop range is not constant");
                    bool fresh = defined_.insert(s.var).second;
                    stmts(s.body);
                    if (fresh) defined_.erase(s.var);
                    break;
                }
            }
        }
    }

    std::vector<Diagnostic> diags_;
    std::set<std::string> defined_;
    std::set<std::string> constants_;
    std::set<std::string> assigned_;
    std::map<std::string, int> dims_;
};

}  // namespace

std::string print_user_expr(const UExprPtr& e) {
    std::string s;
    print(e, 0, s);
    return s;
}

std::string print_user_program(const UserProgram& p) {
    std::ostringstream out;
    print_stmts(p.items, 0, out);
    return out.str();
}

bool same_program(const UserProgram& a, const UserProgram& b) { return same_stmts(a.items, b.items); }

std::vector<Diagnostic> validate_user_program(const UserProgram& p) { return Validator().run(p); }

}  // namespace pwe::ul
