#include "pwe/expr.hpp"

#include <charconv>
#include <cmath>

#include "pwe/error.hpp"

namespace pwe {

int VarTable::add(const std::string& id, double p_true) {
    if (index_.count(id)) throw ConfigError("duplicate variable '" + id + "'");
    if (!(p_true >= 0.0 && p_true <= 1.0))
        throw ConfigError("probability of '" + id + "' outside [0,1]");
    index_[id] = size();
    ids_.push_back(id);
    p_.push_back(p_true);
    return size() - 1;
}

int VarTable::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

const char* cmp_symbol(Cmp c) {
    switch (c) {
        case Cmp::Le: return "<=";
        case Cmp::Ge: return ">=";
        case Cmp::Eq: return "=";
        case Cmp::Lt: return "<";
        case Cmp::Gt: return ">";
    }
    return "?";
}

bool is_boolean_op(Op op) {
    switch (op) {
        case Op::Bool: case Op::Var: case Op::Not: case Op::And: case Op::Or: case Op::Atom:
            return true;
        default:
            return false;
    }
}

namespace ex {

namespace {
std::shared_ptr<Expr> make(Op op) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    return e;
}

ExprPtr nary(Op op, std::vector<ExprPtr> kids) {
    if (kids.empty()) throw InternalError("empty n-ary expression");
    if (kids.size() == 1) return kids[0];
    auto e = make(op);
    e->kids = std::move(kids);
    return e;
}
}  // namespace

ExprPtr boolean(bool b) {
    auto e = make(Op::Bool);
    e->truth = b;
    return e;
}

ExprPtr var(const std::string& name, int index) {
    auto e = make(Op::Var);
    e->name = name;
    e->var = index;
    return e;
}

ExprPtr ref(const std::string& base, std::vector<Affine> index, std::vector<Affine> label,
            bool has_label) {
    auto e = make(Op::Ref);
    e->name = base;
    e->index = std::move(index);
    e->label = std::move(label);
    e->has_label = has_label;
    return e;
}

ExprPtr grounded_ref(const std::string& eid) {
    auto e = make(Op::Ref);
    e->name = eid;
    return e;
}

ExprPtr neg(ExprPtr k) {
    auto e = make(Op::Not);
    e->kids = {std::move(k)};
    return e;
}

ExprPtr conj(std::vector<ExprPtr> kids) {
    if (kids.empty()) return boolean(true);
    return nary(Op::And, std::move(kids));
}

ExprPtr disj(std::vector<ExprPtr> kids) {
    if (kids.empty()) return boolean(false);
    return nary(Op::Or, std::move(kids));
}

ExprPtr atom(Cmp c, ExprPtr l, ExprPtr r) {
    auto e = make(Op::Atom);
    e->cmp = c;
    e->kids = {std::move(l), std::move(r)};
    return e;
}

ExprPtr scalar(double v) {
    auto e = make(Op::Num);
    e->num = {v};
    return e;
}

ExprPtr vector(std::vector<double> v) {
    auto e = make(Op::Num);
    e->is_vector = true;
    e->num = std::move(v);
    return e;
}

ExprPtr undef(bool is_vector, int dim) {
    auto e = make(Op::Num);
    e->is_vector = is_vector;
    e->undefined = true;
    e->num.assign(is_vector ? dim : 1, 0.0);
    return e;
}

ExprPtr counter(const std::string& name) {
    auto e = make(Op::Counter);
    e->name = name;
    return e;
}

ExprPtr guard(ExprPtr event, ExprPtr value) {
    auto e = make(Op::Guard);
    e->kids = {std::move(event), std::move(value)};
    return e;
}

ExprPtr sum(std::vector<ExprPtr> kids) { return nary(Op::Sum, std::move(kids)); }
ExprPtr prod(std::vector<ExprPtr> kids) { return nary(Op::Prod, std::move(kids)); }

ExprPtr inv(ExprPtr k) {
    auto e = make(Op::Inv);
    e->kids = {std::move(k)};
    return e;
}

ExprPtr pow(ExprPtr k, int exponent) {
    auto e = make(Op::Pow);
    e->exponent = exponent;
    e->kids = {std::move(k)};
    return e;
}

ExprPtr dist(ExprPtr a, ExprPtr b) {
    auto e = make(Op::Dist);
    e->kids = {std::move(a), std::move(b)};
    return e;
}

ExprPtr fold(Op fold_op, const std::string& counter, Affine lo, Affine hi, ExprPtr body) {
    auto e = make(Op::Fold);
    e->fold_op = fold_op;
    e->name = counter;
    e->lo = std::move(lo);
    e->hi = std::move(hi);
    e->kids = {std::move(body)};
    return e;
}

}  // namespace ex

namespace {

std::string label_text(const std::vector<std::string>& parts, bool simple) {
    if (simple) return "_" + parts[0];
    std::string s = "_{";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ".";
        s += parts[i];
    }
    return s + "}";
}

std::string index_text(const std::vector<std::string>& parts) {
    if (parts.empty()) return "";
    std::string s = "[";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += parts[i];
    }
    return s + "]";
}

}  // namespace

std::string eid_string(const std::string& base, const std::vector<std::int64_t>& index,
                       const std::vector<std::int64_t>& label, bool has_label) {
    std::vector<std::string> ip, lp;
    for (auto v : index) ip.push_back(std::to_string(v));
    for (auto v : label) lp.push_back(std::to_string(v));
    std::string s = base + index_text(ip);
    if (has_label) s += label_text(lp, label.size() == 1 && label[0] >= 0);
    return s;
}

std::string eid_pattern_string(const std::string& base, const std::vector<Affine>& index,
                               const std::vector<Affine>& label, bool has_label) {
    std::vector<std::string> ip, lp;
    for (auto& a : index) ip.push_back(a.str());
    for (auto& a : label) {
        bool bare = a.is_constant() || (a.constant == 0 && a.terms.size() == 1 && a.terms[0].second == 1);
        lp.push_back(bare ? a.str() : "(" + a.str() + ")");
    }
    std::string s = base + index_text(ip);
    if (has_label)
        s += label_text(lp, label.size() == 1 && label[0].is_constant() && label[0].constant >= 0);
    return s;
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

// Binding strength used by the printer; the event-text parser mirrors it.
int level(const Expr& e) {
    switch (e.op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Not: return 3;
        case Op::Atom: return 4;
        case Op::Sum: return 5;
        case Op::Prod: return 6;
        case Op::Guard: return 7;
        case Op::Num: return (!e.is_vector && !e.undefined && e.num[0] < 0) ? 7 : 8;
        default: return 8;
    }
}

void print(const ExprPtr& e, int need, std::string& out);

void print_list(const std::vector<ExprPtr>& kids, const char* sep, int need, std::string& out) {
    for (size_t i = 0; i < kids.size(); ++i) {
        if (i) out += sep;
        print(kids[i], need, out);
    }
}

const char* fold_name(Op op) {
    switch (op) {
        case Op::And: return "and";
        case Op::Or: return "or";
        case Op::Sum: return "sum";
        case Op::Prod: return "prod";
        default: throw InternalError("bad fold operator");
    }
}

void print(const ExprPtr& e, int need, std::string& out) {
    bool paren = level(*e) < need;
    if (paren) out += "(";
    switch (e->op) {
        case Op::Bool: out += e->truth ? "true" : "false"; break;
        case Op::Var: out += e->name; break;
        case Op::Counter: out += e->name; break;
        case Op::Ref:
            out += eid_pattern_string(e->name, e->index, e->label, e->has_label);
            break;
        case Op::Not: out += "!"; print(e->kids[0], 3, out); break;
        case Op::And: print_list(e->kids, " & ", 3, out); break;
        case Op::Or: print_list(e->kids, " | ", 2, out); break;
        case Op::Atom:
            print(e->kids[0], 5, out);
            out += " ";
            out += cmp_symbol(e->cmp);
            out += " ";
            print(e->kids[1], 5, out);
            break;
        case Op::Num:
            if (e->undefined) {
                out += e->is_vector ? "undef(" + std::to_string(e->num.size()) + ")" : "undef";
            } else if (e->is_vector) {
                out += "[";
                for (size_t i = 0; i < e->num.size(); ++i) {
                    if (i) out += ", ";
                    out += format_number(e->num[i]);
                }
                out += "]";
            } else {
                out += format_number(e->num[0]);
            }
            break;
        case Op::Guard:
            print(e->kids[0], 8, out);
            out += " @ ";
            print(e->kids[1], 8, out);
            break;
        case Op::Sum: print_list(e->kids, " + ", 6, out); break;
        case Op::Prod: print_list(e->kids, " * ", 7, out); break;
        case Op::Inv: out += "inv("; print(e->kids[0], 0, out); out += ")"; break;
        case Op::Pow:
            out += "pow(";
            print(e->kids[0], 0, out);
            out += ", " + std::to_string(e->exponent) + ")";
            break;
        case Op::Dist:
            out += "dist(";
            print(e->kids[0], 0, out);
            out += ", ";
            print(e->kids[1], 0, out);
            out += ")";
            break;
        case Op::Fold:
            out += fold_name(e->fold_op);
            out += "(" + e->name + " in " + e->lo.str() + ".." + e->hi.str() + ": ";
            print(e->kids[0], 0, out);
            out += ")";
            break;
    }
    if (paren) out += ")";
}

}  // namespace

std::string to_text(const ExprPtr& e) {
    std::string s;
    print(e, 0, s);
    return s;
}

}  // namespace pwe
