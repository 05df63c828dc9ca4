#include "pwe/translator.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "pwe/error.hpp"

namespace pwe {

using ul::Kind;
using ul::UExprPtr;
using ul::UStmt;

std::string Translation::final_eid(const std::string& var, const std::vector<std::int64_t>& index) const {
    auto it = finals.find(var);
    if (it == finals.end()) throw ConfigError("no variable '" + var + "' in the program");
    return eid_string(var, index, it->second.label, it->second.has_label);
}

std::string Translation::final_glob(const std::string& var) const {
    auto it = finals.find(var);
    if (it == finals.end()) throw ConfigError("no variable '" + var + "' in the program");
    std::string s = var;
    if (it->second.is_array) {
        s += "[*";
        for (size_t i = 1; i < it->second.shape.size(); ++i) s += ",*";
        s += "]";
    }
    return eid_string(s, {}, it->second.label, it->second.has_label);
}

std::vector<std::vector<ExprPtr>> break_ties_encode(const std::vector<std::vector<ExprPtr>>& in, TieAxis axis) {
    for (auto& row : in)
        if (row.size() != in.front().size()) throw ConfigError("breakTies needs a rectangular family");
    std::vector<std::vector<ExprPtr>> out(in.size());
    for (size_t i = 0; i < in.size(); ++i) {
        for (size_t l = 0; l < in[i].size(); ++l) {
            std::vector<ExprPtr> earlier;
            if (axis == TieAxis::Second)
                for (size_t j = 0; j < i; ++j) earlier.push_back(in[j][l]);
            else
                for (size_t p = 0; p < l; ++p) earlier.push_back(in[i][p]);
            out[i].push_back(earlier.empty() ? in[i][l] : ex::conj({in[i][l], ex::neg(ex::disj(earlier))}));
        }
    }
    return out;
}

namespace {

struct Var {
    bool is_array = false;
    std::vector<std::int64_t> shape;
    std::vector<Affine> label;
    bool has_label = false;
};

struct Block {
    std::string counter;
    std::int64_t lo = 0;
    std::map<std::string, int> A;
    std::map<std::string, int> c;
    std::map<std::string, std::vector<Affine>> prefix;
};

bool versions(const UStmt& s, const std::string& v) {
    switch (s.kind) {
        case UStmt::Kind::Assign: return s.target->kind == Kind::Name && s.target->name == v;
        case UStmt::Kind::ExtBind:
            for (auto& n : s.names)
                if (n == v) return true;
            return false;
        case UStmt::Kind::For:
            for (auto& b : s.body)
                if (versions(b, v)) return true;
            return false;
    }
    return false;
}

void versioned_names(const std::vector<UStmt>& body, std::set<std::string>& out) {
    for (auto& s : body) {
        if (s.kind == UStmt::Kind::Assign && s.target->kind == Kind::Name) out.insert(s.target->name);
        if (s.kind == UStmt::Kind::ExtBind) out.insert(s.names.begin(), s.names.end());
        if (s.kind == UStmt::Kind::For) versioned_names(s.body, out);
    }
}

int assignments_per_iteration(const std::vector<UStmt>& body, const std::string& v) {
    int a = 0;
    for (auto& s : body)
        if (versions(s, v)) ++a;
    return a;
}

ExprPtr element_ref(const std::string& base, const std::vector<Affine>& idx, const Var& v) {
    return ex::ref(base, idx, v.label, v.has_label);
}

class Translator {
public:
    explicit Translator(const Dataset& d) : data_(d) { blocks_.emplace_back(); }

    Translation run(const ul::UserProgram& p) {
        Translation t;
        stmts(p.items, t.program.items);
        for (auto& [name, v] : vars_) {
            VarSummary s;
            s.is_array = v.is_array;
            s.shape = v.shape;
            s.has_label = v.has_label;
            CounterEnv none;
            for (auto& a : v.label) s.label.push_back(a.eval(none));
            t.finals[name] = s;
        }
        t.constants = consts_;
        return t;
    }

private:
    [[noreturn]] void fail(const ul::Pos& pos, const std::string& msg) const {
        throw SyntaxError(msg, pos.line, pos.col);
    }

    std::int64_t const_int(const UExprPtr& e) const {
        switch (e->kind) {
            case Kind::Int: return e->ival;
            case Kind::Name: {
                auto it = consts_.find(e->name);
                if (it == consts_.end() || counters_.count(e->name)) fail(e->pos, "'" + e->name + "' is not a constant");
                if (it->second != std::floor(it->second)) fail(e->pos, "'" + e->name + "' is not an integer");
                return static_cast<std::int64_t>(it->second);
            }
            case Kind::Add: return const_int(e->kids[0]) + const_int(e->kids[1]);
            case Kind::Mul: return const_int(e->kids[0]) * const_int(e->kids[1]);
            default: fail(e->pos, "expected an integer constant");
        }
    }

    Affine affine(const UExprPtr& e) const {
        switch (e->kind) {
            case Kind::Int: return Affine::lit(e->ival);
            case Kind::Name:
                if (counters_.count(e->name)) return Affine::var(e->name);
                return Affine::lit(const_int(e));
            case Kind::Add: return affine(e->kids[0]) + affine(e->kids[1]);
            case Kind::Mul: {
                Affine a = affine(e->kids[0]), b = affine(e->kids[1]);
                if (a.is_constant()) return b.scaled(a.constant);
                if (b.is_constant()) return a.scaled(b.constant);
                fail(e->pos, "index is not affine in the loop counters");
            }
            default: fail(e->pos, "unsupported index expression");
        }
    }

    std::vector<Affine> new_label(const std::string& v) {
        Block& b = blocks_.back();
        int c = b.c[v]++;
        if (blocks_.size() == 1) return {Affine::lit(c)};
        int a = b.A.at(v);
        std::vector<Affine> l = b.prefix.at(v);
        l.push_back(Affine::var(b.counter, a) + Affine::lit(c - static_cast<std::int64_t>(a) * b.lo));
        return l;
    }

    // Wraps `make(idx)` into forall loops over the given shape.
    void over_shape(const std::vector<std::int64_t>& shape,
                    const std::function<EventItem(const std::vector<Affine>&)>& make,
                    std::vector<EventItem>& out) {
        std::vector<Affine> idx;
        std::vector<std::string> names;
        for (size_t d = 0; d < shape.size(); ++d) {
            names.push_back("_c" + std::to_string(d));
            idx.push_back(Affine::var(names.back()));
        }
        EventItem item = make(idx);
        for (size_t d = shape.size(); d-- > 0;)
            item = EventItem::loop(names[d], Affine::lit(0), Affine::lit(shape[d] - 1), {item});
        out.push_back(std::move(item));
    }

    void emit_copy(const std::string& v, const std::vector<Affine>& to, const std::vector<Affine>& from,
                   std::vector<EventItem>& out) {
        const Var& var = vars_.at(v);
        if (!var.is_array) {
            out.push_back(EventItem::declaration({v, {}, to, true, ex::ref(v, {}, from, true)}));
            return;
        }
        over_shape(var.shape, [&](const std::vector<Affine>& idx) {
            return EventItem::declaration({v, idx, to, true, ex::ref(v, idx, from, true)});
        }, out);
    }

    void stmts(const std::vector<UStmt>& items, std::vector<EventItem>& out) {
        for (auto& s : items) {
            switch (s.kind) {
                case UStmt::Kind::ExtBind: ext(s, out); break;
                case UStmt::Kind::Assign: assign(s, out); break;
                case UStmt::Kind::For: loop(s, out); break;
            }
        }
    }

    void ext(const UStmt& s, std::vector<EventItem>& out) {
        if (blocks_.size() > 1) fail(s.pos, s.ext + "() may only be called outside loops");
        const int n = static_cast<int>(data_.points.size());
        if (s.ext == "loadParams") {
            for (auto& name : s.names) {
                if (!data_.params.contains(name) || !data_.params.at(name).is_number())
                    throw ConfigError("unresolved dataset binding: parameter '" + name + "'");
                consts_[name] = data_.params.at(name).get<double>();
            }
            return;
        }
        if (s.ext == "init") {
            if (s.names.size() != 1) fail(s.pos, "init() binds exactly one name");
            if (data_.seeds.empty()) throw ConfigError("unresolved dataset binding: no initial medoids");
            const std::string& m = s.names[0];
            Var& v = vars_[m];
            v.is_array = true;
            v.shape = {static_cast<std::int64_t>(data_.seeds.size())};
            v.label = new_label(m);
            v.has_label = true;
            for (size_t i = 0; i < data_.seeds.size(); ++i) {
                auto& sd = data_.seeds[i];
                auto& a = data_.points[sd.primary];
                ExprPtr e = ex::guard(a.event_expr, ex::vector(a.coords));
                if (sd.fallback >= 0) {
                    auto& b = data_.points[sd.fallback];
                    e = ex::sum({e, ex::guard(ex::neg(a.event_expr), ex::vector(b.coords))});
                }
                out.push_back(EventItem::declaration(
                    {m, {Affine::lit(static_cast<std::int64_t>(i))}, v.label, true, e}));
            }
            return;
        }
        std::vector<std::string> roles = data_.load;
        if (roles.empty()) {
            roles = {"objects", "count"};
            if (s.names.size() >= 3) roles.push_back(data_.matrix.empty() ? "exists" : "matrix");
        }
        if (roles.size() < s.names.size()) throw ConfigError("loadData() returns fewer values than bound");
        for (size_t r = 0; r < s.names.size(); ++r) {
            const std::string& name = s.names[r];
            const std::string& role = roles[r];
            if (role == "count") {
                consts_[name] = n;
                continue;
            }
            Var& v = vars_[name];
            v.is_array = true;
            v.label = new_label(name);
            v.has_label = true;
            if (role == "objects" || role == "exists") {
                v.shape = {n};
                for (int l = 0; l < n; ++l) {
                    auto& pt = data_.points[l];
                    ExprPtr e = role == "objects" ? ex::guard(pt.event_expr, ex::vector(pt.coords)) : pt.event_expr;
                    out.push_back(EventItem::declaration({name, {Affine::lit(l)}, v.label, true, e}));
                }
            } else if (role == "matrix") {
                if (static_cast<int>(data_.matrix.size()) != n) throw ConfigError("matrix must be n x n");
                v.shape = {n, n};
                for (int i = 0; i < n; ++i) {
                    if (static_cast<int>(data_.matrix[i].size()) != n) throw ConfigError("matrix must be n x n");
                    for (int j = 0; j < n; ++j)
                        out.push_back(EventItem::declaration(
                            {name, {Affine::lit(i), Affine::lit(j)}, v.label, true, ex::scalar(data_.matrix[i][j])}));
                }
            } else {
                throw ConfigError("unknown loadData role '" + role + "'");
            }
        }
    }

    void assign(const UStmt& s, std::vector<EventItem>& out) {
        std::vector<UExprPtr> idx;
        std::string base = ul::target_base(s.target, &idx);
        const UExprPtr& val = s.value;
        if (!idx.empty()) {
            auto it = vars_.find(base);
            if (it == vars_.end() || !it->second.is_array) fail(s.pos, "'" + base + "' is not an array");
            Var& v = it->second;
            if (val->kind == Kind::ArrayInit) {
                std::int64_t size = const_int(val->kids[0]);
                if (v.shape.size() < idx.size() + 1) v.shape.resize(idx.size() + 1, -1);
                if (v.shape[idx.size()] >= 0 && v.shape[idx.size()] != size)
                    fail(s.pos, "array '" + base + "' is not rectangular");
                v.shape[idx.size()] = size;
                return;
            }
            if (idx.size() != v.shape.size()) fail(s.pos, "element assignment must index every dimension");
            std::vector<Affine> ai;
            for (auto& e : idx) ai.push_back(affine(e));
            ExprPtr rhs = expr(val);
            out.push_back(EventItem::declaration({base, ai, v.label, true, rhs}));
            return;
        }
        if (val->kind == Kind::ArrayInit) {
            std::int64_t size = const_int(val->kids[0]);
            std::vector<Affine> lab = new_label(base);
            Var& v = vars_[base];
            v.is_array = true;
            v.shape = {size};
            v.label = lab;
            v.has_label = true;
            return;
        }
        if (val->kind == Kind::Call && val->name.rfind("breakTies", 0) == 0) {
            break_ties(s, base, out);
            return;
        }
        if (val->kind == Kind::Name && vars_.count(val->name) && vars_.at(val->name).is_array) {
            Var src = vars_.at(val->name);
            std::vector<Affine> lab = new_label(base);
            Var& v = vars_[base];
            v = src;
            v.label = lab;
            over_shape(src.shape, [&](const std::vector<Affine>& ix) {
                return EventItem::declaration({base, ix, lab, true, element_ref(val->name, ix, src)});
            }, out);
            return;
        }
        ExprPtr rhs = expr(val);
        std::vector<Affine> lab = new_label(base);
        Var& v = vars_[base];
        v.is_array = false;
        v.shape.clear();
        v.label = lab;
        v.has_label = true;
        out.push_back(EventItem::declaration({base, {}, lab, true, rhs}));
    }

    void break_ties(const UStmt& s, const std::string& base, std::vector<EventItem>& out) {
        const UExprPtr& call = s.value;
        if (call->kids.size() != 1 || call->kids[0]->kind != Kind::Name)
            fail(call->pos, call->name + " expects an array variable");
        const std::string& src_name = call->kids[0]->name;
        auto it = vars_.find(src_name);
        if (it == vars_.end() || !it->second.is_array) fail(call->pos, call->name + " expects an array variable");
        Var src = it->second;
        size_t want = call->name == "breakTies" ? 1 : 2;
        if (src.shape.size() != want) fail(call->pos, call->name + " got an array of the wrong dimension");
        for (auto d : src.shape)
            if (d < 0) fail(call->pos, "array '" + src_name + "' is not fully shaped");
        std::vector<Affine> lab = new_label(base);
        Var& v = vars_[base];
        v = src;
        v.label = lab;
        v.has_label = true;
        const bool second = call->name == "breakTies2";
        over_shape(src.shape, [&](const std::vector<Affine>& ix) {
            ExprPtr self = element_ref(src_name, ix, src);
            std::vector<Affine> other = ix;
            Affine hi;
            size_t axis = second ? 0 : ix.size() - 1;
            hi = ix[axis] - Affine::lit(1);
            other[axis] = Affine::var("_t");
            ExprPtr earlier = ex::fold(Op::Or, "_t", Affine::lit(0), hi, element_ref(src_name, other, src));
            return EventItem::declaration({base, ix, lab, true, ex::conj({self, ex::neg(earlier)})});
        }, out);
    }

    void loop(const UStmt& s, std::vector<EventItem>& out) {
        std::int64_t lo = const_int(s.from), hi = const_int(s.to);
        if (counters_.count(s.var)) fail(s.pos, "loop counter '" + s.var + "' shadows an enclosing counter");
        std::set<std::string> names;
        versioned_names(s.body, names);
        Block b;
        b.counter = s.var;
        b.lo = lo;
        for (auto& v : names) {
            b.A[v] = assignments_per_iteration(s.body, v);
            auto it = vars_.find(v);
            if (it != vars_.end() && it->second.has_label) {
                std::vector<Affine> entry = it->second.label;
                entry.push_back(Affine::lit(-1));
                emit_copy(v, entry, it->second.label, out);
                b.prefix[v] = it->second.label;
            } else {
                b.prefix[v] = {Affine::lit(-1)};
            }
        }
        std::map<std::string, Var> saved;
        for (auto& v : names) {
            Var& var = vars_[v];
            saved[v] = var;
            var.label = b.prefix[v];
            var.label.push_back(Affine::var(s.var, b.A[v]) + Affine::lit(-1 - b.A[v] * lo));
            var.has_label = true;
        }
        blocks_.push_back(b);
        counters_.insert(s.var);
        std::vector<EventItem> body;
        stmts(s.body, body);
        counters_.erase(s.var);
        Block done = blocks_.back();
        blocks_.pop_back();
        for (auto& v : names)
            if (done.c[v] != done.A[v]) throw InternalError("label counter mismatch for '" + v + "'");
        out.push_back(EventItem::loop(s.var, Affine::lit(lo), Affine::lit(hi - 1), std::move(body)));
        for (auto& v : names) {
            std::vector<Affine> last = done.prefix[v];
            last.push_back(Affine::lit(static_cast<std::int64_t>(done.A[v]) * (hi - lo) - 1));
            std::vector<Affine> next = new_label(v);
            Var& var = vars_[v];
            var.label = next;
            var.has_label = true;
            emit_copy(v, next, last, out);
        }
    }

    ExprPtr expr(const UExprPtr& e) {
        switch (e->kind) {
            case Kind::Int: return ex::scalar(static_cast<double>(e->ival));
            case Kind::Float: return ex::scalar(e->fval);
            case Kind::Bool: return ex::boolean(e->bval);
            case Kind::Name: {
                if (counters_.count(e->name)) return ex::counter(e->name);
                auto c = consts_.find(e->name);
                if (c != consts_.end()) return ex::scalar(c->second);
                auto it = vars_.find(e->name);
                if (it == vars_.end()) fail(e->pos, "undefined identifier '" + e->name + "'");
                if (it->second.is_array) fail(e->pos, "array '" + e->name + "' used as a value");
                return ex::ref(e->name, {}, it->second.label, it->second.has_label);
            }
            case Kind::Index: {
                std::vector<UExprPtr> idx;
                std::string base = ul::target_base(e, &idx);
                auto it = vars_.find(base);
                if (it == vars_.end() || !it->second.is_array) fail(e->pos, "'" + base + "' is not an array");
                if (idx.size() != it->second.shape.size())
                    fail(e->pos, "array '" + base + "' must be indexed in every dimension");
                std::vector<Affine> ai;
                for (auto& i : idx) ai.push_back(affine(i));
                return element_ref(base, ai, it->second);
            }
            case Kind::Compare: return ex::atom(e->cmp, expr(e->kids[0]), expr(e->kids[1]));
            case Kind::Add: return ex::sum({expr(e->kids[0]), expr(e->kids[1])});
            case Kind::Mul: return ex::prod({expr(e->kids[0]), expr(e->kids[1])});
            case Kind::Reduce: return reduce(e);
            case Kind::Call: {
                const std::string& f = e->name;
                if (f == "pow") {
                    if (e->kids.size() != 2) fail(e->pos, "pow expects two arguments");
                    return ex::pow(expr(e->kids[0]), static_cast<int>(const_int(e->kids[1])));
                }
                if (f == "invert" && e->kids.size() == 1) return ex::inv(expr(e->kids[0]));
                if (f == "scalar_mult" && e->kids.size() == 2)
                    return ex::prod({expr(e->kids[0]), expr(e->kids[1])});
                if (f == "dist" && e->kids.size() == 2) return ex::dist(expr(e->kids[0]), expr(e->kids[1]));
                if (f.rfind("breakTies", 0) == 0) fail(e->pos, f + " may only be assigned to a variable");
                fail(e->pos, "wrong number of arguments to " + f);
            }
            case Kind::ArrayInit: fail(e->pos, "array initialiser used as a value");
            case Kind::ListComp: fail(e->pos, "list comprehension outside a reduce call");
        }
        throw InternalError("bad user expression");
    }

    ExprPtr reduce(const UExprPtr& e) {
        const UExprPtr& lc = e->kids[0];
        const std::string& var = lc->name;
        if (counters_.count(var)) fail(lc->pos, "comprehension variable '" + var + "' shadows a counter");
        std::int64_t lo = const_int(lc->kids[1]), hi = const_int(lc->kids[2]) - 1;
        counters_.insert(var);
        ExprPtr body = expr(lc->kids[0]);
        ExprPtr cond = lc->kids.size() > 3 ? expr(lc->kids[3]) : nullptr;
        counters_.erase(var);
        ExprPtr term;
        Op op;
        const std::string& f = e->name;
        if (f == "reduce_and") {
            op = Op::And;
            term = cond ? ex::disj({ex::neg(cond), body}) : body;
        } else if (f == "reduce_or") {
            op = Op::Or;
            term = cond ? ex::conj({cond, body}) : body;
        } else if (f == "reduce_sum") {
            op = Op::Sum;
            term = cond ? ex::guard(cond, body) : body;
        } else if (f == "reduce_mult") {
            op = Op::Prod;
            term = cond ? ex::sum({ex::guard(cond, body), ex::guard(ex::neg(cond), ex::scalar(1))}) : body;
        } else {
            op = Op::Sum;
            term = ex::guard(cond ? cond : ex::boolean(true), ex::scalar(1));
        }
        return ex::fold(op, var, Affine::lit(lo), Affine::lit(hi), term);
    }

    const Dataset& data_;
    std::map<std::string, Var> vars_;
    std::map<std::string, double> consts_;
    std::set<std::string> counters_;
    std::vector<Block> blocks_;
};

}  // namespace

Translation translate_to_event_program(const ul::UserProgram& p, const Dataset& data) {
    return Translator(data).run(p);
}

}  // namespace pwe
