#include "pwe/eval.hpp"

#include <cmath>
#include <functional>
#include <unordered_set>

#include "pwe/error.hpp"

namespace pwe {

Env env_of(const GroundedProgram& g) {
    Env env;
    for (auto& d : g.decls) env[d.eid] = d.expr;
    return env;
}

double world_probability(const Valuation& nu, const VarTable& vt) {
    if (static_cast<int>(nu.size()) != vt.size())
        throw ConfigError("valuation size does not match the variable table");
    double p = 1.0;
    for (int i = 0; i < vt.size(); ++i) p *= nu[i] ? vt.p(i) : 1.0 - vt.p(i);
    return p;
}

namespace {

std::string resolve_name(const Expr& e, const CounterEnv& ctr) {
    if (e.index.empty() && e.label.empty() && !e.has_label) return e.name;
    std::vector<std::int64_t> idx, lab;
    for (auto& a : e.index) idx.push_back(a.eval(ctr));
    for (auto& a : e.label) lab.push_back(a.eval(ctr));
    return eid_string(e.name, idx, lab, e.has_label);
}

struct Walker {
    const Valuation& nu;
    const Env& env;
    const VarTable& vt;
    std::unordered_map<std::string, Value> memo;
    std::unordered_set<std::string> active;

    Value deref(const std::string& name) {
        auto m = memo.find(name);
        if (m != memo.end()) return m->second;
        auto it = env.find(name);
        if (it == env.end()) {
            int v = vt.find(name);
            if (v < 0) throw ResolutionError("unresolved reference '" + name + "'");
            if (v >= static_cast<int>(nu.size())) throw ResolutionError("variable '" + name + "' not in valuation");
            return Value::boolean(nu[v] != 0);
        }
        if (!active.insert(name).second) throw CycleError("reference cycle through '" + name + "'");
        Value r = go(it->second, {});
        active.erase(name);
        memo[name] = r;
        return r;
    }

    Value fold(const Expr& e, const CounterEnv& ctr) {
        std::int64_t lo = e.lo.eval(ctr), hi = e.hi.eval(ctr);
        CounterEnv inner = ctr;
        if (lo > hi) {
            if (e.fold_op == Op::And) return Value::boolean(true);
            if (e.fold_op == Op::Or) return Value::boolean(false);
            inner[e.name] = lo;
            Value probe = go(e.kids[0], inner);
            return Value::undefined(probe.type);
        }
        Value acc;
        for (std::int64_t i = lo; i <= hi; ++i) {
            inner[e.name] = i;
            Value v = go(e.kids[0], inner);
            if (i == lo) {
                acc = v;
                if (e.fold_op == Op::And || e.fold_op == Op::Or) {
                    if (v.type.kind != Type::Bool) throw TypeError("Boolean fold over " + v.type.str());
                }
                continue;
            }
            switch (e.fold_op) {
                case Op::And: acc.truth = acc.truth && v.truth; break;
                case Op::Or: acc.truth = acc.truth || v.truth; break;
                case Op::Sum: acc = add(acc, v); break;
                case Op::Prod: acc = mul(acc, v); break;
                default: throw InternalError("bad fold");
            }
        }
        if (e.fold_op == Op::Sum && acc.type.kind == Type::Bool) throw TypeError("sum over bool");
        return acc;
    }

    bool truth(const ExprPtr& e, const CounterEnv& ctr) {
        Value v = go(e, ctr);
        if (v.type.kind != Type::Bool) throw TypeError("expected an event, found " + v.type.str());
        return v.truth;
    }

    Value numeric(const ExprPtr& e, const CounterEnv& ctr) {
        Value v = go(e, ctr);
        if (v.type.kind == Type::Bool) throw TypeError("expected a c-value, found an event");
        return v;
    }

    Value go(const ExprPtr& e, const CounterEnv& ctr) {
        switch (e->op) {
            case Op::Bool: return Value::boolean(e->truth);
            case Op::Var: {
                int v = e->var >= 0 ? e->var : vt.find(e->name);
                if (v < 0) throw ResolutionError("unknown variable '" + e->name + "'");
                if (v >= static_cast<int>(nu.size())) throw ResolutionError("variable '" + e->name + "' not in valuation");
                return Value::boolean(nu[v] != 0);
            }
            case Op::Ref: return deref(resolve_name(*e, ctr));
            case Op::Not: return Value::boolean(!truth(e->kids[0], ctr));
            case Op::And: {
                bool r = true;
                for (auto& k : e->kids) r = truth(k, ctr) && r;
                return Value::boolean(r);
            }
            case Op::Or: {
                bool r = false;
                for (auto& k : e->kids) r = truth(k, ctr) || r;
                return Value::boolean(r);
            }
            case Op::Atom:
                return Value::boolean(compare(e->cmp, numeric(e->kids[0], ctr), numeric(e->kids[1], ctr)));
            case Op::Num: {
                Value v = e->is_vector ? Value::vector(e->num) : Value::scalar(e->num[0]);
                if (e->undefined) v.defined = false;
                return v;
            }
            case Op::Counter: {
                auto it = ctr.find(e->name);
                if (it == ctr.end()) throw ResolutionError("unbound counter '" + e->name + "'");
                return Value::scalar(static_cast<double>(it->second));
            }
            case Op::Guard: {
                bool g = truth(e->kids[0], ctr);
                Value v = numeric(e->kids[1], ctr);
                if (!g) v.defined = false;
                return v;
            }
            case Op::Sum: {
                Value acc = numeric(e->kids[0], ctr);
                for (size_t i = 1; i < e->kids.size(); ++i) acc = add(acc, numeric(e->kids[i], ctr));
                return acc;
            }
            case Op::Prod: {
                Value acc = numeric(e->kids[0], ctr);
                for (size_t i = 1; i < e->kids.size(); ++i) acc = mul(acc, numeric(e->kids[i], ctr));
                return acc;
            }
            case Op::Inv: return inverse(numeric(e->kids[0], ctr));
            case Op::Pow: return power(numeric(e->kids[0], ctr), e->exponent);
            case Op::Dist: return distance(numeric(e->kids[0], ctr), numeric(e->kids[1], ctr));
            case Op::Fold: return fold(*e, ctr);
        }
        throw InternalError("bad expression");
    }
};

}  // namespace

Value eval_value(const ExprPtr& e, const Valuation& nu, const Env& env, const VarTable& vt) {
    Walker w{nu, env, vt, {}, {}};
    return w.go(e, {});
}

bool eval_event(const ExprPtr& e, const Valuation& nu, const Env& env, const VarTable& vt) {
    Walker w{nu, env, vt, {}, {}};
    return w.truth(e, {});
}

Value eval_cval(const ExprPtr& c, const Valuation& nu, const Env& env, const VarTable& vt) {
    Walker w{nu, env, vt, {}, {}};
    return w.numeric(c, {});
}

namespace {

Type static_type(const ExprPtr& e, const std::function<Type(const std::string&)>& ref_type,
                 std::unordered_map<const Expr*, Type>& memo) {
    auto m = memo.find(e.get());
    if (m != memo.end()) return m->second;
    auto sub = [&](int i) { return static_type(e->kids[i], ref_type, memo); };
    auto need_bool = [&](int i) {
        Type t = sub(i);
        if (t.kind != Type::Bool) throw TypeError("expected an event, found " + t.str());
    };
    auto need_num = [&](int i) {
        Type t = sub(i);
        if (!t.numeric()) throw TypeError("expected a c-value, found an event");
        return t;
    };
    Type t;
    switch (e->op) {
        case Op::Bool: case Op::Var: t = Type::boolean(); break;
        case Op::Ref:
            if (!e->index.empty() || !e->label.empty()) throw InternalError("typing an ungrounded reference");
            t = ref_type(e->name);
            break;
        case Op::Not: case Op::And: case Op::Or:
            for (size_t i = 0; i < e->kids.size(); ++i) need_bool(static_cast<int>(i));
            t = Type::boolean();
            break;
        case Op::Atom:
            check_compare_types(e->cmp, need_num(0), need_num(1));
            t = Type::boolean();
            break;
        case Op::Num:
            t = e->is_vector ? Type::vector(static_cast<int>(e->num.size())) : Type::scalar();
            break;
        case Op::Counter: t = Type::scalar(); break;
        case Op::Guard: need_bool(0); t = need_num(1); break;
        case Op::Sum:
            t = need_num(0);
            for (size_t i = 1; i < e->kids.size(); ++i) t = sum_type(t, need_num(static_cast<int>(i)));
            break;
        case Op::Prod:
            t = need_num(0);
            for (size_t i = 1; i < e->kids.size(); ++i) t = mul_type(t, need_num(static_cast<int>(i)));
            break;
        case Op::Inv: case Op::Pow:
            t = need_num(0);
            if (t.kind != Type::Scalar) throw TypeError("inverse/power of " + t.str());
            break;
        case Op::Dist: {
            Type a = need_num(0), b = need_num(1);
            if (a.kind != Type::Vector || !(a == b)) throw TypeError("dist of " + a.str() + " and " + b.str());
            t = Type::scalar();
            break;
        }
        case Op::Fold: throw InternalError("typing an unexpanded fold");
    }
    memo[e.get()] = t;
    return t;
}

}  // namespace

std::vector<Type> infer_types(const GroundedProgram& g) {
    std::vector<Type> types(g.decls.size());
    std::unordered_map<const Expr*, Type> memo;
    std::vector<std::uint8_t> state(g.decls.size(), 0);
    std::function<Type(const std::string&)> ref_type;
    std::function<Type(int)> decl_type = [&](int i) -> Type {
        if (state[i] == 2) return types[i];
        if (state[i] == 1) throw CycleError("reference cycle through '" + g.decls[i].eid + "'");
        state[i] = 1;
        Type t;
        try {
            t = static_type(g.decls[i].expr, ref_type, memo);
        } catch (const TypeError& err) {
            throw TypeError(g.decls[i].eid + ": " + err.what());
        }
        types[i] = t;
        state[i] = 2;
        return t;
    };
    ref_type = [&](const std::string& name) -> Type {
        int i = g.find(name);
        if (i >= 0) return decl_type(i);
        if (g.vars.find(name) >= 0) return Type::boolean();
        throw ResolutionError("unresolved reference '" + name + "'");
    };
    for (size_t i = 0; i < g.decls.size(); ++i) decl_type(static_cast<int>(i));
    return types;
}

ProgramEvaluator::ProgramEvaluator(const GroundedProgram& g) : g_(g) {
    infer_types(g);
    std::unordered_map<const Expr*, int> memo;
    decl_root_.assign(g.decls.size(), -1);
    for (size_t i = 0; i < g.decls.size(); ++i)
        if (decl_root_[i] < 0) decl_root_[i] = compile(g.decls[i].expr, memo);
}

int ProgramEvaluator::compile(const ExprPtr& e, std::unordered_map<const Expr*, int>& memo) {
    auto m = memo.find(e.get());
    if (m != memo.end()) return m->second;
    if (e->op == Op::Ref) {
        int d = g_.find(e->name);
        int r;
        if (d >= 0) {
            if (decl_root_[d] < 0) decl_root_[d] = compile(g_.decls[d].expr, memo);
            r = decl_root_[d];
        } else {
            int v = g_.vars.find(e->name);
            if (v < 0) throw ResolutionError("unresolved reference '" + e->name + "'");
            Instr in;
            in.op = Op::Var;
            in.var = v;
            in.type = Type::boolean();
            code_.push_back(in);
            r = static_cast<int>(code_.size()) - 1;
        }
        memo[e.get()] = r;
        return r;
    }
    if (e->op == Op::Fold || e->op == Op::Counter) throw InternalError("evaluating an ungrounded expression");
    Instr in;
    in.op = e->op;
    in.cmp = e->cmp;
    in.exponent = e->exponent;
    in.var = e->var;
    if (e->op == Op::Var && in.var < 0) {
        in.var = g_.vars.find(e->name);
        if (in.var < 0) throw ResolutionError("unknown variable '" + e->name + "'");
    }
    for (auto& k : e->kids) in.kids.push_back(compile(k, memo));
    auto kt = [&](size_t i) { return code_[in.kids[i]].type; };
    switch (e->op) {
        case Op::Bool: case Op::Var: case Op::Not: case Op::And: case Op::Or: case Op::Atom:
            in.type = Type::boolean();
            break;
        case Op::Num:
            in.type = e->is_vector ? Type::vector(static_cast<int>(e->num.size())) : Type::scalar();
            break;
        case Op::Guard: in.type = kt(1); break;
        case Op::Sum: in.type = kt(0); break;
        case Op::Prod: {
            Type t = kt(0);
            for (size_t i = 1; i < in.kids.size(); ++i) t = mul_type(t, kt(i));
            in.type = t;
            break;
        }
        default: in.type = Type::scalar(); break;
    }
    in.off = num_size_;
    num_size_ += in.type.dim;
    code_.push_back(in);
    int r = static_cast<int>(code_.size()) - 1;
    if (e->op == Op::Num || e->op == Op::Bool) consts_.emplace_back(r, e);
    memo[e.get()] = r;
    return r;
}

ProgramEvaluator::Scratch ProgramEvaluator::scratch() const {
    Scratch s;
    s.def.assign(code_.size(), 0);
    s.num.assign(num_size_, 0.0);
    for (auto& [i, e] : consts_) {
        s.def[i] = e->op == Op::Bool ? e->truth : !e->undefined;
        for (size_t k = 0; k < e->num.size(); ++k) s.num[code_[i].off + k] = e->num[k];
    }
    return s;
}

Value ProgramEvaluator::load(int i, const Scratch& s) const {
    const Instr& in = code_[i];
    if (in.type.kind == Type::Bool) return Value::boolean(s.def[i] != 0);
    Value v = Value::undefined(in.type);
    v.defined = s.def[i] != 0;
    for (int k = 0; k < in.type.dim; ++k) v.v[k] = s.num[in.off + k];
    return v;
}

void ProgramEvaluator::store(int i, const Value& v, Scratch& s) const {
    const Instr& in = code_[i];
    if (in.type.kind == Type::Bool) {
        s.def[i] = v.truth;
        return;
    }
    s.def[i] = v.defined;
    for (int k = 0; k < in.type.dim; ++k) s.num[in.off + k] = v.v[k];
}

void ProgramEvaluator::exec(const Instr& in, const Valuation& nu, Scratch& s) const {
    int self = static_cast<int>(&in - code_.data());
    auto& def = s.def;
    double* out = s.num.data() + in.off;
    switch (in.op) {
        case Op::Bool: case Op::Num: break;
        case Op::Var: def[self] = nu[in.var] != 0; break;
        case Op::Not: def[self] = !def[in.kids[0]]; break;
        case Op::And: {
            std::uint8_t r = 1;
            for (int k : in.kids) r &= def[k];
            def[self] = r;
            break;
        }
        case Op::Or: {
            std::uint8_t r = 0;
            for (int k : in.kids) r |= def[k];
            def[self] = r;
            break;
        }
        case Op::Atom: {
            int a = in.kids[0], b = in.kids[1];
            const Instr& ia = code_[a];
            if (!def[a] || !def[b]) {
                def[self] = 1;
            } else if (ia.type.kind == Type::Scalar) {
                double x = s.num[ia.off], y = s.num[code_[b].off];
                bool r = false;
                switch (in.cmp) {
                    case Cmp::Le: r = x <= y; break;
                    case Cmp::Ge: r = x >= y; break;
                    case Cmp::Lt: r = x < y; break;
                    case Cmp::Gt: r = x > y; break;
                    case Cmp::Eq: r = x == y; break;
                }
                def[self] = r;
            } else {
                def[self] = compare(in.cmp, load(a, s), load(b, s));
            }
            break;
        }
        case Op::Guard: {
            int v = in.kids[1];
            def[self] = def[in.kids[0]] && def[v];
            const double* src = s.num.data() + code_[v].off;
            for (int k = 0; k < in.type.dim; ++k) out[k] = src[k];
            break;
        }
        case Op::Sum: {
            std::uint8_t any = 0;
            for (int k = 0; k < in.type.dim; ++k) out[k] = 0.0;
            for (int c : in.kids) {
                if (!def[c]) continue;
                any = 1;
                const double* src = s.num.data() + code_[c].off;
                for (int k = 0; k < in.type.dim; ++k) out[k] += src[k];
            }
            def[self] = any;
            break;
        }
        case Op::Dist: {
            int a = in.kids[0], b = in.kids[1];
            if (!def[a] || !def[b]) {
                def[self] = 0;
                break;
            }
            const double* x = s.num.data() + code_[a].off;
            const double* y = s.num.data() + code_[b].off;
            double acc = 0;
            for (int k = 0; k < code_[a].type.dim; ++k) acc += (x[k] - y[k]) * (x[k] - y[k]);
            out[0] = std::sqrt(acc);
            def[self] = 1;
            break;
        }
        case Op::Prod: {
            Value acc = load(in.kids[0], s);
            for (size_t i = 1; i < in.kids.size(); ++i) acc = mul(acc, load(in.kids[i], s));
            store(self, acc, s);
            break;
        }
        case Op::Inv: store(self, inverse(load(in.kids[0], s)), s); break;
        case Op::Pow: store(self, power(load(in.kids[0], s), in.exponent), s); break;
        default: throw InternalError("bad instruction");
    }
}

void ProgramEvaluator::run(const Valuation& nu, Scratch& s) const {
    for (auto& in : code_) exec(in, nu, s);
}

bool ProgramEvaluator::truth(int decl, const Scratch& s) const { return s.def[decl_root_[decl]] != 0; }

Value ProgramEvaluator::value(int decl, const Scratch& s) const { return load(decl_root_[decl], s); }

}  // namespace pwe
