#include "pwe/grounder.hpp"

#include <functional>
#include <optional>

#include "pwe/error.hpp"
#include "pwe/eval.hpp"

namespace pwe {

bool glob_match(const std::string& pattern, const std::string& text) {
    size_t p = 0, t = 0, star = std::string::npos, mark = 0;
    while (t < text.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
            ++p;
            ++t;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = t;
        } else if (star != std::string::npos) {
            p = star + 1;
            t = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

namespace {

std::string decl_name(const EventDecl& d, const CounterEnv& env) {
    std::vector<std::int64_t> idx, lab;
    for (auto& a : d.index) idx.push_back(a.eval(env));
    for (auto& a : d.label) lab.push_back(a.eval(env));
    return eid_string(d.base, idx, lab, d.has_label);
}

// Substitutes counters, expands folds; references become canonical names.
ExprPtr instantiate(const ExprPtr& e, CounterEnv& env) {
    switch (e->op) {
        case Op::Ref: {
            std::vector<std::int64_t> idx, lab;
            for (auto& a : e->index) idx.push_back(a.eval(env));
            for (auto& a : e->label) lab.push_back(a.eval(env));
            return ex::grounded_ref(eid_string(e->name, idx, lab, e->has_label));
        }
        case Op::Counter: {
            auto it = env.find(e->name);
            if (it == env.end()) throw ResolutionError("unbound counter '" + e->name + "'");
            return ex::scalar(static_cast<double>(it->second));
        }
        case Op::Fold: {
            std::int64_t lo = e->lo.eval(env), hi = e->hi.eval(env);
            auto saved = env.find(e->name) != env.end() ? std::optional<std::int64_t>(env[e->name]) : std::nullopt;
            std::vector<ExprPtr> parts;
            for (std::int64_t i = lo; i <= hi; ++i) {
                env[e->name] = i;
                parts.push_back(instantiate(e->kids[0], env));
            }
            if (saved)
                env[e->name] = *saved;
            else
                env.erase(e->name);
            switch (e->fold_op) {
                case Op::And: return ex::conj(parts);
                case Op::Or: return ex::disj(parts);
                case Op::Sum:
                    return parts.empty() ? ex::undef(false, 1) : ex::sum(parts);
                case Op::Prod:
                    return parts.empty() ? ex::undef(false, 1) : ex::prod(parts);
                default: throw InternalError("bad fold");
            }
        }
        default: break;
    }
    if (e->kids.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    bool changed = false;
    for (auto& k : copy->kids) {
        ExprPtr n = instantiate(k, env);
        changed = changed || n != k;
        k = n;
    }
    return changed ? ExprPtr(copy) : e;
}

struct Collector {
    std::vector<GroundedDecl>& out;
    int top_item;
    std::int64_t iteration;
    int ordinal = 0;

    void walk(const std::vector<EventItem>& items, CounterEnv& env) {
        for (auto& it : items) {
            if (it.is_loop) {
                std::int64_t lo = it.lo.eval(env), hi = it.hi.eval(env);
                bool shadow = env.count(it.counter) > 0;
                if (shadow) throw ConfigError("loop counter '" + it.counter + "' shadows an outer counter");
                for (std::int64_t v = lo; v <= hi; ++v) {
                    env[it.counter] = v;
                    walk(it.body, env);
                }
                env.erase(it.counter);
            } else {
                GroundedDecl d;
                d.eid = decl_name(it.decl, env);
                d.expr = instantiate(it.decl.rhs, env);
                d.top_item = top_item;
                d.iteration = iteration;
                d.ordinal = ordinal++;
                out.push_back(std::move(d));
            }
        }
    }
};

// Rewrites canonical-name references to variables where they name one.
ExprPtr resolve(const ExprPtr& e, const GroundedProgram& g, const VarTable& vt,
                std::unordered_map<const Expr*, ExprPtr>& memo) {
    auto m = memo.find(e.get());
    if (m != memo.end()) return m->second;
    ExprPtr r = e;
    if (e->op == Op::Ref) {
        if (g.find(e->name) < 0) {
            int v = vt.find(e->name);
            if (v < 0) throw ResolutionError("unresolved reference '" + e->name + "'");
            r = ex::var(e->name, v);
        }
    } else if (e->op == Op::Var) {
        int v = vt.find(e->name);
        if (v < 0) throw ResolutionError("unknown variable '" + e->name + "'");
        if (v != e->var) r = ex::var(e->name, v);
    } else if (!e->kids.empty()) {
        auto copy = std::make_shared<Expr>(*e);
        bool changed = false;
        for (auto& k : copy->kids) {
            ExprPtr n = resolve(k, g, vt, memo);
            changed = changed || n != k;
            k = n;
        }
        if (changed) r = copy;
    }
    memo[e.get()] = r;
    return r;
}

void check_acyclic(const GroundedProgram& g) {
    std::vector<std::uint8_t> state(g.decls.size(), 0);
    std::function<void(const ExprPtr&)> visit_expr;
    std::function<void(int)> visit = [&](int i) {
        if (state[i] == 2) return;
        if (state[i] == 1) throw CycleError("reference cycle through '" + g.decls[i].eid + "'");
        state[i] = 1;
        visit_expr(g.decls[i].expr);
        state[i] = 2;
    };
    visit_expr = [&](const ExprPtr& e) {
        if (e->op == Op::Ref) {
            visit(g.find(e->name));
            return;
        }
        for (auto& k : e->kids) visit_expr(k);
    };
    for (size_t i = 0; i < g.decls.size(); ++i) visit(static_cast<int>(i));
}

}  // namespace

std::vector<GroundedDecl> instantiate_loop_body(const EventProgram& p, int item, std::int64_t value) {
    const EventItem& it = p.items.at(item);
    if (!it.is_loop) throw InternalError("item is not a loop");
    std::vector<GroundedDecl> out;
    CounterEnv env{{it.counter, value}};
    Collector c{out, item, value};
    c.walk(it.body, env);
    return out;
}

GroundedProgram ground(std::shared_ptr<const EventProgram> p, const std::vector<std::string>& targets,
                       const VarTable& vt) {
    GroundedProgram g;
    g.vars = vt;
    g.source = p;
    for (size_t i = 0; i < p->items.size(); ++i) {
        const EventItem& it = p->items[i];
        if (it.is_loop) {
            CounterEnv none;
            std::int64_t lo = it.lo.eval(none), hi = it.hi.eval(none);
            for (std::int64_t v = lo; v <= hi; ++v) {
                CounterEnv env{{it.counter, v}};
                Collector c{g.decls, static_cast<int>(i), v};
                c.walk(it.body, env);
            }
        } else {
            CounterEnv env;
            Collector c{g.decls, static_cast<int>(i), kNoIteration};
            c.walk({it}, env);
        }
    }
    for (size_t i = 0; i < g.decls.size(); ++i) {
        auto [pos, fresh] = g.index.emplace(g.decls[i].eid, static_cast<int>(i));
        if (!fresh) throw SingleAssignmentError("'" + g.decls[i].eid + "' declared more than once");
        if (vt.find(g.decls[i].eid) >= 0)
            throw SingleAssignmentError("'" + g.decls[i].eid + "' names both a declaration and a variable");
    }
    std::unordered_map<const Expr*, ExprPtr> memo;
    for (auto& d : g.decls) d.expr = resolve(d.expr, g, vt, memo);
    check_acyclic(g);
    std::vector<Type> types = infer_types(g);
    for (size_t i = 0; i < g.decls.size(); ++i) g.decls[i].type = types[i];
    std::vector<std::uint8_t> chosen(g.decls.size(), 0);
    for (auto& pat : targets) {
        bool any = false;
        for (size_t i = 0; i < g.decls.size(); ++i) {
            if (glob_match(pat, g.decls[i].eid)) {
                any = true;
                chosen[i] = 1;
            }
        }
        if (!any) throw ConfigError("target pattern '" + pat + "' matches no declaration");
    }
    for (size_t i = 0; i < g.decls.size(); ++i)
        if (chosen[i]) g.targets.push_back(static_cast<int>(i));
    return g;
}

GroundedProgram ground(const EventProgram& p, const std::vector<std::string>& targets, const VarTable& vt) {
    return ground(std::make_shared<const EventProgram>(p), targets, vt);
}

}  // namespace pwe
