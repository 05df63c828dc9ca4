#include "pwe/network.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "pwe/error.hpp"
#include "pwe/grounder.hpp"

namespace pwe {

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::Var: return "var";
        case NodeKind::Const: return "const";
        case NodeKind::Not: return "not";
        case NodeKind::And: return "and";
        case NodeKind::Or: return "or";
        case NodeKind::Atom: return "atom";
        case NodeKind::Guard: return "guard";
        case NodeKind::Sum: return "sum";
        case NodeKind::Prod: return "prod";
        case NodeKind::Inv: return "inv";
        case NodeKind::Pow: return "pow";
        case NodeKind::Dist: return "dist";
        case NodeKind::Loop: return "loop";
        case NodeKind::Final: return "final";
    }
    return "?";
}

namespace {

std::string value_text(const Value& v) {
    std::string s;
    if (v.type.kind == Type::Bool) return v.truth ? "b:1" : "b:0";
    if (!v.defined) return v.type.kind == Type::Vector ? "u:v" + std::to_string(v.type.dim) : "u:s";
    s = v.type.kind == Type::Vector ? "v:" : "s:";
    for (size_t i = 0; i < v.v.size(); ++i) {
        if (i) s += ",";
        s += format_number(v.v[i]);
    }
    return s;
}

Value parse_value_text(const std::string& s) {
    if (s == "b:1") return Value::boolean(true);
    if (s == "b:0") return Value::boolean(false);
    if (s == "u:s") return Value::undefined(Type::scalar());
    if (s.rfind("u:v", 0) == 0) return Value::undefined(Type::vector(std::stoi(s.substr(3))));
    if (s.size() < 2 || s[1] != ':') throw SyntaxError("bad constant '" + s + "'", 0, 0);
    std::vector<double> xs;
    std::stringstream in(s.substr(2));
    std::string part;
    while (std::getline(in, part, ',')) xs.push_back(std::stod(part));
    if (s[0] == 's' && xs.size() == 1) return Value::scalar(xs[0]);
    if (s[0] == 'v') return Value::vector(xs);
    throw SyntaxError("bad constant '" + s + "'", 0, 0);
}

Type derive_type(const NetNode& n, const std::vector<NetNode>& nodes) {
    auto kt = [&](size_t i) { return nodes[n.kids[i]].type; };
    switch (n.kind) {
        case NodeKind::Var: case NodeKind::Not: case NodeKind::And: case NodeKind::Or: case NodeKind::Atom:
            return Type::boolean();
        case NodeKind::Const: return n.value.type;
        case NodeKind::Guard: return kt(1);
        case NodeKind::Sum: {
            Type t = kt(0);
            for (size_t i = 1; i < n.kids.size(); ++i) t = sum_type(t, kt(i));
            return t;
        }
        case NodeKind::Prod: {
            Type t = kt(0);
            for (size_t i = 1; i < n.kids.size(); ++i) t = mul_type(t, kt(i));
            return t;
        }
        case NodeKind::Inv: case NodeKind::Pow: case NodeKind::Dist: return Type::scalar();
        case NodeKind::Loop: case NodeKind::Final: return kt(0);
    }
    return Type::boolean();
}

}  // namespace

class NetworkBuilder {
public:
    NetworkBuilder(EventNetwork& net, const VarTable& vt) : net_(net) {
        net_.vars_ = vt;
        net_.var_node_.assign(vt.size(), -1);
    }

    const NetNode& at(int i) const { return net_.nodes_[i]; }
    bool is_const(int i) const { return at(i).kind == NodeKind::Const; }
    bool const_truth(int i, bool b) const { return is_const(i) && at(i).value.truth == b; }
    bool const_undef(int i) const { return is_const(i) && at(i).type.numeric() && !at(i).value.defined; }

    int add(NetNode n) {
        std::string key = node_kind_name(n.kind);
        key += '|';
        key += std::to_string(static_cast<int>(n.cmp)) + '|' + std::to_string(n.exponent) + '|' +
               std::to_string(n.var) + '|';
        if (n.kind == NodeKind::Const) key += value_text(n.value);
        for (int k : n.kids) key += ',' + std::to_string(k);
        auto it = cons_.find(key);
        if (it != cons_.end()) return it->second;
        return insert(std::move(n), key);
    }

    int insert(NetNode n, const std::string& key) {
        n.type = derive_type(n, net_.nodes_);
        set_time(n);
        int id = static_cast<int>(net_.nodes_.size());
        net_.nodes_.push_back(std::move(n));
        if (!key.empty()) cons_[key] = id;
        return id;
    }

    void set_time(NetNode& n) const {
        n.timed = n.kind == NodeKind::Loop;
        n.phase = n.kind == NodeKind::Final ? 2 : 0;
        if (n.kind == NodeKind::Loop) {
            n.phase = 1;
            return;
        }
        if (n.kind == NodeKind::Final) return;
        for (int k : n.kids) {
            if (at(k).timed) n.timed = true;
            n.phase = std::max(n.phase, at(k).phase);
        }
        if (n.timed) n.phase = 1;
    }

    int constant(Value v) {
        NetNode n;
        n.kind = NodeKind::Const;
        n.value = std::move(v);
        return add(std::move(n));
    }

    int var(int v) {
        NetNode n;
        n.kind = NodeKind::Var;
        n.var = v;
        int id = add(std::move(n));
        net_.var_node_[v] = id;
        return id;
    }

    int make(NodeKind k, std::vector<int> kids, Cmp c = Cmp::Le, int exponent = 0) {
        NetNode n;
        n.kind = k;
        n.kids = std::move(kids);
        n.cmp = c;
        n.exponent = exponent;
        return add(std::move(n));
    }

    int neg(int a) {
        if (is_const(a)) return constant(Value::boolean(!at(a).value.truth));
        if (at(a).kind == NodeKind::Not) return at(a).kids[0];
        return make(NodeKind::Not, {a});
    }

    int junction(bool conj, const std::vector<int>& in) {
        std::vector<int> kids;
        for (int k : in) {
            if (at(k).kind == (conj ? NodeKind::And : NodeKind::Or)) {
                for (int g : at(k).kids) kids.push_back(g);
            } else {
                kids.push_back(k);
            }
        }
        std::vector<int> out;
        for (int k : kids) {
            if (const_truth(k, !conj)) return constant(Value::boolean(!conj));
            if (const_truth(k, conj)) continue;
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
        for (int k : out)
            if (at(k).kind == NodeKind::Not && std::find(out.begin(), out.end(), at(k).kids[0]) != out.end())
                return constant(Value::boolean(!conj));
        if (out.empty()) return constant(Value::boolean(conj));
        if (out.size() == 1) return out[0];
        return make(conj ? NodeKind::And : NodeKind::Or, out);
    }

    int atom(Cmp c, int a, int b) {
        check_compare_types(c, at(a).type, at(b).type);
        if (is_const(a) && is_const(b)) return constant(Value::boolean(compare(c, at(a).value, at(b).value)));
        if (const_undef(a) || const_undef(b)) return constant(Value::boolean(true));
        if (a == b && (c == Cmp::Le || c == Cmp::Ge || c == Cmp::Eq)) return constant(Value::boolean(true));
        return make(NodeKind::Atom, {a, b}, c);
    }

    int guard(int e, int v) {
        if (!at(v).type.numeric()) throw TypeError("guarded value must be numeric");
        if (const_truth(e, true)) return v;
        if (const_truth(e, false)) return constant(Value::undefined(at(v).type));
        if (const_undef(v)) return v;
        return make(NodeKind::Guard, {e, v});
    }

    int sum(const std::vector<int>& in) {
        Type t = at(in[0]).type;
        for (size_t i = 1; i < in.size(); ++i) t = sum_type(t, at(in[i]).type);
        std::vector<int> kids;
        bool all_const = true;
        for (int k : in) {
            if (const_undef(k)) continue;
            kids.push_back(k);
            all_const = all_const && is_const(k);
        }
        if (kids.empty()) return constant(Value::undefined(t));
        if (kids.size() == 1) return kids[0];
        if (all_const) {
            Value acc = at(kids[0]).value;
            for (size_t i = 1; i < kids.size(); ++i) acc = pwe::add(acc, at(kids[i]).value);
            return constant(acc);
        }
        return make(NodeKind::Sum, kids);
    }

    int prod(const std::vector<int>& kids) {
        Type t = at(kids[0]).type;
        for (size_t i = 1; i < kids.size(); ++i) t = mul_type(t, at(kids[i]).type);
        bool all_const = true;
        for (int k : kids) {
            if (const_undef(k)) return constant(Value::undefined(t));
            all_const = all_const && is_const(k);
        }
        if (kids.size() == 1) return kids[0];
        if (all_const) {
            Value acc = at(kids[0]).value;
            for (size_t i = 1; i < kids.size(); ++i) acc = mul(acc, at(kids[i]).value);
            return constant(acc);
        }
        return make(NodeKind::Prod, kids);
    }

    int inv(int a) {
        if (at(a).type.kind != Type::Scalar) throw TypeError("inverse of " + at(a).type.str());
        if (is_const(a)) return constant(inverse(at(a).value));
        return make(NodeKind::Inv, {a});
    }

    int pow(int a, int k) {
        if (at(a).type.kind != Type::Scalar) throw TypeError("power of " + at(a).type.str());
        if (is_const(a)) return constant(power(at(a).value, k));
        return make(NodeKind::Pow, {a}, Cmp::Le, k);
    }

    int dist(int a, int b) {
        if (at(a).type.kind != Type::Vector || !(at(a).type == at(b).type))
            throw TypeError("dist of " + at(a).type.str() + " and " + at(b).type.str());
        if (is_const(a) && is_const(b)) return constant(distance(at(a).value, at(b).value));
        if (const_undef(a) || const_undef(b)) return constant(Value::undefined(Type::scalar()));
        return make(NodeKind::Dist, {a, b});
    }

    int loop(int ordinal, int init) {
        std::string key = "loop|" + std::to_string(ordinal) + "|" + std::to_string(init);
        auto it = cons_.find(key);
        if (it != cons_.end()) return it->second;
        NetNode n;
        n.kind = NodeKind::Loop;
        n.kids = {init, init};
        int id = insert(std::move(n), key);
        pending_loops_.push_back({id, ordinal});
        return id;
    }

    void set_carry(int id, int carry) {
        if (!(at(carry).type == at(id).type)) throw TypeError("folded network: carried value changes type");
        net_.nodes_[id].kids[1] = carry;
    }

    int final_of(int x) {
        if (!at(x).timed) return x;
        return make(NodeKind::Final, {x});
    }

    // Combines already built operands according to an expression node.
    int combine(const Expr& e, const std::vector<int>& k) {
        switch (e.op) {
            case Op::Not: return neg(k[0]);
            case Op::And: return junction(true, k);
            case Op::Or: return junction(false, k);
            case Op::Atom: return atom(e.cmp, k[0], k[1]);
            case Op::Guard: return guard(k[0], k[1]);
            case Op::Sum: return sum(k);
            case Op::Prod: return prod(k);
            case Op::Inv: return inv(k[0]);
            case Op::Pow: return pow(k[0], e.exponent);
            case Op::Dist: return dist(k[0], k[1]);
            default: break;
        }
        throw UnsupportedError("expression kind has no network encoding");
    }

    int leaf(const Expr& e) {
        if (e.op == Op::Bool) return constant(Value::boolean(e.truth));
        if (e.op == Op::Num) {
            if (e.undefined) {
                int d = static_cast<int>(e.num.size());
                return constant(Value::undefined(e.is_vector ? Type::vector(d) : Type::scalar()));
            }
            return constant(e.is_vector ? Value::vector(e.num) : Value::scalar(e.num.at(0)));
        }
        if (e.op == Op::Var) {
            int v = e.var >= 0 ? e.var : net_.vars_.find(e.name);
            if (v < 0) throw ResolutionError("unknown variable '" + e.name + "'");
            return var(v);
        }
        throw UnsupportedError("expression kind has no network encoding");
    }

    std::vector<std::pair<int, int>> pending_loops_;

private:
    EventNetwork& net_;
    std::unordered_map<std::string, int> cons_;
};

namespace {

std::string expr_text(const ExprPtr& e) { return to_text(e); }

class GroundedBuilder {
public:
    GroundedBuilder(EventNetwork& net, const GroundedProgram& g, bool folded) : b_(net, g.vars), g_(g) {
        decl_node_.assign(g.decls.size(), -1);
        if (folded) choose_loop();
    }

    int loop_item() const { return loop_; }
    std::int64_t lo() const { return lo_; }
    std::int64_t hi() const { return hi_; }

    int decl(int di) {
        const GroundedDecl& d = g_.decls[di];
        if (loop_ >= 0 && d.top_item == loop_) {
            if (d.iteration != hi_)
                throw UnsupportedError("folded network: '" + d.eid + "' is read outside its iteration");
            return b_.final_of(tmpl(d.ordinal));
        }
        if (decl_node_[di] == -2) throw CycleError("reference cycle through '" + d.eid + "'");
        if (decl_node_[di] >= 0) return decl_node_[di];
        decl_node_[di] = -2;
        int n = stat(d.expr);
        decl_node_[di] = n;
        return n;
    }

    int stat_ref(const std::string& name) {
        int di = g_.find(name);
        if (di >= 0) return decl(di);
        int v = g_.vars.find(name);
        if (v < 0) throw ResolutionError("unresolved reference '" + name + "'");
        return b_.var(v);
    }

    int stat(const ExprPtr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        int r;
        if (e->op == Op::Ref) {
            r = stat_ref(e->name);
        } else if (e->kids.empty()) {
            r = b_.leaf(*e);
        } else {
            std::vector<int> k;
            for (auto& c : e->kids) k.push_back(stat(c));
            r = b_.combine(*e, k);
        }
        memo_[e.get()] = r;
        return r;
    }

    int tmpl(int ordinal) {
        int& slot = tmpl_node_.at(ordinal);
        if (slot == -2) throw CycleError("reference cycle through '" + b1_[ordinal].eid + "'");
        if (slot >= 0) return slot;
        slot = -2;
        int n = pair(b1_[ordinal].expr, b0_[ordinal].expr);
        tmpl_node_[ordinal] = n;
        return n;
    }

    int pair(const ExprPtr& e1, const ExprPtr& e0) {
        if (e1->op != e0->op || e1->kids.size() != e0->kids.size())
            throw UnsupportedError("folded network: iterations differ in shape at '" + expr_text(e1) + "'");
        if (e1->op == Op::Ref) {
            auto in1 = idx1_.find(e1->name);
            if (in1 != idx1_.end()) {
                auto in0 = idx0_.find(e0->name);
                if (in0 == idx0_.end() || in0->second != in1->second)
                    throw UnsupportedError("folded network: misaligned reference '" + e1->name + "'");
                return tmpl(in1->second);
            }
            auto prev = idx0_.find(e1->name);
            if (prev != idx0_.end()) {
                if (idx0_.count(e0->name) || idx1_.count(e0->name))
                    throw UnsupportedError("folded network: '" + e0->name + "' has no initial value");
                return b_.loop(prev->second, stat_ref(e0->name));
            }
            if (e1->name != e0->name)
                throw UnsupportedError("folded network: '" + e1->name + "' depends on the iteration");
            return stat_ref(e1->name);
        }
        if (e1->kids.empty()) {
            if (expr_text(e1) != expr_text(e0))
                throw UnsupportedError("folded network: constant '" + expr_text(e1) + "' depends on the iteration");
            return b_.leaf(*e1);
        }
        std::vector<int> k;
        for (size_t i = 0; i < e1->kids.size(); ++i) k.push_back(pair(e1->kids[i], e0->kids[i]));
        return b_.combine(*e1, k);
    }

    void close_loops() {
        for (size_t i = 0; i < b_.pending_loops_.size(); ++i) {
            auto [id, ordinal] = b_.pending_loops_[i];
            int carry = tmpl(ordinal);
            b_.set_carry(id, carry);
        }
    }

    NetworkBuilder& builder() { return b_; }

private:
    void choose_loop() {
        if (!g_.source) return;
        std::map<int, int> count;
        for (auto& d : g_.decls)
            if (d.iteration != kNoIteration) ++count[d.top_item];
        int best = -1;
        for (auto& [item, c] : count)
            if (best < 0 || c > count[best]) best = item;
        if (best < 0) return;
        const EventItem& it = g_.source->items.at(best);
        CounterEnv none;
        lo_ = it.lo.eval(none);
        hi_ = it.hi.eval(none);
        if (hi_ < lo_) return;
        b0_ = instantiate_loop_body(*g_.source, best, lo_);
        b1_ = instantiate_loop_body(*g_.source, best, lo_ + 1);
        if (b0_.size() != b1_.size()) throw UnsupportedError("folded network: iterations differ in size");
        for (auto& d : b0_) idx0_[d.eid] = d.ordinal;
        for (auto& d : b1_) idx1_[d.eid] = d.ordinal;
        tmpl_node_.assign(b1_.size(), -1);
        loop_ = best;
    }

    NetworkBuilder b_;
    const GroundedProgram& g_;
    std::vector<int> decl_node_;
    std::unordered_map<const Expr*, int> memo_;
    int loop_ = -1;
    std::int64_t lo_ = 0, hi_ = -1;
    std::vector<GroundedDecl> b0_, b1_;
    std::unordered_map<std::string, int> idx0_, idx1_;
    std::vector<int> tmpl_node_;
};

}  // namespace

EventNetwork EventNetwork::build(const GroundedProgram& g, bool folded) {
    EventNetwork net;
    GroundedBuilder gb(net, g, folded);
    for (int di : g.targets) {
        const GroundedDecl& d = g.decls[di];
        NetTarget t;
        t.eid = d.eid;
        if (gb.loop_item() >= 0 && d.top_item == gb.loop_item()) {
            t.node = gb.tmpl(d.ordinal);
            t.t = static_cast<int>(d.iteration - gb.lo());
        } else {
            t.node = gb.decl(di);
        }
        net.targets_.push_back(t);
    }
    gb.close_loops();
    if (gb.loop_item() >= 0) {
        net.folded_ = true;
        net.iterations_ = static_cast<int>(gb.hi() - gb.lo() + 1);
    }
    for (auto& t : net.targets_) {
        if (net.nodes_[t.node].type.kind != Type::Bool)
            throw ConfigError("target '" + t.eid + "' is not an event");
        if (!net.nodes_[t.node].timed) t.t = 0;
    }
    net.finish();
    return net;
}

void EventNetwork::finish() {
    const int n = static_cast<int>(nodes_.size());
    for (auto& nd : nodes_) nd.parents.clear();
    for (int i = 0; i < n; ++i) {
        for (int k : nodes_[i].kids) {
            auto& p = nodes_[k].parents;
            if (p.empty() || p.back() != i) p.push_back(i);
        }
    }
    var_node_.assign(vars_.size(), -1);
    for (int i = 0; i < n; ++i)
        if (nodes_[i].kind == NodeKind::Var) var_node_[nodes_[i].var] = i;
    slot_base_.assign(n, 0);
    slot_count_ = 0;
    for (int i = 0; i < n; ++i) {
        slot_base_[i] = slot_count_;
        slot_count_ += slots(i);
    }
    const size_t words = (vars_.size() + 63) / 64;
    support_.assign(n, std::vector<std::uint64_t>(words, 0));
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            auto& s = support_[i];
            if (nodes_[i].kind == NodeKind::Var) s[nodes_[i].var / 64] |= 1ull << (nodes_[i].var % 64);
            for (int k : nodes_[i].kids)
                for (size_t w = 0; w < words; ++w) {
                    std::uint64_t nv = s[w] | support_[k][w];
                    if (nv != s[w]) {
                        s[w] = nv;
                        changed = true;
                    }
                }
        }
    }
}

std::string EventNetwork::dump() const {
    std::ostringstream o;
    o << "network folded=" << (folded_ ? 1 : 0) << " iterations=" << iterations_ << "\n";
    for (int v = 0; v < vars_.size(); ++v) o << "var " << v << " " << vars_.id(v) << " " << format_number(vars_.p(v)) << "\n";
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const NetNode& n = nodes_[i];
        o << i << " " << node_kind_name(n.kind);
        if (n.kind == NodeKind::Var) o << " " << n.var;
        if (n.kind == NodeKind::Const) o << " " << value_text(n.value);
        if (n.kind == NodeKind::Atom) o << " " << cmp_symbol(n.cmp);
        if (n.kind == NodeKind::Pow) o << " " << n.exponent;
        o << " :";
        for (int k : n.kids) o << " " << k;
        o << "\n";
    }
    for (auto& t : targets_) o << "target " << t.eid << " " << t.node << " " << t.t << "\n";
    return o.str();
}

EventNetwork EventNetwork::parse_dump(const std::string& text) {
    EventNetwork net;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& m) -> void { throw SyntaxError(m, lineno, 1); };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "network") {
            std::string a, b;
            ls >> a >> b;
            if (a.rfind("folded=", 0) != 0 || b.rfind("iterations=", 0) != 0) fail("bad network header");
            net.folded_ = a.substr(7) == "1";
            net.iterations_ = std::stoi(b.substr(11));
        } else if (head == "var") {
            int idx;
            std::string id;
            double p;
            if (!(ls >> idx >> id >> p) || idx != net.vars_.size()) fail("bad variable line");
            net.vars_.add(id, p);
        } else if (head == "target") {
            NetTarget t;
            if (!(ls >> t.eid >> t.node >> t.t)) fail("bad target line");
            net.targets_.push_back(t);
        } else {
            NetNode n;
            std::string kind;
            ls >> kind;
            bool found = false;
            for (int k = 0; k <= static_cast<int>(NodeKind::Final); ++k)
                if (kind == node_kind_name(static_cast<NodeKind>(k))) {
                    n.kind = static_cast<NodeKind>(k);
                    found = true;
                }
            if (!found || std::stoi(head) != static_cast<int>(net.nodes_.size())) fail("bad node line");
            std::string tok;
            ls >> tok;
            if (tok != ":") {
                if (n.kind == NodeKind::Var) n.var = std::stoi(tok);
                else if (n.kind == NodeKind::Const) n.value = parse_value_text(tok);
                else if (n.kind == NodeKind::Pow) n.exponent = std::stoi(tok);
                else if (n.kind == NodeKind::Atom) {
                    bool ok = false;
                    for (Cmp c : {Cmp::Le, Cmp::Ge, Cmp::Eq, Cmp::Lt, Cmp::Gt})
                        if (tok == cmp_symbol(c)) {
                            n.cmp = c;
                            ok = true;
                        }
                    if (!ok) fail("bad comparison");
                } else {
                    fail("unexpected attribute");
                }
                ls >> tok;
                if (tok != ":") fail("expected ':'");
            }
            int k;
            while (ls >> k) n.kids.push_back(k);
            net.nodes_.push_back(std::move(n));
        }
    }
    const int count = static_cast<int>(net.nodes_.size());
    for (int i = 0; i < count; ++i) {
        NetNode& n = net.nodes_[i];
        for (size_t j = 0; j < n.kids.size(); ++j) {
            int k = n.kids[j];
            bool forward_ok = n.kind == NodeKind::Loop && j == 1;
            if (k < 0 || k >= count || (k >= i && !forward_ok)) {
                lineno = i + 1;
                fail("node " + std::to_string(i) + " has a bad child");
            }
        }
        if (n.kind == NodeKind::Var && (n.var < 0 || n.var >= net.vars_.size())) fail("bad variable index");
    }
    for (int i = 0; i < count; ++i) {
        NetNode& n = net.nodes_[i];
        n.type = derive_type(n, net.nodes_);
        n.timed = n.kind == NodeKind::Loop;
        n.phase = n.kind == NodeKind::Loop ? 1 : n.kind == NodeKind::Final ? 2 : 0;
        if (n.kind != NodeKind::Loop && n.kind != NodeKind::Final) {
            for (int k : n.kids) {
                if (net.nodes_[k].timed) n.timed = true;
                n.phase = std::max(n.phase, net.nodes_[k].phase);
            }
            if (n.timed) n.phase = 1;
        }
    }
    for (auto& t : net.targets_)
        if (t.node < 0 || t.node >= count) throw SyntaxError("bad target node", 0, 0);
    net.finish();
    return net;
}

}  // namespace pwe
