#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

#include "pwe/error.hpp"
#include "pwe/user_lang.hpp"

namespace pwe::ul {

namespace {

struct Tok {
    enum T { Name, Int, Float, Op, Newline, Indent, Dedent, End } t = End;
    std::string s;
    std::int64_t i = 0;
    double f = 0;
    Pos pos;
};

std::vector<Tok> tokenize(const std::string& text) {
    std::vector<Tok> out;
    std::vector<int> indents{0};
    int depth = 0;
    int line = 0;
    std::istringstream in(text);
    std::string raw;
    bool open_line = false;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        size_t p = 0;
        if (depth == 0) {
            size_t k = raw.find_first_not_of(' ');
            if (k == std::string::npos || raw[k] == '#') continue;
            if (raw.find('\t') != std::string::npos) throw SyntaxError("tab character in indentation", line, 1);
            int ind = static_cast<int>(k);
            if (ind > indents.back()) {
                indents.push_back(ind);
                out.push_back({Tok::Indent, "", 0, 0, {line, ind + 1}});
            } else {
                while (ind < indents.back()) {
                    indents.pop_back();
                    out.push_back({Tok::Dedent, "", 0, 0, {line, ind + 1}});
                }
                if (ind != indents.back()) throw SyntaxError("inconsistent dedent", line, ind + 1);
            }
            p = k;
        }
        while (p < raw.size()) {
            char c = raw[p];
            Pos pos{line, static_cast<int>(p) + 1};
            if (c == ' ' || c == '\t') {
                ++p;
            } else if (c == '#') {
                break;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t q = p;
                while (q < raw.size() && (std::isalnum(static_cast<unsigned char>(raw[q])) || raw[q] == '_')) ++q;
                out.push_back({Tok::Name, raw.substr(p, q - p), 0, 0, pos});
                p = q;
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                size_t q = p;
                bool is_float = false;
                while (q < raw.size() && std::isdigit(static_cast<unsigned char>(raw[q]))) ++q;
                if (q < raw.size() && raw[q] == '.') {
                    is_float = true;
                    ++q;
                    while (q < raw.size() && std::isdigit(static_cast<unsigned char>(raw[q]))) ++q;
                }
                if (q < raw.size() && (raw[q] == 'e' || raw[q] == 'E')) {
                    size_t r = q + 1;
                    if (r < raw.size() && (raw[r] == '+' || raw[r] == '-')) ++r;
                    if (r < raw.size() && std::isdigit(static_cast<unsigned char>(raw[r]))) {
                        is_float = true;
                        q = r;
                        while (q < raw.size() && std::isdigit(static_cast<unsigned char>(raw[q]))) ++q;
                    }
                }
                Tok t{is_float ? Tok::Float : Tok::Int, raw.substr(p, q - p), 0, 0, pos};
                if (is_float)
                    std::from_chars(raw.data() + p, raw.data() + q, t.f);
                else
                    std::from_chars(raw.data() + p, raw.data() + q, t.i);
                out.push_back(t);
                p = q;
            } else {
                static const char* two[] = {"==", "<=", ">="};
                std::string op;
                for (auto* t : two)
                    if (raw.compare(p, 2, t) == 0) op = t;
                if (op.empty()) {
                    if (std::string("()[],:=<>+*").find(c) == std::string::npos)
                        throw SyntaxError(std::string("unexpected character '") + c + "'", line, pos.col);
                    op = std::string(1, c);
                }
                if (op == "(" || op == "[") ++depth;
                if (op == ")" || op == "]") {
                    if (depth == 0) throw SyntaxError("unbalanced '" + op + "'", line, pos.col);
                    --depth;
                }
                out.push_back({Tok::Op, op, 0, 0, pos});
                p += op.size();
            }
        }
        open_line = true;
        if (depth == 0 && open_line) {
            if (!out.empty() && out.back().t != Tok::Newline && out.back().t != Tok::Indent &&
                out.back().t != Tok::Dedent)
                out.push_back({Tok::Newline, "", 0, 0, {line, static_cast<int>(raw.size()) + 1}});
            open_line = false;
        }
    }
    if (depth != 0) throw SyntaxError("unclosed bracket at end of input", line, 1);
    while (indents.size() > 1) {
        indents.pop_back();
        out.push_back({Tok::Dedent, "", 0, 0, {line + 1, 1}});
    }
    out.push_back({Tok::End, "", 0, 0, {line + 1, 1}});
    return out;
}

const std::set<std::string> kExt = {"loadData", "loadParams", "init"};
const std::set<std::string> kReduce = {"reduce_and", "reduce_or", "reduce_sum", "reduce_mult", "reduce_count"};
const std::set<std::string> kCalls = {"pow", "invert", "scalar_mult", "breakTies", "breakTies1", "breakTies2", "dist"};
const std::set<std::string> kKeywords = {"for", "in", "range", "if", "None", "True", "False"};

std::shared_ptr<UExpr> node(Kind k, Pos pos) {
    auto e = std::make_shared<UExpr>();
    e->kind = k;
    e->pos = pos;
    return e;
}

class Parser {
public:
    explicit Parser(std::vector<Tok> toks) : t_(std::move(toks)) {}

    UserProgram program() {
        UserProgram p;
        while (cur().t != Tok::End) {
            if (cur().t == Tok::Indent) fail("unexpected indentation");
            p.items.push_back(statement());
        }
        return p;
    }

private:
    const Tok& cur() const { return t_[k_]; }
    const Tok& ahead(size_t n) const { return t_[std::min(k_ + n, t_.size() - 1)]; }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, cur().pos.line, cur().pos.col);
    }
    bool is_op(const std::string& s) const { return cur().t == Tok::Op && cur().s == s; }
    bool is_name(const std::string& s) const { return cur().t == Tok::Name && cur().s == s; }
    void expect_op(const std::string& s) {
        if (!is_op(s)) fail("expected '" + s + "'");
        ++k_;
    }
    void expect_name(const std::string& s) {
        if (!is_name(s)) fail("expected '" + s + "'");
        ++k_;
    }
    std::string identifier() {
        if (cur().t != Tok::Name || kKeywords.count(cur().s)) fail("expected identifier");
        return t_[k_++].s;
    }
    void end_of_statement() {
        if (cur().t != Tok::Newline) fail("expected end of line");
        ++k_;
    }

    bool constant_expr(const UExprPtr& e) const {
        switch (e->kind) {
            case Kind::Int: return true;
            case Kind::Name: return constants_.count(e->name) > 0;
            case Kind::Add: case Kind::Mul: return constant_expr(e->kids[0]) && constant_expr(e->kids[1]);
            default: return false;
        }
    }

    void range_bounds(UExprPtr& from, UExprPtr& to) {
        expect_name("range");
        expect_op("(");
        Pos p1 = cur().pos;
        from = expr();
        expect_op(",");
        Pos p2 = cur().pos;
        to = expr();
        expect_op(")");
        if (!constant_expr(from)) throw SyntaxError("range bound is not an integer constant", p1.line, p1.col);
        if (!constant_expr(to)) throw SyntaxError("range bound is not an integer constant", p2.line, p2.col);
    }

    UStmt statement() {
        UStmt s;
        s.pos = cur().pos;
        if (is_name("for")) {
            ++k_;
            s.kind = UStmt::Kind::For;
            s.var = identifier();
            expect_name("in");
            range_bounds(s.from, s.to);
            expect_op(":");
            end_of_statement();
            if (cur().t != Tok::Indent) fail("expected an indented block");
            ++k_;
            while (cur().t != Tok::Dedent && cur().t != Tok::End) s.body.push_back(statement());
            if (cur().t == Tok::Dedent) ++k_;
            return s;
        }
        if (is_op("(")) {
            ++k_;
            s.kind = UStmt::Kind::ExtBind;
            s.names.push_back(identifier());
            while (is_op(",")) {
                ++k_;
                s.names.push_back(identifier());
            }
            expect_op(")");
            expect_op("=");
            s.ext = ext_call();
            for (auto& n : s.names) constants_.insert(n);
            end_of_statement();
            return s;
        }
        if (cur().t == Tok::Name && ahead(1).t == Tok::Op && ahead(1).s == "=" && ahead(2).t == Tok::Name &&
            kExt.count(ahead(2).s) && ahead(3).t == Tok::Op && ahead(3).s == "(") {
            s.kind = UStmt::Kind::ExtBind;
            s.names.push_back(identifier());
            expect_op("=");
            s.ext = ext_call();
            constants_.insert(s.names[0]);
            end_of_statement();
            return s;
        }
        s.kind = UStmt::Kind::Assign;
        Pos tp = cur().pos;
        UExprPtr target = node(Kind::Name, tp);
        std::const_pointer_cast<UExpr>(target)->name = identifier();
        while (is_op("[")) {
            Pos ip = cur().pos;
            ++k_;
            auto ix = node(Kind::Index, ip);
            ix->kids = {target, expr()};
            expect_op("]");
            target = ix;
        }
        expect_op("=");
        s.target = target;
        s.value = expr();
        end_of_statement();
        if (target->kind == Kind::Name) {
            if (s.value->kind == Kind::Int && !assigned_.count(target->name))
                constants_.insert(target->name);
            else
                constants_.erase(target->name);
            assigned_.insert(target->name);
        }
        return s;
    }

    std::string ext_call() {
        if (cur().t != Tok::Name || !kExt.count(cur().s)) fail("expected loadData(), loadParams() or init()");
        std::string n = t_[k_++].s;
        expect_op("(");
        expect_op(")");
        return n;
    }

    UExprPtr expr() {
        UExprPtr l = additive();
        static const std::pair<const char*, Cmp> ops[] = {
            {"<=", Cmp::Le}, {">=", Cmp::Ge}, {"==", Cmp::Eq}, {"<", Cmp::Lt}, {">", Cmp::Gt}};
        for (auto& [tok, c] : ops) {
            if (is_op(tok)) {
                Pos p = cur().pos;
                ++k_;
                auto e = node(Kind::Compare, p);
                e->cmp = c;
                e->kids = {l, additive()};
                if (is_op("<=") || is_op(">=") || is_op("==") || is_op("<") || is_op(">"))
                    fail("chained comparisons are not supported");
                return e;
            }
        }
        return l;
    }

    UExprPtr additive() {
        UExprPtr l = multiplicative();
        while (is_op("+")) {
            Pos p = cur().pos;
            ++k_;
            auto e = node(Kind::Add, p);
            e->kids = {l, multiplicative()};
            l = e;
        }
        return l;
    }

    UExprPtr multiplicative() {
        UExprPtr l = postfix();
        while (is_op("*")) {
            Pos p = cur().pos;
            ++k_;
            UExprPtr r = postfix();
            if (l->kind == Kind::Name && l->name == "None") {
                auto e = node(Kind::ArrayInit, l->pos);
                e->kids = {r};
                l = e;
                continue;
            }
            auto e = node(Kind::Mul, p);
            e->kids = {l, r};
            l = e;
        }
        if (l->kind == Kind::Name && l->name == "None") throw SyntaxError("[None] must be multiplied by a size", l->pos.line, l->pos.col);
        return l;
    }

    UExprPtr postfix() {
        UExprPtr e = primary();
        while (is_op("[")) {
            Pos p = cur().pos;
            ++k_;
            auto ix = node(Kind::Index, p);
            ix->kids = {e, expr()};
            expect_op("]");
            e = ix;
        }
        return e;
    }

    UExprPtr primary() {
        const Tok& t = cur();
        Pos p = t.pos;
        if (t.t == Tok::Int) {
            ++k_;
            auto e = node(Kind::Int, p);
            e->ival = t.i;
            return e;
        }
        if (t.t == Tok::Float) {
            ++k_;
            auto e = node(Kind::Float, p);
            e->fval = t.f;
            return e;
        }
        if (is_op("(")) {
            ++k_;
            UExprPtr e = expr();
            expect_op(")");
            return e;
        }
        if (is_op("[")) {
            ++k_;
            if (is_name("None")) {
                ++k_;
                expect_op("]");
                // Marker consumed by multiplicative().
                auto e = node(Kind::Name, p);
                e->name = "None";
                return e;
            }
            UExprPtr body = expr();
            if (!is_name("for")) fail("expected 'for' in list comprehension");
            ++k_;
            auto e = node(Kind::ListComp, p);
            e->name = identifier();
            expect_name("in");
            UExprPtr from, to;
            range_bounds(from, to);
            e->kids = {body, from, to};
            if (is_name("if")) {
                ++k_;
                e->kids.push_back(expr());
            }
            expect_op("]");
            return e;
        }
        if (t.t != Tok::Name) fail("expected expression");
        if (t.s == "True" || t.s == "False") {
            ++k_;
            auto e = node(Kind::Bool, p);
            e->bval = t.s == "True";
            return e;
        }
        if (kReduce.count(t.s)) {
            std::string fn = t.s;
            ++k_;
            expect_op("(");
            if (!is_op("[") || ahead(1).t == Tok::Name && ahead(1).s == "None")
                fail(fn + " must be applied to a list comprehension");
            UExprPtr arg = primary();
            if (arg->kind != Kind::ListComp) fail(fn + " must be applied to a list comprehension");
            expect_op(")");
            auto e = node(Kind::Reduce, p);
            e->name = fn;
            e->kids = {arg};
            return e;
        }
        if (kCalls.count(t.s)) {
            std::string fn = t.s;
            ++k_;
            expect_op("(");
            auto e = node(Kind::Call, p);
            e->name = fn;
            if (!is_op(")")) {
                e->kids.push_back(expr());
                while (is_op(",")) {
                    ++k_;
                    e->kids.push_back(expr());
                }
            }
            expect_op(")");
            return e;
        }
        if (kExt.count(t.s)) fail(t.s + "() may only appear on the right of a binding");
        if (ahead(1).t == Tok::Op && ahead(1).s == "(") fail("unknown function '" + t.s + "'");
        auto e = node(Kind::Name, p);
        e->name = identifier();
        return e;
    }

    std::vector<Tok> t_;
    size_t k_ = 0;
    std::set<std::string> constants_;
    std::set<std::string> assigned_;
};

}  // namespace

UserProgram parse_user_program(const std::string& text) {
    Parser p(tokenize(text));
    return p.program();
}

std::string target_base(const UExprPtr& e, std::vector<UExprPtr>* indices) {
    if (e->kind == Kind::Name) return e->name;
    if (e->kind != Kind::Index) throw InternalError("not an assignable expression");
    std::string b = target_base(e->kids[0], indices);
    if (indices) indices->push_back(e->kids[1]);
    return b;
}

std::string format_diagnostic(const std::string& file, const Diagnostic& d) {
    return file + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col) + ": " + d.message + " [" +
           d.rule + "]";
}

}  // namespace pwe::ul
