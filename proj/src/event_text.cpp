#include "pwe/event_text.hpp"

#include <cctype>
#include <charconv>
#include <sstream>

#include "pwe/error.hpp"

namespace pwe {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

class Reader {
public:
    Reader(const std::string& text, int line, int col0) : s_(text), line_(line), col0_(col0) {}

    void ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    bool at_end() {
        ws();
        return pos_ >= s_.size() || s_[pos_] == '#';
    }
    char peek() {
        ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    char peek_raw(size_t ahead = 0) const {
        return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
    }
    bool eat(const std::string& tok) {
        ws();
        if (s_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }
    void expect(const std::string& tok) {
        if (!eat(tok)) fail("expected '" + tok + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg, line_, col0_ + static_cast<int>(pos_) + 1);
    }

    // Identifier; a '_' followed by a digit, '-' or '{' starts a label instead.
    std::string ident() {
        ws();
        size_t start = pos_;
        if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected identifier");
        while (pos_ < s_.size() && ident_char(s_[pos_])) {
            if (s_[pos_] == '_' && pos_ > start) {
                char n = peek_raw(1);
                if (std::isdigit(static_cast<unsigned char>(n)) || n == '-' || n == '{') break;
            }
            ++pos_;
        }
        return s_.substr(start, pos_ - start);
    }
    bool peek_ident() {
        ws();
        return pos_ < s_.size() && ident_start(s_[pos_]);
    }
    // Lookahead for "name(" without consuming.
    bool peek_call(const std::string& name) {
        ws();
        if (s_.compare(pos_, name.size(), name) != 0) return false;
        size_t q = pos_ + name.size();
        if (q < s_.size() && ident_char(s_[q])) return false;
        while (q < s_.size() && s_[q] == ' ') ++q;
        return q < s_.size() && s_[q] == '(';
    }
    bool peek_word(const std::string& w) {
        ws();
        if (s_.compare(pos_, w.size(), w) != 0) return false;
        size_t q = pos_ + w.size();
        return q >= s_.size() || !ident_char(s_[q]);
    }

    std::int64_t integer() {
        ws();
        size_t start = pos_;
        if (peek_raw() == '-') ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek_raw()))) fail("expected integer");
        while (std::isdigit(static_cast<unsigned char>(peek_raw()))) ++pos_;
        std::int64_t v = 0;
        std::from_chars(s_.data() + start, s_.data() + pos_, v);
        return v;
    }

    double number() {
        ws();
        size_t start = pos_;
        if (peek_raw() == '-') ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek_raw()))) fail("expected number");
        while (std::isdigit(static_cast<unsigned char>(peek_raw()))) ++pos_;
        if (peek_raw() == '.' && peek_raw(1) != '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek_raw()))) ++pos_;
        }
        if (peek_raw() == 'e' || peek_raw() == 'E') {
            size_t save = pos_;
            ++pos_;
            if (peek_raw() == '+' || peek_raw() == '-') ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek_raw())))
                pos_ = save;
            else
                while (std::isdigit(static_cast<unsigned char>(peek_raw()))) ++pos_;
        }
        double v = 0;
        auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc()) fail("bad number");
        return v;
    }
    bool peek_number() {
        ws();
        char c = peek_raw();
        if (c == '-') c = peek_raw(1);
        return std::isdigit(static_cast<unsigned char>(c));
    }

    Affine affine() {
        Affine a = affine_term();
        for (;;) {
            ws();
            if (peek_raw() == '+') {
                ++pos_;
                a = a + affine_term();
            } else if (peek_raw() == '-' && peek_raw(1) != '>') {
                ++pos_;
                a = a - affine_term();
            } else {
                return a;
            }
        }
    }

    Affine affine_term() {
        ws();
        bool negate = false;
        if (peek_raw() == '-') {
            ++pos_;
            negate = true;
        }
        Affine t;
        ws();
        if (peek_raw() == '(') {
            ++pos_;
            t = affine();
            expect(")");
        } else if (std::isdigit(static_cast<unsigned char>(peek_raw()))) {
            std::int64_t c = integer();
            ws();
            if (peek_raw() == '*') {
                ++pos_;
                ws();
                if (peek_raw() == '(') {
                    ++pos_;
                    t = affine().scaled(c);
                    expect(")");
                } else {
                    t = Affine::var(ident(), c);
                }
            } else {
                t = Affine::lit(c);
            }
        } else {
            t = Affine::var(ident());
        }
        return negate ? t.scaled(-1) : t;
    }

    // Index brackets and label directly attached to an identifier.
    void eid_suffix(std::vector<Affine>& index, std::vector<Affine>& label, bool& has_label) {
        if (peek_raw() == '[') {
            ++pos_;
            index.push_back(affine());
            while (eat(",")) index.push_back(affine());
            expect("]");
        }
        if (peek_raw() == '_') {
            ++pos_;
            has_label = true;
            if (peek_raw() == '{') {
                ++pos_;
                label.push_back(label_component());
                while (eat(".")) label.push_back(label_component());
                expect("}");
            } else {
                label.push_back(Affine::lit(integer()));
            }
        }
    }

    Affine label_component() {
        ws();
        if (peek_raw() == '(') {
            ++pos_;
            Affine a = affine();
            expect(")");
            return a;
        }
        if (ident_start(peek_raw())) return Affine::var(ident());
        return Affine::lit(integer());
    }

    ExprPtr expr(std::set<std::string>& ctr) { return disj(ctr); }

    ExprPtr disj(std::set<std::string>& ctr) {
        std::vector<ExprPtr> kids{conj(ctr)};
        while (peek() == '|') {
            ++pos_;
            kids.push_back(conj(ctr));
        }
        return kids.size() == 1 ? kids[0] : ex::disj(kids);
    }

    ExprPtr conj(std::set<std::string>& ctr) {
        std::vector<ExprPtr> kids{negation(ctr)};
        while (peek() == '&') {
            ++pos_;
            kids.push_back(negation(ctr));
        }
        return kids.size() == 1 ? kids[0] : ex::conj(kids);
    }

    ExprPtr negation(std::set<std::string>& ctr) {
        if (peek() == '!') {
            ++pos_;
            return ex::neg(negation(ctr));
        }
        return comparison(ctr);
    }

    ExprPtr comparison(std::set<std::string>& ctr) {
        ExprPtr l = sum(ctr);
        static const std::pair<const char*, Cmp> ops[] = {
            {"<=", Cmp::Le}, {">=", Cmp::Ge}, {"==", Cmp::Eq}, {"=", Cmp::Eq}, {"<", Cmp::Lt}, {">", Cmp::Gt}};
        ws();
        for (auto& [tok, c] : ops) {
            if (s_.compare(pos_, std::char_traits<char>::length(tok), tok) == 0) {
                pos_ += std::char_traits<char>::length(tok);
                return ex::atom(c, l, sum(ctr));
            }
        }
        return l;
    }

    ExprPtr sum(std::set<std::string>& ctr) {
        std::vector<ExprPtr> kids{product(ctr)};
        while (peek() == '+') {
            ++pos_;
            kids.push_back(product(ctr));
        }
        return kids.size() == 1 ? kids[0] : ex::sum(kids);
    }

    ExprPtr product(std::set<std::string>& ctr) {
        std::vector<ExprPtr> kids{guarded(ctr)};
        while (peek() == '*') {
            ++pos_;
            kids.push_back(guarded(ctr));
        }
        return kids.size() == 1 ? kids[0] : ex::prod(kids);
    }

    ExprPtr guarded(std::set<std::string>& ctr) {
        ExprPtr e = primary(ctr);
        if (peek() == '@') {
            ++pos_;
            return ex::guard(e, primary(ctr));
        }
        return e;
    }

    ExprPtr primary(std::set<std::string>& ctr) {
        char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = expr(ctr);
            expect(")");
            return e;
        }
        if (c == '[') {
            ++pos_;
            std::vector<double> v{number()};
            while (eat(",")) v.push_back(number());
            expect("]");
            return ex::vector(v);
        }
        if (peek_number()) return ex::scalar(number());
        if (peek_word("true")) {
            eat("true");
            return ex::boolean(true);
        }
        if (peek_word("false")) {
            eat("false");
            return ex::boolean(false);
        }
        if (peek_word("undef")) {
            eat("undef");
            if (peek_raw() == '(') {
                ++pos_;
                int d = static_cast<int>(integer());
                expect(")");
                return ex::undef(true, d);
            }
            return ex::undef(false, 1);
        }
        if (peek_call("inv")) {
            eat("inv");
            expect("(");
            ExprPtr e = expr(ctr);
            expect(")");
            return ex::inv(e);
        }
        if (peek_call("pow")) {
            eat("pow");
            expect("(");
            ExprPtr e = expr(ctr);
            expect(",");
            int k = static_cast<int>(integer());
            expect(")");
            return ex::pow(e, k);
        }
        if (peek_call("dist")) {
            eat("dist");
            expect("(");
            ExprPtr a = expr(ctr);
            expect(",");
            ExprPtr b = expr(ctr);
            expect(")");
            return ex::dist(a, b);
        }
        static const std::pair<const char*, Op> folds[] = {
            {"sum", Op::Sum}, {"prod", Op::Prod}, {"and", Op::And}, {"or", Op::Or}};
        for (auto& [name, op] : folds) {
            if (!peek_call(name)) continue;
            eat(name);
            expect("(");
            std::string k = ident();
            if (!peek_word("in")) fail("expected 'in'");
            eat("in");
            Affine lo = affine();
            expect("..");
            Affine hi = affine();
            expect(":");
            bool fresh = ctr.insert(k).second;
            ExprPtr body = expr(ctr);
            if (fresh) ctr.erase(k);
            expect(")");
            return ex::fold(op, k, lo, hi, body);
        }
        if (!peek_ident()) fail("expected expression");
        std::string name = ident();
        std::vector<Affine> index, label;
        bool has_label = false;
        eid_suffix(index, label, has_label);
        if (index.empty() && !has_label && ctr.count(name)) return ex::counter(name);
        return ex::ref(name, index, label, has_label);
    }

    size_t pos() const { return pos_; }

private:
    const std::string& s_;
    size_t pos_ = 0;
    int line_;
    int col0_;
};

struct Line {
    int number;
    int indent;
    std::string text;
};

std::vector<EventItem> parse_block(const std::vector<Line>& lines, size_t& i, int indent,
                                   std::set<std::string>& ctr) {
    std::vector<EventItem> items;
    while (i < lines.size() && lines[i].indent >= indent) {
        const Line& ln = lines[i];
        if (ln.indent > indent) throw SyntaxError("unexpected indentation", ln.number, ln.indent + 1);
        Reader r(ln.text, ln.number, ln.indent);
        if (r.peek_word("forall")) {
            r.eat("forall");
            std::string k = r.ident();
            if (!r.peek_word("in")) r.fail("expected 'in'");
            r.eat("in");
            Affine lo = r.affine();
            r.expect("..");
            Affine hi = r.affine();
            r.expect(":");
            if (!r.at_end()) r.fail("trailing text after loop header");
            ++i;
            if (i >= lines.size() || lines[i].indent <= indent)
                throw SyntaxError("empty loop body", ln.number, ln.indent + 1);
            bool fresh = ctr.insert(k).second;
            auto body = parse_block(lines, i, lines[i].indent, ctr);
            if (fresh) ctr.erase(k);
            items.push_back(EventItem::loop(k, lo, hi, std::move(body)));
            continue;
        }
        EventDecl d;
        d.base = r.ident();
        r.eid_suffix(d.index, d.label, d.has_label);
        r.expect(":=");
        d.rhs = r.expr(ctr);
        if (!r.at_end()) r.fail("unexpected text after expression");
        items.push_back(EventItem::declaration(std::move(d)));
        ++i;
    }
    return items;
}

void print_items(const std::vector<EventItem>& items, int depth, std::ostringstream& out) {
    std::string pad(2 * depth, ' ');
    for (auto& it : items) {
        if (it.is_loop) {
            out << pad << "forall " << it.counter << " in " << it.lo.str() << ".." << it.hi.str() << ":\n";
            print_items(it.body, depth + 1, out);
        } else {
            out << pad << eid_pattern_string(it.decl.base, it.decl.index, it.decl.label, it.decl.has_label)
                << " := " << to_text(it.decl.rhs) << "\n";
        }
    }
}

}  // namespace

EventItem EventItem::declaration(EventDecl d) {
    EventItem it;
    it.decl = std::move(d);
    return it;
}

EventItem EventItem::loop(std::string counter, Affine lo, Affine hi, std::vector<EventItem> body) {
    EventItem it;
    it.is_loop = true;
    it.counter = std::move(counter);
    it.lo = std::move(lo);
    it.hi = std::move(hi);
    it.body = std::move(body);
    return it;
}

EventProgram parse_event_program(const std::string& text) {
    std::vector<Line> lines;
    std::istringstream in(text);
    std::string raw;
    int no = 0;
    while (std::getline(in, raw)) {
        ++no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        size_t k = raw.find_first_not_of(' ');
        if (k == std::string::npos || raw[k] == '#') continue;
        if (raw.find('\t') != std::string::npos) throw SyntaxError("tab character", no, 1);
        lines.push_back({no, static_cast<int>(k), raw.substr(k)});
    }
    size_t i = 0;
    std::set<std::string> ctr;
    EventProgram p;
    if (lines.empty()) return p;
    if (lines[0].indent != 0) throw SyntaxError("unexpected indentation", lines[0].number, 1);
    p.items = parse_block(lines, i, 0, ctr);
    if (i != lines.size()) throw SyntaxError("inconsistent indentation", lines[i].number, 1);
    return p;
}

ExprPtr parse_event_expr(const std::string& text, const std::set<std::string>& counters) {
    Reader r(text, 1, 0);
    std::set<std::string> ctr = counters;
    ExprPtr e = r.expr(ctr);
    if (!r.at_end()) r.fail("unexpected text after expression");
    return e;
}

std::string print_event_program(const EventProgram& p) {
    std::ostringstream out;
    print_items(p.items, 0, out);
    return out.str();
}

std::string print_grounded(const GroundedProgram& g) {
    std::ostringstream out;
    for (auto& d : g.decls) out << d.eid << " := " << to_text(d.expr) << "\n";
    return out.str();
}

}  // namespace pwe
