#include "pwe/affine.hpp"

#include <algorithm>

#include "pwe/error.hpp"

namespace pwe {

namespace {

void normalize(Affine& a) {
    std::sort(a.terms.begin(), a.terms.end());
    std::vector<std::pair<std::string, std::int64_t>> out;
    for (auto& [n, c] : a.terms) {
        if (!out.empty() && out.back().first == n)
            out.back().second += c;
        else
            out.emplace_back(n, c);
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](auto& t) { return t.second == 0; }),
              out.end());
    a.terms = std::move(out);
}

}  // namespace

Affine Affine::lit(std::int64_t c) {
    Affine a;
    a.constant = c;
    return a;
}

Affine Affine::var(const std::string& name, std::int64_t coef) {
    Affine a;
    if (coef != 0) a.terms.emplace_back(name, coef);
    return a;
}

bool Affine::mentions(const std::string& name) const {
    for (auto& t : terms)
        if (t.first == name) return true;
    return false;
}

Affine Affine::operator+(const Affine& o) const {
    Affine r = *this;
    r.constant += o.constant;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    normalize(r);
    return r;
}

Affine Affine::operator-(const Affine& o) const { return *this + o.scaled(-1); }

Affine Affine::scaled(std::int64_t k) const {
    Affine r;
    r.constant = constant * k;
    for (auto& [n, c] : terms) r.terms.emplace_back(n, c * k);
    normalize(r);
    return r;
}

Affine Affine::substitute(const std::string& name, std::int64_t value) const {
    Affine r;
    r.constant = constant;
    for (auto& [n, c] : terms) {
        if (n == name)
            r.constant += c * value;
        else
            r.terms.emplace_back(n, c);
    }
    return r;
}

Affine Affine::substitute(const CounterEnv& env) const {
    Affine r;
    r.constant = constant;
    for (auto& [n, c] : terms) {
        auto it = env.find(n);
        if (it != env.end())
            r.constant += c * it->second;
        else
            r.terms.emplace_back(n, c);
    }
    return r;
}

std::int64_t Affine::eval(const CounterEnv& env) const {
    std::int64_t v = constant;
    for (auto& [n, c] : terms) {
        auto it = env.find(n);
        if (it == env.end()) throw ResolutionError("unbound loop counter '" + n + "'");
        v += c * it->second;
    }
    return v;
}

std::string Affine::str() const {
    std::string s;
    for (auto& [n, c] : terms) {
        if (s.empty()) {
            if (c == -1) s += "-";
            else if (c != 1) s += std::to_string(c) + "*";
        } else {
            s += c < 0 ? "-" : "+";
            std::int64_t m = c < 0 ? -c : c;
            if (m != 1) s += std::to_string(m) + "*";
        }
        s += n;
    }
    if (s.empty()) return std::to_string(constant);
    if (constant > 0) s += "+" + std::to_string(constant);
    if (constant < 0) s += std::to_string(constant);
    return s;
}

}  // namespace pwe
