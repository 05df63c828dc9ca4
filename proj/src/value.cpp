#include "pwe/value.hpp"

#include <cmath>

#include "pwe/error.hpp"

namespace pwe {

std::string Type::str() const {
    switch (kind) {
        case Bool: return "bool";
        case Scalar: return "scalar";
        case Vector: return "vector(" + std::to_string(dim) + ")";
    }
    return "?";
}

Value Value::boolean(bool b) {
    Value r;
    r.type = Type::boolean();
    r.truth = b;
    r.defined = true;
    return r;
}

Value Value::scalar(double x) {
    Value r;
    r.type = Type::scalar();
    r.defined = true;
    r.v = {x};
    return r;
}

Value Value::vector(std::vector<double> x) {
    Value r;
    r.type = Type::vector(static_cast<int>(x.size()));
    r.defined = true;
    r.v = std::move(x);
    return r;
}

Value Value::undefined(Type t) {
    Value r;
    r.type = t;
    r.v.assign(t.dim, 0.0);
    return r;
}

std::string Value::str() const {
    if (type.kind == Type::Bool) return truth ? "true" : "false";
    if (!defined) return "u";
    if (type.kind == Type::Scalar) return format_number(v[0]);
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_number(v[i]);
    }
    return s + "]";
}

Type sum_type(const Type& a, const Type& b) {
    if (!a.numeric() || !b.numeric() || !(a == b))
        throw TypeError("cannot add " + a.str() + " and " + b.str());
    return a;
}

Type mul_type(const Type& a, const Type& b) {
    if (!a.numeric() || !b.numeric()) throw TypeError("cannot multiply " + a.str() + " and " + b.str());
    if (a.kind == Type::Scalar) return b;
    if (b.kind == Type::Scalar) return a;
    if (a.dim != b.dim) throw TypeError("dot product of " + a.str() + " and " + b.str());
    return Type::scalar();
}

void check_compare_types(Cmp c, const Type& a, const Type& b) {
    if (!a.numeric() || !(a == b))
        throw TypeError(std::string("cannot compare ") + a.str() + " " + cmp_symbol(c) + " " + b.str());
    if (a.kind == Type::Vector && c != Cmp::Eq)
        throw TypeError(std::string("ordering comparison on ") + a.str());
}

Value add(const Value& a, const Value& b) {
    Type t = sum_type(a.type, b.type);
    if (!a.defined) return b;
    if (!b.defined) return a;
    Value r = a;
    r.type = t;
    for (size_t i = 0; i < r.v.size(); ++i) r.v[i] += b.v[i];
    return r;
}

Value mul(const Value& a, const Value& b) {
    Type t = mul_type(a.type, b.type);
    if (!a.defined || !b.defined) return Value::undefined(t);
    if (a.type.kind == Type::Scalar && b.type.kind == Type::Scalar) return Value::scalar(a.v[0] * b.v[0]);
    if (a.type.kind == Type::Scalar || b.type.kind == Type::Scalar) {
        const Value& s = a.type.kind == Type::Scalar ? a : b;
        Value r = a.type.kind == Type::Scalar ? b : a;
        for (auto& x : r.v) x *= s.v[0];
        return r;
    }
    double d = 0;
    for (size_t i = 0; i < a.v.size(); ++i) d += a.v[i] * b.v[i];
    return Value::scalar(d);
}

Value inverse(const Value& a) {
    if (a.type.kind != Type::Scalar) throw TypeError("inverse of " + a.type.str());
    if (!a.defined || a.v[0] == 0.0) return Value::undefined(Type::scalar());
    return Value::scalar(1.0 / a.v[0]);
}

Value power(const Value& a, int k) {
    if (a.type.kind != Type::Scalar) throw TypeError("power of " + a.type.str());
    if (!a.defined) return a;
    if (k < 0) {
        if (a.v[0] == 0.0) return Value::undefined(Type::scalar());
        return Value::scalar(std::pow(1.0 / a.v[0], -k));
    }
    return Value::scalar(std::pow(a.v[0], k));
}

Value distance(const Value& a, const Value& b) {
    if (a.type.kind != Type::Vector || !(a.type == b.type))
        throw TypeError("dist of " + a.type.str() + " and " + b.type.str());
    if (!a.defined || !b.defined) return Value::undefined(Type::scalar());
    double s = 0;
    for (size_t i = 0; i < a.v.size(); ++i) s += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
    return Value::scalar(std::sqrt(s));
}

bool compare(Cmp c, const Value& a, const Value& b) {
    check_compare_types(c, a.type, b.type);
    if (!a.defined || !b.defined) return true;
    if (c == Cmp::Eq) return a.v == b.v;
    double x = a.v[0], y = b.v[0];
    switch (c) {
        case Cmp::Le: return x <= y;
        case Cmp::Ge: return x >= y;
        case Cmp::Lt: return x < y;
        case Cmp::Gt: return x > y;
        case Cmp::Eq: break;
    }
    return false;
}

}  // namespace pwe
