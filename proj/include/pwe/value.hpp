#pragma once

#include <string>
#include <vector>

#include "pwe/expr.hpp"

namespace pwe {

// Static type of an expression; scalars are vectors of dimension one
// without the vector flag.
struct Type {
    enum Kind : std::uint8_t { Bool, Scalar, Vector } kind = Bool;
    int dim = 0;

    static Type boolean() { return {Bool, 0}; }
    static Type scalar() { return {Scalar, 1}; }
    static Type vector(int d) { return {Vector, d}; }
    bool numeric() const { return kind != Bool; }
    bool operator==(const Type&) const = default;
    std::string str() const;
};

// Per-world value: a truth value, an extended scalar, or an extended vector.
struct Value {
    Type type;
    bool truth = false;
    bool defined = false;
    std::vector<double> v;

    static Value boolean(bool b);
    static Value scalar(double x);
    static Value vector(std::vector<double> x);
    static Value undefined(Type t);
    bool operator==(const Value&) const = default;
    std::string str() const;
};

// Undefined-element algebra. Inputs must be numeric values of compatible
// types; TypeError otherwise.
Value add(const Value& a, const Value& b);
Value mul(const Value& a, const Value& b);
Value inverse(const Value& a);
Value power(const Value& a, int k);
Value distance(const Value& a, const Value& b);
bool compare(Cmp c, const Value& a, const Value& b);

Type sum_type(const Type& a, const Type& b);
Type mul_type(const Type& a, const Type& b);
void check_compare_types(Cmp c, const Type& a, const Type& b);

}  // namespace pwe
