#pragma once

#include <map>
#include <string>
#include <vector>

#include "pwe/dataset.hpp"
#include "pwe/user_lang.hpp"

namespace pwe::testing {

// Value of the direct interpreter: a Boolean, a possibly undefined scalar or
// vector, or an array of values.
struct IValue {
    enum class K { Bool, Num, Array } k = K::Num;
    bool b = false;
    bool def = false;
    bool vec = false;
    std::vector<double> x;
    std::vector<IValue> items;

    static IValue boolean(bool v);
    static IValue num(double v);
    static IValue vector(std::vector<double> v);
    static IValue undef(bool vec);
};

using IEnv = std::map<std::string, IValue>;

// Truth of a propositional formula over dataset variables in one world.
bool world_truth(const ExprPtr& e, const Dataset& d, const std::vector<uint8_t>& world);

// Runs a user program step by step in one world.
IEnv interpret(const ul::UserProgram& p, const Dataset& d, const std::vector<uint8_t>& world);

bool same_value(const IValue& a, const IValue& b, double tol = 1e-9);

}  // namespace pwe::testing
