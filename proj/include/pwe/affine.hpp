#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pwe {

using CounterEnv = std::map<std::string, std::int64_t>;

// Integer affine combination of loop counters, used for array indices,
// version labels and loop bounds.
struct Affine {
    std::int64_t constant = 0;
    std::vector<std::pair<std::string, std::int64_t>> terms;  // sorted, nonzero

    static Affine lit(std::int64_t c);
    static Affine var(const std::string& name, std::int64_t coef = 1);

    bool is_constant() const { return terms.empty(); }
    bool mentions(const std::string& name) const;

    Affine operator+(const Affine& o) const;
    Affine operator-(const Affine& o) const;
    Affine scaled(std::int64_t k) const;
    Affine substitute(const std::string& name, std::int64_t value) const;
    Affine substitute(const CounterEnv& env) const;

    // Throws ResolutionError when a counter is unbound.
    std::int64_t eval(const CounterEnv& env) const;

    std::string str() const;
    bool operator==(const Affine& o) const = default;
};

}  // namespace pwe
