#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/program.hpp"

namespace pwe {

struct RandomProgram {
    EventProgram program;
    VarTable vars;
    std::vector<std::string> targets;
};

// Seeded event program over `vars` variables mixing Boolean formulas, guarded
// sums, products and comparisons. Every Boolean declaration is a target.
RandomProgram random_event_program(std::uint64_t seed, int vars, int decls = 10);

}  // namespace pwe
