#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pwe/dataset.hpp"
#include "pwe/program.hpp"
#include "pwe/user_lang.hpp"

namespace pwe {

// Final version of a user variable after translation.
struct VarSummary {
    bool is_array = false;
    std::vector<std::int64_t> shape;
    std::vector<std::int64_t> label;
    bool has_label = false;
};

struct Translation {
    EventProgram program;
    std::map<std::string, VarSummary> finals;
    std::map<std::string, double> constants;

    // EID of an element of the final version of `var`.
    std::string final_eid(const std::string& var, const std::vector<std::int64_t>& index = {}) const;
    // Glob selecting every element of the final version of `var`.
    std::string final_glob(const std::string& var) const;
};

Translation translate_to_event_program(const ul::UserProgram& p, const Dataset& data);

enum class TieAxis { Single, First, Second };

// Exclusivity encoding over a rectangular family in[i][l]. Second keeps the
// lowest i per l (breakTies2), First the lowest l per i (breakTies1), Single
// treats the family as one row (breakTies).
std::vector<std::vector<ExprPtr>> break_ties_encode(const std::vector<std::vector<ExprPtr>>& in, TieAxis axis);

}  // namespace pwe
