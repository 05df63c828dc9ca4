#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/program.hpp"

namespace pwe {

// Instantiates every declaration for every counter tuple, expands folds and
// resolves references to declarations or variables. Targets are glob patterns
// ('*' and '?') over grounded EIDs; each must match at least one declaration.
GroundedProgram ground(const EventProgram& p, const std::vector<std::string>& targets, const VarTable& vt);
GroundedProgram ground(std::shared_ptr<const EventProgram> p, const std::vector<std::string>& targets,
                       const VarTable& vt);

// Declarations of one instance of a top-level loop, with references left as
// canonical names. Used to build folded networks.
std::vector<GroundedDecl> instantiate_loop_body(const EventProgram& p, int item, std::int64_t value);

bool glob_match(const std::string& pattern, const std::string& text);

}  // namespace pwe
