#pragma once

#include <set>
#include <string>

#include "pwe/expr.hpp"
#include "pwe/program.hpp"

namespace pwe {

// Line-oriented event-program text:
//   EID := expr
//   forall i in lo..hi:
//     <indented body>
// Identifiers that name loop counters in scope parse as counter values.
EventProgram parse_event_program(const std::string& text);
ExprPtr parse_event_expr(const std::string& text, const std::set<std::string>& counters = {});

std::string print_event_program(const EventProgram& p);
std::string print_grounded(const GroundedProgram& g);

}  // namespace pwe
