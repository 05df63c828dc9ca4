#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pwe/expr.hpp"
#include "pwe/value.hpp"

namespace pwe {

// Declaration EID := expr, possibly with symbolic indices and label.
struct EventDecl {
    std::string base;
    std::vector<Affine> index;
    std::vector<Affine> label;
    bool has_label = false;
    ExprPtr rhs;
};

// Either a declaration or a forall loop over an inclusive counter range.
struct EventItem {
    bool is_loop = false;
    EventDecl decl;
    std::string counter;
    Affine lo, hi;
    std::vector<EventItem> body;

    static EventItem declaration(EventDecl d);
    static EventItem loop(std::string counter, Affine lo, Affine hi, std::vector<EventItem> body);
};

struct EventProgram {
    std::vector<EventItem> items;
};

constexpr std::int64_t kNoIteration = std::numeric_limits<std::int64_t>::min();

struct GroundedDecl {
    std::string eid;
    ExprPtr expr;
    Type type;
    int top_item = -1;                      // index of the top-level item it came from
    std::int64_t iteration = kNoIteration;  // counter value of that item when it is a loop
    int ordinal = 0;                        // position inside one iteration
};

struct GroundedProgram {
    std::vector<GroundedDecl> decls;
    std::unordered_map<std::string, int> index;
    std::vector<int> targets;
    VarTable vars;
    std::shared_ptr<const EventProgram> source;

    int find(const std::string& eid) const {
        auto it = index.find(eid);
        return it == index.end() ? -1 : it->second;
    }
};

}  // namespace pwe
