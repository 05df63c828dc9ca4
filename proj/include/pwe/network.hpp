#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/program.hpp"
#include "pwe/value.hpp"

namespace pwe {

enum class NodeKind : std::uint8_t {
    Var, Const, Not, And, Or, Atom, Guard, Sum, Prod, Inv, Pow, Dist, Loop, Final
};

const char* node_kind_name(NodeKind k);

// Loop nodes carry kids {init, carry}: the value at iteration 0 is init, at
// iteration t it is carry at t-1. Final reads its kid at the last iteration.
struct NetNode {
    NodeKind kind = NodeKind::Const;
    Type type;
    Cmp cmp = Cmp::Le;
    int exponent = 0;
    int var = -1;
    Value value;
    bool timed = false;
    int phase = 0;  // 0 before the folded loop, 1 inside it, 2 after it
    std::vector<int> kids;
    std::vector<int> parents;
};

struct NetTarget {
    std::string eid;
    int node = -1;
    int t = 0;
};

// Shared-subexpression DAG over a grounded program. In folded mode one
// top-level loop is represented once, with a state slot per iteration.
class EventNetwork {
public:
    static EventNetwork build(const GroundedProgram& g, bool folded = false);
    static EventNetwork parse_dump(const std::string& text);

    const std::vector<NetNode>& nodes() const { return nodes_; }
    const NetNode& node(int i) const { return nodes_[i]; }
    const std::vector<NetTarget>& targets() const { return targets_; }
    const VarTable& vars() const { return vars_; }
    int var_node(int var) const { return var_node_[var]; }
    bool folded() const { return folded_; }
    int iterations() const { return iterations_; }
    int slots(int node) const { return nodes_[node].timed ? iterations_ : 1; }
    int slot_count() const { return slot_count_; }
    int slot(int node, int t) const { return slot_base_[node] + (nodes_[node].timed ? t : 0); }

    // Variables each node depends on, as a bitset.
    const std::vector<std::uint64_t>& support(int node) const { return support_[node]; }

    // Line format: one `id kind attrs : kids` record per node, then targets.
    std::string dump() const;

private:
    friend class NetworkBuilder;
    void finish();

    std::vector<NetNode> nodes_;
    std::vector<NetTarget> targets_;
    VarTable vars_;
    std::vector<int> var_node_;
    bool folded_ = false;
    int iterations_ = 1;
    std::vector<int> slot_base_;
    int slot_count_ = 0;
    std::vector<std::vector<std::uint64_t>> support_;
};

enum class Tri : std::uint8_t { Unknown = 0, True = 1, False = 2 };

// Abstract value of a numeric node: either may be undefined, and when
// defined lies componentwise in [lo, hi].
struct NumState {
    bool may_def = true;
    bool may_undef = true;
    std::vector<double> lo, hi;

    bool decided() const;
};

// Per-branch masks of one network with an undo trail. Not thread-safe; each
// worker owns one.
class MaskState {
public:
    explicit MaskState(const EventNetwork& net);

    const EventNetwork& network() const { return net_; }

    // Assigns a variable and propagates to every affected slot.
    void assign(int var, bool value);
    bool assigned(int var) const { return assigned_[var] != 0; }
    int assigned_count() const { return assigned_count_; }

    std::size_t mark() const { return trail_.size(); }
    void undo(std::size_t mark);

    Tri truth(int node, int t = 0) const { return static_cast<Tri>(tri_[net_.slot(node, t)]); }
    NumState numeric(int node, int t = 0) const;
    bool slot_decided(int slot) const;

    Tri target_truth(int target) const { return static_cast<Tri>(tri_[target_slot_[target]]); }

    // Targets decided since the last call, with their value.
    std::vector<std::pair<int, bool>> take_decided();

    // Unassigned variable with the most undecided dependent slots; lowest
    // index on ties. -1 when every variable is assigned.
    int next_variable() const;

    std::uint64_t propagations() const { return propagations_; }
    std::uint64_t node_updates() const { return node_updates_; }

    // Whether every slot of iteration t+1 equals iteration t (folded only).
    bool converged_at(int t) const;

private:
    struct TrailEntry {
        int slot;
        std::uint8_t state;
        std::uint32_t saved;
    };

    void compute(int node, int t, std::uint8_t& state, double* lo, double* hi) const;
    bool recompute(int node, int t);
    void push(int node, int t);
    void push_parents(int node, int t);
    void drain();
    NumState num_of(int slot, int node) const;
    std::uint64_t order_key(int node, int t) const;

    const EventNetwork& net_;
    std::vector<std::uint8_t> tri_;    // Boolean slots: Tri; numeric slots: bit0 may_def, bit1 may_undef
    std::vector<std::uint32_t> comp_;  // first component of each numeric slot
    std::vector<double> lo_, hi_;
    std::vector<std::uint8_t> queued_;
    std::vector<std::uint8_t> assigned_;
    int assigned_count_ = 0;
    std::vector<int> target_slot_;
    std::vector<std::vector<int>> slot_targets_;
    std::vector<int> slot_node_;
    std::vector<TrailEntry> trail_;
    std::vector<double> saved_;
    std::vector<std::pair<int, bool>> decided_;
    std::vector<std::pair<std::uint64_t, std::pair<int, int>>> heap_;
    std::uint64_t propagations_ = 0;
    std::uint64_t node_updates_ = 0;
};

}  // namespace pwe
