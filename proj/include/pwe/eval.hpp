#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "pwe/expr.hpp"
#include "pwe/program.hpp"
#include "pwe/value.hpp"

namespace pwe {

using Env = std::unordered_map<std::string, ExprPtr>;

Env env_of(const GroundedProgram& g);

// Per-world semantics. Refs are resolved through env (recursively, with
// cycle detection); variables by index when grounded, by name otherwise.
bool eval_event(const ExprPtr& e, const Valuation& nu, const Env& env, const VarTable& vt);
Value eval_cval(const ExprPtr& c, const Valuation& nu, const Env& env, const VarTable& vt);
Value eval_value(const ExprPtr& e, const Valuation& nu, const Env& env, const VarTable& vt);

double world_probability(const Valuation& nu, const VarTable& vt);

// Static type of every declaration of a grounded program, in order.
std::vector<Type> infer_types(const GroundedProgram& g);

// Flattened evaluator for repeated per-world evaluation of a whole grounded
// program. Immutable after construction; each thread uses its own Scratch.
class ProgramEvaluator {
public:
    explicit ProgramEvaluator(const GroundedProgram& g);

    struct Scratch {
        std::vector<std::uint8_t> def;
        std::vector<double> num;
    };

    Scratch scratch() const;
    void run(const Valuation& nu, Scratch& s) const;
    bool truth(int decl, const Scratch& s) const;
    Value value(int decl, const Scratch& s) const;
    int instruction_count() const { return static_cast<int>(code_.size()); }

private:
    struct Instr {
        Op op;
        Cmp cmp = Cmp::Le;
        int exponent = 0;
        int var = -1;
        Type type;
        int off = 0;
        std::vector<int> kids;
    };

    int compile(const ExprPtr& e, std::unordered_map<const Expr*, int>& memo);
    void exec(const Instr& in, const Valuation& nu, Scratch& s) const;
    Value load(int instr, const Scratch& s) const;
    void store(int instr, const Value& v, Scratch& s) const;

    const GroundedProgram& g_;
    std::vector<Instr> code_;
    std::vector<int> decl_root_;
    std::vector<std::pair<int, ExprPtr>> consts_;
    int num_size_ = 0;
};

}  // namespace pwe
