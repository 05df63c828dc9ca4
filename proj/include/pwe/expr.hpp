#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pwe/affine.hpp"

namespace pwe {

// Independent Boolean random variables with their probability of being true.
class VarTable {
public:
    int add(const std::string& id, double p_true);
    int find(const std::string& id) const;
    int size() const { return static_cast<int>(ids_.size()); }
    const std::string& id(int i) const { return ids_[i]; }
    double p(int i) const { return p_[i]; }

private:
    std::vector<std::string> ids_;
    std::vector<double> p_;
    std::unordered_map<std::string, int> index_;
};

// Total valuation indexed by VarTable position.
using Valuation = std::vector<std::uint8_t>;

enum class Op : std::uint8_t {
    Bool, Var, Ref, Not, And, Or, Atom,
    Num, Counter, Guard, Sum, Prod, Inv, Pow, Dist, Fold
};

enum class Cmp : std::uint8_t { Le, Ge, Eq, Lt, Gt };

const char* cmp_symbol(Cmp c);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// One node of an event or c-value expression. Before grounding a Ref carries
// a base name with affine indices and label; after grounding `name` holds the
// canonical EID and the index/label vectors are empty.
struct Expr {
    Op op = Op::Bool;
    bool truth = false;
    Cmp cmp = Cmp::Le;
    Op fold_op = Op::Sum;
    int exponent = 0;
    bool is_vector = false;
    bool undefined = false;
    std::vector<double> num;
    std::string name;
    std::vector<Affine> index;
    std::vector<Affine> label;
    bool has_label = false;
    Affine lo, hi;
    int var = -1;
    std::vector<ExprPtr> kids;
};

namespace ex {
ExprPtr boolean(bool b);
ExprPtr var(const std::string& name, int index = -1);
ExprPtr ref(const std::string& base, std::vector<Affine> index = {}, std::vector<Affine> label = {},
            bool has_label = false);
ExprPtr grounded_ref(const std::string& eid);
ExprPtr neg(ExprPtr e);
ExprPtr conj(std::vector<ExprPtr> kids);
ExprPtr disj(std::vector<ExprPtr> kids);
ExprPtr atom(Cmp c, ExprPtr l, ExprPtr r);
ExprPtr scalar(double v);
ExprPtr vector(std::vector<double> v);
ExprPtr undef(bool is_vector, int dim);
ExprPtr counter(const std::string& name);
ExprPtr guard(ExprPtr event, ExprPtr value);
ExprPtr sum(std::vector<ExprPtr> kids);
ExprPtr prod(std::vector<ExprPtr> kids);
ExprPtr inv(ExprPtr e);
ExprPtr pow(ExprPtr e, int k);
ExprPtr dist(ExprPtr a, ExprPtr b);
ExprPtr fold(Op fold_op, const std::string& counter, Affine lo, Affine hi, ExprPtr body);
}  // namespace ex

// Canonical text of a grounded EID, e.g. InCl[0,3]_{-1.4} or M_2.
std::string eid_string(const std::string& base, const std::vector<std::int64_t>& index,
                       const std::vector<std::int64_t>& label, bool has_label);
// Same with symbolic components, e.g. M_{1.(2*i-1)}.
std::string eid_pattern_string(const std::string& base, const std::vector<Affine>& index,
                               const std::vector<Affine>& label, bool has_label);

std::string format_number(double v);
std::string to_text(const ExprPtr& e);

bool is_boolean_op(Op op);

}  // namespace pwe
