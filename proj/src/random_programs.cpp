#include "pwe/random_programs.hpp"

#include <cmath>
#include <random>

namespace pwe {

namespace {

class Gen {
public:
    Gen(std::uint64_t seed, int vars) : rng_(seed), m_(vars) {}

    RandomProgram make(int decls) {
        RandomProgram r;
        std::uniform_real_distribution<double> p(0.05, 0.95);
        for (int i = 0; i < m_; ++i) r.vars.add("x" + std::to_string(i), std::round(p(rng_) * 100) / 100);
        for (int d = 0; d < decls; ++d) {
            bool boolean = d == decls - 1 || coin(0.55);
            std::string name = (boolean ? "B" : "C") + std::to_string(d);
            ExprPtr rhs = boolean ? event(3) : cvalue(3);
            r.program.items.push_back(EventItem::declaration({name, {}, {}, false, rhs}));
            (boolean ? events_ : values_).push_back(name);
            if (boolean) r.targets.push_back(name);
        }
        return r;
    }

private:
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    ExprPtr literal() {
        ExprPtr v = ex::var("x" + std::to_string(pick(m_)));
        return coin(0.3) ? ex::neg(v) : v;
    }

    ExprPtr atom(int depth) {
        static const Cmp cmps[] = {Cmp::Le, Cmp::Ge, Cmp::Lt, Cmp::Gt, Cmp::Eq};
        ExprPtr l = cvalue(depth - 1);
        ExprPtr r = coin(0.5) ? ex::scalar(pick(7)) : cvalue(depth - 1);
        return ex::atom(cmps[pick(5)], l, r);
    }

    ExprPtr event(int depth) {
        if (depth <= 0) return literal();
        switch (pick(6)) {
            case 0: return literal();
            case 1:
                if (!events_.empty()) return ex::ref(events_[pick(static_cast<int>(events_.size()))]);
                return literal();
            case 2: return ex::neg(event(depth - 1));
            case 3: return ex::conj({event(depth - 1), event(depth - 1)});
            case 4: return ex::disj({event(depth - 1), event(depth - 1)});
            default: return atom(depth);
        }
    }

    ExprPtr cvalue(int depth) {
        if (depth <= 0 || coin(0.3)) {
            if (!values_.empty() && coin(0.4)) return ex::ref(values_[pick(static_cast<int>(values_.size()))]);
            return ex::guard(literal(), ex::scalar(pick(5)));
        }
        switch (pick(4)) {
            case 0: return ex::sum({cvalue(depth - 1), cvalue(depth - 1), cvalue(depth - 1)});
            case 1: return ex::prod({cvalue(depth - 1), cvalue(depth - 1)});
            case 2: return ex::guard(event(depth - 1), cvalue(depth - 1));
            default: return ex::sum({ex::guard(literal(), ex::scalar(pick(4))), cvalue(depth - 1)});
        }
    }

    std::mt19937_64 rng_;
    int m_;
    std::vector<std::string> events_, values_;
};

}  // namespace

RandomProgram random_event_program(std::uint64_t seed, int vars, int decls) {
    return Gen(seed, vars).make(decls);
}

}  // namespace pwe
