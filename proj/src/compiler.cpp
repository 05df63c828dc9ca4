#include "pwe/compiler.hpp"

#include <algorithm>
#include <cmath>

#include "pwe/error.hpp"

namespace pwe {

Scheme parse_scheme(const std::string& s) {
    if (s == "exact") return Scheme::Exact;
    if (s == "eager") return Scheme::Eager;
    if (s == "lazy") return Scheme::Lazy;
    if (s == "hybrid") return Scheme::Hybrid;
    throw ConfigError("unknown scheme '" + s + "'");
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Exact: return "exact";
        case Scheme::Eager: return "eager";
        case Scheme::Lazy: return "lazy";
        case Scheme::Hybrid: return "hybrid";
    }
    return "?";
}

void CompileStats::merge(const CompileStats& o) {
    branches += o.branches;
    leaves += o.leaves;
    pruned += o.pruned;
    propagations += o.propagations;
    node_updates += o.node_updates;
    jobs += o.jobs;
    if (pruned_mass.size() < o.pruned_mass.size()) pruned_mass.resize(o.pruned_mass.size(), 0.0);
    for (size_t i = 0; i < o.pruned_mass.size(); ++i) pruned_mass[i] += o.pruned_mass[i];
    if (converged_at < 0) converged_at = o.converged_at;
}

void validate_options(const EventNetwork& net, Scheme scheme, double epsilon) {
    if (!(epsilon >= 0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be a finite number >= 0");
    if (scheme == Scheme::Exact && epsilon != 0) throw ConfigError("exact mode takes no epsilon");
    if (scheme != Scheme::Exact && epsilon == 0) throw ConfigError("approximate modes need epsilon > 0");
    if (net.targets().empty()) throw ConfigError("no compilation targets");
}

BranchSearch::BranchSearch(const EventNetwork& net, Scheme scheme, double epsilon)
    : net_(net), masks_(net), scheme_(scheme), two_eps_(2 * epsilon) {
    const size_t k = net.targets().size();
    lower_.assign(k, 0.0);
    neg_.assign(k, 0.0);
    stats_.pruned_mass.assign(k, 0.0);
}

void BranchSearch::set_shared(const std::atomic<double>* lower, const std::atomic<double>* neg) {
    shared_lower_ = lower;
    shared_neg_ = neg;
}

void BranchSearch::take_bounds(std::vector<double>& lower, std::vector<double>& neg) {
    lower = lower_;
    neg = neg_;
    std::fill(lower_.begin(), lower_.end(), 0.0);
    std::fill(neg_.begin(), neg_.end(), 0.0);
}

double BranchSearch::width(int k) const {
    double l = lower_[k], n = neg_[k];
    if (shared_lower_) {
        l += shared_lower_[k].load(std::memory_order_relaxed);
        n += shared_neg_[k].load(std::memory_order_relaxed);
    }
    return 1.0 - n - l;
}

void BranchSearch::account(double p) {
    for (auto [k, v] : masks_.take_decided()) (v ? lower_ : neg_)[k] += p;
}

void BranchSearch::tick() {
    ++events_;
    if (progress_ && events_ % progress_every_ == 0) progress_();
}

void BranchSearch::run_root(std::vector<double>& budget) {
    account(1.0);
    const VarTable& vt = net_.vars();
    for (int v = 0; v < vt.size(); ++v) {
        if (vt.p(v) != 0.0 && vt.p(v) != 1.0) continue;
        masks_.assign(v, vt.p(v) == 1.0);
        path_.push_back({v, vt.p(v) == 1.0});
        account(1.0);
    }
    if (net_.folded()) {
        for (int t = 0; t + 1 < net_.iterations(); ++t)
            if (masks_.converged_at(t)) {
                stats_.converged_at = t + 1;
                break;
            }
    }
    dfs(1.0, budget, 0);
    stats_.propagations = masks_.propagations();
    stats_.node_updates = masks_.node_updates();
}

void BranchSearch::run_prefix(const Prefix& prefix, double p, std::vector<double>& budget) {
    for (auto [v, val] : prefix) {
        masks_.assign(v, val);
        path_.push_back({v, val});
    }
    masks_.take_decided();
    const std::uint64_t base_prop = masks_.propagations(), base_upd = masks_.node_updates();
    dfs(p, budget, 0);
    stats_.propagations += masks_.propagations() - base_prop;
    stats_.node_updates += masks_.node_updates() - base_upd;
}

void BranchSearch::dfs(double p, std::vector<double>& budget, int depth) {
    const int k = static_cast<int>(lower_.size());
    undecided_.clear();
    for (int t = 0; t < k; ++t)
        if (masks_.target_truth(t) == Tri::Unknown) undecided_.push_back(t);
    if (undecided_.empty()) {
        ++stats_.leaves;
        tick();
        return;
    }
    if (scheme_ != Scheme::Exact) {
        if (drain_) drain_(budget);
        bool narrow = true, affordable = true;
        for (int t : undecided_) {
            if (width(t) > two_eps_) narrow = false;
            if (budget[t] < p) affordable = false;
        }
        if (narrow || affordable) {
            for (int t : undecided_) {
                stats_.pruned_mass[t] += p;
                if (!narrow) budget[t] -= p;
            }
            ++stats_.pruned;
            tick();
            return;
        }
    }
    const int x = masks_.next_variable();
    if (x < 0) throw InternalError("targets undecided after every variable was assigned");
    const double px = net_.vars().p(x);
    std::vector<double> right(k, 0.0);
    std::vector<double> left(k, 0.0);
    switch (scheme_) {
        case Scheme::Hybrid:
            for (int t = 0; t < k; ++t) left[t] = right[t] = budget[t] / 2;
            break;
        case Scheme::Eager: left = budget; break;
        default: break;
    }
    for (int side = 0; side < 2; ++side) {
        const bool value = side == 0;
        const double pc = p * (value ? px : 1.0 - px);
        std::vector<double>& share = side == 0 ? left : right;
        if (side == 1) {
            for (int t = 0; t < k; ++t) share[t] += left[t];
            if (drain_) drain_(share);
        }
        ++stats_.branches;
        if (record_) visits_.push_back(2 * x + (value ? 1 : 0));
        const std::size_t mark = masks_.mark();
        masks_.assign(x, value);
        path_.push_back({x, value});
        account(pc);
        const bool open = std::any_of(undecided_.begin(), undecided_.end(),
                                      [&](int t) { return masks_.target_truth(t) == Tri::Unknown; });
        if (fork_ && depth + 1 == fork_depth_ && open &&
            masks_.assigned_count() < net_.vars().size()) {
            fork_(path_, pc, share);
        } else {
            std::vector<int> saved = undecided_;
            dfs(pc, share, depth + 1);
            undecided_ = std::move(saved);
        }
        path_.pop_back();
        masks_.undo(mark);
    }
    budget = right;
}

std::vector<TargetBounds> make_bounds(const EventNetwork& net, const std::vector<double>& lower,
                                      const std::vector<double>& neg) {
    std::vector<TargetBounds> out;
    for (size_t k = 0; k < net.targets().size(); ++k) {
        TargetBounds b;
        b.eid = net.targets()[k].eid;
        b.lower = std::clamp(lower[k], 0.0, 1.0);
        b.upper = std::clamp(1.0 - neg[k], 0.0, 1.0);
        if (b.lower > b.upper) b.lower = b.upper = (b.lower + b.upper) / 2;
        out.push_back(b);
    }
    return out;
}

std::vector<double> initial_budget(const EventNetwork& net, Scheme scheme, double epsilon) {
    const bool spends = scheme == Scheme::Eager || scheme == Scheme::Hybrid;
    return std::vector<double>(net.targets().size(), spends ? 2 * epsilon : 0.0);
}

CompileResult compile_targets(const EventNetwork& net, const CompileOptions& opts) {
    validate_options(net, opts.scheme, opts.epsilon);
    BranchSearch s(net, opts.scheme, opts.epsilon);
    s.record_visits(opts.record_visits);
    if (opts.progress)
        s.set_progress([&] { opts.progress(make_bounds(net, s.lower(), s.neg())); }, opts.progress_every);
    std::vector<double> budget = initial_budget(net, opts.scheme, opts.epsilon);
    s.run_root(budget);
    CompileResult r;
    r.targets = make_bounds(net, s.lower(), s.neg());
    r.stats = s.stats();
    r.stats.jobs = 1;
    r.visits = s.visits();
    return r;
}

}  // namespace pwe
