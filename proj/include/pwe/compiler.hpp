#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pwe/network.hpp"

namespace pwe {

enum class Scheme { Exact, Eager, Lazy, Hybrid };

Scheme parse_scheme(const std::string& s);
const char* scheme_name(Scheme s);

struct TargetBounds {
    std::string eid;
    double lower = 0;
    double upper = 1;
};

struct CompileStats {
    std::uint64_t branches = 0;  // visited tree nodes below the root
    std::uint64_t leaves = 0;    // nodes where every target is decided
    std::uint64_t pruned = 0;    // subtrees given up against the error budget or the width test
    std::uint64_t propagations = 0;
    std::uint64_t node_updates = 0;
    std::uint64_t jobs = 0;
    std::vector<double> pruned_mass;  // per target
    int converged_at = -1;            // first iteration whose masks repeat at the root (folded only)

    void merge(const CompileStats& o);
};

struct CompileResult {
    std::vector<TargetBounds> targets;
    CompileStats stats;
    std::vector<std::int32_t> visits;  // 2*var+value per visited branch, when recorded
};

struct CompileOptions {
    Scheme scheme = Scheme::Exact;
    double epsilon = 0;
    bool record_visits = false;
    // Called every `progress_every` leaves or prunes with the current bounds.
    std::function<void(const std::vector<TargetBounds>&)> progress;
    std::uint64_t progress_every = 1;
};

void validate_options(const EventNetwork& net, Scheme scheme, double epsilon);

CompileResult compile_targets(const EventNetwork& net, const CompileOptions& opts);

using Prefix = std::vector<std::pair<int, bool>>;

// Depth-first Shannon expansion over one network. A search starts at a
// branch given by a prefix of assignments; subtrees at relative depth
// `fork_depth` are handed to `fork` instead of being explored here.
class BranchSearch {
public:
    // Hands off the subtree below `prefix`; on return `budget` holds whatever
    // residual is available to the caller now.
    using Fork = std::function<void(const Prefix& prefix, double p, std::vector<double>& budget)>;
    using Drain = std::function<void(std::vector<double>& budget)>;

    BranchSearch(const EventNetwork& net, Scheme scheme, double epsilon);

    // Committed bounds of other searches, used by the width test.
    void set_shared(const std::atomic<double>* lower, const std::atomic<double>* neg);
    void set_fork(int fork_depth, Fork fork) {
        fork_depth_ = fork_depth;
        fork_ = std::move(fork);
    }
    void set_drain(Drain d) { drain_ = std::move(d); }
    void set_progress(std::function<void()> f, std::uint64_t every) {
        progress_ = std::move(f);
        progress_every_ = every ? every : 1;
    }
    void record_visits(bool on) { record_ = on; }

    // Root search: pre-assigns certain variables, accounts root decisions.
    void run_root(std::vector<double>& budget);
    // Job search: replays the prefix without accounting, then explores.
    void run_prefix(const Prefix& prefix, double p, std::vector<double>& budget);

    // Continues accumulating from bounds handed over by another search.
    void seed_bounds(const std::vector<double>& lower, const std::vector<double>& neg) {
        lower_ = lower;
        neg_ = neg;
    }
    // Moves out the bound mass accumulated since the last call.
    void take_bounds(std::vector<double>& lower, std::vector<double>& neg);

    const std::vector<double>& lower() const { return lower_; }
    const std::vector<double>& neg() const { return neg_; }
    const CompileStats& stats() const { return stats_; }
    CompileStats& stats() { return stats_; }
    const std::vector<std::int32_t>& visits() const { return visits_; }
    std::vector<std::int32_t> take_visits() { return std::exchange(visits_, {}); }
    int targets() const { return static_cast<int>(lower_.size()); }

private:
    void dfs(double p, std::vector<double>& budget, int depth);
    void account(double p);
    double width(int k) const;
    void tick();

    const EventNetwork& net_;
    MaskState masks_;
    Scheme scheme_;
    double two_eps_;
    std::vector<double> lower_, neg_;
    const std::atomic<double>* shared_lower_ = nullptr;
    const std::atomic<double>* shared_neg_ = nullptr;
    int fork_depth_ = -1;
    Fork fork_;
    Drain drain_;
    std::function<void()> progress_;
    std::uint64_t progress_every_ = 1;
    std::uint64_t events_ = 0;
    bool record_ = false;
    Prefix path_;
    std::vector<std::int32_t> visits_;
    CompileStats stats_;
    std::vector<int> undecided_;
};

// Root error budget per target for a scheme.
std::vector<double> initial_budget(const EventNetwork& net, Scheme scheme, double epsilon);

// Final [L, U] per target from accumulated lower and negative masses.
std::vector<TargetBounds> make_bounds(const EventNetwork& net, const std::vector<double>& lower,
                                      const std::vector<double>& neg);

}  // namespace pwe
