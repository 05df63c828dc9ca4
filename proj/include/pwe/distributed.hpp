#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/compiler.hpp"

namespace pwe {

// Ordered: a parent waits for each forked job and continues with its residual
// budget, which reproduces the sequential search. Speculative: the parent
// continues at once and residuals arrive later through its inbox.
enum class SyncMode { Auto, Ordered, Speculative };

SyncMode parse_sync_mode(const std::string& s);
const char* sync_mode_name(SyncMode m);

struct DistributedOptions {
    Scheme scheme = Scheme::Hybrid;
    double epsilon = 0.1;
    int workers = 1;
    int job_depth = 4;
    SyncMode sync = SyncMode::Auto;  // ordered for one worker, speculative otherwise
    bool record_visits = false;
    bool record_log = false;
    double fault_rate = 0;  // probability that a delivery is lost, or an acknowledgement is
    std::uint64_t seed = 1;
};

// One committed segment of a job: the bound mass settled since the job's
// previous commit. A job commits at each fork and at its end.
struct CommitRecord {
    std::uint64_t job = 0;
    std::uint64_t parent = 0;  // 0 for the root job
    int segment = 0;
    Prefix prefix;
    std::vector<double> lower, neg;
};

struct DistributedResult {
    CompileResult result;
    SyncMode sync = SyncMode::Ordered;
    std::uint64_t lost_deliveries = 0;
    std::uint64_t duplicate_deliveries = 0;
    std::vector<CommitRecord> log;
};

// Upper bound on the jobs created for m variables and job depth d,
// saturating at the largest representable value.
std::uint64_t max_job_count(int m, int d);

DistributedResult run_distributed(const EventNetwork& net, const DistributedOptions& opts);

// Line per commit: `job parent segment prefix lower... | neg...`.
std::string format_commit_log(const std::vector<CommitRecord>& log);

}  // namespace pwe
