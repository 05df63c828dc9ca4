#include <cmath>
#include <limits>

#include "doctest.h"
#include "pwe/distributed.hpp"
#include "pwe/error.hpp"
#include "pwe/grounder.hpp"
#include "pwe/oracle.hpp"
#include "pwe/random_programs.hpp"

using namespace pwe;

namespace {

CompileResult sequential(const EventNetwork& net, Scheme s, double eps) {
    CompileOptions o;
    o.scheme = s;
    o.epsilon = eps;
    o.record_visits = true;
    return compile_targets(net, o);
}

DistributedOptions dist(Scheme s, double eps, int workers, int depth) {
    DistributedOptions o;
    o.scheme = s;
    o.epsilon = eps;
    o.workers = workers;
    o.job_depth = depth;
    o.record_visits = true;
    o.record_log = true;
    return o;
}

}  // namespace

TEST_CASE("max job count") {
    CHECK(max_job_count(4, 2) == 5);
    CHECK(max_job_count(9, 3) == 73);
    CHECK(max_job_count(3, 5) == 1);
    CHECK(max_job_count(3, 3) == 1);
    CHECK(max_job_count(10, 1) == 1023);
    CHECK(max_job_count(200, 8) == std::numeric_limits<std::uint64_t>::max());
    CHECK_THROWS_AS(max_job_count(0, 1), ConfigError);
}

TEST_CASE("one worker with a single job equals the sequential search") {
    RandomProgram rp = random_event_program(3, 12, 12);
    EventNetwork net = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
    for (Scheme s : {Scheme::Exact, Scheme::Hybrid, Scheme::Eager, Scheme::Lazy}) {
        double eps = s == Scheme::Exact ? 0 : 0.05;
        CompileResult a = sequential(net, s, eps);
        DistributedResult b = run_distributed(net, dist(s, eps, 1, 12));
        CHECK(b.result.stats.jobs == 1);
        CHECK(b.result.visits == a.visits);
        CHECK(b.result.stats.branches == a.stats.branches);
        for (size_t k = 0; k < a.targets.size(); ++k) {
            CHECK(b.result.targets[k].lower == a.targets[k].lower);
            CHECK(b.result.targets[k].upper == a.targets[k].upper);
        }
    }
}

TEST_CASE("ordered jobs on one worker reproduce the sequential visit order") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        RandomProgram rp = random_event_program(seed, 10 + seed % 5, 12);
        EventNetwork net = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
        for (Scheme s : {Scheme::Exact, Scheme::Hybrid, Scheme::Eager, Scheme::Lazy})
            for (int d : {1, 2, 3}) {
                double eps = s == Scheme::Exact ? 0 : 0.05;
                CompileResult a = sequential(net, s, eps);
                DistributedResult b = run_distributed(net, dist(s, eps, 1, d));
                CHECK(b.sync == SyncMode::Ordered);
                CHECK_MESSAGE(b.result.visits == a.visits, "seed " << seed << " " << std::string(scheme_name(s)) << " d=" << d);
                CHECK(b.result.stats.branches == a.stats.branches);
                CHECK(b.result.stats.leaves == a.stats.leaves);
                CHECK(b.result.stats.pruned == a.stats.pruned);
                CHECK(b.result.stats.jobs <= max_job_count(net.vars().size(), d));
                for (size_t k = 0; k < a.targets.size(); ++k) {
                    CHECK(std::fabs(b.result.targets[k].lower - a.targets[k].lower) <= 1e-9);
                    CHECK(std::fabs(b.result.targets[k].upper - a.targets[k].upper) <= 1e-9);
                }
            }
    }
}

TEST_CASE("parallel exact runs match the sequential bounds and cover all mass") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomProgram rp = random_event_program(seed, 14, 12);
        EventNetwork net = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
        CompileResult a = sequential(net, Scheme::Exact, 0);
        DistributedResult b = run_distributed(net, dist(Scheme::Exact, 0, 8, 2));
        CHECK(b.sync == SyncMode::Speculative);
        CHECK(b.result.stats.jobs <= max_job_count(net.vars().size(), 2));
        for (size_t k = 0; k < a.targets.size(); ++k) {
            CHECK(std::fabs(b.result.targets[k].lower - a.targets[k].lower) <= 1e-9);
            CHECK(std::fabs(b.result.targets[k].upper - a.targets[k].upper) <= 1e-9);
            double mass = 0;
            for (auto& c : b.log) mass += c.lower[k] + c.neg[k];
            CHECK(std::fabs(mass - 1.0) <= 1e-9);
        }
    }
}

TEST_CASE("parallel approximations stay valid") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomProgram rp = random_event_program(seed, 12, 12);
        GroundedProgram g = ground(rp.program, rp.targets, rp.vars);
        OracleResult o = oracle_probabilities(g);
        EventNetwork net = EventNetwork::build(g);
        for (Scheme s : {Scheme::Hybrid, Scheme::Eager, Scheme::Lazy})
            for (SyncMode m : {SyncMode::Ordered, SyncMode::Speculative})
                for (double eps : {0.01, 0.1, 0.3}) {
                    DistributedOptions opt = dist(s, eps, 4, 2);
                    opt.sync = m;
                    DistributedResult b = run_distributed(net, opt);
                    for (size_t k = 0; k < o.probability.size(); ++k) {
                        auto& t = b.result.targets[k];
                        CHECK(t.lower <= o.probability[k] + 1e-9);
                        CHECK(o.probability[k] <= t.upper + 1e-9);
                        CHECK(t.upper - t.lower <= 2 * eps + 1e-9);
                        CHECK(b.result.stats.pruned_mass[k] <= 2 * eps + 1e-9);
                    }
                }
    }
}

TEST_CASE("lost and repeated deliveries do not change the result") {
    RandomProgram rp = random_event_program(11, 12, 12);
    EventNetwork net = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
    CompileResult a = sequential(net, Scheme::Hybrid, 0.05);
    DistributedOptions opt = dist(Scheme::Hybrid, 0.05, 1, 2);
    opt.fault_rate = 0.3;
    opt.seed = 5;
    DistributedResult b = run_distributed(net, opt);
    CHECK(b.lost_deliveries > 0);
    CHECK(b.duplicate_deliveries > 0);
    CHECK(b.result.visits == a.visits);
    for (size_t k = 0; k < a.targets.size(); ++k) {
        CHECK(std::fabs(b.result.targets[k].lower - a.targets[k].lower) <= 1e-9);
        CHECK(std::fabs(b.result.targets[k].upper - a.targets[k].upper) <= 1e-9);
    }
    opt.workers = 4;
    opt.scheme = Scheme::Exact;
    opt.epsilon = 0;
    DistributedResult c = run_distributed(net, opt);
    CompileResult e = sequential(net, Scheme::Exact, 0);
    for (size_t k = 0; k < e.targets.size(); ++k)
        CHECK(std::fabs(c.result.targets[k].lower - e.targets[k].lower) <= 1e-9);
}

TEST_CASE("commit log format and option errors") {
    std::vector<CommitRecord> log{{2, 1, 0, {{3, true}, {0, false}}, {0.25}, {0.5}},
                                  {1, 0, 1, {}, {0.125}, {0}}};
    CHECK(format_commit_log(log) == "2 1 0 3,!0 0.25 | 0.5\n1 0 1 - 0.125 | 0\n");
    RandomProgram rp = random_event_program(1, 4, 4);
    EventNetwork net = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
    CHECK_THROWS_AS(run_distributed(net, dist(Scheme::Hybrid, 0.1, 0, 2)), ConfigError);
    CHECK_THROWS_AS(run_distributed(net, dist(Scheme::Hybrid, 0.1, 1, 0)), ConfigError);
    CHECK_THROWS_AS(run_distributed(net, dist(Scheme::Exact, 0.1, 1, 2)), ConfigError);
    CHECK_THROWS_AS(parse_sync_mode("eventual"), ConfigError);
}
