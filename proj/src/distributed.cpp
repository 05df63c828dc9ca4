#include "pwe/distributed.hpp"

#include <condition_variable>
#include <deque>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "pwe/error.hpp"
#include "pwe/expr.hpp"

namespace pwe {

SyncMode parse_sync_mode(const std::string& s) {
    if (s == "auto") return SyncMode::Auto;
    if (s == "ordered") return SyncMode::Ordered;
    if (s == "speculative") return SyncMode::Speculative;
    throw ConfigError("unknown budget sync mode '" + s + "'");
}

const char* sync_mode_name(SyncMode m) {
    switch (m) {
        case SyncMode::Auto: return "auto";
        case SyncMode::Ordered: return "ordered";
        case SyncMode::Speculative: return "speculative";
    }
    return "?";
}

std::uint64_t max_job_count(int m, int d) {
    if (m < 1 || d < 1) throw ConfigError("max_job_count needs m >= 1 and d >= 1");
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    const int levels = (m + d - 1) / d;
    std::uint64_t total = 0;
    for (int i = 0; i < levels; ++i) {
        const long long shift = static_cast<long long>(i) * d;
        if (shift >= 64) return kMax;
        const std::uint64_t term = std::uint64_t{1} << shift;
        if (total > kMax - term) return kMax;
        total += term;
    }
    return total;
}

std::string format_commit_log(const std::vector<CommitRecord>& log) {
    std::string out;
    for (auto& c : log) {
        out += std::to_string(c.job) + ' ' + std::to_string(c.parent) + ' ' + std::to_string(c.segment) + ' ';
        if (c.prefix.empty()) out += '-';
        for (size_t i = 0; i < c.prefix.size(); ++i) {
            if (i) out += ',';
            out += (c.prefix[i].second ? "" : "!") + std::to_string(c.prefix[i].first);
        }
        for (double v : c.lower) out += ' ' + format_number(v);
        out += " |";
        for (double v : c.neg) out += ' ' + format_number(v);
        out += '\n';
    }
    return out;
}

namespace {

// Residual budget returned by finished jobs. Posts to a closed inbox move
// up to the nearest open ancestor.
struct Inbox {
    std::mutex mu;
    std::vector<double> acc;
    bool closed = false;
    std::shared_ptr<Inbox> up;
};

void post(std::shared_ptr<Inbox> box, const std::vector<double>& amount) {
    while (box) {
        std::lock_guard<std::mutex> lk(box->mu);
        if (!box->closed) {
            for (size_t k = 0; k < amount.size(); ++k) box->acc[k] += amount[k];
            return;
        }
        box = box->up;
    }
}

struct Waiter {
    bool done = false;
    std::vector<double> residual;
    std::vector<double> lower, neg;
};

struct Job {
    std::uint64_t id = 0;
    std::uint64_t parent = 0;
    Prefix prefix;
    double p = 1;
    std::vector<double> budget;
    std::vector<double> start_lower, start_neg;  // running totals handed down in ordered mode
    bool duplicate = false;
    std::shared_ptr<Inbox> parent_inbox;
    std::shared_ptr<Waiter> waiter;
};

struct Aborted {};

class Runner {
public:
    Runner(const EventNetwork& net, const DistributedOptions& o, SyncMode mode)
        : net_(net),
          o_(o),
          mode_(mode),
          k_(net.targets().size()),
          lower_(new std::atomic<double>[k_]),
          neg_(new std::atomic<double>[k_]),
          rng_(o.seed) {
        for (size_t i = 0; i < k_; ++i) {
            lower_[i].store(0.0);
            neg_[i].store(0.0);
        }
        stats_.pruned_mass.assign(k_, 0.0);
    }

    DistributedResult run() {
        Job root;
        root.id = next_id_++;
        root.budget = initial_budget(net_, o_.scheme, o_.epsilon);
        enqueue(std::move(root));
        std::vector<std::thread> threads;
        for (int w = 1; w < o_.workers; ++w) threads.emplace_back([this] { worker(); });
        worker();
        for (auto& t : threads) t.join();
        if (error_) std::rethrow_exception(error_);

        DistributedResult r;
        std::vector<double> l(k_), n(k_);
        for (size_t i = 0; i < k_; ++i) {
            l[i] = lower_[i].load();
            n[i] = neg_[i].load();
        }
        r.result.targets = mode_ == SyncMode::Ordered ? make_bounds(net_, final_lower_, final_neg_)
                                                      : make_bounds(net_, l, n);
        r.result.stats = stats_;
        r.result.stats.jobs = claimed_.size();
        r.result.visits = std::move(visits_);
        r.sync = mode_;
        r.lost_deliveries = lost_;
        r.duplicate_deliveries = duplicates_;
        r.log = std::move(log_);
        return r;
    }

private:
    void enqueue(Job j) {
        {
            std::lock_guard<std::mutex> lk(qmu_);
            queue_.push_back(std::move(j));
            ++outstanding_;
        }
        qcv_.notify_all();
    }

    // Pops the next delivered job; a lost delivery goes back to the queue.
    bool take(std::unique_lock<std::mutex>&, Job& out) {
        while (!queue_.empty()) {
            Job j = std::move(queue_.front());
            queue_.pop_front();
            if (o_.fault_rate > 0 && fault_(rng_) < o_.fault_rate) {
                ++lost_;
                queue_.push_back(std::move(j));
                continue;
            }
            out = std::move(j);
            return true;
        }
        return false;
    }

    void worker() {
        try {
            std::unique_lock<std::mutex> lk(qmu_);
            for (;;) {
                if (stop_) return;
                Job j;
                if (take(lk, j)) {
                    lk.unlock();
                    process(std::move(j));
                    lk.lock();
                    continue;
                }
                if (outstanding_ == 0) return;
                qcv_.wait(lk);
            }
        } catch (const Aborted&) {
        } catch (...) {
            fail(std::current_exception());
        }
    }

    void fail(std::exception_ptr e) {
        {
            std::lock_guard<std::mutex> lk(qmu_);
            if (!error_) error_ = e;
            stop_ = true;
        }
        qcv_.notify_all();
    }

    // Runs queued jobs until the waiter's job has finished.
    void wait_for(const std::shared_ptr<Waiter>& w) {
        std::unique_lock<std::mutex> lk(qmu_);
        while (!w->done) {
            if (stop_) throw Aborted{};
            Job j;
            if (take(lk, j)) {
                lk.unlock();
                process(std::move(j));
                lk.lock();
                continue;
            }
            qcv_.wait(lk);
        }
    }

    void process(Job j) {
        bool fresh;
        {
            std::lock_guard<std::mutex> lk(cmu_);
            fresh = claimed_.insert(j.id).second;
            if (!fresh) ++duplicates_;
        }
        if (fresh) {
            const bool redeliver = !j.duplicate && o_.fault_rate > 0 && [&] {
                std::lock_guard<std::mutex> lk(qmu_);
                return fault_(rng_) < o_.fault_rate;
            }();
            Job copy;
            if (redeliver) {
                copy.id = j.id;
                copy.parent = j.parent;
                copy.prefix = j.prefix;
                copy.p = j.p;
                copy.start_lower = j.start_lower;
                copy.start_neg = j.start_neg;
                copy.duplicate = true;
            }
            execute(j);
            if (redeliver) enqueue(std::move(copy));
        }
        {
            std::lock_guard<std::mutex> lk(qmu_);
            --outstanding_;
        }
        qcv_.notify_all();
    }

    void execute(Job& j) {
        // Ordered jobs run one at a time along a chain and carry the running
        // totals, so bounds accumulate in exactly the sequential order.
        const bool ordered = mode_ == SyncMode::Ordered;
        BranchSearch s(net_, o_.scheme, o_.epsilon);
        if (ordered) {
            if (!j.start_lower.empty()) s.seed_bounds(j.start_lower, j.start_neg);
        } else {
            s.set_shared(lower_.get(), neg_.get());
        }
        s.record_visits(o_.record_visits);
        std::vector<double> snap_l = s.lower(), snap_n = s.neg();
        int segment = 0;
        auto commit = [&] {
            std::vector<double> l, n;
            if (ordered) {
                l = s.lower();
                n = s.neg();
                for (size_t i = 0; i < k_; ++i) {
                    l[i] -= snap_l[i];
                    n[i] -= snap_n[i];
                }
                snap_l = s.lower();
                snap_n = s.neg();
            } else {
                s.take_bounds(l, n);
            }
            std::vector<std::int32_t> v = s.take_visits();
            std::lock_guard<std::mutex> lk(cmu_);
            for (size_t i = 0; i < k_; ++i) {
                lower_[i].store(lower_[i].load(std::memory_order_relaxed) + l[i], std::memory_order_relaxed);
                neg_[i].store(neg_[i].load(std::memory_order_relaxed) + n[i], std::memory_order_relaxed);
            }
            visits_.insert(visits_.end(), v.begin(), v.end());
            if (o_.record_log) log_.push_back({j.id, j.parent, segment, j.prefix, std::move(l), std::move(n)});
            ++segment;
        };

        std::shared_ptr<Inbox> inbox;
        const bool speculative = mode_ == SyncMode::Speculative && o_.scheme != Scheme::Exact;
        if (speculative) {
            inbox = std::make_shared<Inbox>();
            inbox->acc.assign(k_, 0.0);
            inbox->up = j.parent_inbox;
            s.set_drain([&inbox](std::vector<double>& b) {
                std::lock_guard<std::mutex> lk(inbox->mu);
                for (size_t i = 0; i < b.size(); ++i) {
                    b[i] += inbox->acc[i];
                    inbox->acc[i] = 0.0;
                }
            });
        }

        s.set_fork(o_.job_depth, [&](const Prefix& prefix, double p, std::vector<double>& share) {
            commit();
            Job child;
            child.id = next_id_++;
            child.parent = j.id;
            child.prefix = prefix;
            child.p = p;
            child.budget = share;
            if (ordered) {
                auto w = std::make_shared<Waiter>();
                child.waiter = w;
                child.start_lower = s.lower();
                child.start_neg = s.neg();
                enqueue(std::move(child));
                wait_for(w);
                share = w->residual;
                s.seed_bounds(w->lower, w->neg);
                snap_l = w->lower;
                snap_n = w->neg;
            } else {
                child.parent_inbox = inbox ? inbox : j.parent_inbox;
                enqueue(std::move(child));
                std::fill(share.begin(), share.end(), 0.0);
            }
        });

        std::vector<double> budget = j.budget;
        if (j.parent == 0) s.run_root(budget);
        else s.run_prefix(j.prefix, j.p, budget);
        commit();
        if (ordered && j.parent == 0) {
            final_lower_ = s.lower();
            final_neg_ = s.neg();
        }
        {
            std::lock_guard<std::mutex> lk(cmu_);
            int converged = stats_.converged_at;
            stats_.merge(s.stats());
            stats_.converged_at = j.parent == 0 ? s.stats().converged_at : converged;
        }

        if (inbox) {
            std::lock_guard<std::mutex> lk(inbox->mu);
            inbox->closed = true;
            for (size_t i = 0; i < k_; ++i) budget[i] += inbox->acc[i];
        }
        if (j.waiter) {
            {
                std::lock_guard<std::mutex> lk(qmu_);
                j.waiter->residual = std::move(budget);
                j.waiter->lower = s.lower();
                j.waiter->neg = s.neg();
                j.waiter->done = true;
            }
            qcv_.notify_all();
        } else if (o_.scheme != Scheme::Exact) {
            post(j.parent_inbox, budget);
        }
    }

    const EventNetwork& net_;
    DistributedOptions o_;
    SyncMode mode_;
    size_t k_;
    std::unique_ptr<std::atomic<double>[]> lower_, neg_;

    std::mutex qmu_;
    std::condition_variable qcv_;
    std::deque<Job> queue_;
    std::uint64_t outstanding_ = 0;
    bool stop_ = false;
    std::exception_ptr error_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> fault_{0.0, 1.0};
    std::uint64_t lost_ = 0;
    std::atomic<std::uint64_t> next_id_{1};

    std::mutex cmu_;
    std::set<std::uint64_t> claimed_;
    std::uint64_t duplicates_ = 0;
    CompileStats stats_;
    std::vector<std::int32_t> visits_;
    std::vector<CommitRecord> log_;
    std::vector<double> final_lower_, final_neg_;
};

}  // namespace

DistributedResult run_distributed(const EventNetwork& net, const DistributedOptions& opts) {
    validate_options(net, opts.scheme, opts.epsilon);
    if (opts.workers < 1) throw ConfigError("workers must be >= 1");
    if (opts.job_depth < 1) throw ConfigError("job depth must be >= 1");
    if (!(opts.fault_rate >= 0 && opts.fault_rate < 1)) throw ConfigError("fault rate must lie in [0, 1)");
    SyncMode mode = opts.sync;
    if (mode == SyncMode::Auto) mode = opts.workers == 1 ? SyncMode::Ordered : SyncMode::Speculative;
    Runner r(net, opts, mode);
    return r.run();
}

}  // namespace pwe
