// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "pwe/compiler.hpp"
#include "pwe/datagen.hpp"
#include "pwe/distributed.hpp"
#include "pwe/eval.hpp"
#include "pwe/event_text.hpp"
#include "pwe/grounder.hpp"
#include "pwe/network.hpp"
#include "pwe/oracle.hpp"
#include "pwe/random_programs.hpp"
#include "pwe/translator.hpp"
#include "user_interp.hpp"

using namespace pwe;

namespace {

constexpr double kExactTol = 1e-9;     // exact vs oracle, distributed vs sequential, folded vs unfolded
constexpr double kCoOccurTol = 1e-12;  // world sum vs compiled co-occurrence
constexpr double kNearExact = 0.05;    // eager/lazy branch counts relative to exact
constexpr int kRandomPrograms = 200;
constexpr int kMaxVars = 16;
const std::vector<double> kEpsilons = {0.01, 0.1, 0.3};

std::string slurp(const std::string& name) {
    std::ifstream f(std::string(PWE_DATA_DIR) + "/" + name);
    if (!f) throw std::runtime_error("missing data file " + name);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

CompileResult compile(const EventNetwork& net, Scheme s, double eps) {
    CompileOptions o;
    o.scheme = s;
    o.epsilon = eps;
    return compile_targets(net, o);
}

DistributedOptions dist(Scheme s, double eps, int workers, int depth) {
    DistributedOptions o;
    o.scheme = s;
    o.epsilon = eps;
    o.workers = workers;
    o.job_depth = depth;
    o.record_visits = true;
    return o;
}

bool contains(const TargetBounds& b, double p, double eps) {
    return p >= b.lower - kExactTol && p <= b.upper + kExactTol && b.upper - b.lower <= 2 * eps + kExactTol;
}

struct Instance {
    GroundedProgram g;
    OracleResult oracle;
    EventNetwork net;
};

std::vector<Instance>& random_instances() {
    static std::vector<Instance> all;
    if (all.empty())
        for (int i = 0; i < kRandomPrograms; ++i) {
            RandomProgram rp = random_event_program(1000 + i, 4 + i % (kMaxVars - 3), 12);
            GroundedProgram g = ground(rp.program, rp.targets, rp.vars);
            OracleResult o = oracle_probabilities(g);
            EventNetwork net = EventNetwork::build(g);
            all.push_back({std::move(g), std::move(o), std::move(net)});
        }
    return all;
}

// Generated k-medoids instance compiled for the final medoid-selection events.
EventNetwork clustering_instance(const GenOptions& g, const std::string& program = "kmedoids.pwl") {
    Dataset d = gen_correlations(g);
    Translation t = translate_to_event_program(ul::parse_user_program(slurp(program)), d);
    GroundedProgram gp = ground(t.program, {t.final_glob("Centre")}, d.vars);
    return EventNetwork::build(gp, true);
}

GenOptions trend_options(Correlation c, std::uint64_t seed) {
    GenOptions g;
    g.scheme = c;
    g.n = 20;
    g.group = 4;
    g.literals = 2;
    g.iter = 3;
    g.seed = seed;
    return g;
}

std::string join(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (auto x : v) s += (s.empty() ? "" : "/") + std::to_string(x);
    return s;
}

Outcome oracle_equivalence() {
    Outcome r;
    std::uint64_t targets = 0;
    double worst = 0;
    for (auto& in : random_instances()) {
        CompileResult ex = compile(in.net, Scheme::Exact, 0);
        for (size_t k = 0; k < in.oracle.probability.size(); ++k) {
            ++targets;
            worst = std::max({worst, std::fabs(ex.targets[k].lower - in.oracle.probability[k]),
                              std::fabs(ex.targets[k].upper - in.oracle.probability[k])});
        }
    }
    r.pass = worst <= kExactTol;
    r.detail = std::to_string(kRandomPrograms) + " programs, " + std::to_string(targets) +
               " targets, max error " + format_number(worst);
    return r;
}

std::set<std::set<int>> as_sets(const std::vector<std::vector<int>>& c) {
    std::set<std::set<int>> out;
    for (auto& v : c)
        if (!v.empty()) out.insert(std::set<int>(v.begin(), v.end()));
    return out;
}

Outcome line_example() {
    Outcome r;
    Dataset d = load_dataset(std::string(PWE_DATA_DIR) + "/line4.json");
    Translation t = translate_to_event_program(ul::parse_user_program(slurp("kmedoids.pwl")), d);
    const std::string incl = t.final_glob("InCl");
    GroundedProgram g = ground(t.program, {incl}, d.vars);

    const bool first = as_sets(clusters_from(per_world_report(g, {1, 0, 1, 1}), incl)) ==
                       std::set<std::set<int>>{{0}, {2, 3}};
    const bool second = as_sets(clusters_from(per_world_report(g, {1, 1, 1, 0}), incl)) ==
                        std::set<std::set<int>>{{0, 1}, {2}};

    double world_sum = 0;
    for (std::uint64_t i = 0; i < 16; ++i) {
        WorldReport w = per_world_report(g, gray_world(i, 4));
        for (auto& c : clusters_from(w, incl))
            if (std::count(c.begin(), c.end(), 1) && std::count(c.begin(), c.end(), 2)) world_sum += w.probability;
    }
    Translation tp = translate_to_event_program(ul::parse_user_program(slurp("kmedoids_pairs.pwl")), d);
    const std::string pair = tp.final_eid("Together", {1, 2});
    GroundedProgram gp = ground(tp.program, {pair}, d.vars);
    const double oracle = oracle_probabilities(gp).probability.at(0);
    CompileResult ex = compile(EventNetwork::build(gp, true), Scheme::Exact, 0);
    const bool cooccur = std::fabs(world_sum - oracle) <= kCoOccurTol &&
                         std::fabs(ex.targets[0].lower - oracle) <= kCoOccurTol &&
                         std::fabs(ex.targets[0].upper - oracle) <= kCoOccurTol;
    r.pass = first && second && cooccur;
    r.detail = std::string("clusterings ") + (first && second ? "match" : "differ") + ", P(o1,o2 together) world sum " +
               format_number(world_sum) + " oracle " + format_number(oracle) + " exact " +
               format_number(ex.targets[0].lower);
    return r;
}

Outcome epsilon_validity() {
    Outcome r;
    std::uint64_t checks = 0, violations = 0;
    for (auto& in : random_instances())
        for (Scheme s : {Scheme::Eager, Scheme::Lazy, Scheme::Hybrid})
            for (double eps : kEpsilons) {
                CompileResult a = compile(in.net, s, eps);
                for (size_t k = 0; k < in.oracle.probability.size(); ++k) {
                    ++checks;
                    if (!contains(a.targets[k], in.oracle.probability[k], eps)) ++violations;
                }
            }
    r.pass = violations == 0;
    r.detail = std::to_string(checks) + " bounds, " + std::to_string(violations) + " violations";
    return r;
}

Outcome pruning_trends() {
    Outcome r;
    bool below_exact = true, near_exact = true, monotone = true;
    std::ostringstream out;
    for (Correlation c : {Correlation::Positive, Correlation::Mutex, Correlation::Markov}) {
        std::vector<std::uint64_t> exact, hybrid, lazy, eager;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            EventNetwork net = clustering_instance(trend_options(c, seed));
            const std::uint64_t e = compile(net, Scheme::Exact, 0).stats.branches;
            const std::uint64_t h = compile(net, Scheme::Hybrid, 0.1).stats.branches;
            const std::uint64_t l = compile(net, Scheme::Lazy, 0.1).stats.branches;
            const std::uint64_t g = compile(net, Scheme::Eager, 0.1).stats.branches;
            exact.push_back(e);
            hybrid.push_back(h);
            lazy.push_back(l);
            eager.push_back(g);
            if (c == Correlation::Positive) {
                if (!(h < e) || !(l < e)) below_exact = false;
            } else {
                auto near = [&](std::uint64_t x) {
                    return std::fabs(double(x) - double(e)) <= kNearExact * double(e);
                };
                if (!near(l) || !near(g)) near_exact = false;
            }
            std::uint64_t prev = ~std::uint64_t{0};
            for (double eps : kEpsilons) {
                const std::uint64_t b = compile(net, Scheme::Hybrid, eps).stats.branches;
                if (b > prev) monotone = false;
                prev = b;
            }
        }
        out << correlation_name(c) << " exact " << join(exact) << " hybrid " << join(hybrid) << " lazy "
            << join(lazy) << " eager " << join(eager) << "; ";
    }
    auto clause = [](bool ok) { return ok ? "holds" : "fails"; };
    r.pass = below_exact && near_exact && monotone;
    r.detail = out.str() + "branches per seed 1/2/3; positive below exact " + clause(below_exact) +
               ", mutex/markov within 5% " + clause(near_exact) + ", hybrid nonincreasing in epsilon " +
               clause(monotone);
    return r;
}

Outcome naive_scaling() {
    Outcome r;
    std::ostringstream out;
    for (int m : {12, 16, 20}) {
        GenOptions g;
        g.scheme = Correlation::Mutex;
        g.n = 4 * m;
        g.group = 4;
        g.iter = 3;
        g.seed = 1;
        EventNetwork net = clustering_instance(g);
        CompileResult ex = compile(net, Scheme::Exact, 0);
        const std::uint64_t naive = std::uint64_t{1} << net.vars().size();
        if (net.vars().size() != m || ex.stats.branches > naive) r.pass = false;
        if (m == 20 && ex.stats.propagations >= naive) r.pass = false;
        out << "m=" << net.vars().size() << " branches " << ex.stats.branches << " propagations "
            << ex.stats.propagations << " naive " << naive << "; ";
    }
    r.detail = out.str() + "mutex instances";
    return r;
}

Outcome distribution() {
    Outcome r;
    std::uint64_t runs = 0, failures = 0;
    auto fail = [&](bool ok) {
        ++runs;
        if (!ok) ++failures;
    };
    auto& all = random_instances();
    for (size_t i = 0; i < all.size(); i += 5) {
        const EventNetwork& net = all[i].net;
        const int m = net.vars().size();
        CompileResult ex = compile(net, Scheme::Exact, 0);
        for (int w : {2, 4, 8})
            for (int d : {1, 2, 3}) {
                DistributedResult b = run_distributed(net, dist(Scheme::Exact, 0, w, d));
                bool ok = b.result.stats.jobs <= max_job_count(m, d);
                for (size_t k = 0; k < ex.targets.size(); ++k)
                    ok = ok && std::fabs(b.result.targets[k].lower - ex.targets[k].lower) <= kExactTol &&
                         std::fabs(b.result.targets[k].upper - ex.targets[k].upper) <= kExactTol;
                fail(ok);
            }
        for (double eps : kEpsilons) {
            for (int d : {1, 2, 3}) {
                DistributedResult b = run_distributed(net, dist(Scheme::Hybrid, eps, 4, d));
                bool ok = b.result.stats.jobs <= max_job_count(m, d);
                for (size_t k = 0; k < ex.targets.size(); ++k)
                    ok = ok && contains(b.result.targets[k], all[i].oracle.probability[k], eps);
                fail(ok);
            }
            CompileResult seq = [&] {
                CompileOptions o;
                o.scheme = Scheme::Hybrid;
                o.epsilon = eps;
                o.record_visits = true;
                return compile_targets(net, o);
            }();
            for (int d : {1, 2, 3}) {
                DistributedResult one = run_distributed(net, dist(Scheme::Hybrid, eps, 1, d));
                fail(one.result.visits == seq.visits && one.result.stats.branches == seq.stats.branches &&
                     one.result.stats.jobs <= max_job_count(m, d));
            }
        }
    }

    // One instance past the enumeration limit, checked against sequential exact.
    RandomProgram rp = random_event_program(1, 30, 20);
    EventNetwork big = EventNetwork::build(ground(rp.program, rp.targets, rp.vars));
    CompileResult ex = compile(big, Scheme::Exact, 0);
    DistributedResult bd = run_distributed(big, dist(Scheme::Exact, 0, 16, 3));
    bool ok = bd.result.stats.jobs <= max_job_count(big.vars().size(), 3);
    for (size_t k = 0; k < ex.targets.size(); ++k)
        ok = ok && std::fabs(bd.result.targets[k].lower - ex.targets[k].lower) <= kExactTol &&
             std::fabs(bd.result.targets[k].upper - ex.targets[k].upper) <= kExactTol;
    fail(ok);
    DistributedResult bh = run_distributed(big, dist(Scheme::Hybrid, 0.1, 16, 3));
    ok = bh.result.stats.jobs <= max_job_count(big.vars().size(), 3);
    for (size_t k = 0; k < ex.targets.size(); ++k)
        ok = ok && contains(bh.result.targets[k], ex.targets[k].lower, 0.1);
    fail(ok);

    r.pass = failures == 0;
    r.detail = std::to_string(runs) + " runs, " + std::to_string(failures) + " failures, " +
               std::to_string(big.vars().size()) + "-variable instance: " + std::to_string(bd.result.stats.jobs) +
               " exact jobs, " + std::to_string(bh.result.stats.jobs) + " hybrid jobs";
    return r;
}

Outcome folding() {
    Outcome r;
    Dataset d = load_dataset(std::string(PWE_DATA_DIR) + "/line4.json");
    const ul::UserProgram up = ul::parse_user_program(slurp("kmedoids_fig1.pwl"));
    std::set<std::size_t> folded_sizes;
    std::vector<std::size_t> unfolded_sizes;
    double worst = 0;
    for (int iter : {1, 2, 3}) {
        d.params["iter"] = iter;
        Translation t = translate_to_event_program(up, d);
        GroundedProgram g = ground(t.program, {t.final_glob("InCl")}, d.vars);
        EventNetwork f = EventNetwork::build(g, true);
        EventNetwork u = EventNetwork::build(g, false);
        folded_sizes.insert(f.nodes().size());
        unfolded_sizes.push_back(u.nodes().size());
        CompileResult a = compile(f, Scheme::Exact, 0), b = compile(u, Scheme::Exact, 0);
        if (a.targets.size() != b.targets.size() || a.targets.empty()) r.pass = false;
        for (size_t k = 0; k < std::min(a.targets.size(), b.targets.size()); ++k)
            worst = std::max({worst, std::fabs(a.targets[k].lower - b.targets[k].lower),
                              std::fabs(a.targets[k].upper - b.targets[k].upper)});
    }
    r.pass = r.pass && worst <= kExactTol && folded_sizes.size() == 1;
    r.detail = "max difference " + format_number(worst) + ", folded nodes " + std::to_string(*folded_sizes.begin()) +
               (folded_sizes.size() == 1 ? " at every iter" : " varying") + ", unfolded nodes " +
               std::to_string(unfolded_sizes[0]) + "/" + std::to_string(unfolded_sizes[1]) + "/" +
               std::to_string(unfolded_sizes[2]);
    return r;
}

Outcome certain_fraction() {
    Outcome r;
    std::ostringstream out;
    int broken = 0, series = 0;
    for (Correlation c : {Correlation::Positive, Correlation::Mutex, Correlation::Markov})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            std::vector<std::uint64_t> counts;
            for (double f : {0.0, 0.25, 0.5, 0.75}) {
                GenOptions g = trend_options(c, seed);
                g.certain = f;
                counts.push_back(compile(clustering_instance(g), Scheme::Hybrid, 0.1).stats.branches);
            }
            ++series;
            if (!std::is_sorted(counts.rbegin(), counts.rend())) ++broken;
            out << correlation_name(c) << "/" << seed << " " << join(counts) << "; ";
        }
    r.pass = broken == 0;
    r.detail = out.str() + std::to_string(broken) + " of " + std::to_string(series) + " series increase somewhere";
    return r;
}

Outcome translation_fidelity() {
    Outcome r;
    Dataset none;
    const ul::UserProgram up = ul::parse_user_program(slurp("nested_labels.pwl"));
    Translation t = translate_to_event_program(up, none);
    const std::string table =
        "M_0 := 7\n"
        "M_1 := M_0 + 2\n"
        "M_{1.-1} := M_1\n"
        "forall i in 0..1:\n"
        "  M_{1.(2*i)} := M_{1.(2*i-1)} + i\n"
        "  M_{1.(2*i).-1} := M_{1.(2*i)}\n"
        "  forall j in 0..2:\n"
        "    M_{1.(2*i).j} := M_{1.(2*i).(j-1)} + 1\n"
        "  M_{1.(2*i+1)} := M_{1.(2*i).2}\n"
        "M_2 := M_{1.3}\n"
        "M_3 := M_2 + 1\n";
    const bool structure = print_event_program(t.program) == table;
    const std::string final_eid = t.final_eid("M");
    GroundedProgram g = ground(t.program, {final_eid}, none.vars);
    Value v = eval_value(ex::grounded_ref(final_eid), {}, env_of(g), g.vars);
    testing::IEnv ienv = testing::interpret(up, none, {});
    const double interpreted = ienv.at("M").x.at(0);
    r.pass = structure && v.defined && v.v.at(0) == interpreted;
    r.detail = std::string("declarations ") + (structure ? "match" : "differ") + ", " + final_eid + " = " +
               (v.defined ? format_number(v.v.at(0)) : "undefined") + ", interpreter " + format_number(interpreted);
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", oracle_equivalence},
        {"four-point line reproduction", line_example},
        {"epsilon validity", epsilon_validity},
        {"pruning trends", pruning_trends},
        {"naive vs exact scaling", naive_scaling},
        {"distribution correctness", distribution},
        {"folded equals unfolded", folding},
        {"certain-fraction trend", certain_fraction},
        {"translation fidelity", translation_fidelity},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << ": " << o.detail
                  << " (" << format_number(std::round(s * 10) / 10) << " s)" << std::endl;
    }
    std::cout << criteria.size() - failed << "/" << criteria.size() << " criteria pass" << std::endl;
    return failed ? 1 : 0;
}
