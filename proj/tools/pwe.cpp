#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pwe/compiler.hpp"
#include "pwe/datagen.hpp"
#include "pwe/distributed.hpp"
#include "pwe/error.hpp"
#include "pwe/event_text.hpp"
#include "pwe/grounder.hpp"
#include "pwe/network.hpp"
#include "pwe/oracle.hpp"
#include "pwe/random_programs.hpp"
#include "pwe/translator.hpp"

using namespace pwe;
using json = nlohmann::json;

namespace {

// Error raised by one pipeline stage, reported as `stage: message`.
struct StageFailure : std::runtime_error {
    StageFailure(const std::string& stage, const std::string& msg) : std::runtime_error(stage + ": " + msg) {}
};

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageFailure&) {
        throw;
    } catch (const std::exception& e) {
        throw StageFailure(name, e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

// Splits on commas outside brackets, so `A[0,1]_0,B` gives two items.
std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '[' || c == '{') ++depth;
        if (c == ']' || c == '}') --depth;
        if (c == ',' && depth == 0) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

template <class T>
std::vector<T> parse_numbers(const std::string& s) {
    std::vector<T> out;
    for (auto& item : split_list(s)) {
        try {
            if constexpr (std::is_integral_v<T>) out.push_back(static_cast<T>(std::stoll(item)));
            else out.push_back(static_cast<T>(std::stod(item)));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "'");
        }
    }
    return out;
}

struct RunConfig {
    std::string program, event_program, network, data;
    std::string mode = "exact";
    std::optional<double> epsilon;
    int workers = 1;
    int job_depth = 3;
    bool folded = false;
    std::string targets;
    std::uint64_t seed = 1;
    std::string emit_stage;
    std::string out;
    std::string sync = "auto";
    bool timing = false;
    bool json_stdout = false;
    std::string worlds;
    std::string commit_log;
    double fault_rate = 0;
};

struct Mode {
    bool naive = false;
    bool distributed = false;
    Scheme scheme = Scheme::Exact;
};

Mode parse_mode(const std::string& m) {
    Mode r;
    if (m == "naive") r.naive = true;
    else if (m == "hybrid-d") r = {false, true, Scheme::Hybrid};
    else if (m == "exact-d") r = {false, true, Scheme::Exact};
    else r.scheme = parse_scheme(m);
    return r;
}

// Everything the pipeline produced up to the stage that was asked for.
struct Pipeline {
    std::optional<Dataset> data;
    std::optional<ul::UserProgram> ast;
    std::optional<Translation> translation;
    std::shared_ptr<EventProgram> program;
    std::optional<GroundedProgram> grounded;
    std::optional<EventNetwork> net;
    json timing = json::object();
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::vector<std::string> resolve_targets(const RunConfig& cfg, const Pipeline& p) {
    std::string list = cfg.targets;
    if (list.empty()) {
        if (p.translation && p.translation->finals.count("InCl")) list = "InCl";
        else throw ConfigError("no --targets given");
    }
    std::vector<std::string> out;
    for (auto& item : split_list(list)) {
        if (p.translation && p.translation->finals.count(item)) out.push_back(p.translation->final_glob(item));
        else out.push_back(item);
    }
    return out;
}

Pipeline load(const RunConfig& cfg, const std::string& upto) {
    Pipeline p;
    const int sources = !cfg.program.empty() + !cfg.event_program.empty() + !cfg.network.empty();
    if (sources != 1) throw ConfigError("give exactly one of --program, --event-program, --network");
    auto t0 = Clock::now();
    if (!cfg.network.empty()) {
        if (upto != "network" && upto != "compile") throw ConfigError("a network input only supports compilation");
        p.net = stage("network", [&] { return EventNetwork::parse_dump(read_file(cfg.network)); });
        p.timing["load_ms"] = ms_since(t0);
        return p;
    }
    if (cfg.data.empty()) throw ConfigError("--data is required with a program input");
    p.data = stage("data", [&] { return load_dataset(cfg.data); });
    if (!cfg.program.empty()) {
        std::string text = stage("parse", [&] { return read_file(cfg.program); });
        p.ast = stage("parse", [&] {
            try {
                return ul::parse_user_program(text);
            } catch (const SyntaxError& e) {
                throw std::runtime_error(cfg.program + ":" + std::to_string(e.line) + ":" +
                                         std::to_string(e.col) + ": " + e.message);
            }
        });
        auto diags = ul::validate_user_program(*p.ast);
        if (!diags.empty()) {
            std::string msg;
            for (auto& d : diags) msg += (msg.empty() ? "" : "\n") + ul::format_diagnostic(cfg.program, d);
            throw StageFailure("validate", msg);
        }
        p.timing["parse_ms"] = ms_since(t0);
        if (upto == "ast") return p;
        t0 = Clock::now();
        p.translation = stage("translate", [&] { return translate_to_event_program(*p.ast, *p.data); });
        p.program = std::make_shared<EventProgram>(p.translation->program);
        p.timing["translate_ms"] = ms_since(t0);
    } else {
        if (upto == "ast") throw ConfigError("the ast stage needs --program");
        p.program = std::make_shared<EventProgram>(
            stage("parse", [&] { return parse_event_program(read_file(cfg.event_program)); }));
    }
    if (upto == "event-program") return p;
    t0 = Clock::now();
    std::vector<std::string> targets = resolve_targets(cfg, p);
    p.grounded = stage("ground", [&] { return ground(p.program, targets, p.data->vars); });
    p.timing["ground_ms"] = ms_since(t0);
    if (upto == "grounded" || upto == "naive") return p;
    t0 = Clock::now();
    p.net = stage("network", [&] { return EventNetwork::build(*p.grounded, cfg.folded); });
    p.timing["network_ms"] = ms_since(t0);
    return p;
}

json stats_json(const CompileStats& s) {
    json j = {{"branches", s.branches},   {"leaves", s.leaves},         {"pruned", s.pruned},
              {"propagations", s.propagations}, {"node_updates", s.node_updates}, {"jobs", s.jobs}};
    if (s.converged_at >= 0) j["converged_at"] = s.converged_at;
    return j;
}

std::string pad(const std::string& s, size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string human_table(const json& report) {
    size_t w = 6;
    for (auto& t : report["targets"]) w = std::max(w, t["eid"].get<std::string>().size());
    std::string out = pad("target", w) + "  " + pad("lower", 24) + "  upper\n";
    for (auto& t : report["targets"])
        out += pad(t["eid"].get<std::string>(), w) + "  " + pad(format_number(t["lower"].get<double>()), 24) + "  " +
               format_number(t["upper"].get<double>()) + "\n";
    std::string line;
    for (auto& [k, v] : report["stats"].items()) line += (line.empty() ? "" : " ") + k + "=" + v.dump();
    return out + line + "\n";
}

int cmd_run(const RunConfig& cfg) {
    const Mode mode = parse_mode(cfg.mode);
    if (cfg.workers < 1) throw ConfigError("--workers must be >= 1");
    if (cfg.workers > 1 && !mode.distributed) throw ConfigError("--workers > 1 needs mode hybrid-d or exact-d");
    double eps = 0;
    if (mode.naive || mode.scheme == Scheme::Exact) {
        if (cfg.epsilon && *cfg.epsilon != 0) throw ConfigError("--epsilon > 0 needs an approximation mode");
    } else {
        eps = cfg.epsilon.value_or(0.1);
    }

    if (!cfg.emit_stage.empty()) {
        Pipeline p = load(cfg, cfg.emit_stage);
        std::string text;
        if (cfg.emit_stage == "ast") text = ul::print_user_program(*p.ast);
        else if (cfg.emit_stage == "event-program") text = print_event_program(*p.program);
        else if (cfg.emit_stage == "grounded") text = print_grounded(*p.grounded);
        else if (cfg.emit_stage == "network") text = p.net->dump();
        else throw ConfigError("unknown stage '" + cfg.emit_stage + "'");
        write_output(cfg.out, text);
        return 0;
    }

    Pipeline p = load(cfg, mode.naive ? "naive" : "compile");
    json report;
    report["mode"] = cfg.mode;
    report["epsilon"] = eps;
    report["targets"] = json::array();
    auto t0 = Clock::now();
    if (mode.naive) {
        OracleResult o = stage("oracle", [&] { return oracle_probabilities(*p.grounded); });
        for (size_t k = 0; k < o.eids.size(); ++k)
            report["targets"].push_back({{"eid", o.eids[k]}, {"lower", o.probability[k]}, {"upper", o.probability[k]}});
        report["stats"] = {{"evaluations", o.evaluations}, {"variables", p.grounded->vars.size()}};
        if (!cfg.worlds.empty()) {
            std::string lines;
            const int m = p.grounded->vars.size();
            for (std::uint64_t i = 0; i < (std::uint64_t{1} << m); ++i) {
                WorldReport w = per_world_report(*p.grounded, gray_world(i, m));
                json row;
                std::string bits;
                for (auto b : w.world) bits += b ? '1' : '0';
                row["world"] = bits;
                row["probability"] = w.probability;
                for (auto& [eid, v] : w.values) {
                    if (v.type.kind == Type::Bool && v.truth) row["true"].push_back(eid);
                }
                lines += row.dump() + "\n";
            }
            write_output(cfg.worlds, lines);
        }
    } else if (mode.distributed) {
        DistributedOptions o;
        o.scheme = mode.scheme;
        o.epsilon = eps;
        o.workers = cfg.workers;
        o.job_depth = cfg.job_depth;
        o.sync = parse_sync_mode(cfg.sync);
        o.seed = cfg.seed;
        o.fault_rate = cfg.fault_rate;
        o.record_log = !cfg.commit_log.empty();
        DistributedResult r = stage("compile", [&] { return run_distributed(*p.net, o); });
        for (auto& t : r.result.targets)
            report["targets"].push_back({{"eid", t.eid}, {"lower", t.lower}, {"upper", t.upper}});
        report["stats"] = stats_json(r.result.stats);
        report["stats"]["max_jobs"] = max_job_count(std::max(1, p.net->vars().size()), cfg.job_depth);
        report["workers"] = cfg.workers;
        report["job_depth"] = cfg.job_depth;
        report["sync"] = sync_mode_name(r.sync);
        if (!cfg.commit_log.empty()) write_output(cfg.commit_log, format_commit_log(r.log));
    } else {
        CompileOptions o;
        o.scheme = mode.scheme;
        o.epsilon = eps;
        CompileResult r = stage("compile", [&] { return compile_targets(*p.net, o); });
        for (auto& t : r.targets) report["targets"].push_back({{"eid", t.eid}, {"lower", t.lower}, {"upper", t.upper}});
        report["stats"] = stats_json(r.stats);
    }
    if (p.net) {
        report["stats"]["variables"] = p.net->vars().size();
        report["stats"]["nodes"] = p.net->nodes().size();
    }
    if (cfg.timing) {
        p.timing["compute_ms"] = ms_since(t0);
        report["timing"] = p.timing;
    }
    if (cfg.json_stdout) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << human_table(report);
        if (cfg.timing)
            for (auto& [k, v] : report["timing"].items()) std::cout << k << "=" << format_number(v.get<double>()) << "\n";
    }
    if (!cfg.out.empty()) write_output(cfg.out, report.dump(2) + "\n");
    return 0;
}

int cmd_gen(const GenOptions& o, const std::string& scheme, const std::string& out) {
    GenOptions g = o;
    g.scheme = parse_correlation(scheme);
    Dataset d = stage("gen", [&] { return gen_correlations(g); });
    write_output(out, dataset_to_json(d).dump(2) + "\n");
    return 0;
}

struct CheckConfig {
    int count = 200;
    int max_vars = 16;
    int decls = 10;
    std::uint64_t seed = 1;
    std::string epsilons = "0.01,0.1,0.3";
    RunConfig instance;
};

int cmd_check(const CheckConfig& c) {
    const std::vector<double> eps = parse_numbers<double>(c.epsilons);
    std::uint64_t mismatches = 0, violations = 0, targets = 0;
    auto check_one = [&](const GroundedProgram& g, const std::string& label) {
        OracleResult o = oracle_probabilities(g);
        EventNetwork net = EventNetwork::build(g);
        CompileOptions ex;
        CompileResult r = compile_targets(net, ex);
        for (size_t k = 0; k < o.probability.size(); ++k) {
            ++targets;
            if (std::fabs(r.targets[k].lower - o.probability[k]) > 1e-9 ||
                std::fabs(r.targets[k].upper - o.probability[k]) > 1e-9) {
                ++mismatches;
                std::cout << "mismatch " << label << " " << o.eids[k] << " oracle=" << format_number(o.probability[k])
                          << " exact=[" << format_number(r.targets[k].lower) << ","
                          << format_number(r.targets[k].upper) << "]\n";
            }
        }
        for (Scheme s : {Scheme::Eager, Scheme::Lazy, Scheme::Hybrid})
            for (double e : eps) {
                CompileOptions a;
                a.scheme = s;
                a.epsilon = e;
                CompileResult ra = compile_targets(net, a);
                for (size_t k = 0; k < o.probability.size(); ++k) {
                    auto& b = ra.targets[k];
                    if (o.probability[k] < b.lower - 1e-9 || o.probability[k] > b.upper + 1e-9 ||
                        b.upper - b.lower > 2 * e + 1e-9) {
                        ++violations;
                        std::cout << "violation " << label << " " << scheme_name(s) << " eps=" << format_number(e)
                                  << " " << o.eids[k] << "\n";
                    }
                }
            }
    };
    if (!c.instance.program.empty() || !c.instance.event_program.empty()) {
        Pipeline p = load(c.instance, "grounded");
        stage("check", [&] { check_one(*p.grounded, "instance"); });
        std::cout << "instances=1";
    } else {
        if (c.max_vars < 3) throw ConfigError("--max-vars must be >= 3");
        for (int i = 0; i < c.count; ++i) {
            const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
            const int m = 3 + i % (c.max_vars - 2);
            RandomProgram rp = random_event_program(seed, m, c.decls);
            GroundedProgram g = ground(rp.program, rp.targets, rp.vars);
            stage("check", [&] { check_one(g, "seed=" + std::to_string(seed)); });
        }
        std::cout << "programs=" << c.count;
    }
    std::cout << " targets=" << targets << " mismatches=" << mismatches << " violations=" << violations << "\n";
    return mismatches || violations ? 1 : 0;
}

struct BenchConfig {
    std::string program;
    std::string scheme = "positive";
    std::string vars = "4,8,12";
    std::string modes = "exact,hybrid";
    double epsilon = 0.1;
    int group = 4;
    int iter = 3;
    int k = 2;
    int literals = 2;
    int mutex_size = 4;
    double certain = 0;
    std::uint64_t seed = 1;
    std::string targets = "Centre";
    bool folded = true;
    bool timing = false;
};

int cmd_bench(const BenchConfig& b) {
    const Correlation corr = parse_correlation(b.scheme);
    const ul::UserProgram up = stage("parse", [&] { return ul::parse_user_program(read_file(b.program)); });
    const std::vector<std::string> modes = split_list(b.modes);
    for (auto& m : modes) {
        Mode md = parse_mode(m);
        if (md.naive || md.distributed) throw ConfigError("bench runs sequential compile modes only");
    }
    std::cout << "vars points mode branches leaves pruned propagations node_updates naive_evaluations"
              << (b.timing ? " ms" : "") << "\n";
    for (int m : parse_numbers<int>(b.vars)) {
        if (m < 1) throw ConfigError("variable counts must be >= 1");
        GenOptions g;
        g.scheme = corr;
        g.group = b.group;
        g.iter = b.iter;
        g.k = b.k;
        g.literals = b.literals;
        g.mutex_size = b.mutex_size;
        g.certain = b.certain;
        g.seed = b.seed;
        if (corr == Correlation::Positive) {
            g.n = b.group * m;
            g.pool = m;
        } else if (corr == Correlation::Mutex) {
            g.n = b.group * m;
        } else {
            g.n = b.group * ((m + 1) / 2);
        }
        Dataset d = stage("gen", [&] { return gen_correlations(g); });
        Translation t = stage("translate", [&] { return translate_to_event_program(up, d); });
        std::vector<std::string> targets;
        for (auto& item : split_list(b.targets))
            targets.push_back(t.finals.count(item) ? t.final_glob(item) : item);
        GroundedProgram gp = stage("ground", [&] { return ground(t.program, targets, d.vars); });
        EventNetwork net = stage("network", [&] { return EventNetwork::build(gp, b.folded); });
        const int vars = net.vars().size();
        for (auto& mname : modes) {
            Mode md = parse_mode(mname);
            CompileOptions o;
            o.scheme = md.scheme;
            o.epsilon = md.scheme == Scheme::Exact ? 0 : b.epsilon;
            auto t0 = Clock::now();
            CompileResult r = stage("compile", [&] { return compile_targets(net, o); });
            const double ms = ms_since(t0);
            std::string naive = vars < 64 ? std::to_string(std::uint64_t{1} << vars) : "inf";
            std::cout << vars << ' ' << g.n << ' ' << mname << ' ' << r.stats.branches << ' ' << r.stats.leaves << ' '
                      << r.stats.pruned << ' ' << r.stats.propagations << ' ' << r.stats.node_updates << ' ' << naive;
            if (b.timing) std::cout << ' ' << format_number(std::round(ms * 1000) / 1000);
            std::cout << "\n";
        }
    }
    return 0;
}

void add_input_options(CLI::App* app, RunConfig& cfg) {
    app->add_option("--program", cfg.program, "User-language program");
    app->add_option("--event-program", cfg.event_program, "Event program text");
    app->add_option("--data", cfg.data, "Dataset JSON");
    app->add_option("--targets", cfg.targets, "Comma-separated variable names or EID globs");
    app->add_flag("--folded", cfg.folded, "Fold the main loop of the network");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic clustering over uncertain data by event compilation"};
    app.require_subcommand(1);

    RunConfig run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run the pipeline and compute target probabilities");
    add_input_options(run_cmd, run);
    run_cmd->add_option("--network", run.network, "Network dump to compile");
    run_cmd->add_option("--mode", run.mode, "naive|exact|eager|lazy|hybrid|hybrid-d|exact-d")
        ->check(CLI::IsMember({"naive", "exact", "eager", "lazy", "hybrid", "hybrid-d", "exact-d"}));
    run_cmd->add_option("--epsilon", run.epsilon, "Absolute error (approximation modes, default 0.1)");
    run_cmd->add_option("--workers", run.workers, "Worker threads for -d modes");
    run_cmd->add_option("--job-depth", run.job_depth, "Decision-tree depth per job");
    run_cmd->add_option("--budget-sync", run.sync, "auto|ordered|speculative")
        ->check(CLI::IsMember({"auto", "ordered", "speculative"}));
    run_cmd->add_option("--fault-rate", run.fault_rate, "Simulated lost deliveries per job");
    run_cmd->add_option("--seed", run.seed, "Seed for simulated faults");
    run_cmd->add_option("--emit-stage", run.emit_stage, "Print one stage and stop: ast|event-program|grounded|network")
        ->check(CLI::IsMember({"ast", "event-program", "grounded", "network"}));
    run_cmd->add_option("--out", run.out, "Write the JSON report (or the emitted stage) here");
    run_cmd->add_option("--worlds", run.worlds, "naive: write one JSON record per world here");
    run_cmd->add_option("--commit-log", run.commit_log, "-d modes: write the job commit log here");
    run_cmd->add_flag("--timing", run.timing, "Report elapsed times");
    run_cmd->add_flag("--json", run.json_stdout, "Print the JSON report instead of the table");

    GenOptions gen;
    std::string gen_scheme = "positive", gen_out;
    CLI::App* gen_cmd = app.add_subcommand("gen", "Generate a correlated uncertain dataset");
    gen_cmd->add_option("--n", gen.n, "Number of points");
    gen_cmd->add_option("--scheme", gen_scheme, "positive|mutex|markov");
    gen_cmd->add_option("--literals", gen.literals, "positive: literals per event");
    gen_cmd->add_option("--mutex-size", gen.mutex_size, "mutex: groups per mutex set");
    gen_cmd->add_option("--group", gen.group, "Points per lineage group");
    gen_cmd->add_option("--pool", gen.pool, "positive: variable pool size (0 for n/group)");
    gen_cmd->add_option("--certain", gen.certain, "Fraction of certain points");
    gen_cmd->add_option("--p-lo", gen.p_lo, "Lowest variable probability");
    gen_cmd->add_option("--p-hi", gen.p_hi, "Highest variable probability");
    gen_cmd->add_option("--k", gen.k, "Number of clusters");
    gen_cmd->add_option("--iter", gen.iter, "Clustering iterations");
    gen_cmd->add_option("--blobs", gen.blobs, "Gaussian coordinate clusters (0 for k)");
    gen_cmd->add_option("--seed", gen.seed, "Seed");
    gen_cmd->add_option("--out", gen_out, "Output path");

    CheckConfig check;
    CLI::App* check_cmd = app.add_subcommand("check", "Compare exact compilation with world enumeration");
    check_cmd->add_option("--count", check.count, "Random programs");
    check_cmd->add_option("--max-vars", check.max_vars, "Largest variable count");
    check_cmd->add_option("--decls", check.decls, "Declarations per program");
    check_cmd->add_option("--seed", check.seed, "First seed");
    check_cmd->add_option("--epsilons", check.epsilons, "Approximation errors to validate");
    add_input_options(check_cmd, check.instance);

    BenchConfig bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Counted-work sweep over variable counts");
    bench_cmd->add_option("--program", bench.program, "User-language clustering program")->required();
    bench_cmd->add_option("--scheme", bench.scheme, "positive|mutex|markov");
    bench_cmd->add_option("--vars", bench.vars, "Comma-separated variable counts");
    bench_cmd->add_option("--modes", bench.modes, "Comma-separated compile modes");
    bench_cmd->add_option("--epsilon", bench.epsilon, "Absolute error of approximation modes");
    bench_cmd->add_option("--group", bench.group, "Points per lineage group");
    bench_cmd->add_option("--iter", bench.iter, "Clustering iterations");
    bench_cmd->add_option("--k", bench.k, "Number of clusters");
    bench_cmd->add_option("--literals", bench.literals, "positive: literals per event");
    bench_cmd->add_option("--mutex-size", bench.mutex_size, "mutex: groups per mutex set");
    bench_cmd->add_option("--certain", bench.certain, "Fraction of certain points");
    bench_cmd->add_option("--seed", bench.seed, "Dataset seed");
    bench_cmd->add_option("--targets", bench.targets, "Variable names or EID globs");
    bench_cmd->add_flag("--folded,!--unfolded", bench.folded, "Fold the main loop (default on)");
    bench_cmd->add_flag("--timing", bench.timing, "Add elapsed milliseconds");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run_cmd) return cmd_run(run);
        if (*gen_cmd) return cmd_gen(gen, gen_scheme, gen_out);
        if (*check_cmd) return cmd_check(check);
        if (*bench_cmd) return cmd_bench(bench);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
