#include "pwe/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <map>

#include "pwe/error.hpp"
#include "pwe/eval.hpp"
#include "pwe/grounder.hpp"

namespace pwe {

namespace {

constexpr int kChunkBits = 10;

void check(const GroundedProgram& g, int cap) {
    if (g.vars.size() > cap)
        throw ConfigError("naive enumeration refused: " + std::to_string(g.vars.size()) +
                          " variables exceed the cap of " + std::to_string(cap));
    for (int t : g.targets)
        if (g.decls[t].type.kind != Type::Bool)
            throw ConfigError("target '" + g.decls[t].eid + "' is not an event");
}

// Sums target masses over Gray-code worlds [begin, end).
void enumerate(const GroundedProgram& g, const ProgramEvaluator& ev, std::uint64_t begin, std::uint64_t end,
               std::vector<double>& acc, double& mass) {
    const int m = g.vars.size();
    ProgramEvaluator::Scratch s = ev.scratch();
    Valuation nu = gray_world(begin, m);
    for (std::uint64_t i = begin; i < end; ++i) {
        if (i != begin) {
            int flip = __builtin_ctzll(i);
            nu[flip] ^= 1;
        }
        double p = world_probability(nu, g.vars);
        mass += p;
        ev.run(nu, s);
        for (size_t k = 0; k < g.targets.size(); ++k)
            if (ev.truth(g.targets[k], s)) acc[k] += p;
    }
}

OracleResult start(const GroundedProgram& g) {
    OracleResult r;
    for (int t : g.targets) r.eids.push_back(g.decls[t].eid);
    r.probability.assign(g.targets.size(), 0.0);
    r.evaluations = 1ull << g.vars.size();
    return r;
}

}  // namespace

Valuation gray_world(std::uint64_t i, int m) {
    std::uint64_t code = i ^ (i >> 1);
    Valuation nu(m);
    for (int b = 0; b < m; ++b) nu[b] = (code >> b) & 1;
    return nu;
}

OracleResult oracle_probabilities_serial(const GroundedProgram& g, int cap) {
    check(g, cap);
    ProgramEvaluator ev(g);
    OracleResult r = start(g);
    enumerate(g, ev, 0, r.evaluations, r.probability, r.total_mass);
    return r;
}

OracleResult oracle_probabilities(const GroundedProgram& g, int cap) {
    check(g, cap);
    ProgramEvaluator ev(g);
    OracleResult r = start(g);
    const std::uint64_t worlds = r.evaluations;
    const std::uint64_t chunk = std::min<std::uint64_t>(worlds, 1ull << kChunkBits);
    const std::int64_t chunks = static_cast<std::int64_t>(worlds / chunk);
    const size_t k = g.targets.size();
    std::vector<double> part(static_cast<size_t>(chunks) * k, 0.0), mass(chunks, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < chunks; ++c) {
        std::vector<double> acc(k, 0.0);
        double m = 0;
        enumerate(g, ev, c * chunk, (c + 1) * chunk, acc, m);
        std::copy(acc.begin(), acc.end(), part.begin() + c * k);
        mass[c] = m;
    }
    for (std::int64_t c = 0; c < chunks; ++c) {
        for (size_t t = 0; t < k; ++t) r.probability[t] += part[c * k + t];
        r.total_mass += mass[c];
    }
    return r;
}

WorldReport per_world_report(const GroundedProgram& g, const Valuation& world) {
    if (static_cast<int>(world.size()) != g.vars.size()) throw ConfigError("world does not assign every variable");
    ProgramEvaluator ev(g);
    ProgramEvaluator::Scratch s = ev.scratch();
    ev.run(world, s);
    WorldReport r;
    r.world = world;
    r.probability = world_probability(world, g.vars);
    for (size_t i = 0; i < g.decls.size(); ++i) r.values.push_back({g.decls[i].eid, ev.value(static_cast<int>(i), s)});
    return r;
}

std::vector<std::vector<int>> clusters_from(const WorldReport& r, const std::string& glob) {
    std::map<int, std::vector<int>> by;
    int max_cluster = -1;
    for (auto& [eid, v] : r.values) {
        if (!glob_match(glob, eid)) continue;
        auto open = eid.find('['), close = eid.find(']');
        if (open == std::string::npos || close == std::string::npos) continue;
        std::string inside = eid.substr(open + 1, close - open - 1);
        auto comma = inside.find(',');
        if (comma == std::string::npos) continue;
        int i = std::stoi(inside.substr(0, comma)), l = std::stoi(inside.substr(comma + 1));
        max_cluster = std::max(max_cluster, i);
        if (v.type.kind == Type::Bool && v.truth) by[i].push_back(l);
    }
    std::vector<std::vector<int>> out(max_cluster + 1);
    for (auto& [i, ls] : by) {
        std::sort(ls.begin(), ls.end());
        out[i] = ls;
    }
    return out;
}

}  // namespace pwe
