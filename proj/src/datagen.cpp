#include "pwe/datagen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "pwe/error.hpp"

namespace pwe {

Correlation parse_correlation(const std::string& s) {
    if (s == "positive") return Correlation::Positive;
    if (s == "mutex") return Correlation::Mutex;
    if (s == "markov" || s == "conditional") return Correlation::Markov;
    throw ConfigError("unknown correlation scheme '" + s + "'");
}

const char* correlation_name(Correlation c) {
    switch (c) {
        case Correlation::Positive: return "positive";
        case Correlation::Mutex: return "mutex";
        case Correlation::Markov: return "markov";
    }
    return "?";
}

namespace {

void check(const GenOptions& o) {
    if (o.n < 1) throw ConfigError("n must be >= 1");
    if (o.group < 1) throw ConfigError("group size must be >= 1");
    if (o.literals < 1) throw ConfigError("literal count must be >= 1");
    if (o.mutex_size < 1) throw ConfigError("mutex set size must be >= 1");
    if (o.pool < 0) throw ConfigError("pool size must be >= 0");
    if (!(o.certain >= 0 && o.certain <= 1)) throw ConfigError("certain fraction must lie in [0, 1]");
    if (!(o.p_lo > 0 && o.p_lo <= o.p_hi && o.p_hi < 1)) throw ConfigError("probability range must lie in (0, 1)");
    if (o.k < 1 || o.k > o.n) throw ConfigError("k must lie in [1, n]");
    if (o.iter < 1) throw ConfigError("iter must be >= 1");
    if (o.blobs < 0 || !(o.spread >= 0)) throw ConfigError("bad coordinate parameters");
}

}  // namespace

Dataset gen_correlations(const GenOptions& o) {
    check(o);
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> prob(o.p_lo, o.p_hi);
    // Events and coordinates are drawn for every point first, so the same
    // seed gives the same instance whatever the certain fraction.
    const int certain = static_cast<int>(std::floor(o.certain * o.n));
    const int groups = (o.n + o.group - 1) / o.group;

    std::vector<std::string> events(groups);
    std::vector<std::vector<int>> uses(groups);
    std::vector<std::pair<std::string, double>> vars;
    auto fresh = [&](const std::string& id) {
        vars.push_back({id, prob(rng)});
        return static_cast<int>(vars.size()) - 1;
    };
    switch (o.scheme) {
        case Correlation::Positive: {
            const int pool = o.pool > 0 ? o.pool : std::max(1, o.n / o.group);
            if (o.literals > pool) throw ConfigError("more literals per event than variables in the pool");
            for (int i = 0; i < pool; ++i) fresh("x" + std::to_string(i));
            std::vector<int> idx(pool);
            for (int g = 0; g < groups; ++g) {
                for (int i = 0; i < pool; ++i) idx[i] = i;
                for (int i = 0; i < o.literals; ++i) {
                    std::uniform_int_distribution<int> pick(i, pool - 1);
                    std::swap(idx[i], idx[pick(rng)]);
                }
                std::sort(idx.begin(), idx.begin() + o.literals);
                for (int i = 0; i < o.literals; ++i) {
                    events[g] += (i ? " | " : "") + vars[idx[i]].first;
                    uses[g].push_back(idx[i]);
                }
            }
            break;
        }
        case Correlation::Mutex: {
            for (int g = 0; g < groups; ++g) {
                const int set = g / o.mutex_size, pos = g % o.mutex_size;
                fresh("y" + std::to_string(set) + "m" + std::to_string(pos));
                for (int j = 0; j <= pos; ++j) {
                    const int v = static_cast<int>(vars.size()) - 1 - pos + j;
                    events[g] += (j < pos ? "!" : "") + vars[v].first + (j < pos ? " & " : "");
                    uses[g].push_back(v);
                }
            }
            break;
        }
        case Correlation::Markov: {
            for (int g = 0; g < groups; ++g) {
                const int t = fresh("t" + std::to_string(g));
                uses[g].push_back(t);
                if (g == 0) {
                    events[g] = vars[t].first;
                    continue;
                }
                const int f = fresh("f" + std::to_string(g));
                uses[g].push_back(f);
                const std::string prev = "o" + std::to_string((g - 1) * o.group);
                events[g] = "(" + prev + " & " + vars[t].first + ") | (!" + prev + " & " + vars[f].first + ")";
            }
            break;
        }
    }

    const int blobs = o.blobs > 0 ? o.blobs : o.k;
    std::uniform_real_distribution<double> centre(0.0, 10.0 * blobs);
    std::vector<std::array<double, 2>> centres(blobs);
    for (auto& c : centres) c = {centre(rng), centre(rng)};
    std::normal_distribution<double> noise(0.0, o.spread);
    std::uniform_int_distribution<int> which(0, blobs - 1);

    nlohmann::json j;
    j["points"] = nlohmann::json::array();
    std::vector<char> used(vars.size(), 0);
    for (int i = 0; i < o.n; ++i) {
        auto& c = centres[which(rng)];
        double a = c[0] + noise(rng), b = c[1] + noise(rng);
        const int g = i / o.group;
        if (i >= certain)
            for (int v : uses[g]) used[v] = 1;
        std::string ev = i < certain ? "true" : events[g];
        j["points"].push_back({{"id", "o" + std::to_string(i)}, {"coords", {a, b}}, {"event", ev}});
    }
    j["vars"] = nlohmann::json::array();
    for (size_t v = 0; v < vars.size(); ++v)
        if (used[v]) j["vars"].push_back({{"id", vars[v].first}, {"p", vars[v].second}});
    nlohmann::json medoids = nlohmann::json::array();
    for (int c = 0; c < o.k; ++c) {
        int primary = c * o.n / o.k;
        int fallback = (primary + 1) % o.n;
        if (fallback == primary) medoids.push_back(primary);
        else medoids.push_back({primary, fallback});
    }
    j["params"] = {{"k", o.k}, {"iter", o.iter}, {"medoids", medoids}};
    j["meta"] = {{"scheme", correlation_name(o.scheme)}, {"group", o.group},       {"seed", o.seed},
                 {"certain", o.certain},                 {"p_range", {o.p_lo, o.p_hi}}};
    if (o.scheme == Correlation::Positive) j["meta"]["literals"] = o.literals;
    if (o.scheme == Correlation::Mutex) j["meta"]["mutex_size"] = o.mutex_size;
    return parse_dataset(j);
}

}  // namespace pwe
