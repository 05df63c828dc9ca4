#include "pwe/dataset.hpp"

#include <fstream>
#include <unordered_map>

#include "pwe/error.hpp"
#include "pwe/event_text.hpp"

namespace pwe {

namespace {

ExprPtr link_points(const ExprPtr& e, const VarTable& vars, const std::unordered_map<std::string, ExprPtr>& points,
                    std::unordered_map<const Expr*, ExprPtr>& memo, const std::string& owner) {
    auto m = memo.find(e.get());
    if (m != memo.end()) return m->second;
    ExprPtr r = e;
    if ((e->op == Op::Ref || e->op == Op::Var) && vars.find(e->name) < 0) {
        auto p = points.find(e->name);
        if (p == points.end())
            throw ConfigError("event of point '" + owner + "' names unknown variable or earlier point '" + e->name +
                              "'");
        r = p->second;
    } else if (!e->kids.empty()) {
        auto copy = std::make_shared<Expr>(*e);
        bool changed = false;
        for (auto& k : copy->kids) {
            ExprPtr n = link_points(k, vars, points, memo, owner);
            changed = changed || n != k;
            k = n;
        }
        if (changed) r = copy;
    }
    memo[e.get()] = r;
    return r;
}

}  // namespace

Dataset parse_dataset(const nlohmann::json& j) {
    Dataset d;
    try {
        for (auto& v : j.at("vars")) d.vars.add(v.at("id").get<std::string>(), v.at("p").get<double>());
        for (auto& p : j.at("points")) {
            Dataset::Point pt;
            pt.id = p.value("id", "o" + std::to_string(d.points.size()));
            pt.coords = p.at("coords").get<std::vector<double>>();
            pt.event = p.value("event", "true");
            if (!d.points.empty() && pt.coords.size() != d.points[0].coords.size())
                throw ConfigError("point '" + pt.id + "' has a different dimension");
            d.points.push_back(std::move(pt));
        }
        if (j.contains("params")) d.params = j.at("params");
        if (d.params.contains("medoids")) {
            for (auto& m : d.params.at("medoids")) {
                Dataset::Seed s;
                if (m.is_array()) {
                    s.primary = m.at(0).get<int>();
                    s.fallback = m.size() > 1 ? m.at(1).get<int>() : -1;
                } else {
                    s.primary = m.get<int>();
                }
                d.seeds.push_back(s);
            }
        }
        if (j.contains("matrix")) d.matrix = j.at("matrix").get<std::vector<std::vector<double>>>();
        if (j.contains("load")) d.load = j.at("load").get<std::vector<std::string>>();
        if (j.contains("meta")) d.meta = j.at("meta");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed dataset: ") + e.what());
    }
    // Points sharing an event string share one expression object; a name
    // that is not a variable may refer to an earlier point's event.
    std::unordered_map<std::string, ExprPtr> by_text, by_point;
    for (auto& pt : d.points) {
        auto it = by_text.find(pt.event);
        if (it == by_text.end()) {
            ExprPtr e;
            try {
                e = parse_event_expr(pt.event);
            } catch (const SyntaxError& err) {
                throw ConfigError("event of point '" + pt.id + "': " + err.what());
            }
            std::unordered_map<const Expr*, ExprPtr> memo;
            e = link_points(e, d.vars, by_point, memo, pt.id);
            it = by_text.emplace(pt.event, e).first;
        }
        pt.event_expr = it->second;
        if (!by_point.emplace(pt.id, pt.event_expr).second)
            throw ConfigError("duplicate point id '" + pt.id + "'");
    }
    for (auto& s : d.seeds) {
        int n = static_cast<int>(d.points.size());
        if (s.primary < 0 || s.primary >= n || s.fallback >= n)
            throw ConfigError("initial medoid index out of range");
    }
    return d;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("dataset '" + path + "': " + e.what());
    }
    return parse_dataset(j);
}

nlohmann::json dataset_to_json(const Dataset& d) {
    nlohmann::json j;
    j["vars"] = nlohmann::json::array();
    for (int i = 0; i < d.vars.size(); ++i) j["vars"].push_back({{"id", d.vars.id(i)}, {"p", d.vars.p(i)}});
    j["points"] = nlohmann::json::array();
    for (auto& p : d.points) j["points"].push_back({{"id", p.id}, {"coords", p.coords}, {"event", p.event}});
    j["params"] = d.params;
    if (!d.matrix.empty()) j["matrix"] = d.matrix;
    if (!d.load.empty()) j["load"] = d.load;
    if (!d.meta.empty()) j["meta"] = d.meta;
    return j;
}

}  // namespace pwe
