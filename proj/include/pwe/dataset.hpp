#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pwe/expr.hpp"

namespace pwe {

// Uncertain input data: objects with feature vectors and existence events,
// clustering parameters, an optional weight matrix and the roles of the
// values returned by loadData().
struct Dataset {
    struct Point {
        std::string id;
        std::vector<double> coords;
        std::string event;
        ExprPtr event_expr;
    };
    // One initial medoid/centroid: object `primary`, or `fallback` when the
    // primary object is absent (fallback < 0 means none).
    struct Seed {
        int primary = 0;
        int fallback = -1;
    };

    VarTable vars;
    std::vector<Point> points;
    nlohmann::json params = nlohmann::json::object();
    std::vector<Seed> seeds;
    std::vector<std::vector<double>> matrix;
    std::vector<std::string> load;
    nlohmann::json meta = nlohmann::json::object();

    int dim() const { return points.empty() ? 0 : static_cast<int>(points[0].coords.size()); }
};

Dataset parse_dataset(const nlohmann::json& j);
Dataset load_dataset(const std::string& path);
nlohmann::json dataset_to_json(const Dataset& d);

}  // namespace pwe
