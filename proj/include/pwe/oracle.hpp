#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pwe/program.hpp"
#include "pwe/value.hpp"

namespace pwe {

struct OracleResult {
    std::vector<std::string> eids;
    std::vector<double> probability;
    std::uint64_t evaluations = 0;  // full-program evaluations, one per world
    double total_mass = 0;
};

constexpr int kDefaultOracleCap = 24;

// Exact target probabilities by enumerating every world in Gray-code order.
// The parallel version sums fixed chunks in a fixed order.
OracleResult oracle_probabilities(const GroundedProgram& g, int cap = kDefaultOracleCap);
OracleResult oracle_probabilities_serial(const GroundedProgram& g, int cap = kDefaultOracleCap);

// i-th valuation of the Gray-code sequence over m variables.
Valuation gray_world(std::uint64_t i, int m);

struct WorldReport {
    Valuation world;
    double probability = 0;
    std::vector<std::pair<std::string, Value>> values;  // every declaration, in program order
};

WorldReport per_world_report(const GroundedProgram& g, const Valuation& world);

// Cluster memberships from two-index Boolean EIDs matching `glob`
// (cluster index first, object index second): clusters[i] lists objects.
std::vector<std::vector<int>> clusters_from(const WorldReport& r, const std::string& glob);

}  // namespace pwe
