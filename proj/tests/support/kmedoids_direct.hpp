#pragma once

#include <vector>

#include "pwe/dataset.hpp"

namespace pwe::testing {

struct Clustering {
    std::vector<int> cluster;                 // per object, -1 when absent
    std::vector<std::vector<double>> medoid;  // empty when undefined
};

// Plain k-medoids on the objects present in one world. Objects join the
// nearest defined medoid (lowest index on ties); the new medoid is the member
// with the least distance sum to the other members (lowest index on ties); an
// empty cluster loses its medoid.
Clustering kmedoids_direct(const Dataset& d, const std::vector<uint8_t>& world, int k, int iterations);

}  // namespace pwe::testing
