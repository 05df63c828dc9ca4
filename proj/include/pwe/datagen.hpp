#pragma once

#include <cstdint>
#include <string>

#include "pwe/dataset.hpp"

namespace pwe {

enum class Correlation { Positive, Mutex, Markov };

Correlation parse_correlation(const std::string& s);
const char* correlation_name(Correlation c);

struct GenOptions {
    int n = 20;
    Correlation scheme = Correlation::Positive;
    int literals = 2;     // positive: distinct literals per event
    int mutex_size = 4;   // mutex: groups per mutex set
    int group = 4;        // points per lineage group
    int pool = 0;         // positive: variable pool, 0 for n / group
    double certain = 0;   // leading fraction of points whose event is true
    double p_lo = 0.5, p_hi = 0.8;
    int k = 2;
    int iter = 2;
    int blobs = 0;        // Gaussian clusters of coordinates, 0 for k
    double spread = 1.0;
    std::uint64_t seed = 1;
};

// Synthetic 2-D uncertain points with correlated existence events. Points of
// one lineage group share an event; mutex sets and Markov chains range over
// groups.
Dataset gen_correlations(const GenOptions& o);

}  // namespace pwe
