#include <benchmark/benchmark.h>

#include "pwe/grounder.hpp"
#include "pwe/oracle.hpp"
#include "pwe/random_programs.hpp"

namespace {

pwe::GroundedProgram instance(int vars) {
    pwe::RandomProgram rp = pwe::random_event_program(7, vars, 12);
    return pwe::ground(rp.program, rp.targets, rp.vars);
}

void bm_oracle_parallel(benchmark::State& state) {
    const pwe::GroundedProgram g = instance(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pwe::oracle_probabilities(g));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}

void bm_oracle_serial(benchmark::State& state) {
    const pwe::GroundedProgram g = instance(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(pwe::oracle_probabilities_serial(g));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << state.range(0)));
}

}  // namespace

BENCHMARK(bm_oracle_parallel)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_oracle_serial)->DenseRange(8, 16, 4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
