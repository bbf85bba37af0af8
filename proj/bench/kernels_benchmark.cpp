#include <benchmark/benchmark.h>

#include "cpe/dictionary.hpp"
#include "cpe/kernels.hpp"

namespace {

const cpe::ParametricDictionary& dictionary(int c) {
    static const cpe::ParametricDictionary d1 = cpe::build_dictionary(cpe::SignalModel::tde({}, {}), 1);
    static const cpe::ParametricDictionary d4 = cpe::build_dictionary(cpe::SignalModel::tde({}, {}), 4);
    return c == 1 ? d1 : d4;
}

cpe::CVector probe(cpe::Index n) {
    return cpe::CVector::LinSpaced(n, cpe::Complex(0.0, 1.0), cpe::Complex(1.0, -1.0));
}

void BM_Correlate(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    const cpe::CVector y = probe(d.rows());
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::correlate(d.atoms, y));
}

void BM_CorrelateSerial(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    const cpe::CVector y = probe(d.rows());
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::correlate_serial(d.atoms, y));
}

void BM_CoherenceRow(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::coherence_row(d.atoms, d.size() / 2));
}

void BM_CoherenceRowSerial(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::coherence_row_serial(d.atoms, d.size() / 2));
}

void BM_SampleAtoms(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::sample_atoms(d.model, d.params));
}

void BM_SampleAtomsSerial(benchmark::State& state) {
    const auto& d = dictionary(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(cpe::kernels::sample_atoms_serial(d.model, d.params));
}

}  // namespace

BENCHMARK(BM_Correlate)->Arg(1)->Arg(4);
BENCHMARK(BM_CorrelateSerial)->Arg(1)->Arg(4);
BENCHMARK(BM_CoherenceRow)->Arg(1)->Arg(4);
BENCHMARK(BM_CoherenceRowSerial)->Arg(1)->Arg(4);
BENCHMARK(BM_SampleAtoms)->Arg(1)->Arg(4);
BENCHMARK(BM_SampleAtomsSerial)->Arg(1)->Arg(4);

BENCHMARK_MAIN();
