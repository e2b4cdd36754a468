#include <benchmark/benchmark.h>

#include <sstream>

#include "irslos/channel.hpp"
#include "irslos/commands.hpp"
#include "irslos/optimize.hpp"
#include "irslos/verify.hpp"

using namespace irslos;

namespace {

// Square IRS of side q at the single-hop geometry.
Scenario sized(int q) {
    Scenario s = fig2_scenario();
    s.irs = IrsLayout::make(q, q, 0.1, 0.1, 0.1, 0.1);
    return s;
}

void BM_TxIrsSerial(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::tx_irs_channel(s.tx, s.irs, s.wave));
    st.SetItemsProcessed(st.iterations() * s.irs.count() * s.tx.n_antennas);
}

void BM_TxIrsParallel(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(tx_irs_channel(s.tx, s.irs, s.wave));
    st.SetItemsProcessed(st.iterations() * s.irs.count() * s.tx.n_antennas);
}

void BM_IrsRxSerial(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(serial::irs_rx_channel(s.rx, s.irs, s.wave));
    st.SetItemsProcessed(st.iterations() * s.irs.count() * s.rx.n_antennas);
}

void BM_IrsRxParallel(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(irs_rx_channel(s.rx, s.irs, s.wave));
    st.SetItemsProcessed(st.iterations() * s.irs.count() * s.rx.n_antennas);
}

void BM_ClosedForm(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(closed_form_channel(s));
}

void BM_Assemble(benchmark::State& st) {
    const Scenario s = sized(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(assemble(s, reflective_focusing(s)));
}

void BM_MiGradient(benchmark::State& st) {
    const Scenario s = small_scenario();
    const RandomInit ri = random_init(s, 1);
    for (auto _ : st) benchmark::DoNotOptimize(mi_gradient(s, ri.theta, ri.m));
}

void BM_FmrMap(benchmark::State& st) {
    const Scenario s = fig5_scenario();
    const Range r{2, 60, static_cast<int>(st.range(0))};
    for (auto _ : st) {
        std::ostringstream os;
        cmd_fmr_map(s, r, r, true, {}, os);
        benchmark::DoNotOptimize(os.str());
    }
}

}  // namespace

BENCHMARK(BM_TxIrsSerial)->Arg(15)->Arg(31)->Arg(63);
BENCHMARK(BM_TxIrsParallel)->Arg(15)->Arg(31)->Arg(63);
BENCHMARK(BM_IrsRxSerial)->Arg(15)->Arg(31)->Arg(63);
BENCHMARK(BM_IrsRxParallel)->Arg(15)->Arg(31)->Arg(63);
BENCHMARK(BM_ClosedForm)->Arg(15)->Arg(63);
BENCHMARK(BM_Assemble)->Arg(15)->Arg(63);
BENCHMARK(BM_MiGradient);
BENCHMARK(BM_FmrMap)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
