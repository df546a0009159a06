#include "rffid/emitter.hpp"
#include "rffid/features.hpp"
#include "rffid/frontend.hpp"
#include "rffid/schemes.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace rffid;

namespace {

EmitterProfile t1()
{
    auto p = EmitterProfile::ideal();
    p.rho1 = 0.03;
    p.q0 = 1.0;
    p.q1 = 0.0302;
    p.gain = 0.998;
    p.tones = {Complex{0.0013, 0.0082}, Complex{0.0082, 0.0}};
    p.tone_freqs = {0.0, 0.0129};
    p.pa = {1.0, 0.3};
    return p;
}

Frame frame(std::uint64_t k)
{
    return random_frame(RandomStream(1, {0, k, common_antenna, Purpose::bits}), FrameLayout{});
}

ReceiverProfile receiver(int n)
{
    ReceiverProfile rx;
    rx.n_antennas = n;
    rx.chi = {0.01};
    rx.jitter_delta = 0.003;
    rx.lo_freq_norm = 100.0;
    rx.quant_v = 4.0;
    return rx;
}

void BM_BuildFilter(benchmark::State& state)
{
    const auto p = t1();
    for (auto _ : state)
        benchmark::DoNotOptimize(build_shaping_filter(p, {}));
}
BENCHMARK(BM_BuildFilter);

void BM_Emit(benchmark::State& state)
{
    const auto p = t1();
    const auto filter = build_shaping_filter(p, {});
    const auto f = frame(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(emit(p, filter, f));
}
BENCHMARK(BM_Emit);

void BM_Receive(benchmark::State& state)
{
    const auto x = emit(t1(), frame(0));
    const auto rx = receiver(static_cast<int>(state.range(0)));
    std::uint64_t k = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(receive(x, ChannelConfig{15.0}, rx, k++, StreamContext{1, 0}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Receive)->Arg(1)->Arg(8)->Arg(64);

void BM_LmsFeatures(benchmark::State& state)
{
    const auto x = emit(t1(), frame(0));
    const auto cap = receive(x, ChannelConfig{15.0}, receiver(1), 0, StreamContext{1, 0});
    const FeatureExtractor fx(FeatureConfig{});
    for (auto _ : state)
        benchmark::DoNotOptimize(fx(cap.y[0]));
}
BENCHMARK(BM_LmsFeatures);

void BM_ItdFeatures(benchmark::State& state)
{
    const auto x = emit(t1(), frame(0));
    FeatureConfig cfg;
    cfg.method = FeatureMethod::itd;
    cfg.itd_span = state.range(0) ? ItdSpan::frame : ItdSpan::pilot;
    const FeatureExtractor fx(cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(fx(x));
}
BENCHMARK(BM_ItdFeatures)->Arg(0)->Arg(1);

void BM_DfsRecover(benchmark::State& state)
{
    const auto x = emit(t1(), frame(0));
    const auto cap = receive(x, ChannelConfig{15.0}, receiver(static_cast<int>(state.range(0))), 0,
                             StreamContext{1, 0});
    const auto mode = state.range(1) ? RatioMode::xcorr : RatioMode::mean;
    for (auto _ : state)
        benchmark::DoNotOptimize(dfs_recover(cap, mode));
}
BENCHMARK(BM_DfsRecover)->Args({8, 0})->Args({64, 0})->Args({512, 0})->Args({8, 1})->Args({32, 1});

void BM_Train(benchmark::State& state)
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> g;
    LabeledDataset data;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> f(22);
        for (auto& v : f)
            v = g(gen) + (i % 5);
        data.add(std::move(f), i % 5);
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(train(data));
}
BENCHMARK(BM_Train);

} // namespace

BENCHMARK_MAIN();
