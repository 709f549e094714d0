// Serial reference loops against the OpenMP kernels on a full 3-band frame.
// The range argument of the parallel variants is the thread count.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <numeric>
#include <random>

#include "viseme/kernels.hpp"
#include "viseme/segmenter.hpp"

using namespace viseme;

namespace {

struct Frame {
    MultiImage img;
    std::vector<std::uint32_t> idx;
    PolyModel model;
};

const Frame& frame() {
    static const Frame f = [] {
        Frame f{MultiImage(1024, 1024, 3), {}, {}};
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<int> v(0, 255);
        for (int b = 0; b < 3; ++b)
            for (auto& s : f.img.plane(b)) s = static_cast<std::uint8_t>(v(rng));
        f.idx.resize(f.img.pixel_count());
        std::iota(f.idx.begin(), f.idx.end(), 0u);
        f.model = fit_poly_lsq(f.img, f.idx, 3).model;
        return f;
    }();
    return f;
}

void BM_AccumulateSerial(benchmark::State& st) {
    const Frame& f = frame();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::accumulate(f.img, f.idx));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_AccumulateParallel(benchmark::State& st) {
    const Frame& f = frame();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::accumulate(f.img, f.idx));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_ResidualsSerial(benchmark::State& st) {
    const Frame& f = frame();
    std::vector<double> err(f.idx.size());
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::residuals(f.img, f.idx, f.model, err));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_ResidualsParallel(benchmark::State& st) {
    const Frame& f = frame();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    std::vector<double> err(f.idx.size());
    for (auto _ : st) benchmark::DoNotOptimize(kernels::residuals(f.img, f.idx, f.model, err));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_NormalSystemSerial(benchmark::State& st) {
    const Frame& f = frame();
    for (auto _ : st) benchmark::DoNotOptimize(kernels::serial::normal_system(f.img, f.idx, 3, 512, 512, 512));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_NormalSystemParallel(benchmark::State& st) {
    const Frame& f = frame();
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::normal_system(f.img, f.idx, 3, 512, 512, 512));
    st.SetItemsProcessed(st.iterations() * f.idx.size());
}

void BM_Decompose(benchmark::State& st) {
    MultiImage img(512, 512, 1);
    for (int y = 0; y < 512; ++y)
        for (int x = 0; x < 512; ++x)
            img.set(0, x, y, static_cast<std::uint8_t>((x < 256 ? x / 4 : 200 - x / 8) + (y * y) / 2048));
    omp_set_num_threads(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(decompose(img, {}));
}

}  // namespace

BENCHMARK(BM_AccumulateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AccumulateParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualsParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalSystemSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NormalSystemParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Decompose)->Arg(1)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
