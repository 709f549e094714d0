#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "synthetic.hpp"
#include "viseme/kernels.hpp"

using namespace viseme;
namespace k = viseme::kernels;

namespace {

struct Fixture {
    MultiImage img;
    std::vector<std::uint32_t> idx;
    PolyModel model;
};

Fixture make(std::uint64_t seed, int bands, std::size_t count) {
    std::mt19937_64 rng(seed);
    Fixture f{fixtures::random_image(rng, 300, 200, bands), {}, {}};
    f.idx = fixtures::random_subset(rng, f.img.pixel_count(), count);
    std::uniform_real_distribution<double> u(-1e-2, 1e-2);
    f.model.order = 3;
    for (int b = 0; b < bands; ++b) {
        Cubic c;
        c[0] = 100;
        for (int i = 1; i < kTerms; ++i) c[i] = u(rng) / (i < 3 ? 1 : (i < 6 ? 100 : 1e4));
        f.model.bands.push_back(c);
    }
    return f;
}

}  // namespace

TEST(Kernels, AccumulateMatchesBruteForce) {
    const Fixture f = make(1, 2, 777);
    const k::SampleSums s = k::accumulate(f.img, f.idx);
    std::int64_t n = 0, sx = 0, sxxy = 0, syyy = 0, sz1 = 0, szx0 = 0;
    for (std::uint32_t i : f.idx) {
        const std::int64_t x = i % f.img.width(), y = i / f.img.width();
        ++n;
        sx += x;
        sxxy += x * x * y;
        syyy += y * y * y;
        sz1 += f.img.sample(1, i);
        szx0 += f.img.sample(0, i) * x;
    }
    EXPECT_EQ(s.n, n);
    EXPECT_EQ(s.sx, sx);
    EXPECT_EQ(s.sxxy, sxxy);
    EXPECT_EQ(s.syyy, syyy);
    EXPECT_EQ(s.sz[1], sz1);
    EXPECT_EQ(s.szx[0], szx0);
}

// Sets span several blocks so the parallel path splits the work.
TEST(Kernels, ParallelSumsEqualSerialExactly) {
    for (int threads : {1, 2, 4, 7}) {
        omp_set_num_threads(threads);
        const Fixture f = make(2 + threads, 3, 5 * k::kBlock + 123);
        EXPECT_EQ(k::accumulate(f.img, f.idx), k::serial::accumulate(f.img, f.idx));
        EXPECT_EQ(k::negative_side(f.img, f.idx, 0.3, -0.7, 12.5), k::serial::negative_side(f.img, f.idx, 0.3, -0.7, 12.5));
    }
}

TEST(Kernels, ParallelResidualsMatchSerial) {
    const Fixture f = make(11, 2, 4 * k::kBlock + 17);
    std::vector<double> a(f.idx.size()), b(f.idx.size());
    const double ma = k::residuals(f.img, f.idx, f.model, a);
    const double mb = k::serial::residuals(f.img, f.idx, f.model, b);
    EXPECT_NEAR(ma, mb, 1e-9);
    for (std::size_t i = 0; i < a.size(); ++i) ASSERT_NEAR(a[i], b[i], 1e-9);
}

TEST(Kernels, ResidualsThreadCountInvariant) {
    const Fixture f = make(12, 1, 6 * k::kBlock);
    omp_set_num_threads(1);
    std::vector<double> a(f.idx.size()), b(f.idx.size());
    const double ma = k::residuals(f.img, f.idx, f.model, a);
    omp_set_num_threads(4);
    const double mb = k::residuals(f.img, f.idx, f.model, b);
    EXPECT_EQ(ma, mb);
    EXPECT_EQ(a, b);
}

TEST(Kernels, NormalSystemMatchesSerialAndThreadInvariant) {
    const Fixture f = make(13, 2, 3 * k::kBlock + 5);
    omp_set_num_threads(4);
    const auto p = k::normal_system(f.img, f.idx, 3, 150.0, 100.0, 80.0);
    const auto s = k::serial::normal_system(f.img, f.idx, 3, 150.0, 100.0, 80.0);
    ASSERT_EQ(p.terms, 10);
    ASSERT_EQ(p.ata.size(), s.ata.size());
    for (std::size_t i = 0; i < p.ata.size(); ++i) EXPECT_NEAR(p.ata[i], s.ata[i], 1e-9 * (1 + std::abs(s.ata[i])));
    for (std::size_t i = 0; i < p.atz.size(); ++i) EXPECT_NEAR(p.atz[i], s.atz[i], 1e-9 * (1 + std::abs(s.atz[i])));
    omp_set_num_threads(1);
    const auto q = k::normal_system(f.img, f.idx, 3, 150.0, 100.0, 80.0);
    EXPECT_EQ(p.ata, q.ata);
    EXPECT_EQ(p.atz, q.atz);
}

TEST(Kernels, NormalSystemEntriesAreMonomialSums) {
    const Fixture f = make(14, 1, 50);
    const double cx = 10, cy = 20, sc = 30;
    const auto ns = k::normal_system(f.img, f.idx, 1, cx, cy, sc);
    double suv = 0, svz = 0;
    for (std::uint32_t i : f.idx) {
        const double u = (i % f.img.width() - cx) / sc, v = (i / f.img.width() - cy) / sc;
        suv += u * v;
        svz += v * f.img.sample(0, i);
    }
    EXPECT_NEAR(ns.ata[1 * 3 + 2], suv, 1e-9 * (1 + std::abs(suv)));
    EXPECT_NEAR(ns.atz[2], svz, 1e-9 * (1 + std::abs(svz)));
}
