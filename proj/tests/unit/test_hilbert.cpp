#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "viseme/hilbert.hpp"

using namespace viseme;

TEST(Hilbert, BaseOrderIsU) {
    EXPECT_EQ(hilbert_d2xy(1, 0), (std::pair<std::uint32_t, std::uint32_t>{0, 0}));
    EXPECT_EQ(hilbert_d2xy(1, 1), (std::pair<std::uint32_t, std::uint32_t>{0, 1}));
    EXPECT_EQ(hilbert_d2xy(1, 2), (std::pair<std::uint32_t, std::uint32_t>{1, 1}));
    EXPECT_EQ(hilbert_d2xy(1, 3), (std::pair<std::uint32_t, std::uint32_t>{1, 0}));
}

TEST(Hilbert, PatternsAreRotationsOfOneU) {
    for (int p = 0; p < 4; ++p) {
        const auto& rule = pattern_rule(static_cast<HilbertPattern>(p));
        std::set<std::array<int, 2>> seen(rule.order.begin(), rule.order.end());
        EXPECT_EQ(seen.size(), 4u);
        for (int s = 1; s < 4; ++s)
            EXPECT_EQ(std::abs(rule.order[s][0] - rule.order[s - 1][0]) + std::abs(rule.order[s][1] - rule.order[s - 1][1]), 1);
    }
}

TEST(Hilbert, BijectionUpToEightBits) {
    for (int r = 1; r <= 8; ++r) {
        const std::uint64_t n = 1ull << (2 * r);
        std::vector<char> hit(n, 0);
        for (std::uint64_t d = 0; d < n; ++d) {
            const auto [i, j] = hilbert_d2xy(r, d);
            ASSERT_LT(i, 1u << r);
            ASSERT_LT(j, 1u << r);
            ASSERT_EQ(hilbert_xy2d(r, i, j), d);
            hit[(static_cast<std::uint64_t>(j) << r) | i] = 1;
        }
        EXPECT_TRUE(std::all_of(hit.begin(), hit.end(), [](char c) { return c == 1; }));
    }
}

TEST(Hilbert, ConsecutiveCellsAreAdjacent) {
    for (int r = 1; r <= 6; ++r) {
        auto prev = hilbert_d2xy(r, 0);
        for (std::uint64_t d = 1; d < (1ull << (2 * r)); ++d) {
            const auto cur = hilbert_d2xy(r, d);
            const int step = std::abs(static_cast<int>(cur.first) - static_cast<int>(prev.first)) +
                             std::abs(static_cast<int>(cur.second) - static_cast<int>(prev.second));
            ASSERT_EQ(step, 1) << "r=" << r << " d=" << d;
            prev = cur;
        }
        // Starts and ends on the bottom row at opposite corners.
        EXPECT_EQ(hilbert_d2xy(r, (1ull << (2 * r)) - 1), (std::pair<std::uint32_t, std::uint32_t>{(1u << r) - 1, 0}));
    }
}

TEST(Hilbert, RejectsBadArguments) {
    EXPECT_THROW(hilbert_d2xy(0, 0), std::out_of_range);
    EXPECT_THROW(hilbert_d2xy(2, 16), std::out_of_range);
    EXPECT_THROW(hilbert_xy2d(2, 4, 0), std::out_of_range);
}

TEST(HilbertKd, BijectiveAndAdjacent) {
    for (auto [k, r] : {std::pair{1, 5}, std::pair{2, 4}, std::pair{3, 3}, std::pair{4, 3}, std::pair{5, 2}, std::pair{8, 2}}) {
        const std::uint64_t n = 1ull << (k * r);
        std::set<std::vector<std::uint32_t>> seen;
        std::vector<std::uint32_t> prev;
        for (std::uint64_t d = 0; d < n; ++d) {
            const auto c = hilbert_kd(k, r, d);
            ASSERT_EQ(c.size(), static_cast<std::size_t>(k));
            ASSERT_EQ(hilbert_kd_index(k, r, c), d);
            seen.insert(c);
            if (d > 0) {
                int diff = 0;
                for (int i = 0; i < k; ++i) diff += std::abs(static_cast<int>(c[i]) - static_cast<int>(prev[i]));
                ASSERT_EQ(diff, 1) << "k=" << k << " r=" << r << " d=" << d;
            }
            prev = c;
        }
        EXPECT_EQ(seen.size(), n);
    }
}

TEST(HilbertKd, TwoDimensionsMatchesPatternCurve) {
    for (int r = 1; r <= 5; ++r)
        for (std::uint64_t d = 0; d < (1ull << (2 * r)); ++d) {
            const auto [i, j] = hilbert_d2xy(r, d);
            const auto c = hilbert_kd(2, r, d);
            ASSERT_EQ(c[0], i);
            ASSERT_EQ(c[1], j);
        }
}

TEST(OrderPoints, FollowsCurveAndKeepsTiesStable) {
    const std::vector<Point2> pts{{3.5, 0.5}, {0.5, 0.5}, {0.5, 3.5}, {0.6, 0.6}, {3.5, 3.5}};
    const Box box{0, 0, 4, 4};
    const auto order = order_points(pts, 2, box);
    EXPECT_EQ(order, (std::vector<std::size_t>{1, 3, 2, 4, 0}));
}

TEST(OrderPoints, IsAPermutation) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50, 50);
    std::vector<Point2> pts(500);
    for (Point2& p : pts) p = {u(rng), u(rng)};
    auto order = order_points(pts, 6);
    std::sort(order.begin(), order.end());
    for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], i);
}

TEST(OrderPoints, TourShorterThanRandomPermutations) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0, 1000);
    std::vector<Point2> pts(2000);
    for (Point2& p : pts) p = {u(rng), u(rng)};
    const double hil = path_length(pts, order_points(pts, 8));
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    double mean = 0;
    for (int t = 0; t < 20; ++t) {
        std::shuffle(perm.begin(), perm.end(), rng);
        mean += path_length(pts, perm) / 20;
    }
    EXPECT_LT(hil, 0.1 * mean);
}

TEST(OrderPoints, BoundingBox) {
    const std::vector<Point2> pts{{1, 5}, {-2, 3}, {4, -1}};
    const Box b = bounding_box(pts);
    EXPECT_EQ(b.x0, -2);
    EXPECT_EQ(b.x1, 4);
    EXPECT_EQ(b.y0, -1);
    EXPECT_EQ(b.y1, 5);
}
