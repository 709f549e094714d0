#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "viseme/poly.hpp"

using namespace viseme;

namespace {

Cubic random_cubic(std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Cubic c;
    for (double& v : c.c) v = u(rng);
    return c;
}

// Direct sum over the monomial table.
double brute(const Cubic& p, double x, double y) {
    double s = 0.0;
    for (int i = 0; i < kTerms; ++i) s += p[i] * std::pow(x, kExponents[i][0]) * std::pow(y, kExponents[i][1]);
    return s;
}

}  // namespace

TEST(Poly, MonomialOrder) {
    EXPECT_EQ(term_index(0, 0), 0);
    EXPECT_EQ(term_index(1, 0), 1);
    EXPECT_EQ(term_index(0, 1), 2);
    EXPECT_EQ(term_index(2, 0), 3);
    EXPECT_EQ(term_index(1, 1), 4);
    EXPECT_EQ(term_index(0, 2), 5);
    EXPECT_EQ(term_index(3, 0), 6);
    EXPECT_EQ(term_index(0, 3), 9);
    EXPECT_EQ(terms_for_order(0), 1);
    EXPECT_EQ(terms_for_order(1), 3);
    EXPECT_EQ(terms_for_order(3), 10);
}

TEST(Poly, HornerMatchesMonomialSum) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-20, 20);
    for (int t = 0; t < 200; ++t) {
        const Cubic p = random_cubic(rng);
        const double x = u(rng), y = u(rng);
        EXPECT_NEAR(p(x, y), brute(p, x, y), 1e-9 * (1 + std::abs(brute(p, x, y))));
    }
}

TEST(Poly, ShiftedIsTranslation) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int t = 0; t < 100; ++t) {
        const Cubic p = random_cubic(rng);
        const double x0 = u(rng), y0 = u(rng), x = u(rng), y = u(rng);
        const Cubic q = shifted(p, x0, y0);
        EXPECT_NEAR(q(x, y), p(x + x0, y + y0), 1e-8 * (1 + std::abs(p(x + x0, y + y0))));
    }
}

TEST(Poly, ComposeWithLinearFormsIsExact) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int t = 0; t < 100; ++t) {
        const Cubic p = random_cubic(rng);
        const Cubic a = linear_form(u(rng), u(rng), u(rng)), b = linear_form(u(rng), u(rng), u(rng));
        const Cubic q = compose(p, a, b);
        const double x = u(rng), y = u(rng);
        const double want = p(a(x, y), b(x, y));
        EXPECT_NEAR(q(x, y), want, 1e-9 * (1 + std::abs(want)));
    }
}

TEST(Poly, MultiplyTruncatedDropsHighDegrees) {
    // (1 + x)(1 + y) and x^2 * y^2 (degree 4, dropped).
    const Cubic a = linear_form(1, 1, 0), b = linear_form(1, 0, 1);
    const Cubic ab = multiply_truncated(a, b);
    EXPECT_EQ(ab[0], 1);
    EXPECT_EQ(ab[1], 1);
    EXPECT_EQ(ab[2], 1);
    EXPECT_EQ(ab[4], 1);
    Cubic x2, y2;
    x2[term_index(2, 0)] = 1;
    y2[term_index(0, 2)] = 1;
    EXPECT_EQ(multiply_truncated(x2, y2), Cubic{});
}

TEST(Poly, Degree) {
    Cubic p;
    EXPECT_EQ(p.degree(), 0);
    p[term_index(1, 1)] = 2;
    EXPECT_EQ(p.degree(), 2);
    p[term_index(1, 2)] = 1e-12;
    EXPECT_EQ(p.degree(), 3);
    EXPECT_EQ(p.degree(1e-9), 2);
}

TEST(Poly, Truncate) {
    std::mt19937_64 rng(4);
    PolyModel m{3, {random_cubic(rng), random_cubic(rng)}};
    const PolyModel t = truncate(m, 1);
    EXPECT_EQ(t.order, 1);
    for (const Cubic& b : t.bands)
        for (int i = 3; i < kTerms; ++i) EXPECT_EQ(b[i], 0.0);
    EXPECT_EQ(t.bands[1][2], m.bands[1][2]);
}
