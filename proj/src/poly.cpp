#include "viseme/poly.hpp"

#include <algorithm>
#include <cmath>

namespace viseme {

double Cubic::operator()(double x, double y) const {
    // Horner in y for each power of x.
    const double t0 = c[0] + y * (c[2] + y * (c[5] + y * c[9]));
    const double t1 = c[1] + y * (c[4] + y * c[8]);
    const double t2 = c[3] + y * c[7];
    const double t3 = c[6];
    return t0 + x * (t1 + x * (t2 + x * t3));
}

int Cubic::degree(double tol) const {
    for (int d = 3; d >= 1; --d)
        for (int i = terms_for_order(d - 1); i < terms_for_order(d); ++i)
            if (std::abs(c[i]) > tol) return d;
    return 0;
}

Cubic operator+(const Cubic& a, const Cubic& b) {
    Cubic r;
    for (int i = 0; i < kTerms; ++i) r.c[i] = a.c[i] + b.c[i];
    return r;
}

Cubic operator-(const Cubic& a, const Cubic& b) {
    Cubic r;
    for (int i = 0; i < kTerms; ++i) r.c[i] = a.c[i] - b.c[i];
    return r;
}

Cubic operator*(double s, const Cubic& a) {
    Cubic r;
    for (int i = 0; i < kTerms; ++i) r.c[i] = s * a.c[i];
    return r;
}

Cubic multiply_truncated(const Cubic& a, const Cubic& b) {
    Cubic r;
    for (int i = 0; i < kTerms; ++i) {
        if (a.c[i] == 0.0) continue;
        for (int j = 0; j < kTerms; ++j) {
            const int px = kExponents[i][0] + kExponents[j][0];
            const int py = kExponents[i][1] + kExponents[j][1];
            if (px + py > 3) continue;
            r.c[term_index(px, py)] += a.c[i] * b.c[j];
        }
    }
    return r;
}

Cubic linear_form(double c0, double cx, double cy) {
    Cubic r;
    r.c[0] = c0;
    r.c[1] = cx;
    r.c[2] = cy;
    return r;
}

Cubic compose(const Cubic& p, const Cubic& u, const Cubic& v) {
    Cubic one;
    one.c[0] = 1.0;
    std::array<Cubic, 4> up{one, u, {}, {}};
    std::array<Cubic, 4> vp{one, v, {}, {}};
    for (int k = 2; k <= 3; ++k) {
        up[k] = multiply_truncated(up[k - 1], u);
        vp[k] = multiply_truncated(vp[k - 1], v);
    }
    Cubic r;
    for (int i = 0; i < kTerms; ++i) {
        if (p.c[i] == 0.0) continue;
        r = r + p.c[i] * multiply_truncated(up[kExponents[i][0]], vp[kExponents[i][1]]);
    }
    return r;
}

Cubic shifted(const Cubic& p, double x0, double y0) {
    // Exact binomial expansion: degree is preserved, nothing is truncated.
    static constexpr int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
    Cubic r;
    for (int i = 0; i < kTerms; ++i) {
        const int px = kExponents[i][0], py = kExponents[i][1];
        if (p.c[i] == 0.0) continue;
        for (int a = 0; a <= px; ++a)
            for (int b = 0; b <= py; ++b)
                r.c[term_index(a, b)] += p.c[i] * binom[px][a] * binom[py][b] *
                                         std::pow(x0, px - a) * std::pow(y0, py - b);
    }
    return r;
}

PolyModel recentre_cubic(const PolyModel& model, double cx, double cy) {
    PolyModel r{model.order, {}};
    r.bands.reserve(model.bands.size());
    for (const Cubic& b : model.bands) r.bands.push_back(shifted(b, cx, cy));
    return r;
}

PolyModel truncate(const PolyModel& model, int order) {
    PolyModel r = model;
    r.order = std::min(model.order, order);
    for (Cubic& b : r.bands)
        for (int i = terms_for_order(order); i < kTerms; ++i) b.c[i] = 0.0;
    return r;
}

}  // namespace viseme
