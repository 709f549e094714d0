#include <algorithm>
#include <cmath>

#include "viseme/kernels.hpp"

namespace viseme::kernels::serial {

SampleSums accumulate(const MultiImage& img, std::span<const std::uint32_t> idx) {
    SampleSums s(img.bands());
    for (std::uint32_t k : idx) {
        const std::int64_t x = k % img.width(), y = k / img.width();
        s.n += 1;
        s.sx += x;
        s.sy += y;
        s.sxx += x * x;
        s.sxy += x * y;
        s.syy += y * y;
        s.sxxx += x * x * x;
        s.sxxy += x * x * y;
        s.sxyy += x * y * y;
        s.syyy += y * y * y;
        for (int b = 0; b < img.bands(); ++b) {
            const std::int64_t z = img.sample(b, k);
            s.sz[b] += z;
            s.szx[b] += z * x;
            s.szy[b] += z * y;
        }
    }
    return s;
}

double residuals(const MultiImage& img, std::span<const std::uint32_t> idx,
                 const PolyModel& model, std::span<double> err) {
    double m = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double x = idx[i] % img.width(), y = idx[i] / img.width();
        double e = 0.0;
        for (int b = 0; b < img.bands(); ++b)
            e = std::max(e, std::abs(img.sample(b, idx[i]) - model.bands[b](x, y)));
        if (!err.empty()) err[i] = e;
        m = std::max(m, e);
    }
    return m;
}

NormalSystem normal_system(const MultiImage& img, std::span<const std::uint32_t> idx, int order,
                           double cx, double cy, double s) {
    const int t = terms_for_order(order);
    NormalSystem ns;
    ns.terms = t;
    ns.ata.assign(t * t, 0.0);
    ns.atz.assign(img.bands() * t, 0.0);
    for (std::uint32_t k : idx) {
        const double u = (static_cast<double>(k % img.width()) - cx) / s;
        const double v = (static_cast<double>(k / img.width()) - cy) / s;
        double m[kTerms];
        for (int i = 0; i < t; ++i)
            m[i] = std::pow(u, kExponents[i][0]) * std::pow(v, kExponents[i][1]);
        for (int r = 0; r < t; ++r)
            for (int c = 0; c < t; ++c) ns.ata[r * t + c] += m[r] * m[c];
        for (int b = 0; b < img.bands(); ++b)
            for (int r = 0; r < t; ++r) ns.atz[b * t + r] += m[r] * img.sample(b, k);
    }
    return ns;
}

std::vector<std::uint8_t> negative_side(const MultiImage& img, std::span<const std::uint32_t> idx,
                                        double a, double b, double c) {
    std::vector<std::uint8_t> neg;
    neg.reserve(idx.size());
    for (std::uint32_t k : idx) {
        const double x = k % img.width(), y = k / img.width();
        neg.push_back(a * x + b * y + c < 0.0 ? 1 : 0);
    }
    return neg;
}

}  // namespace viseme::kernels::serial
