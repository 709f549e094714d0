#include "viseme/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace viseme::kernels {

SampleSums& SampleSums::operator+=(const SampleSums& o) {
    n += o.n;
    sx += o.sx;
    sy += o.sy;
    sxx += o.sxx;
    sxy += o.sxy;
    syy += o.syy;
    sxxx += o.sxxx;
    sxxy += o.sxxy;
    sxyy += o.sxyy;
    syyy += o.syyy;
    for (std::size_t b = 0; b < sz.size(); ++b) {
        sz[b] += o.sz[b];
        szx[b] += o.szx[b];
        szy[b] += o.szy[b];
    }
    return *this;
}

namespace {

std::ptrdiff_t block_count(std::size_t n) { return static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock); }

bool go_parallel(std::ptrdiff_t blocks) { return blocks > 1 && !omp_in_parallel(); }

void monomials(double u, double v, int terms, double* m) {
    m[0] = 1.0;
    if (terms <= 1) return;
    m[1] = u;
    m[2] = v;
    if (terms <= 3) return;
    m[3] = u * u;
    m[4] = u * v;
    m[5] = v * v;
    if (terms <= 6) return;
    m[6] = m[3] * u;
    m[7] = m[3] * v;
    m[8] = u * m[5];
    m[9] = m[5] * v;
}

}  // namespace

SampleSums accumulate(const MultiImage& img, std::span<const std::uint32_t> idx) {
    const int bands = img.bands();
    const std::int64_t w = img.width();
    const std::ptrdiff_t nb = block_count(idx.size());
    std::vector<SampleSums> part(nb, SampleSums(bands));
#pragma omp parallel for schedule(static) if (go_parallel(nb))
    for (std::ptrdiff_t blk = 0; blk < nb; ++blk) {
        SampleSums& s = part[blk];
        const std::size_t lo = blk * kBlock, hi = std::min(idx.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::int64_t x = idx[i] % w, y = idx[i] / w;
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
            for (int b = 0; b < bands; ++b) {
                const std::int64_t z = img.sample(b, idx[i]);
                s.sz[b] += z;
                s.szx[b] += z * x;
                s.szy[b] += z * y;
            }
        }
    }
    SampleSums total(bands);
    for (const SampleSums& s : part) total += s;
    return total;
}

double residuals(const MultiImage& img, std::span<const std::uint32_t> idx,
                 const PolyModel& model, std::span<double> err) {
    const int bands = img.bands();
    const int w = img.width();
    const std::ptrdiff_t nb = block_count(idx.size());
    std::vector<double> part(nb, 0.0);
#pragma omp parallel for schedule(static) if (go_parallel(nb))
    for (std::ptrdiff_t blk = 0; blk < nb; ++blk) {
        double m = 0.0;
        const std::size_t lo = blk * kBlock, hi = std::min(idx.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            const double x = idx[i] % w, y = idx[i] / w;
            double e = 0.0;
            for (int b = 0; b < bands; ++b)
                e = std::max(e, std::abs(img.sample(b, idx[i]) - model.bands[b](x, y)));
            if (!err.empty()) err[i] = e;
            m = std::max(m, e);
        }
        part[blk] = m;
    }
    double m = 0.0;
    for (double v : part) m = std::max(m, v);
    return m;
}

NormalSystem normal_system(const MultiImage& img, std::span<const std::uint32_t> idx, int order,
                           double cx, double cy, double s) {
    const int bands = img.bands();
    const int t = terms_for_order(order);
    const int w = img.width();
    const std::ptrdiff_t nb = block_count(idx.size());
    std::vector<NormalSystem> part(nb);
#pragma omp parallel for schedule(static) if (go_parallel(nb))
    for (std::ptrdiff_t blk = 0; blk < nb; ++blk) {
        NormalSystem& ns = part[blk];
        ns.terms = t;
        ns.ata.assign(t * t, 0.0);
        ns.atz.assign(bands * t, 0.0);
        double m[kTerms];
        const std::size_t lo = blk * kBlock, hi = std::min(idx.size(), lo + kBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            const double u = (static_cast<double>(idx[i] % w) - cx) / s;
            const double v = (static_cast<double>(idx[i] / w) - cy) / s;
            monomials(u, v, t, m);
            for (int r = 0; r < t; ++r)
                for (int c = 0; c <= r; ++c) ns.ata[r * t + c] += m[r] * m[c];
            for (int b = 0; b < bands; ++b) {
                const double z = img.sample(b, idx[i]);
                for (int r = 0; r < t; ++r) ns.atz[b * t + r] += m[r] * z;
            }
        }
    }
    NormalSystem out;
    out.terms = t;
    out.ata.assign(t * t, 0.0);
    out.atz.assign(bands * t, 0.0);
    for (const NormalSystem& p : part) {
        for (int i = 0; i < t * t; ++i) out.ata[i] += p.ata[i];
        for (int i = 0; i < bands * t; ++i) out.atz[i] += p.atz[i];
    }
    for (int r = 0; r < t; ++r)
        for (int c = r + 1; c < t; ++c) out.ata[r * t + c] = out.ata[c * t + r];
    return out;
}

std::vector<std::uint8_t> negative_side(const MultiImage& img, std::span<const std::uint32_t> idx,
                                        double a, double b, double c) {
    std::vector<std::uint8_t> neg(idx.size());
    const int w = img.width();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(idx.size());
#pragma omp parallel for schedule(static) if (n > static_cast<std::ptrdiff_t>(kBlock) && !omp_in_parallel())
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double x = idx[i] % w, y = idx[i] / w;
        neg[i] = a * x + b * y + c < 0.0 ? 1 : 0;
    }
    return neg;
}

}  // namespace viseme::kernels
