#include "viseme/mask.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace viseme {

double mask_sigma(const DomainPose& pose, double area) {
    return std::sqrt(std::max(0.0, pose.scale / area) + 1.0 / 12.0);
}

namespace {

struct Frame {
    double xg, yg, co, si, sigma;
    void to_local(double x, double y, double* u, double* v) const {
        const double dx = x - xg, dy = y - yg;
        *u = (co * dx + si * dy) / sigma;
        *v = (-si * dx + co * dy) / sigma;
    }
};

Frame make_frame(const DomainPose& pose, double area) {
    return {pose.xg, pose.yg, std::cos(pose.theta), std::sin(pose.theta), mask_sigma(pose, area)};
}

void put_sym(std::vector<std::uint8_t>& out, std::uint32_t& n, int s) {
    if (n % 4 == 0) out.push_back(0);
    out.back() |= static_cast<std::uint8_t>(s << (6 - 2 * (n % 4)));
    ++n;
}

}  // namespace

std::vector<std::uint8_t> quadtree_encode(const std::vector<std::uint8_t>& grid, int m, std::uint32_t* symbols) {
    const int n = 1 << m;
    if (grid.size() != static_cast<std::size_t>(n) * n) throw std::invalid_argument("mask grid size mismatch");
    std::vector<std::uint32_t> sat(static_cast<std::size_t>(n + 1) * (n + 1), 0);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            sat[(y + 1) * (n + 1) + x + 1] = grid[y * n + x] + sat[y * (n + 1) + x + 1] + sat[(y + 1) * (n + 1) + x] -
                                             sat[y * (n + 1) + x];
    auto sum = [&](int x0, int y0, int s) {
        return sat[(y0 + s) * (n + 1) + x0 + s] - sat[y0 * (n + 1) + x0 + s] - sat[(y0 + s) * (n + 1) + x0] +
               sat[y0 * (n + 1) + x0];
    };
    std::vector<std::uint8_t> out;
    std::uint32_t count = 0;
    std::function<void(int, int, int)> rec = [&](int x0, int y0, int s) {
        const std::uint32_t v = sum(x0, y0, s);
        if (v == 0) {
            put_sym(out, count, 1);
        } else if (v == static_cast<std::uint32_t>(s) * s) {
            put_sym(out, count, 2);
        } else {
            put_sym(out, count, 0);
            const int h = s / 2;
            rec(x0, y0, h);
            rec(x0 + h, y0, h);
            rec(x0, y0 + h, h);
            rec(x0 + h, y0 + h, h);
        }
    };
    rec(0, 0, n);
    *symbols = count;
    return out;
}

std::vector<std::uint8_t> quadtree_decode(std::span<const std::uint8_t> stream, std::uint32_t symbols, int m) {
    if (m < 0 || m > 12) throw std::invalid_argument("mask resolution out of range");
    const int n = 1 << m;
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(n) * n, 0);
    std::uint32_t pos = 0;
    auto next = [&]() -> int {
        if (pos >= symbols || pos / 4 >= stream.size()) throw std::runtime_error("truncated mask stream");
        const int s = (stream[pos / 4] >> (6 - 2 * (pos % 4))) & 3;
        ++pos;
        return s;
    };
    std::function<void(int, int, int)> rec = [&](int x0, int y0, int s) {
        const int sym = next();
        if (sym == 2) {
            for (int y = y0; y < y0 + s; ++y) std::fill_n(grid.begin() + y * n + x0, s, 1);
        } else if (sym == 0) {
            if (s == 1) throw std::runtime_error("mask stream splits a unit cell");
            const int h = s / 2;
            rec(x0, y0, h);
            rec(x0 + h, y0, h);
            rec(x0, y0 + h, h);
            rec(x0 + h, y0 + h, h);
        } else if (sym != 1) {
            throw std::runtime_error("invalid mask symbol");
        }
    };
    rec(0, 0, n);
    if (pos != symbols) throw std::runtime_error("trailing mask symbols");
    return grid;
}

DomainMask encode_mask(std::span<const Pixel> domain, const DomainPose& pose, double area, int min_m, int max_m) {
    if (domain.empty()) throw std::invalid_argument("mask of an empty domain");
    const Frame f = make_frame(pose, area);
    double e = 0.0;
    for (const Pixel& p : domain)
        for (int c = 0; c < 4; ++c) {
            double u, v;
            f.to_local(p.x + ((c & 1) ? 0.5 : -0.5), p.y + ((c & 2) ? 0.5 : -0.5), &u, &v);
            e = std::max({e, std::abs(u), std::abs(v)});
        }
    e *= 1.0 + 1e-9;
    DomainMask mask;
    mask.extent = e;
    const double side_px = 2.0 * e * f.sigma;
    const int want = static_cast<int>(std::ceil(std::log2(std::max(1.0, side_px / 0.5))));
    mask.m = std::clamp(want, min_m, max_m);
    const int n = 1 << mask.m;
    std::vector<std::uint8_t> grid(static_cast<std::size_t>(n) * n, 0);
    auto cell = [&](double t) { return std::clamp(static_cast<int>(std::floor((t + e) / (2.0 * e) * n)), 0, n - 1); };
    static constexpr double kOffsets[5] = {-0.4, -0.2, 0.0, 0.2, 0.4};
    for (const Pixel& p : domain)
        for (double oy : kOffsets)
            for (double ox : kOffsets) {
                double u, v;
                f.to_local(p.x + ox, p.y + oy, &u, &v);
                grid[cell(v) * n + cell(u)] = 1;
            }
    mask.stream = quadtree_encode(grid, mask.m, &mask.symbols);
    return mask;
}

std::vector<Pixel> rasterize_mask(const DomainMask& mask, const DomainPose& pose, double area, int width,
                                  int height) {
    const Frame f = make_frame(pose, area);
    const auto grid = quadtree_decode(mask.stream, mask.symbols, mask.m);
    const int n = 1 << mask.m;
    const double e = mask.extent;
    const double reach = e * f.sigma * std::sqrt(2.0) + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(f.xg - reach)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(f.xg + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(f.yg - reach)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(f.yg + reach)));
    std::vector<Pixel> out;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) {
            double u, v;
            f.to_local(x, y, &u, &v);
            if (std::abs(u) >= e || std::abs(v) >= e) continue;
            const int gx = std::clamp(static_cast<int>(std::floor((u + e) / (2.0 * e) * n)), 0, n - 1);
            const int gy = std::clamp(static_cast<int>(std::floor((v + e) / (2.0 * e) * n)), 0, n - 1);
            if (grid[gy * n + gx]) out.push_back({x, y});
        }
    return out;
}

}  // namespace viseme
