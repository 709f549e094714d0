#include "viseme/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace viseme {

namespace {

// Patterns as transforms of A on the unit square: identity, transpose,
// anti-transpose, half turn. Their composition table is XOR on the ids.
std::array<int, 2> apply(HilbertPattern p, std::array<int, 2> q) {
    switch (p) {
        case HilbertPattern::A: return q;
        case HilbertPattern::B: return {q[1], q[0]};
        case HilbertPattern::C: return {1 - q[1], 1 - q[0]};
        case HilbertPattern::D: return {1 - q[0], 1 - q[1]};
    }
    return q;
}

HilbertPattern compose(HilbertPattern a, HilbertPattern b) {
    return static_cast<HilbertPattern>(static_cast<int>(a) ^ static_cast<int>(b));
}

constexpr std::array<std::array<int, 2>, 4> kOrderA{{{0, 0}, {0, 1}, {1, 1}, {1, 0}}};
constexpr std::array<HilbertPattern, 4> kChildA{HilbertPattern::B, HilbertPattern::A, HilbertPattern::A,
                                                HilbertPattern::C};

std::array<PatternRule, 4> make_rules() {
    std::array<PatternRule, 4> rules{};
    for (int p = 0; p < 4; ++p) {
        const auto pat = static_cast<HilbertPattern>(p);
        for (int s = 0; s < 4; ++s) {
            rules[p].order[s] = apply(pat, kOrderA[s]);
            rules[p].child[s] = compose(pat, kChildA[s]);
        }
    }
    return rules;
}

const std::array<PatternRule, 4>& rules() {
    static const std::array<PatternRule, 4> r = make_rules();
    return r;
}

void check_r(int r) {
    if (r < 1 || r > 31) throw std::out_of_range("hilbert resolution must be in [1, 31]");
}

}  // namespace

const PatternRule& pattern_rule(HilbertPattern p) { return rules()[static_cast<int>(p)]; }

std::pair<std::uint32_t, std::uint32_t> hilbert_d2xy(int r, std::uint64_t index) {
    check_r(r);
    if (index >> (2 * r)) throw std::out_of_range("hilbert index out of range");
    HilbertPattern p = HilbertPattern::A;
    std::uint32_t i = 0, j = 0;
    for (int l = r - 1; l >= 0; --l) {
        const int step = static_cast<int>((index >> (2 * l)) & 3u);
        const PatternRule& rule = pattern_rule(p);
        i |= static_cast<std::uint32_t>(rule.order[step][0]) << l;
        j |= static_cast<std::uint32_t>(rule.order[step][1]) << l;
        p = rule.child[step];
    }
    return {i, j};
}

std::uint64_t hilbert_xy2d(int r, std::uint32_t i, std::uint32_t j) {
    check_r(r);
    if ((i >> r) || (j >> r)) throw std::out_of_range("hilbert cell out of range");
    HilbertPattern p = HilbertPattern::A;
    std::uint64_t d = 0;
    for (int l = r - 1; l >= 0; --l) {
        const std::array<int, 2> q{static_cast<int>((i >> l) & 1u), static_cast<int>((j >> l) & 1u)};
        const PatternRule& rule = pattern_rule(p);
        int step = 0;
        while (rule.order[step] != q) ++step;
        d = (d << 2) | static_cast<std::uint64_t>(step);
        p = rule.child[step];
    }
    return d;
}

namespace {

void check_kd(int k, int r) {
    if (k < 1 || r < 1 || k * r > 64 || r > 32) throw std::out_of_range("hilbert dimensions out of range");
}

}  // namespace

std::vector<std::uint32_t> hilbert_kd(int k, int r, std::uint64_t index) {
    check_kd(k, r);
    if (k * r < 64 && (index >> (k * r))) throw std::out_of_range("hilbert index out of range");
    // Distribute the index bits into the transposed form, most significant first.
    std::vector<std::uint32_t> x(k, 0);
    for (int b = 0; b < k * r; ++b) {
        const std::uint32_t bit = static_cast<std::uint32_t>((index >> (k * r - 1 - b)) & 1u);
        x[b % k] = (x[b % k] << 1) | bit;
    }
    const std::uint32_t n = 2u << (r - 1);
    std::uint32_t t = x[k - 1] >> 1;
    for (int i = k - 1; i > 0; --i) x[i] ^= x[i - 1];
    x[0] ^= t;
    for (std::uint32_t q = 2; q != n; q <<= 1) {
        const std::uint32_t p = q - 1;
        for (int i = k - 1; i >= 0; --i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
    return x;
}

std::uint64_t hilbert_kd_index(int k, int r, std::span<const std::uint32_t> coords) {
    check_kd(k, r);
    if (static_cast<int>(coords.size()) != k) throw std::invalid_argument("coordinate count mismatch");
    std::vector<std::uint32_t> x(coords.begin(), coords.end());
    for (std::uint32_t c : x)
        if (r < 32 && (c >> r)) throw std::out_of_range("hilbert cell out of range");
    const std::uint32_t m = 1u << (r - 1);
    for (std::uint32_t q = m; q > 1; q >>= 1) {
        const std::uint32_t p = q - 1;
        for (int i = 0; i < k; ++i) {
            if (x[i] & q) {
                x[0] ^= p;
            } else {
                const std::uint32_t t = (x[0] ^ x[i]) & p;
                x[0] ^= t;
                x[i] ^= t;
            }
        }
    }
    for (int i = 1; i < k; ++i) x[i] ^= x[i - 1];
    std::uint32_t t = 0;
    for (std::uint32_t q = m; q > 1; q >>= 1)
        if (x[k - 1] & q) t ^= q - 1;
    for (int i = 0; i < k; ++i) x[i] ^= t;
    std::uint64_t index = 0;
    for (int b = 0; b < r; ++b)
        for (int d = 0; d < k; ++d) index = (index << 1) | ((x[d] >> (r - 1 - b)) & 1u);
    return index;
}

Box bounding_box(std::span<const Point2> points) {
    Box b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Point2& p : points) {
        b.x0 = std::min(b.x0, p.x);
        b.y0 = std::min(b.y0, p.y);
        b.x1 = std::max(b.x1, p.x);
        b.y1 = std::max(b.y1, p.y);
    }
    if (points.empty()) b = {};
    return b;
}

std::vector<std::size_t> order_points(std::span<const Point2> points, int r, const Box& box) {
    check_r(r);
    const double cells = std::ldexp(1.0, r);
    const std::uint32_t top = (1u << r) - 1;
    auto cell = [&](double v, double lo, double hi) -> std::uint32_t {
        if (!(hi > lo)) return 0;
        const double t = std::floor((v - lo) / (hi - lo) * cells);
        if (!(t > 0.0)) return 0;
        return t >= top ? top : static_cast<std::uint32_t>(t);
    };
    std::vector<std::uint64_t> key(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        key[i] = hilbert_xy2d(r, cell(points[i].x, box.x0, box.x1), cell(points[i].y, box.y0, box.y1));
    std::vector<std::size_t> perm(points.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return perm;
}

double path_length(std::span<const Point2> points, std::span<const std::size_t> order) {
    double len = 0.0;
    for (std::size_t i = 1; i < order.size(); ++i)
        len += std::hypot(points[order[i]].x - points[order[i - 1]].x, points[order[i]].y - points[order[i - 1]].y);
    return len;
}

}  // namespace viseme
