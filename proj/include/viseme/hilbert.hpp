#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "viseme/segmenter.hpp"

namespace viseme {

// The four U-shaped base patterns. A visits (0,0),(0,1),(1,1),(1,0); the
// others are its images under the transpose, the anti-transpose and the
// half turn, so the four are the 90 degree rotations of one U.
enum class HilbertPattern : std::uint8_t { A = 0, B = 1, C = 2, D = 3 };

struct PatternRule {
    std::array<std::array<int, 2>, 4> order;  // quadrant (i, j) visited at each step
    std::array<HilbertPattern, 4> child;      // pattern of the quadrant visited at each step
};

const PatternRule& pattern_rule(HilbertPattern p);

// Cell (i, j) = (column, row) of index d on the 2^r x 2^r grid.
std::pair<std::uint32_t, std::uint32_t> hilbert_d2xy(int r, std::uint64_t index);
std::uint64_t hilbert_xy2d(int r, std::uint32_t i, std::uint32_t j);

// k-dimensional curve (Skilling's transposed-index construction).
std::vector<std::uint32_t> hilbert_kd(int k, int r, std::uint64_t index);
std::uint64_t hilbert_kd_index(int k, int r, std::span<const std::uint32_t> coords);

struct Box {
    double x0 = 0.0, y0 = 0.0, x1 = 1.0, y1 = 1.0;
};

Box bounding_box(std::span<const Point2> points);

// Permutation visiting the points in Hilbert order of their 2^r grid cells;
// ties keep the input order.
std::vector<std::size_t> order_points(std::span<const Point2> points, int r, const Box& box);
inline std::vector<std::size_t> order_points(std::span<const Point2> points, int r) {
    return order_points(points, r, bounding_box(points));
}

double path_length(std::span<const Point2> points, std::span<const std::size_t> order);

}  // namespace viseme
