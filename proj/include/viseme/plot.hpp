#pragma once

#include <span>
#include <string>
#include <vector>

#include "viseme/image.hpp"
#include "viseme/segmenter.hpp"

namespace viseme {

std::string hilbert_curve_svg(int r, double cell = 8.0);
std::string point_tour_svg(std::span<const Point2> points, std::span<const std::size_t> order);

// Whitespace-separated "x y" pairs, one point per line.
std::vector<Point2> parse_points(const std::string& text);

// RGB copy of the image (first band as grey when it has fewer than three)
// with region boundary pixels painted red.
MultiImage segmentation_overlay(const MultiImage& img, std::span<const std::uint32_t> labels);

// RGB image with a deterministic colour per label.
MultiImage label_map_image(int width, int height, std::span<const std::uint32_t> labels);

}  // namespace viseme
