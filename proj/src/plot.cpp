#include "viseme/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "viseme/hilbert.hpp"

namespace viseme {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string svg_open(double w, double h) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w) + "\" height=\"" + fmt(h) +
           "\" viewBox=\"0 0 " + fmt(w) + " " + fmt(h) + "\">\n";
}

}  // namespace

std::string hilbert_curve_svg(int r, double cell) {
    if (r < 1 || r > 10) throw std::out_of_range("hilbert plot resolution must be in [1, 10]");
    const std::uint64_t n = 1ull << (2 * r);
    const double side = cell * static_cast<double>(1u << r);
    std::string s = svg_open(side, side);
    s += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (std::uint64_t d = 0; d < n; ++d) {
        const auto [i, j] = hilbert_d2xy(r, d);
        if (d) s += ' ';
        // Row 0 at the bottom, as in the usual drawings of the base pattern.
        s += fmt((i + 0.5) * cell) + "," + fmt(side - (j + 0.5) * cell);
    }
    s += "\"/>\n</svg>\n";
    return s;
}

std::string point_tour_svg(std::span<const Point2> points, std::span<const std::size_t> order) {
    if (points.empty()) throw std::invalid_argument("no points to plot");
    const Box b = bounding_box(points);
    const double margin = 10.0, size = 400.0;
    const double span = std::max({b.x1 - b.x0, b.y1 - b.y0, 1e-9});
    auto px = [&](const Point2& p) {
        return fmt(margin + (p.x - b.x0) / span * size) + "," + fmt(margin + size - (p.y - b.y0) / span * size);
    };
    std::string s = svg_open(size + 2 * margin, size + 2 * margin);
    s += "<polyline fill=\"none\" stroke=\"blue\" stroke-width=\"1\" points=\"";
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k) s += ' ';
        if (order[k] >= points.size()) throw std::out_of_range("tour index out of range");
        s += px(points[order[k]]);
    }
    s += "\"/>\n";
    for (const Point2& p : points) {
        const std::string c = px(p);
        const auto comma = c.find(',');
        s += "<circle cx=\"" + c.substr(0, comma) + "\" cy=\"" + c.substr(comma + 1) + "\" r=\"2\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

std::vector<Point2> parse_points(const std::string& text) {
    std::istringstream in(text);
    std::vector<Point2> out;
    double x, y;
    while (in >> x >> y) out.push_back({x, y});
    if (!in.eof()) throw std::runtime_error("malformed points file");
    return out;
}

MultiImage segmentation_overlay(const MultiImage& img, std::span<const std::uint32_t> labels) {
    const int w = img.width(), h = img.height();
    if (labels.size() != img.pixel_count()) throw std::invalid_argument("label map size mismatch");
    MultiImage out(w, h, 3, 256);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::uint32_t l = labels[static_cast<std::size_t>(y) * w + x];
            const bool edge = (x + 1 < w && labels[static_cast<std::size_t>(y) * w + x + 1] != l) ||
                              (y + 1 < h && labels[static_cast<std::size_t>(y + 1) * w + x] != l);
            for (int c = 0; c < 3; ++c) {
                const std::uint8_t v = img.at(img.bands() >= 3 ? c : 0, x, y);
                out.set(c, x, y, edge ? (c == 0 ? 255 : 0) : v);
            }
        }
    return out;
}

MultiImage label_map_image(int width, int height, std::span<const std::uint32_t> labels) {
    if (labels.size() != static_cast<std::size_t>(width) * height) throw std::invalid_argument("label map size mismatch");
    MultiImage out(width, height, 3, 256);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::uint32_t v = labels[static_cast<std::size_t>(y) * width + x] * 2654435761u;
            v ^= v >> 15;
            for (int c = 0; c < 3; ++c) out.set(c, x, y, static_cast<std::uint8_t>(64 + ((v >> (8 * c)) & 0xff) % 192));
        }
    return out;
}

}  // namespace viseme
