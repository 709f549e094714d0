#pragma once

#include <array>
#include <vector>

#include "viseme/poly.hpp"
#include "viseme/segmenter.hpp"

namespace viseme {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Frame of the tangent plane at the gravity centre. Coordinates are ordered
// (z, x, y); new = R * (z - z0, x - cx, y - cy).
struct TangentFrame {
    Point2 center;
    double z0 = 0.0;
    double theta_xz = 0.0;  // atan(a_x)
    double theta_yz = 0.0;  // atan(a_y)
    Mat3 r{};
};

TangentFrame tangent_frame(double ax, double ay, Point2 center, double z0 = 0.0);

// Graph z = g(x, y) with g(0, 0) = 0, re-expressed in the rotated frame
// new = m * old as new_z = h(new_x, new_y), as a truncated power series.
Cubic transport_graph(const Cubic& g, const Mat3& m);

// Tangent-frame form of a recentred band: zero constant and gradient.
Cubic reduce_to_tangent(const Cubic& recentred, const TangentFrame& frame);

struct ReducedQuadric {
    double lambda_u = 0.0, lambda_v = 0.0;
    double theta_xu = 0.0;  // [0, 2 pi)
    std::array<double, 4> cubic{};  // a_u3, a_u2v, a_uv2, a_v3
    double cross_term = 0.0;  // uv coefficient after rotation, ~0
    bool flat = false;
};

ReducedQuadric reduce_quadric(const Cubic& tangent_model, double flat_tol);

struct BandPose {
    double z0 = 0.0;
    double theta_xz = 0.0, theta_yz = 0.0;
    double theta_xu = 0.0;
    double lambda_u = 0.0;
};

inline constexpr int kRenderDims = 5;

struct BandRendering {
    // lambda_v / lambda_u, then the four cubic terms over lambda_u.
    std::array<double, kRenderDims> invariants{};
    BandPose pose;
    bool flat = false;
};

struct RenderingDescriptor {
    std::vector<BandRendering> bands;
};

BandRendering band_rendering(const Cubic& model, Point2 center, double flat_tol);
RenderingDescriptor rendering_descriptor(const PolyModel& model, Point2 center, int levels);
inline RenderingDescriptor rendering_descriptor(const DecompNode& node, int levels) {
    return rendering_descriptor(node.model, node.center, levels);
}

// Inverse chain: invariants and pose back to an image-plane cubic.
Cubic reconstruct_band(const std::array<double, kRenderDims>& invariants, const BandPose& pose,
                       bool flat, Point2 center);

}  // namespace viseme
