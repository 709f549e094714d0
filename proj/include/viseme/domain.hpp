#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace viseme {

struct Pixel {
    int x = 0;
    int y = 0;
    bool operator==(const Pixel&) const = default;
};

// Discrete sums of x^p y^q over a domain, p + q <= 3.
struct RawMoments {
    std::int64_t m0 = 0;
    std::int64_t mx = 0, my = 0;
    std::int64_t mx2 = 0, mxy = 0, my2 = 0;
    std::int64_t mx3 = 0, mx2y = 0, mxy2 = 0, my3 = 0;

    RawMoments& operator+=(const RawMoments& o);
    friend RawMoments operator+(RawMoments a, const RawMoments& b) { return a += b; }
    bool operator==(const RawMoments&) const = default;
    std::array<std::int64_t, 10> as_array() const;
    static RawMoments from_array(const std::array<std::int64_t, 10>& a);
};

RawMoments raw_moments(std::span<const Pixel> domain);
RawMoments raw_moments(int width, std::span<const std::uint32_t> raster_indices);

// Sums of X^p Y^q with X = x - x_G, Y = y - y_G (not divided by S).
struct CentralMoments {
    double s = 0.0;
    double xg = 0.0, yg = 0.0;
    double mx2 = 0.0, mxy = 0.0, my2 = 0.0;
    double mx3 = 0.0, mx2y = 0.0, mxy2 = 0.0, my3 = 0.0;
    bool isotropic = false;  // MX2 == MY2 and MXY == 0 exactly
};

CentralMoments center_moments(const RawMoments& m);

struct PrincipalMoments {
    double mu1sq = 0.0, mu2sq = 0.0;
    double theta = 0.0;  // [0, 2 pi)
    double mu1_3 = 0.0, mu1sq_u2 = 0.0, mu1_u2sq = 0.0, mu2_3 = 0.0;
    bool isotropic = false;
    bool symmetric = false;  // every order-3 moment vanished; theta kept in [0, pi)
};

// Moments of order 3 in axes rotated by theta (u1 = X cos + Y sin).
std::array<double, 4> rotate_third_order(const CentralMoments& c, double theta);

PrincipalMoments principal_moments(const CentralMoments& c);

struct DomainPose {
    double xg = 0.0, yg = 0.0;
    double theta = 0.0;
    double scale = 0.0;  // M(u1^2)
};

inline constexpr int kDomainDims = 5;

struct DomainDescriptor {
    DomainPose pose;
    double area = 0.0;
    // Eccentricity, then the four asymmetries
    // M(u1^3), M(u1^2 u2), M(u1 u2^2), M(u2^3), each times sqrt(S) / M(u1^2)^(3/2).
    std::array<double, kDomainDims> invariants{};
    bool isotropic = false;
    bool degenerate = false;  // single pixel or collinear
};

DomainDescriptor domain_descriptor(const RawMoments& m);
inline DomainDescriptor domain_descriptor(std::span<const Pixel> domain) {
    return domain_descriptor(raw_moments(domain));
}

}  // namespace viseme
