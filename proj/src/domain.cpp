#include "viseme/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "viseme/eigen2.hpp"

namespace viseme {

RawMoments& RawMoments::operator+=(const RawMoments& o) {
    m0 += o.m0;
    mx += o.mx;
    my += o.my;
    mx2 += o.mx2;
    mxy += o.mxy;
    my2 += o.my2;
    mx3 += o.mx3;
    mx2y += o.mx2y;
    mxy2 += o.mxy2;
    my3 += o.my3;
    return *this;
}

std::array<std::int64_t, 10> RawMoments::as_array() const {
    return {m0, mx, my, mx2, mxy, my2, mx3, mx2y, mxy2, my3};
}

RawMoments RawMoments::from_array(const std::array<std::int64_t, 10>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
}

namespace {

void add_pixel(RawMoments& m, std::int64_t x, std::int64_t y) {
    m.m0 += 1;
    m.mx += x;
    m.my += y;
    m.mx2 += x * x;
    m.mxy += x * y;
    m.my2 += y * y;
    m.mx3 += x * x * x;
    m.mx2y += x * x * y;
    m.mxy2 += x * y * y;
    m.my3 += y * y * y;
}

using i128 = __int128;

double ratio(i128 num, i128 den) {
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

}  // namespace

RawMoments raw_moments(std::span<const Pixel> domain) {
    RawMoments m;
    for (const Pixel& p : domain) add_pixel(m, p.x, p.y);
    return m;
}

RawMoments raw_moments(int width, std::span<const std::uint32_t> raster_indices) {
    RawMoments m;
    for (std::uint32_t k : raster_indices) add_pixel(m, k % width, k / width);
    return m;
}

CentralMoments center_moments(const RawMoments& m) {
    if (m.m0 <= 0) throw std::invalid_argument("moments of an empty domain");
    const i128 s = m.m0, sx = m.mx, sy = m.my;
    // S^(p+q-1) times the central sum is an exact integer.
    const i128 c20 = s * m.mx2 - sx * sx;
    const i128 c11 = s * m.mxy - sx * sy;
    const i128 c02 = s * m.my2 - sy * sy;
    const i128 c30 = s * s * m.mx3 - 3 * s * sx * m.mx2 + 2 * sx * sx * sx;
    const i128 c21 = s * s * m.mx2y - s * sy * m.mx2 - 2 * s * sx * m.mxy + 2 * sx * sx * sy;
    const i128 c12 = s * s * m.mxy2 - s * sx * m.my2 - 2 * s * sy * m.mxy + 2 * sy * sy * sx;
    const i128 c03 = s * s * m.my3 - 3 * s * sy * m.my2 + 2 * sy * sy * sy;
    CentralMoments c;
    c.s = static_cast<double>(m.m0);
    c.xg = ratio(sx, s);
    c.yg = ratio(sy, s);
    c.mx2 = ratio(c20, s);
    c.mxy = ratio(c11, s);
    c.my2 = ratio(c02, s);
    c.mx3 = ratio(c30, s * s);
    c.mx2y = ratio(c21, s * s);
    c.mxy2 = ratio(c12, s * s);
    c.my3 = ratio(c03, s * s);
    c.isotropic = c20 == c02 && c11 == 0;
    return c;
}

std::array<double, 4> rotate_third_order(const CentralMoments& c, double theta) {
    const double co = std::cos(theta), si = std::sin(theta);
    const double c2 = co * co, s2 = si * si;
    return {
        c2 * co * c.mx3 + 3 * c2 * si * c.mx2y + 3 * co * s2 * c.mxy2 + s2 * si * c.my3,
        -c2 * si * c.mx3 + (c2 * co - 2 * co * s2) * c.mx2y + (2 * c2 * si - s2 * si) * c.mxy2 +
            co * s2 * c.my3,
        co * s2 * c.mx3 + (s2 * si - 2 * c2 * si) * c.mx2y + (c2 * co - 2 * co * s2) * c.mxy2 +
            c2 * si * c.my3,
        -s2 * si * c.mx3 + 3 * s2 * co * c.mx2y - 3 * si * c2 * c.mxy2 + c2 * co * c.my3,
    };
}

PrincipalMoments principal_moments(const CentralMoments& c) {
    PrincipalMoments p;
    const Eigen2 e = cov_eigen(c.mx2, c.mxy, c.my2);
    p.mu1sq = e.lambda1;
    p.mu2sq = e.lambda2;
    p.isotropic = c.isotropic;
    p.theta = c.isotropic ? 0.0 : e.theta;
    auto m3 = rotate_third_order(c, p.theta);
    // Orientation sign: first order-3 moment clearly away from zero decides.
    const double tol = 1e-9 * c.s * c.s;
    if (std::abs(m3[0]) <= tol) m3[0] = 0.0;
    int sign = 0;
    for (double v : m3) {
        if (std::abs(v) > tol) {
            sign = v > 0 ? 1 : -1;
            break;
        }
    }
    if (sign < 0) {
        p.theta += std::numbers::pi;
        for (double& v : m3) v = -v;
    }
    p.symmetric = sign == 0;
    p.mu1_3 = m3[0];
    p.mu1sq_u2 = m3[1];
    p.mu1_u2sq = m3[2];
    p.mu2_3 = m3[3];
    return p;
}

DomainDescriptor domain_descriptor(const RawMoments& m) {
    const CentralMoments c = center_moments(m);
    const PrincipalMoments p = principal_moments(c);
    DomainDescriptor d;
    d.pose = {c.xg, c.yg, p.theta, p.mu1sq};
    d.area = c.s;
    d.isotropic = p.isotropic;
    d.degenerate = !(p.mu1sq > 0.0) || !(p.mu2sq > 1e-12 * p.mu1sq);
    if (d.degenerate) {
        d.isotropic = true;
        return d;
    }
    const double k = std::sqrt(c.s) / (p.mu1sq * std::sqrt(p.mu1sq));
    d.invariants = {std::min(1.0, p.mu2sq / p.mu1sq), p.mu1_3 * k, p.mu1sq_u2 * k,
                    p.mu1_u2sq * k, p.mu2_3 * k};
    return d;
}

}  // namespace viseme
