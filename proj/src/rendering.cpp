#include "viseme/rendering.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace viseme {

namespace {

// cos from the tangent, sin = tan * cos so the sign follows the tangent.
void cos_sin_from_tan(double t, double* c, double* s) {
    *c = std::sqrt(1.0 / (1.0 + t * t));
    *s = t * *c;
}

Mat3 transpose(const Mat3& m) {
    Mat3 t{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
    return t;
}

}  // namespace

TangentFrame tangent_frame(double ax, double ay, Point2 center, double z0) {
    TangentFrame f;
    f.center = center;
    f.z0 = z0;
    f.theta_xz = std::atan(ax);
    f.theta_yz = std::atan(ay);
    // The rotation angles are chosen so that the first row is the unit normal
    // (1, -ax, -ay) / |.|, which cancels the gradient at the centre.
    double cb, sb, ca, sa;
    cos_sin_from_tan(-ay, &cb, &sb);
    cos_sin_from_tan(-ax * cb, &ca, &sa);
    const Mat3 a{{{ca, sa, 0.0}, {-sa, ca, 0.0}, {0.0, 0.0, 1.0}}};
    const Mat3 b{{{cb, 0.0, sb}, {0.0, 1.0, 0.0}, {-sb, 0.0, cb}}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a[i][k] * b[k][j];
            f.r[i][j] = acc;
        }
    return f;
}

Cubic transport_graph(const Cubic& g, const Mat3& m) {
    // Old coordinates in terms of new ones: old_i = sum_j m[j][i] * new_j.
    // Solve F(Z) = old_z - g(old_x, old_y) = 0 for Z(X, Y) by chord steps;
    // each step fixes one more degree of the series.
    const double c = m[0][0] - (g[1] * m[0][1] + g[2] * m[0][2]);
    if (std::abs(c) < 1e-12) throw std::domain_error("frame is tangent to the surface normal");
    const Cubic lz = linear_form(0.0, m[1][0], m[2][0]);
    const Cubic lx = linear_form(0.0, m[1][1], m[2][1]);
    const Cubic ly = linear_form(0.0, m[1][2], m[2][2]);
    Cubic z;
    for (int it = 0; it < 5; ++it) {
        const Cubic ox = m[0][1] * z + lx;
        const Cubic oy = m[0][2] * z + ly;
        const Cubic f = (m[0][0] * z + lz) - compose(g, ox, oy);
        z = z - (1.0 / c) * f;
    }
    return z;
}

Cubic reduce_to_tangent(const Cubic& recentred, const TangentFrame& frame) {
    Cubic g = recentred;
    g[0] = 0.0;
    Cubic h = transport_graph(g, frame.r);
    return h;
}

ReducedQuadric reduce_quadric(const Cubic& h, double flat_tol) {
    ReducedQuadric q;
    const double a = h[3], b = h[4], c = h[5];
    double lu, lv, theta;
    if (b == 0.0) {
        const bool a_first = std::abs(a) > std::abs(c) || (std::abs(a) == std::abs(c) && a >= c);
        lu = a_first ? a : c;
        lv = a_first ? c : a;
        theta = a_first ? 0.0 : 0.5 * std::numbers::pi;
    } else {
        // Eigenvalues of [[a, b/2], [b/2, c]].
        const double disc = std::sqrt((a - c) * (a - c) + b * b);
        const double det = a * c - 0.25 * b * b;
        double lp, lm;
        if (a + c >= 0.0) {
            lp = 0.5 * (a + c + disc);
            lm = lp != 0.0 ? det / lp : 0.0;
        } else {
            lm = 0.5 * (a + c - disc);
            lp = det / lm;
        }
        const bool plus_first = std::abs(lp) >= std::abs(lm);
        lu = plus_first ? lp : lm;
        lv = plus_first ? lm : lp;
        const double e1x = 0.5 * b, e1y = lu - a;
        const double e2x = lu - c, e2y = 0.5 * b;
        theta = e1x * e1x + e1y * e1y >= e2x * e2x + e2y * e2y ? std::atan2(e1y, e1x)
                                                              : std::atan2(e2y, e2x);
        if (theta < 0.0) theta += std::numbers::pi;
        if (theta >= std::numbers::pi) theta -= std::numbers::pi;
    }
    const double co = std::cos(theta), si = std::sin(theta);
    Cubic r = compose(h, linear_form(0.0, co, -si), linear_form(0.0, si, co));
    std::array<double, 4> cub{r[6], r[7], r[8], r[9]};
    const double tol = 1e-12 * std::max(1.0, std::abs(lu));
    for (double v : cub) {
        if (std::abs(v) > tol) {
            if (v < 0.0) {
                theta += std::numbers::pi;
                for (double& w : cub) w = -w;
            }
            break;
        }
    }
    q.lambda_u = lu;
    q.lambda_v = lv;
    q.theta_xu = theta;
    q.cubic = cub;
    q.cross_term = r[4];
    q.flat = !(std::abs(lu) >= flat_tol);
    return q;
}

BandRendering band_rendering(const Cubic& model, Point2 center, double flat_tol) {
    const Cubic q = shifted(model, center.x, center.y);
    const TangentFrame f = tangent_frame(q[1], q[2], center, q[0]);
    const Cubic h = reduce_to_tangent(q, f);
    const ReducedQuadric rq = reduce_quadric(h, flat_tol);
    BandRendering br;
    br.flat = rq.flat;
    br.pose = {q[0], f.theta_xz, f.theta_yz, rq.flat ? 0.0 : rq.theta_xu, rq.flat ? 0.0 : rq.lambda_u};
    if (!rq.flat) {
        br.invariants[0] = rq.lambda_v / rq.lambda_u;
        for (int i = 0; i < 4; ++i) br.invariants[i + 1] = rq.cubic[i] / rq.lambda_u;
    }
    return br;
}

RenderingDescriptor rendering_descriptor(const PolyModel& model, Point2 center, int levels) {
    RenderingDescriptor d;
    const double flat_tol = 1e-6 * levels;
    for (const Cubic& b : model.bands) d.bands.push_back(band_rendering(b, center, flat_tol));
    return d;
}

Cubic reconstruct_band(const std::array<double, kRenderDims>& inv, const BandPose& pose, bool flat,
                       Point2 center) {
    const TangentFrame f = tangent_frame(std::tan(pose.theta_xz), std::tan(pose.theta_yz), center,
                                         pose.z0);
    Cubic h;
    if (!flat && pose.lambda_u != 0.0) {
        Cubic r;
        r[3] = pose.lambda_u;
        r[5] = inv[0] * pose.lambda_u;
        for (int i = 0; i < 4; ++i) r[6 + i] = inv[i + 1] * pose.lambda_u;
        const double co = std::cos(pose.theta_xu), si = std::sin(pose.theta_xu);
        h = compose(r, linear_form(0.0, co, si), linear_form(0.0, -si, co));
    }
    Cubic g = transport_graph(h, transpose(f.r));
    g[0] += pose.z0;
    return shifted(g, -center.x, -center.y);
}

}  // namespace viseme
