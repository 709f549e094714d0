#include "viseme/segmenter.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace viseme {

using i128 = __int128;

Eigen2 cov_eigen(double rxx, double rxy, double ryy) {
    Eigen2 e;
    const double d = rxx - ryy;
    const double disc = std::sqrt(d * d + 4.0 * rxy * rxy);
    e.lambda1 = 0.5 * (rxx + ryy + disc);
    const double det = rxx * ryy - rxy * rxy;
    e.lambda2 = e.lambda1 > 0.0 ? det / e.lambda1 : 0.5 * (rxx + ryy - disc);
    if (rxy != 0.0) {
        // lambda1 - rxx without cancellation.
        const double num = d >= 0.0 ? 2.0 * rxy * rxy / (disc + d) : 0.5 * (disc - d);
        e.theta = std::atan(num / rxy);
        if (e.theta < 0.0) e.theta += std::numbers::pi;
    } else {
        e.theta = rxx >= ryy ? 0.0 : 0.5 * std::numbers::pi;
    }
    return e;
}

CovStats cov_stats(const kernels::SampleSums& s) {
    if (s.n <= 0) throw std::invalid_argument("statistics of an empty set");
    CovStats st;
    const i128 n = s.n;
    const double n2 = static_cast<double>(s.n) * static_cast<double>(s.n);
    st.cx = static_cast<double>(s.sx) / s.n;
    st.cy = static_cast<double>(s.sy) / s.n;
    st.rxx = static_cast<double>(n * s.sxx - i128(s.sx) * s.sx) / n2;
    st.rxy = static_cast<double>(n * s.sxy - i128(s.sx) * s.sy) / n2;
    st.ryy = static_cast<double>(n * s.syy - i128(s.sy) * s.sy) / n2;
    const std::size_t bands = s.sz.size();
    st.zbar.resize(bands);
    st.rzx.resize(bands);
    st.rzy.resize(bands);
    for (std::size_t b = 0; b < bands; ++b) {
        st.zbar[b] = static_cast<double>(s.sz[b]) / s.n;
        st.rzx[b] = static_cast<double>(n * s.szx[b] - i128(s.sz[b]) * s.sx) / n2;
        st.rzy[b] = static_cast<double>(n * s.szy[b] - i128(s.sz[b]) * s.sy) / n2;
    }
    st.eig = cov_eigen(st.rxx, st.rxy, st.ryy);
    return st;
}

LinearFit fit_linear_lsq(const kernels::SampleSums& sums) {
    LinearFit f;
    f.stats = cov_stats(sums);
    const CovStats& st = f.stats;
    const std::size_t bands = st.zbar.size();
    f.model.order = 1;
    f.model.bands.resize(bands);
    const double trace = st.rxx + st.ryy;
    const long double det = static_cast<long double>(st.rxx) * st.ryy -
                            static_cast<long double>(st.rxy) * st.rxy;
    const bool single = !(trace > 0.0);
    const bool collinear = !single && det <= 1e-12L * trace * trace;
    f.degenerate = single || collinear;
    const double ex = std::cos(st.eig.theta), ey = std::sin(st.eig.theta);
    const double along = ex * ex * st.rxx + 2.0 * ex * ey * st.rxy + ey * ey * st.ryy;
    for (std::size_t b = 0; b < bands; ++b) {
        double gx = 0.0, gy = 0.0;
        if (collinear) {
            const double gt = (st.rzx[b] * ex + st.rzy[b] * ey) / along;
            gx = gt * ex;
            gy = gt * ey;
        } else if (!single) {
            gx = static_cast<double>((st.rzx[b] * static_cast<long double>(st.ryy) -
                                      st.rzy[b] * static_cast<long double>(st.rxy)) / det);
            gy = static_cast<double>((st.rzy[b] * static_cast<long double>(st.rxx) -
                                      st.rzx[b] * static_cast<long double>(st.rxy)) / det);
        }
        Cubic& c = f.model.bands[b];
        c[0] = st.zbar[b] - gx * st.cx - gy * st.cy;
        c[1] = gx;
        c[2] = gy;
    }
    return f;
}

LinearFit fit_linear_lsq(const MultiImage& img, std::span<const std::uint32_t> idx) {
    return fit_linear_lsq(kernels::accumulate(img, idx));
}

PolyFit fit_poly_lsq(const MultiImage& img, std::span<const std::uint32_t> idx, int order) {
    if (order < 1 || order > 3) throw std::invalid_argument("polynomial order must be 1..3");
    const LinearFit lin = fit_linear_lsq(img, idx);
    PolyFit out;
    if (order == 1) {
        out.model = lin.model;
        out.degenerate = lin.degenerate;
        return out;
    }
    const double cx = lin.stats.cx, cy = lin.stats.cy;
    const double s = std::max(1.0, std::sqrt(lin.stats.rxx + lin.stats.ryy));
    for (int o = order; o >= 2; --o) {
        const int t = terms_for_order(o);
        if (idx.size() < static_cast<std::size_t>(t)) continue;
        const kernels::NormalSystem ns = kernels::normal_system(img, idx, o, cx, cy, s);
        Eigen::MatrixXd a(t, t);
        for (int r = 0; r < t; ++r)
            for (int c = 0; c < t; ++c) a(r, c) = ns.ata[r * t + c];
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
        qr.setThreshold(1e-12);
        if (qr.rank() < t) continue;
        out.model.order = o;
        out.model.bands.resize(img.bands());
        const Cubic u = linear_form(-cx / s, 1.0 / s, 0.0);
        const Cubic v = linear_form(-cy / s, 0.0, 1.0 / s);
        for (int b = 0; b < img.bands(); ++b) {
            Eigen::VectorXd rhs(t);
            for (int r = 0; r < t; ++r) rhs(r) = ns.atz[b * t + r];
            const Eigen::VectorXd sol = qr.solve(rhs);
            Cubic p;
            for (int r = 0; r < t; ++r) p[r] = sol(r);
            out.model.bands[b] = compose(p, u, v);
            for (int r = t; r < kTerms; ++r) out.model.bands[b][r] = 0.0;
        }
        out.degenerate = o < order;
        return out;
    }
    out.model = lin.model;
    out.degenerate = true;
    return out;
}

double max_error(const MultiImage& img, std::span<const std::uint32_t> idx, const PolyModel& model) {
    return kernels::residuals(img, idx, model, {});
}

std::vector<double> point_errors(const MultiImage& img, std::span<const std::uint32_t> idx,
                                 const PolyModel& model) {
    std::vector<double> err(idx.size());
    kernels::residuals(img, idx, model, err);
    return err;
}

int error_level(double e, int levels) {
    const double r = std::round(e);
    if (!(r < levels - 1)) return levels - 1;
    return static_cast<int>(r);
}

Threshold detect_threshold(std::span<const std::uint64_t> bins, std::size_t card) {
    const int n = static_cast<int>(bins.size());
    Threshold t;
    if (n == 0) return t;
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        double acc = static_cast<double>(bins[i]);
        if (i > 0) acc += static_cast<double>(bins[i - 1]);
        if (i + 1 < n) acc += static_cast<double>(bins[i + 1]);
        s[i] = acc / 3.0;
    }
    const double min_count = std::max(2.0, static_cast<double>(card) / 1000.0);
    // Plateau-aware maxima: runs of equal values higher than both neighbours.
    struct Run {
        int lo, hi;
    };
    std::vector<Run> modes;
    for (int i = 0; i < n;) {
        int j = i;
        while (j + 1 < n && s[j + 1] == s[i]) ++j;
        const bool left_ok = i == 0 || s[i - 1] < s[i];
        const bool right_ok = j == n - 1 || s[j + 1] < s[i];
        if (left_ok && right_ok && s[i] >= min_count) modes.push_back({i, j});
        i = j + 1;
    }
    if (modes.size() >= 2) {
        const Run& a = modes[modes.size() - 2];
        const Run& b = modes[modes.size() - 1];
        int best = a.hi + 1;
        for (int i = a.hi + 1; i < b.lo; ++i)
            if (s[i] <= s[best]) best = i;
        t.modality = Modality::Multi;
        t.threshold = best;
        return t;
    }
    t.modality = Modality::Mono;
    const auto want = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(card))));
    std::uint64_t tail = 0;
    t.threshold = n - 1;
    for (int i = n - 1; i >= 0 && tail + bins[i] <= want; --i) {
        tail += bins[i];
        t.threshold = i;
    }
    if (tail == 0) {
        // The top occupied level alone exceeds the quota.
        t.threshold = 0;
        for (int i = n - 1; i >= 0; --i)
            if (bins[i] > 0) {
                t.threshold = i;
                break;
            }
    }
    return t;
}

ErrorHistogram build_histogram(std::span<const double> errors, int levels) {
    ErrorHistogram h;
    h.bins.assign(levels, 0);
    for (double e : errors) ++h.bins[error_level(e, levels)];
    const Threshold t = detect_threshold(h.bins, errors.size());
    h.modality = t.modality;
    h.threshold = t.threshold;
    return h;
}

ErrorHistogram build_histogram(const MultiImage& img, std::span<const std::uint32_t> idx,
                               const PolyModel& model) {
    const auto err = point_errors(img, idx, model);
    return build_histogram(err, img.levels());
}

std::vector<std::size_t> singular_set(std::span<const double> errors, const ErrorHistogram& h) {
    const int levels = static_cast<int>(h.bins.size());
    std::vector<std::size_t> out;
    if (h.modality == Modality::Multi) {
        for (std::size_t i = 0; i < errors.size(); ++i)
            if (error_level(errors[i], levels) > h.threshold) out.push_back(i);
        if (!out.empty()) return out;
    }
    const std::size_t want = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(errors.size()))));
    std::vector<std::size_t> order(errors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t k = std::min(want, order.size());
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (errors[a] != errors[b]) return errors[a] > errors[b];
                          return a < b;
                      });
    out.assign(order.begin(), order.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct PointMoments {
    double n = 0.0, xs = 0.0, ys = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
};

SplitLine line_from_moments(const PointMoments& m) {
    SplitLine l;
    l.xs = m.xs;
    l.ys = m.ys;
    l.sxx = m.sxx;
    l.sxy = m.sxy;
    l.syy = m.syy;
    l.a = m.sxy;
    l.b = -m.sxx;
    l.c = m.ys * m.sxx - m.xs * m.sxy;
    if (l.a == 0.0 && l.b == 0.0) {
        l.a = 1.0;
        l.b = 0.0;
        l.c = -m.xs;
        l.fallback = true;
    }
    return l;
}

}  // namespace

SplitLine fit_split_line(std::span<const Point2> points) {
    if (points.empty()) throw std::invalid_argument("split line of an empty set");
    PointMoments m;
    m.n = static_cast<double>(points.size());
    for (const Point2& p : points) {
        m.xs += p.x;
        m.ys += p.y;
    }
    m.xs /= m.n;
    m.ys /= m.n;
    for (const Point2& p : points) {
        m.sxx += (p.x - m.xs) * (p.x - m.xs);
        m.sxy += (p.x - m.xs) * (p.y - m.ys);
        m.syy += (p.y - m.ys) * (p.y - m.ys);
    }
    m.sxx /= m.n;
    m.sxy /= m.n;
    m.syy /= m.n;
    return line_from_moments(m);
}

SplitLine fit_split_line(int width, std::span<const std::uint32_t> idx) {
    if (idx.empty()) throw std::invalid_argument("split line of an empty set");
    i128 n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::uint32_t k : idx) {
        const std::int64_t x = k % width, y = k / width;
        ++n;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    PointMoments m;
    m.n = static_cast<double>(n);
    m.xs = static_cast<double>(sx) / m.n;
    m.ys = static_cast<double>(sy) / m.n;
    m.sxx = static_cast<double>(n * sxx - sx * sx) / n2;
    m.sxy = static_cast<double>(n * sxy - sx * sy) / n2;
    m.syy = static_cast<double>(n * syy - sy * sy) / n2;
    return line_from_moments(m);
}

const char* to_string(SplitRule r) {
    switch (r) {
        case SplitRule::SingularLine: return "singular-line";
        case SplitRule::TransposedLine: return "transposed-line";
        case SplitRule::PrincipalNormal: return "principal-normal";
        case SplitRule::PrincipalAxis: return "principal-axis";
        case SplitRule::Median: return "median";
        case SplitRule::Sweep: return "sweep";
    }
    return "unknown";
}

const char* to_string(NodeStatus s) {
    switch (s) {
        case NodeStatus::Leaf: return "leaf";
        case NodeStatus::Merged: return "merged";
        case NodeStatus::Unmergeable: return "unmergeable";
    }
    return "unknown";
}

const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::None: return "none";
        case Outcome::ChildPropagated: return "child";
        case Outcome::BarycentricRaise: return "barycentric";
        case Outcome::Unmergeable: return "unmergeable";
    }
    return "unknown";
}

SplitLine principal_normal_line(const CovStats& st) {
    SplitLine l;
    l.xs = st.cx;
    l.ys = st.cy;
    l.a = std::cos(st.eig.theta);
    l.b = std::sin(st.eig.theta);
    l.c = -(l.a * st.cx + l.b * st.cy);
    l.fallback = true;
    return l;
}

Split median_split(std::span<const std::uint32_t> idx) {
    Split s;
    const std::size_t half = idx.size() / 2;
    s.minus.assign(idx.begin(), idx.begin() + half);
    s.plus.assign(idx.begin() + half, idx.end());
    s.rule = SplitRule::Median;
    return s;
}

namespace {

// Empty result when one side would be empty.
bool split_by_line(const MultiImage& img, std::span<const std::uint32_t> idx, const SplitLine& line,
                   Split& out) {
    const auto neg = kernels::negative_side(img, idx, line.a, line.b, line.c);
    const std::size_t nneg = std::count(neg.begin(), neg.end(), std::uint8_t{1});
    if (nneg == 0 || nneg == idx.size()) return false;
    out.minus.clear();
    out.plus.clear();
    out.minus.reserve(nneg);
    out.plus.reserve(idx.size() - nneg);
    for (std::size_t i = 0; i < idx.size(); ++i) (neg[i] ? out.minus : out.plus).push_back(idx[i]);
    return true;
}

}  // namespace

Split split_set(const MultiImage& img, std::span<const std::uint32_t> idx, const SplitLine& line) {
    if (idx.size() < 2) throw std::invalid_argument("cannot split fewer than two points");
    Split s;
    if (split_by_line(img, idx, line, s)) {
        s.rule = SplitRule::SingularLine;
        return s;
    }
    const CovStats st = cov_stats(kernels::accumulate(img, idx));
    if (split_by_line(img, idx, principal_normal_line(st), s)) {
        s.rule = SplitRule::PrincipalNormal;
        return s;
    }
    return median_split(idx);
}

namespace {

// Running integer sums for the sweep; the squared residual of a planar fit
// is sum z^2 minus the explained part, and sum z^2 is shared by every split.
struct SweepAcc {
    std::int64_t n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    std::vector<std::int64_t> sz, szx, szy;

    explicit SweepAcc(int bands) : sz(bands, 0), szx(bands, 0), szy(bands, 0) {}

    void add(const MultiImage& img, std::uint32_t k, int sign) {
        const std::int64_t x = k % img.width(), y = k / img.width();
        n += sign;
        sx += sign * x;
        sy += sign * y;
        sxx += sign * x * x;
        sxy += sign * x * y;
        syy += sign * y * y;
        for (std::size_t b = 0; b < sz.size(); ++b) {
            const std::int64_t z = img.sample(static_cast<int>(b), k);
            sz[b] += sign * z;
            szx[b] += sign * z * x;
            szy[b] += sign * z * y;
        }
    }

    double explained() const {
        if (n <= 0) return 0.0;
        const i128 nn = n;
        const double cxx = static_cast<double>(nn * sxx - i128(sx) * sx);
        const double cxy = static_cast<double>(nn * sxy - i128(sx) * sy);
        const double cyy = static_cast<double>(nn * syy - i128(sy) * sy);
        const double det = cxx * cyy - cxy * cxy;
        const bool full = det > 1e-12 * (cxx + cyy) * (cxx + cyy) && det > 0.0;
        double e = 0.0;
        for (std::size_t b = 0; b < sz.size(); ++b) {
            e += static_cast<double>(sz[b]) * static_cast<double>(sz[b]) / static_cast<double>(n);
            const double czx = static_cast<double>(nn * szx[b] - i128(sz[b]) * sx);
            const double czy = static_cast<double>(nn * szy[b] - i128(sz[b]) * sy);
            if (full) {
                e += (czx * (cyy * czx - cxy * czy) + czy * (cxx * czy - cxy * czx)) / det / static_cast<double>(n);
            } else if (cxx + cyy > 0.0) {
                // Collinear side: regress along the dominant coordinate.
                const double cz = cxx >= cyy ? czx : czy, cc = std::max(cxx, cyy);
                e += cz * cz / cc / static_cast<double>(n);
            }
        }
        return e;
    }
};

}  // namespace

Split sweep_split(const MultiImage& img, std::span<const std::uint32_t> idx, double dx, double dy,
                  std::size_t min_side) {
    Split out;
    out.rule = SplitRule::Sweep;
    min_side = std::max<std::size_t>(min_side, 1);
    if (idx.size() < 2 * min_side) return out;
    std::vector<std::pair<double, std::uint32_t>> proj(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        proj[i] = {dx * (idx[i] % img.width()) + dy * (idx[i] / img.width()), idx[i]};
    std::sort(proj.begin(), proj.end());
    SweepAcc left(img.bands()), right(img.bands());
    for (const auto& [t, k] : proj) right.add(img, k, 1);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t cut = 0;
    for (std::size_t i = 0; i + min_side < proj.size(); ++i) {
        left.add(img, proj[i].second, 1);
        right.add(img, proj[i].second, -1);
        if (i + 1 < min_side || proj[i].first == proj[i + 1].first) continue;
        const double e = left.explained() + right.explained();
        if (e > best) {
            best = e;
            cut = i + 1;
        }
    }
    if (cut == 0) return out;
    for (std::size_t i = 0; i < proj.size(); ++i) (i < cut ? out.minus : out.plus).push_back(proj[i].second);
    std::sort(out.minus.begin(), out.minus.end());
    std::sort(out.plus.begin(), out.plus.end());
    return out;
}

PolyModel barycentric_combine(const PolyModel& zm, const PolyModel& zp, Point2 mm, Point2 mp) {
    const double dx = mp.x - mm.x, dy = mp.y - mm.y;
    const double d2 = dx * dx + dy * dy;
    if (!(d2 > 0.0)) throw std::invalid_argument("barycentric combination of coincident centres");
    if (zm.bands.size() != zp.bands.size()) throw std::invalid_argument("band count mismatch");
    // t = 0 at mm, 1 at mp; result = zm + t (zp - zm), truncated in
    // coordinates centred on the midpoint of the two centres.
    const double ox = 0.5 * (mm.x + mp.x), oy = 0.5 * (mm.y + mp.y);
    const Cubic t = linear_form(0.5, dx / d2, dy / d2);
    PolyModel r;
    r.order = std::min(3, std::max(zm.order, zp.order) + 1);
    r.bands.resize(zm.bands.size());
    for (std::size_t b = 0; b < zm.bands.size(); ++b) {
        const Cubic diff = shifted(zp.bands[b] - zm.bands[b], ox, oy);
        r.bands[b] = zm.bands[b] + shifted(multiply_truncated(t, diff), -ox, -oy);
    }
    return r;
}

AggregateDecision try_aggregate(const MultiImage& img, std::span<const std::uint32_t> union_idx,
                                const ChildFit& left, const ChildFit& right, double precision) {
    AggregateDecision d;
    d.child_error[0] = max_error(img, union_idx, left.model);
    d.child_error[1] = max_error(img, union_idx, right.model);
    const int pick = d.child_error[1] < d.child_error[0] ? 1 : 0;
    if (d.child_error[pick] <= precision) {
        d.outcome = Outcome::ChildPropagated;
        d.chosen_child = pick;
        d.model = pick == 0 ? left.model : right.model;
        d.error = d.child_error[pick];
        return d;
    }
    const int child_order = std::max(left.model.order, right.model.order);
    const bool distinct = left.center.x != right.center.x || left.center.y != right.center.y;
    if (child_order < 3 && distinct) {
        PolyModel comb = barycentric_combine(left.model, right.model, left.center, right.center);
        d.barycentric_error = max_error(img, union_idx, comb);
        if (d.barycentric_error <= precision) {
            d.outcome = Outcome::BarycentricRaise;
            d.model = std::move(comb);
            d.error = d.barycentric_error;
            return d;
        }
    }
    d.outcome = Outcome::Unmergeable;
    return d;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

struct BuildNode {
    DecompNode node;
    std::vector<std::uint32_t> idx;
    std::unique_ptr<BuildNode> left, right;
};

constexpr std::size_t kTaskCutoff = 16384;
constexpr std::size_t kSweepMinSide = 3;

class Builder {
public:
    Builder(const MultiImage& img, const SegmentParams& p) : img_(img), p_(p) {}

    std::unique_ptr<BuildNode> run() {
        auto root = std::make_unique<BuildNode>();
        root->idx.resize(img_.pixel_count());
        std::iota(root->idx.begin(), root->idx.end(), std::uint32_t{0});
        std::vector<BuildNode*> pending;
        std::vector<BuildNode*> joins;
        expand_large(*root, 0, pending, joins);
        const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::ptrdiff_t i = 0; i < np; ++i) build_serial(*pending[i], pending[i]->node.depth);
        for (BuildNode* n : joins) join(*n);
        return root;
    }

private:
    // Evaluates the node; returns true when it must be split.
    bool evaluate(BuildNode& bn, int depth) {
        DecompNode& n = bn.node;
        n.depth = depth;
        n.card = bn.idx.size();
        const kernels::SampleSums sums = kernels::accumulate(img_, bn.idx);
        n.moments = {sums.n,   sums.sx,   sums.sy,   sums.sxx,  sums.sxy,
                     sums.syy, sums.sxxx, sums.sxxy, sums.sxyy, sums.syyy};
        LinearFit fit = fit_linear_lsq(sums);
        n.center = {fit.stats.cx, fit.stats.cy};
        n.band_means = fit.stats.zbar;
        n.degenerate = fit.degenerate;
        n.model = std::move(fit.model);
        errors_ = point_errors(img_, bn.idx, n.model);
        n.error = errors_.empty() ? 0.0 : *std::max_element(errors_.begin(), errors_.end());
        stats_ = fit.stats;
        if (n.error <= p_.precision || n.card < p_.min_card || n.card < 2) {
            n.status = NodeStatus::Leaf;
            n.pixels = std::move(bn.idx);
            bn.idx.clear();
            return false;
        }
        return true;
    }

    double child_score(const Split& s) const {
        const double em = max_error(img_, s.minus, fit_linear_lsq(img_, s.minus).model);
        const double ep = max_error(img_, s.plus, fit_linear_lsq(img_, s.plus).model);
        return std::max(em, ep);
    }

    Split choose_split(const BuildNode& bn) {
        const ErrorHistogram h = build_histogram(errors_, img_.levels());
        const auto pos = singular_set(errors_, h);
        std::vector<std::uint32_t> vs(pos.size());
        for (std::size_t i = 0; i < pos.size(); ++i) vs[i] = bn.idx[pos[i]];
        const SplitLine sl = fit_split_line(img_.width(), vs);
        if (p_.strategy == SplitStrategy::Singular) return split_set(img_, bn.idx, sl);

        SplitLine transposed = sl;
        transposed.a = -sl.syy;
        transposed.b = sl.sxy;
        transposed.c = sl.syy * sl.xs - sl.sxy * sl.ys;
        const SplitLine normal = principal_normal_line(stats_);
        SplitLine axis = normal;
        axis.a = -std::sin(stats_.eig.theta);
        axis.b = std::cos(stats_.eig.theta);
        axis.c = -(axis.a * stats_.cx + axis.b * stats_.cy);

        const std::pair<SplitLine, SplitRule> cands[] = {
            {sl, SplitRule::SingularLine},
            {transposed, SplitRule::TransposedLine},
            {normal, SplitRule::PrincipalNormal},
            {axis, SplitRule::PrincipalAxis},
        };
        Split best;
        double best_score = 0.0;
        bool have = false;
        auto consider = [&](Split&& s) {
            const double score = child_score(s);
            if (!have || score < best_score) {
                best = std::move(s);
                best_score = score;
                have = true;
            }
        };
        for (const auto& [line, rule] : cands) {
            if (line.a == 0.0 && line.b == 0.0) continue;
            Split s;
            if (!split_by_line(img_, bn.idx, line, s)) continue;
            s.rule = rule;
            consider(std::move(s));
        }
        const double sweep_dirs[4][2] = {{1.0, 0.0},
                                         {0.0, 1.0},
                                         {std::cos(stats_.eig.theta), std::sin(stats_.eig.theta)},
                                         {-std::sin(stats_.eig.theta), std::cos(stats_.eig.theta)}};
        for (const auto& d : sweep_dirs) {
            Split s = sweep_split(img_, bn.idx, d[0], d[1], kSweepMinSide);
            if (!s.minus.empty()) consider(std::move(s));
        }
        return have ? best : median_split(bn.idx);
    }

    void make_children(BuildNode& bn) {
        Split s = choose_split(bn);
        bn.node.split_rule = s.rule;
        bn.left = std::make_unique<BuildNode>();
        bn.right = std::make_unique<BuildNode>();
        bn.left->idx = std::move(s.minus);
        bn.right->idx = std::move(s.plus);
    }

    void expand_large(BuildNode& bn, int depth, std::vector<BuildNode*>& pending,
                      std::vector<BuildNode*>& joins) {
        if (bn.idx.size() <= kTaskCutoff) {
            bn.node.depth = depth;
            pending.push_back(&bn);
            return;
        }
        if (!evaluate(bn, depth)) return;
        make_children(bn);
        expand_large(*bn.left, depth + 1, pending, joins);
        expand_large(*bn.right, depth + 1, pending, joins);
        joins.push_back(&bn);
    }

    void build_serial(BuildNode& bn, int depth) {
        Builder local(img_, p_);
        local.build_rec(bn, depth);
    }

    void build_rec(BuildNode& bn, int depth) {
        if (!evaluate(bn, depth)) return;
        make_children(bn);
        build_rec(*bn.left, depth + 1);
        build_rec(*bn.right, depth + 1);
        join(bn);
    }

    void join(BuildNode& bn) {
        DecompNode& n = bn.node;
        const DecompNode& l = bn.left->node;
        const DecompNode& r = bn.right->node;
        const bool both_final = l.status != NodeStatus::Unmergeable && r.status != NodeStatus::Unmergeable;
        AggregateDecision d;
        if (p_.aggregate && both_final)
            d = try_aggregate(img_, bn.idx, {l.model, l.center}, {r.model, r.center}, p_.precision);
        if (d.outcome == Outcome::ChildPropagated || d.outcome == Outcome::BarycentricRaise) {
            n.status = NodeStatus::Merged;
            n.outcome = d.outcome;
            n.model = std::move(d.model);
            n.error = d.error;
            n.pixels = std::move(bn.idx);
            bn.left.reset();
            bn.right.reset();
        } else {
            n.status = NodeStatus::Unmergeable;
            n.outcome = Outcome::Unmergeable;
        }
        bn.idx.clear();
        bn.idx.shrink_to_fit();
    }

    const MultiImage& img_;
    const SegmentParams& p_;
    std::vector<double> errors_;
    CovStats stats_;
};

void flatten(BuildNode& bn, int parent, std::vector<DecompNode>& out) {
    const int id = static_cast<int>(out.size());
    out.push_back(std::move(bn.node));
    out[id].id = id;
    out[id].parent = parent;
    if (bn.left) {
        out[id].left = static_cast<int>(out.size());
        flatten(*bn.left, id, out);
        out[id].right = static_cast<int>(out.size());
        flatten(*bn.right, id, out);
    }
}

}  // namespace

DecompTree decompose(const MultiImage& img, const SegmentParams& params) {
    if (!(params.precision >= 0.0)) throw std::invalid_argument("precision must be >= 0");
    if (params.min_card < 6) throw std::invalid_argument("min_card must be >= 6");
    if (img.width() > 4096 || img.height() > 4096)
        throw std::invalid_argument("image side exceeds 4096 pixels");
    Builder b(img, params);
    auto root = b.run();
    DecompTree t;
    t.width = img.width();
    t.height = img.height();
    t.bands = img.bands();
    t.levels = img.levels();
    t.params = params;
    flatten(*root, -1, t.nodes);
    return t;
}

std::vector<int> DecompTree::leaves() const {
    std::vector<int> out;
    for (const DecompNode& n : nodes)
        if (n.is_leaf()) out.push_back(n.id);
    return out;
}

std::vector<std::uint32_t> DecompTree::node_pixels(int id) const {
    std::vector<std::uint32_t> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        const DecompNode& n = nodes[stack.back()];
        stack.pop_back();
        if (n.is_leaf()) {
            out.insert(out.end(), n.pixels.begin(), n.pixels.end());
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::uint32_t> DecompTree::label_map() const {
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(width) * height, 0);
    const auto ls = leaves();
    for (std::size_t i = 0; i < ls.size(); ++i)
        for (std::uint32_t k : nodes[ls[i]].pixels) labels[k] = static_cast<std::uint32_t>(i);
    return labels;
}

}  // namespace viseme
