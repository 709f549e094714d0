#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "viseme/domain.hpp"
#include "viseme/eigen2.hpp"
#include "viseme/image.hpp"
#include "viseme/kernels.hpp"
#include "viseme/poly.hpp"

namespace viseme {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point2&) const = default;
};

struct CovStats {
    double cx = 0.0, cy = 0.0;
    std::vector<double> zbar;
    double rxx = 0.0, rxy = 0.0, ryy = 0.0;
    std::vector<double> rzx, rzy;  // per band cross-covariances
    Eigen2 eig;
};

CovStats cov_stats(const kernels::SampleSums& s);

struct LinearFit {
    PolyModel model;  // order 1
    CovStats stats;
    bool degenerate = false;
};

// Planar least squares via the covariance formulation. Collinear sets are fit
// along their principal axis; a single point yields the constant model.
LinearFit fit_linear_lsq(const kernels::SampleSums& sums);
LinearFit fit_linear_lsq(const MultiImage& img, std::span<const std::uint32_t> idx);
inline LinearFit fit_linear_lsq(const SampleSet& v) { return fit_linear_lsq(v.image(), v.indices()); }

struct PolyFit {
    PolyModel model;
    bool degenerate = false;  // fitted below the requested order
};

PolyFit fit_poly_lsq(const MultiImage& img, std::span<const std::uint32_t> idx, int order);
inline PolyFit fit_poly_lsq(const SampleSet& v, int order) {
    return fit_poly_lsq(v.image(), v.indices(), order);
}

double max_error(const MultiImage& img, std::span<const std::uint32_t> idx, const PolyModel& model);
inline double max_error(const SampleSet& v, const PolyModel& model) {
    return max_error(v.image(), v.indices(), model);
}
std::vector<double> point_errors(const MultiImage& img, std::span<const std::uint32_t> idx,
                                 const PolyModel& model);

enum class Modality { Mono, Multi };

struct Threshold {
    Modality modality = Modality::Mono;
    int threshold = 0;
};

struct ErrorHistogram {
    std::vector<std::uint64_t> bins;
    Modality modality = Modality::Mono;
    int threshold = 0;
};

int error_level(double e, int levels);
Threshold detect_threshold(std::span<const std::uint64_t> bins, std::size_t card);
ErrorHistogram build_histogram(std::span<const double> errors, int levels);
ErrorHistogram build_histogram(const MultiImage& img, std::span<const std::uint32_t> idx,
                               const PolyModel& model);

// Positions (into `errors`) of the singular set.
std::vector<std::size_t> singular_set(std::span<const double> errors, const ErrorHistogram& h);

struct SplitLine {
    double xs = 0.0, ys = 0.0;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;
    bool fallback = false;

    double eval(double x, double y) const { return a * x + b * y + c; }
};

SplitLine fit_split_line(std::span<const Point2> points);
SplitLine fit_split_line(int width, std::span<const std::uint32_t> idx);

enum class SplitRule { SingularLine, TransposedLine, PrincipalNormal, PrincipalAxis, Median, Sweep };
const char* to_string(SplitRule r);

struct Split {
    std::vector<std::uint32_t> minus, plus;
    SplitRule rule = SplitRule::SingularLine;
};

// Partition by the sign of the line; applies the principal-axis and median
// fallbacks when a side would be empty.
Split split_set(const MultiImage& img, std::span<const std::uint32_t> idx, const SplitLine& line);

SplitLine principal_normal_line(const CovStats& st);
Split median_split(std::span<const std::uint32_t> idx);

// Threshold on the projection onto (dx, dy) minimising the summed squared
// residuals of the planar fits of both sides, each side keeping at least
// `min_side` points. Empty sides when no admissible threshold exists.
Split sweep_split(const MultiImage& img, std::span<const std::uint32_t> idx, double dx, double dy,
                  std::size_t min_side);

// Weight 1 for each child at its own centre, affine along the axis joining
// the centres; total degree above 3 is truncated.
PolyModel barycentric_combine(const PolyModel& zm, const PolyModel& zp, Point2 mm, Point2 mp);

enum class NodeStatus { Leaf, Merged, Unmergeable };
enum class Outcome { None, ChildPropagated, BarycentricRaise, Unmergeable };
const char* to_string(NodeStatus s);
const char* to_string(Outcome o);

struct ChildFit {
    PolyModel model;
    Point2 center;
};

struct AggregateDecision {
    Outcome outcome = Outcome::Unmergeable;
    PolyModel model;
    double error = 0.0;
    int chosen_child = -1;              // 0 left, 1 right for ChildPropagated
    double child_error[2] = {0.0, 0.0};  // each child model over the union
    double barycentric_error = -1.0;    // < 0 when not evaluated
};

AggregateDecision try_aggregate(const MultiImage& img, std::span<const std::uint32_t> union_idx,
                                const ChildFit& left, const ChildFit& right, double precision);

enum class SplitStrategy {
    Singular,       // singular-set regression line, then the fallbacks
    BestCandidate,  // lowest child plane error among candidate lines and threshold sweeps
};

struct SegmentParams {
    double precision = 2.0;
    std::size_t min_card = 8;
    SplitStrategy strategy = SplitStrategy::BestCandidate;
    bool aggregate = true;
};

// After aggregation the absorbed descendants of a merged node are dropped,
// so the leaves are exactly the regions of the final partition.
struct DecompNode {
    int id = 0;
    int parent = -1;
    int left = -1;
    int right = -1;
    int depth = 0;
    std::size_t card = 0;
    Point2 center;
    std::vector<double> band_means;
    PolyModel model;
    double error = 0.0;
    NodeStatus status = NodeStatus::Leaf;
    Outcome outcome = Outcome::None;
    SplitRule split_rule = SplitRule::SingularLine;
    bool degenerate = false;
    RawMoments moments;
    std::vector<std::uint32_t> pixels;  // leaves only

    bool is_leaf() const { return left < 0; }
};

struct DecompTree {
    int width = 0, height = 0, bands = 0, levels = 256;
    SegmentParams params;
    std::vector<DecompNode> nodes;  // preorder, root at 0

    const DecompNode& root() const { return nodes.front(); }
    std::vector<int> leaves() const;
    std::vector<std::uint32_t> node_pixels(int id) const;
    // Region index (position in leaves()) per pixel.
    std::vector<std::uint32_t> label_map() const;
};

DecompTree decompose(const MultiImage& img, const SegmentParams& params);

}  // namespace viseme
