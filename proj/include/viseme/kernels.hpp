#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "viseme/image.hpp"
#include "viseme/poly.hpp"

// Hot loops over sample sets. The functions in viseme::kernels use OpenMP
// with fixed-size blocks reduced in block order, so results do not depend on
// the thread count. viseme::kernels::serial holds plain loop references.
namespace viseme::kernels {

// Exact integer sums over a sample set: geometry up to order 3 and the
// per-band first-order cross sums.
struct SampleSums {
    std::int64_t n = 0;
    std::int64_t sx = 0, sy = 0;
    std::int64_t sxx = 0, sxy = 0, syy = 0;
    std::int64_t sxxx = 0, sxxy = 0, sxyy = 0, syyy = 0;
    std::vector<std::int64_t> sz, szx, szy;

    SampleSums() = default;
    explicit SampleSums(int bands) : sz(bands, 0), szx(bands, 0), szy(bands, 0) {}
    SampleSums& operator+=(const SampleSums& o);
    bool operator==(const SampleSums&) const = default;
};

// Normal equations of a polynomial fit in scaled variables
// u = (x - cx) / s, v = (y - cy) / s; row-major `terms` x `terms` matrix.
struct NormalSystem {
    int terms = 0;
    std::vector<double> ata;
    std::vector<double> atz;  // bands x terms
};

inline constexpr std::size_t kBlock = 4096;

SampleSums accumulate(const MultiImage& img, std::span<const std::uint32_t> idx);

// Per-point L-infinity residual across bands; `err` is filled when non-empty.
// Returns the maximum.
double residuals(const MultiImage& img, std::span<const std::uint32_t> idx,
                 const PolyModel& model, std::span<double> err);

NormalSystem normal_system(const MultiImage& img, std::span<const std::uint32_t> idx, int order,
                           double cx, double cy, double s);

// 1 where a*x + b*y + c < 0.
std::vector<std::uint8_t> negative_side(const MultiImage& img, std::span<const std::uint32_t> idx,
                                        double a, double b, double c);

namespace serial {
SampleSums accumulate(const MultiImage& img, std::span<const std::uint32_t> idx);
double residuals(const MultiImage& img, std::span<const std::uint32_t> idx,
                 const PolyModel& model, std::span<double> err);
NormalSystem normal_system(const MultiImage& img, std::span<const std::uint32_t> idx, int order,
                           double cx, double cy, double s);
std::vector<std::uint8_t> negative_side(const MultiImage& img, std::span<const std::uint32_t> idx,
                                        double a, double b, double c);
}  // namespace serial

}  // namespace viseme::kernels
