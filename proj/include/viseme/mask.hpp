#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "viseme/domain.hpp"

namespace viseme {

// Domain shape rasterised in its own frame: centred at the gravity centre,
// rotated by the pose angle and divided by the inertia length
// sigma = sqrt(M(u1^2) / S + 1/12). The 2^m x 2^m grid spans
// [-extent, extent]^2 in sigma units and is stored as a quaternary tree in
// preorder, 2 bits per node (00 internal, 01 empty, 10 full).
struct DomainMask {
    int m = 6;
    double extent = 1.0;
    std::uint32_t symbols = 0;
    std::vector<std::uint8_t> stream;

    bool operator==(const DomainMask&) const = default;
};

double mask_sigma(const DomainPose& pose, double area);

DomainMask encode_mask(std::span<const Pixel> domain, const DomainPose& pose, double area, int min_m = 6,
                       int max_m = 10);

// Pixels of a width x height image whose centres fall in full cells.
std::vector<Pixel> rasterize_mask(const DomainMask& mask, const DomainPose& pose, double area, int width,
                                  int height);

std::vector<std::uint8_t> quadtree_encode(const std::vector<std::uint8_t>& grid, int m, std::uint32_t* symbols);
std::vector<std::uint8_t> quadtree_decode(std::span<const std::uint8_t> stream, std::uint32_t symbols, int m);

}  // namespace viseme
