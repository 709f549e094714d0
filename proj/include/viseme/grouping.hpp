#pragma once

#include <optional>
#include <string>
#include <vector>

#include "viseme/domain.hpp"
#include "viseme/rendering.hpp"
#include "viseme/segmenter.hpp"

namespace viseme {

struct CompoundShape {
    int node = 0;
    int depth = 0;
    std::vector<int> members;  // leaf node ids, preorder
    RawMoments moments;
    DomainDescriptor domain;
    std::optional<RenderingDescriptor> rendering;
    std::optional<std::string> label;
};

// Indexed by node id. Moments are summed from the leaves upward and the
// descriptor is normalised per node after summation.
std::vector<CompoundShape> aggregate_domain(const DecompTree& tree);

struct RenderingModel {
    PolyModel model;
    bool coincident = false;  // copied from the larger child
};

// Leaves keep their own model; every internal node gets the barycentric
// combination of its children truncated at degree 3.
std::vector<RenderingModel> aggregate_rendering(const DecompTree& tree);

void attach_rendering(const DecompTree& tree, std::vector<CompoundShape>& shapes);

struct FeatureSeries {
    std::vector<int> nodes;  // leaf first, root last
    std::vector<std::array<double, kDomainDims>> vectors;
    std::optional<std::string> label;
};

FeatureSeries feature_series(const DecompTree& tree, const std::vector<CompoundShape>& shapes,
                             int leaf_id);

}  // namespace viseme
