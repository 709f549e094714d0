#pragma once

#include <map>
#include <string>
#include <vector>

#include "viseme/grouping.hpp"
#include "viseme/segmenter.hpp"

namespace viseme {

// Nodes carry id, order, centre, band means, the 10 coefficients per band,
// error, child ids and moments; leaf pixels are stored as raster runs.
std::string tree_to_json(const DecompTree& tree);
DecompTree tree_from_json(const std::string& text);

struct SegmentStats {
    std::size_t leaf_count = 0;
    double max_error = 0.0;
    std::map<int, std::size_t> orders;  // leaf count per model order
};

SegmentStats segment_stats(const DecompTree& tree);
std::string stats_to_json(const SegmentStats& s);

// Per node records: x, y, angle (degrees), scale, surface, eccentricity,
// asymmetries, then the rendering block and, for leaves, the feature series.
std::string descriptors_to_json(const DecompTree& tree, const std::vector<CompoundShape>& shapes);

// Compound records (members, depth, area and the domain invariants) for internal
// nodes and leaves.
std::string compounds_to_json(const DecompTree& tree, const std::vector<CompoundShape>& shapes);

double angle_degrees(double theta);

}  // namespace viseme
