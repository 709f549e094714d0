#include "viseme/grouping.hpp"

#include <stdexcept>

namespace viseme {

std::vector<CompoundShape> aggregate_domain(const DecompTree& tree) {
    const int n = static_cast<int>(tree.nodes.size());
    std::vector<CompoundShape> out(n);
    // Preorder ids: every child has a larger id than its parent.
    for (int id = n - 1; id >= 0; --id) {
        const DecompNode& node = tree.nodes[id];
        CompoundShape& cs = out[id];
        cs.node = id;
        cs.depth = node.depth;
        if (node.is_leaf()) {
            cs.members = {id};
            cs.moments = node.moments;
        } else {
            const CompoundShape& l = out[node.left];
            const CompoundShape& r = out[node.right];
            cs.members = l.members;
            cs.members.insert(cs.members.end(), r.members.begin(), r.members.end());
            cs.moments = l.moments + r.moments;
        }
        cs.domain = domain_descriptor(cs.moments);
    }
    return out;
}

std::vector<RenderingModel> aggregate_rendering(const DecompTree& tree) {
    const int n = static_cast<int>(tree.nodes.size());
    std::vector<RenderingModel> out(n);
    for (int id = n - 1; id >= 0; --id) {
        const DecompNode& node = tree.nodes[id];
        if (node.is_leaf()) {
            out[id].model = node.model;
            continue;
        }
        const DecompNode& l = tree.nodes[node.left];
        const DecompNode& r = tree.nodes[node.right];
        if (l.center == r.center) {
            out[id].model = l.card >= r.card ? out[node.left].model : out[node.right].model;
            out[id].coincident = true;
            continue;
        }
        out[id].model = barycentric_combine(out[node.left].model, out[node.right].model, l.center, r.center);
    }
    return out;
}

void attach_rendering(const DecompTree& tree, std::vector<CompoundShape>& shapes) {
    const auto models = aggregate_rendering(tree);
    for (std::size_t id = 0; id < shapes.size(); ++id)
        shapes[id].rendering = rendering_descriptor(models[id].model, tree.nodes[id].center, tree.levels);
}

FeatureSeries feature_series(const DecompTree& tree, const std::vector<CompoundShape>& shapes,
                             int leaf_id) {
    if (leaf_id < 0 || leaf_id >= static_cast<int>(tree.nodes.size()) || !tree.nodes[leaf_id].is_leaf())
        throw std::out_of_range("unknown leaf id");
    FeatureSeries fs;
    for (int id = leaf_id; id >= 0; id = tree.nodes[id].parent) {
        fs.nodes.push_back(id);
        fs.vectors.push_back(shapes[id].domain.invariants);
    }
    fs.label = shapes[leaf_id].label;
    return fs;
}

}  // namespace viseme
