#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "synthetic.hpp"
#include "viseme/grouping.hpp"

using namespace viseme;

namespace {

DecompTree planar_tree() { return decompose(fixtures::piecewise_planar(96, 96).image, {}); }

}  // namespace

TEST(Grouping, MomentsSumOverMembers) {
    const DecompTree t = planar_tree();
    const auto shapes = aggregate_domain(t);
    ASSERT_EQ(shapes.size(), t.nodes.size());
    for (const CompoundShape& s : shapes) {
        RawMoments sum;
        for (int m : s.members) {
            EXPECT_TRUE(t.nodes[m].is_leaf());
            sum += raw_moments(t.width, t.node_pixels(m));
        }
        EXPECT_EQ(sum, s.moments) << "node " << s.node;
        EXPECT_EQ(static_cast<std::size_t>(s.moments.m0), t.nodes[s.node].card);
    }
}

TEST(Grouping, RootIsTheWholeImage) {
    const DecompTree t = planar_tree();
    const auto shapes = aggregate_domain(t);
    std::vector<std::uint32_t> all(static_cast<std::size_t>(t.width) * t.height);
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<std::uint32_t>(i);
    EXPECT_EQ(shapes[0].moments, raw_moments(t.width, all));
    EXPECT_EQ(shapes[0].members.size(), t.leaves().size());
    // Square image: the root is isotropic.
    EXPECT_DOUBLE_EQ(shapes[0].domain.invariants[0], 1.0);
}

TEST(Grouping, MembersArePreorderLeaves) {
    const DecompTree t = planar_tree();
    const auto shapes = aggregate_domain(t);
    EXPECT_EQ(shapes[0].members, t.leaves());
    for (const CompoundShape& s : shapes) EXPECT_TRUE(std::is_sorted(s.members.begin(), s.members.end()));
}

TEST(Grouping, RenderingOfInternalNodesIsBarycentric) {
    const DecompTree t = planar_tree();
    const auto models = aggregate_rendering(t);
    int exact = 0;
    for (const DecompNode& n : t.nodes) {
        if (n.is_leaf()) {
            EXPECT_EQ(models[n.id].model.bands, n.model.bands);
            continue;
        }
        const DecompNode& l = t.nodes[n.left];
        const DecompNode& r = t.nodes[n.right];
        if (models[n.id].coincident) continue;
        // Without truncation the combination interpolates each child model at
        // the child centre.
        for (std::size_t b = 0; b < n.model.bands.size(); ++b) {
            if (models[l.id].model.bands[b].degree() > 2 || models[r.id].model.bands[b].degree() > 2) continue;
            ++exact;
            const double want_l = models[l.id].model.bands[b](l.center.x, l.center.y);
            const double want_r = models[r.id].model.bands[b](r.center.x, r.center.y);
            EXPECT_NEAR(models[n.id].model.bands[b](l.center.x, l.center.y), want_l, 1e-6 * (1 + std::abs(want_l)));
            EXPECT_NEAR(models[n.id].model.bands[b](r.center.x, r.center.y), want_r, 1e-6 * (1 + std::abs(want_r)));
        }
    }
    EXPECT_GT(exact, 0);
    auto shapes = aggregate_domain(t);
    attach_rendering(t, shapes);
    for (const CompoundShape& s : shapes) {
        ASSERT_TRUE(s.rendering.has_value());
        EXPECT_EQ(s.rendering->bands.size(), 1u);
    }
}

TEST(Grouping, FeatureSeriesWalksToTheRoot) {
    const DecompTree t = planar_tree();
    const auto shapes = aggregate_domain(t);
    for (int leaf : t.leaves()) {
        const FeatureSeries fs = feature_series(t, shapes, leaf);
        ASSERT_EQ(fs.nodes.size(), static_cast<std::size_t>(t.nodes[leaf].depth) + 1);
        EXPECT_EQ(fs.nodes.front(), leaf);
        EXPECT_EQ(fs.nodes.back(), 0);
        EXPECT_EQ(fs.vectors.size(), fs.nodes.size());
        EXPECT_EQ(fs.vectors.back(), shapes[0].domain.invariants);
    }
    int internal = -1;
    for (const DecompNode& n : t.nodes)
        if (!n.is_leaf()) internal = n.id;
    ASSERT_GE(internal, 0);
    EXPECT_THROW(feature_series(t, shapes, internal), std::out_of_range);
    EXPECT_THROW(feature_series(t, shapes, -1), std::out_of_range);
}
