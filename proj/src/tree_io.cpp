#include "viseme/tree_io.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace viseme {

using Json = nlohmann::ordered_json;

namespace {

constexpr int kTreeVersion = 1;

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const E (&values)[N]) {
    for (E v : values)
        if (s == to_string(v)) return v;
    throw std::runtime_error("unknown enum value: " + s);
}

constexpr SplitRule kRules[] = {SplitRule::SingularLine, SplitRule::TransposedLine, SplitRule::PrincipalNormal,
                                SplitRule::PrincipalAxis, SplitRule::Median, SplitRule::Sweep};
constexpr NodeStatus kStatus[] = {NodeStatus::Leaf, NodeStatus::Merged, NodeStatus::Unmergeable};
constexpr Outcome kOutcomes[] = {Outcome::None, Outcome::ChildPropagated, Outcome::BarycentricRaise,
                                 Outcome::Unmergeable};

Json runs_of(const std::vector<std::uint32_t>& px) {
    Json runs = Json::array();
    std::size_t i = 0;
    while (i < px.size()) {
        std::size_t j = i + 1;
        while (j < px.size() && px[j] == px[j - 1] + 1) ++j;
        runs.push_back(px[i]);
        runs.push_back(j - i);
        i = j;
    }
    return runs;
}

std::vector<std::uint32_t> pixels_from(const Json& runs) {
    std::vector<std::uint32_t> px;
    if (runs.size() % 2) throw std::runtime_error("malformed pixel runs");
    for (std::size_t i = 0; i < runs.size(); i += 2) {
        const auto start = runs[i].get<std::uint32_t>();
        const auto len = runs[i + 1].get<std::uint32_t>();
        for (std::uint32_t k = 0; k < len; ++k) px.push_back(start + k);
    }
    return px;
}

Json pose_record(const DomainDescriptor& d) {
    const auto& v = d.invariants;
    return {{"x", d.pose.xg},
            {"y", d.pose.yg},
            {"angle", angle_degrees(d.pose.theta)},
            {"scale", d.pose.scale},
            {"surface", d.area},
            {"eccentricity", v[0]},
            {"asymmetries", {v[1], v[2], v[3], v[4]}},
            {"isotropic", d.isotropic},
            {"degenerate", d.degenerate}};
}

}  // namespace

double angle_degrees(double theta) {
    double a = std::fmod(theta * 180.0 / std::numbers::pi, 360.0);
    if (a < 0.0) a += 360.0;
    return a >= 360.0 ? 0.0 : a;
}

std::string tree_to_json(const DecompTree& tree) {
    Json nodes = Json::array();
    for (const DecompNode& n : tree.nodes) {
        Json coeffs = Json::array();
        for (const Cubic& b : n.model.bands)
            for (double c : b.c) coeffs.push_back(c);
        Json jn{{"id", n.id},
                {"parent", n.parent},
                {"left", n.left},
                {"right", n.right},
                {"depth", n.depth},
                {"card", n.card},
                {"order", n.model.order},
                {"center", {n.center.x, n.center.y}},
                {"band_means", n.band_means},
                {"coefficients", coeffs},
                {"error", n.error},
                {"status", to_string(n.status)},
                {"outcome", to_string(n.outcome)},
                {"split_rule", to_string(n.split_rule)},
                {"degenerate", n.degenerate},
                {"moments", n.moments.as_array()}};
        if (n.is_leaf()) jn["pixels"] = runs_of(n.pixels);
        nodes.push_back(jn);
    }
    Json j{{"format", "viseme-tree"},
           {"version", kTreeVersion},
           {"width", tree.width},
           {"height", tree.height},
           {"bands", tree.bands},
           {"levels", tree.levels},
           {"params",
            {{"precision", tree.params.precision},
             {"min_card", tree.params.min_card},
             {"strategy", tree.params.strategy == SplitStrategy::Singular ? "singular" : "best-candidate"},
             {"aggregate", tree.params.aggregate}}},
           {"nodes", nodes}};
    return j.dump(1);
}

DecompTree tree_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    if (!j.is_object() || j.value("format", "") != "viseme-tree") throw std::runtime_error("not a viseme-tree file");
    if (j.at("version").get<int>() != kTreeVersion) throw std::runtime_error("viseme-tree version mismatch");
    DecompTree t;
    t.width = j.at("width").get<int>();
    t.height = j.at("height").get<int>();
    t.bands = j.at("bands").get<int>();
    t.levels = j.at("levels").get<int>();
    const Json& p = j.at("params");
    t.params.precision = p.at("precision").get<double>();
    t.params.min_card = p.at("min_card").get<std::size_t>();
    t.params.strategy = p.at("strategy").get<std::string>() == "singular" ? SplitStrategy::Singular
                                                                          : SplitStrategy::BestCandidate;
    t.params.aggregate = p.at("aggregate").get<bool>();
    for (const Json& jn : j.at("nodes")) {
        DecompNode n;
        n.id = jn.at("id").get<int>();
        if (n.id != static_cast<int>(t.nodes.size())) throw std::runtime_error("tree nodes out of order");
        n.parent = jn.at("parent").get<int>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
        n.depth = jn.at("depth").get<int>();
        n.card = jn.at("card").get<std::size_t>();
        n.model.order = jn.at("order").get<int>();
        n.center = {jn.at("center")[0].get<double>(), jn.at("center")[1].get<double>()};
        n.band_means = jn.at("band_means").get<std::vector<double>>();
        const auto coeffs = jn.at("coefficients").get<std::vector<double>>();
        if (coeffs.size() != static_cast<std::size_t>(kTerms) * t.bands)
            throw std::runtime_error("coefficient count mismatch");
        n.model.bands.resize(t.bands);
        for (int b = 0; b < t.bands; ++b) std::copy_n(coeffs.begin() + b * kTerms, kTerms, n.model.bands[b].c.begin());
        n.error = jn.at("error").get<double>();
        n.status = parse_enum(jn.at("status").get<std::string>(), kStatus);
        n.outcome = parse_enum(jn.at("outcome").get<std::string>(), kOutcomes);
        n.split_rule = parse_enum(jn.at("split_rule").get<std::string>(), kRules);
        n.degenerate = jn.at("degenerate").get<bool>();
        n.moments = RawMoments::from_array(jn.at("moments").get<std::array<std::int64_t, 10>>());
        if (jn.contains("pixels")) n.pixels = pixels_from(jn.at("pixels"));
        t.nodes.push_back(std::move(n));
    }
    if (t.nodes.empty()) throw std::runtime_error("empty tree");
    for (const DecompNode& n : t.nodes) {
        const int size = static_cast<int>(t.nodes.size());
        if ((n.left >= size || n.right >= size || n.parent >= size) || (n.left < 0) != (n.right < 0))
            throw std::runtime_error("invalid child ids");
        if (n.is_leaf() && n.pixels.size() != n.card) throw std::runtime_error("leaf pixel count mismatch");
    }
    return t;
}

SegmentStats segment_stats(const DecompTree& tree) {
    SegmentStats s;
    for (int id : tree.leaves()) {
        const DecompNode& n = tree.nodes[id];
        ++s.leaf_count;
        s.max_error = std::max(s.max_error, n.error);
        ++s.orders[n.model.order];
    }
    return s;
}

std::string stats_to_json(const SegmentStats& s) {
    Json orders = Json::object();
    for (const auto& [o, c] : s.orders) orders[std::to_string(o)] = c;
    Json j{{"leaf_count", s.leaf_count}, {"max_error", s.max_error}, {"orders", orders}};
    return j.dump(1);
}

std::string descriptors_to_json(const DecompTree& tree, const std::vector<CompoundShape>& shapes) {
    Json records = Json::array();
    for (const CompoundShape& s : shapes) {
        Json r{{"node", s.node}, {"depth", s.depth}, {"leaf", tree.nodes[s.node].is_leaf()}};
        r.update(pose_record(s.domain));
        if (s.rendering) {
            Json bands = Json::array();
            for (const BandRendering& b : s.rendering->bands)
                bands.push_back({{"invariants", b.invariants},
                                 {"flat", b.flat},
                                 {"pose",
                                  {{"z0", b.pose.z0},
                                   {"theta_xz", b.pose.theta_xz},
                                   {"theta_yz", b.pose.theta_yz},
                                   {"theta_xu", b.pose.theta_xu},
                                   {"lambda_u", b.pose.lambda_u}}}});
            r["rendering"] = bands;
        }
        if (tree.nodes[s.node].is_leaf()) {
            const FeatureSeries fs = feature_series(tree, shapes, s.node);
            r["series"] = {{"nodes", fs.nodes}, {"vectors", fs.vectors}};
        }
        records.push_back(r);
    }
    Json j{{"format", "viseme-descriptors"}, {"version", 1}, {"records", records}};
    return j.dump(1);
}

std::string compounds_to_json(const DecompTree& tree, const std::vector<CompoundShape>& shapes) {
    Json records = Json::array();
    for (const CompoundShape& s : shapes) {
        Json r = pose_record(s.domain);
        r["node"] = s.node;
        r["depth"] = s.depth;
        r["leaf"] = tree.nodes[s.node].is_leaf();
        r["members"] = s.members;
        if (s.label) r["label"] = *s.label;
        records.push_back(r);
    }
    Json j{{"format", "viseme-compounds"}, {"version", 1}, {"records", records}};
    return j.dump(1);
}

}  // namespace viseme
