#include "viseme/coder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "viseme/hilbert.hpp"
#include "viseme/mask.hpp"

namespace viseme {

int hilbert_resolution(int width, int height) {
    const int side = std::max({width, height, 2});
    int r = 1;
    while ((1 << r) < side) ++r;
    return r;
}

namespace {

Box image_box(int width, int height) { return {-0.5, -0.5, width - 0.5, height - 0.5}; }

std::vector<Pixel> pixels_of(const DecompTree& tree, int id) {
    std::vector<Pixel> out;
    for (std::uint32_t k : tree.node_pixels(id))
        out.push_back({static_cast<int>(k % tree.width), static_cast<int>(k / tree.width)});
    return out;
}

// Poses are rounded to float so the binary sentence decodes like the JSON one.
double f32(double v) { return static_cast<float>(v); }

WordPose pose_of(const CompoundShape& s) {
    WordPose p;
    p.xg = f32(s.domain.pose.xg);
    p.yg = f32(s.domain.pose.yg);
    p.theta = f32(s.domain.pose.theta);
    p.scale = f32(s.domain.pose.scale);
    p.area = f32(s.domain.area);
    for (const BandRendering& b : s.rendering->bands)
        p.bands.push_back({f32(b.pose.z0), f32(b.pose.theta_xz), f32(b.pose.theta_yz), f32(b.pose.theta_xu),
                           f32(b.pose.lambda_u)});
    return p;
}

std::vector<std::size_t> hilbert_order(const std::vector<CompoundShape>& shapes, const std::vector<int>& ids,
                                       int r, const Box& box) {
    std::vector<Point2> centres;
    for (int id : ids) centres.push_back({shapes[id].domain.pose.xg, shapes[id].domain.pose.yg});
    return order_points(centres, r, box);
}

const Letter& leaf_letter(const Dictionary& dict, const SentenceWord& w) {
    if (w.word >= dict.size()) throw std::out_of_range("unknown word code " + std::to_string(w.word));
    const Word& word = dict.words()[w.word];
    if (word.letters.size() != 1) throw std::invalid_argument("leaf entry refers to a compound word");
    return word.letters.front();
}

std::vector<Cubic> word_models(const SentenceWord& w, const Letter& l, const Alphabet& a) {
    if (w.pose.bands.size() != l.render.size() || static_cast<int>(l.render.size()) != a.bands)
        throw std::invalid_argument("band count mismatch in sentence");
    std::vector<Cubic> out;
    for (std::size_t b = 0; b < l.render.size(); ++b) {
        const auto it = a.render[b].entries.find(l.render[b]);
        if (it == a.render[b].entries.end()) throw std::out_of_range("unknown rendering code");
        std::array<double, kRenderDims> inv{};
        std::copy_n(it->second.representative.begin(), std::min<std::size_t>(kRenderDims, it->second.representative.size()),
                    inv.begin());
        const BandPose& bp = w.pose.bands[b];
        out.push_back(reconstruct_band(inv, bp, bp.lambda_u == 0.0, {w.pose.xg, w.pose.yg}));
    }
    return out;
}

MultiImage paint(const SentenceHeader& h, const std::vector<std::uint32_t>& labels,
                 const std::vector<std::vector<Cubic>>& models) {
    MultiImage out(h.width, h.height, h.bands, h.levels);
    const double top = h.levels - 1;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h.height; ++y)
        for (int x = 0; x < h.width; ++x) {
            const std::uint32_t l = labels[static_cast<std::size_t>(y) * h.width + x];
            if (l == kUnclaimed) continue;
            for (int b = 0; b < h.bands; ++b) {
                const double v = std::clamp(models[l][b](x, y), 0.0, top);
                out.set(b, x, y, static_cast<std::uint8_t>(std::lround(v)));
            }
        }
    return out;
}

}  // namespace

Codebook build_codebook(const DecompTree& tree, const VqConfig& vq, bool skip_degenerate,
                        const std::map<int, std::string>& labels) {
    Codebook b;
    b.shapes = aggregate_domain(tree);
    attach_rendering(tree, b.shapes);
    for (const auto& [id, l] : labels) b.shapes.at(id).label = l;

    const int r = hilbert_resolution(tree.width, tree.height);
    const std::vector<int> leaves = tree.leaves();
    std::map<int, std::size_t> rank;
    for (std::size_t p : hilbert_order(b.shapes, leaves, r, image_box(tree.width, tree.height))) {
        rank[leaves[p]] = b.leaf_order.size();
        b.leaf_order.push_back(leaves[p]);
    }

    b.alphabet = Alphabet(vq, tree.bands);
    for (int id : b.leaf_order) {
        const CompoundShape& s = b.shapes[id];
        if (skip_degenerate && s.domain.degenerate) continue;
        SimpleShape ss{s.domain, *s.rendering, std::nullopt, s.label};
        ss.mask = encode_mask(pixels_of(tree, id), s.domain.pose, s.domain.area);
        b.letters[id] = b.alphabet.add(ss);
    }
    std::vector<CompoundShape> coded;
    for (const CompoundShape& s : b.shapes)
        if (std::all_of(s.members.begin(), s.members.end(), [&](int m) { return b.letters.count(m) > 0; }))
            coded.push_back(s);
    b.dictionary = build_dictionary(coded, b.letters, rank);
    return b;
}

Encoded encode(const MultiImage& img, const EncodeConfig& cfg) {
    Encoded e;
    e.tree = decompose(img, cfg.segment);
    e.book = build_codebook(e.tree, cfg.vq);
    const Codebook& b = e.book;

    const int r = hilbert_resolution(img.width(), img.height());
    std::map<int, std::size_t> rank;
    for (std::size_t i = 0; i < b.leaf_order.size(); ++i) rank[b.leaf_order[i]] = i;
    Sentence& st = e.sentence;
    st.header = {img.width(), img.height(), img.bands(), img.levels(), cfg.segment.precision, r,
                 codebook_fingerprint(b.alphabet, b.dictionary)};
    for (int id : b.leaf_order) {
        const auto w = b.dictionary.find({b.letters.at(id)});
        st.words.push_back({static_cast<std::uint32_t>(*w), WordKind::Leaf, pose_of(b.shapes[id])});
    }
    if (cfg.compounds) {
        std::vector<int> internal;
        for (const DecompNode& n : e.tree.nodes)
            if (!n.is_leaf()) internal.push_back(n.id);
        for (std::size_t p : hilbert_order(b.shapes, internal, r, image_box(img.width(), img.height()))) {
            const CompoundShape& s = b.shapes[internal[p]];
            std::vector<int> members = s.members;
            std::stable_sort(members.begin(), members.end(), [&](int x, int y) { return rank.at(x) < rank.at(y); });
            std::vector<Letter> word;
            for (int m : members) word.push_back(b.letters.at(m));
            st.words.push_back({static_cast<std::uint32_t>(*b.dictionary.find(word)), WordKind::Compound, pose_of(s)});
        }
    }
    return e;
}

void fill_holes(std::vector<std::uint32_t>& labels, int width, int height, int max_iter) {
    std::vector<std::uint32_t> prev;
    std::vector<std::uint32_t> nb;
    for (int it = 0; it < max_iter; ++it) {
        prev = labels;
        bool changed = false, holes = false;
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) {
                const std::size_t k = static_cast<std::size_t>(y) * width + x;
                if (prev[k] != kUnclaimed) continue;
                nb.clear();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int xx = x + dx, yy = y + dy;
                        if ((dx || dy) && xx >= 0 && yy >= 0 && xx < width && yy < height) {
                            const std::uint32_t l = prev[static_cast<std::size_t>(yy) * width + xx];
                            if (l != kUnclaimed) nb.push_back(l);
                        }
                    }
                if (nb.empty()) {
                    holes = true;
                    continue;
                }
                std::nth_element(nb.begin(), nb.begin() + (nb.size() - 1) / 2, nb.end());
                labels[k] = nb[(nb.size() - 1) / 2];
                changed = true;
            }
        if (!changed || !holes) break;
    }
}

MultiImage synthesize(const Sentence& s, const Alphabet& alphabet, const Dictionary& dict,
                      std::vector<std::uint32_t>* labels_out) {
    const SentenceHeader& h = s.header;
    if (h.width <= 0 || h.height <= 0 || h.bands <= 0) throw std::invalid_argument("invalid sentence header");
    std::vector<std::uint32_t> labels(static_cast<std::size_t>(h.width) * h.height, kUnclaimed);
    std::vector<std::vector<Cubic>> models(s.words.size());
    for (std::size_t i = 0; i < s.words.size(); ++i) {
        const SentenceWord& w = s.words[i];
        if (w.kind != WordKind::Leaf) continue;
        const Letter& l = leaf_letter(dict, w);
        const auto it = alphabet.domain.entries.find(l.domain);
        if (it == alphabet.domain.entries.end() || l.mask >= it->second.masks.size())
            throw std::out_of_range("unknown domain code");
        models[i] = word_models(w, l, alphabet);
        const DomainPose pose{w.pose.xg, w.pose.yg, w.pose.theta, w.pose.scale};
        for (const Pixel& p : rasterize_mask(it->second.masks[l.mask], pose, w.pose.area, h.width, h.height)) {
            std::uint32_t& slot = labels[static_cast<std::size_t>(p.y) * h.width + p.x];
            if (slot == kUnclaimed) slot = static_cast<std::uint32_t>(i);
        }
    }
    fill_holes(labels, h.width, h.height, 1 << std::clamp(h.hilbert_r, 1, 16));
    MultiImage out = paint(h, labels, models);
    if (labels_out) *labels_out = std::move(labels);
    return out;
}

MultiImage synthesize_partition(const Encoded& e) {
    const Sentence& s = e.sentence;
    const Codebook& b = e.book;
    std::vector<std::vector<Cubic>> models(b.leaf_order.size());
    for (std::size_t i = 0; i < b.leaf_order.size(); ++i)
        models[i] = word_models(s.words[i], leaf_letter(b.dictionary, s.words[i]), b.alphabet);
    std::map<int, std::uint32_t> position;
    for (std::size_t i = 0; i < b.leaf_order.size(); ++i) position[b.leaf_order[i]] = static_cast<std::uint32_t>(i);
    const std::vector<int> leaves = e.tree.leaves();
    std::vector<std::uint32_t> labels = e.tree.label_map();
    for (std::uint32_t& l : labels) l = position.at(leaves[l]);
    return paint(s.header, labels, models);
}

double psnr(const MultiImage& a, const MultiImage& b) {
    if (a.width() != b.width() || a.height() != b.height() || a.bands() != b.bands())
        throw std::invalid_argument("image shapes differ");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        const double d = static_cast<double>(a.data()[i]) - b.data()[i];
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double peak = a.levels() - 1;
    return 10.0 * std::log10(peak * peak * a.data().size() / se);
}

int max_abs_error(const MultiImage& a, const MultiImage& b) {
    if (a.data().size() != b.data().size()) throw std::invalid_argument("image shapes differ");
    int m = 0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(int{a.data()[i]} - int{b.data()[i]}));
    return m;
}

int max_abs_error(const MultiImage& a, const MultiImage& b, std::span<const std::uint8_t> mask) {
    if (a.data().size() != b.data().size() || mask.size() != a.pixel_count())
        throw std::invalid_argument("image shapes differ");
    int m = 0;
    for (int band = 0; band < a.bands(); ++band)
        for (std::size_t k = 0; k < mask.size(); ++k)
            if (mask[k]) m = std::max(m, std::abs(int{a.sample(band, k)} - int{b.sample(band, k)}));
    return m;
}

std::vector<std::uint8_t> interior_mask(std::span<const std::uint32_t> labels, int width, int height, int radius) {
    if (labels.size() != static_cast<std::size_t>(width) * height) throw std::invalid_argument("label map size mismatch");
    std::vector<std::uint8_t> out(labels.size(), 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::uint32_t l = labels[static_cast<std::size_t>(y) * width + x];
            bool ok = true;
            for (int dy = -radius; dy <= radius && ok; ++dy)
                for (int dx = -radius; dx <= radius && ok; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx >= 0 && yy >= 0 && xx < width && yy < height)
                        ok = labels[static_cast<std::size_t>(yy) * width + xx] == l;
                }
            out[static_cast<std::size_t>(y) * width + x] = ok;
        }
    return out;
}

}  // namespace viseme
