#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "synthetic.hpp"
#include "viseme/coder.hpp"
#include "viseme/hilbert.hpp"

using namespace viseme;

namespace {

Encoded encode_default(const MultiImage& img, bool compounds = false) {
    EncodeConfig cfg;
    cfg.compounds = compounds;
    return encode(img, cfg);
}

}  // namespace

TEST(Coder, HilbertResolutionCoversTheImage) {
    EXPECT_EQ(hilbert_resolution(1, 1), 1);
    EXPECT_EQ(hilbert_resolution(2, 2), 1);
    EXPECT_EQ(hilbert_resolution(3, 2), 2);
    EXPECT_EQ(hilbert_resolution(256, 100), 8);
    EXPECT_EQ(hilbert_resolution(257, 100), 9);
}

TEST(Coder, ConstantImageRoundTripsExactly) {
    const MultiImage img = fixtures::constant_image(37, 23, 3, 118);
    const Encoded e = encode_default(img);
    ASSERT_EQ(e.sentence.words.size(), 1u);
    const MultiImage out = synthesize(e.sentence, e.book.alphabet, e.book.dictionary);
    EXPECT_EQ(out, img);
    EXPECT_EQ(max_abs_error(out, img), 0);
    EXPECT_TRUE(std::isinf(psnr(out, img)));
}

TEST(Coder, TwoRegionImageHasWordsInHilbertOrder) {
    const auto ramp = fixtures::two_ramp(64, 64);
    const Encoded e = encode_default(ramp.image);
    const auto leaves = e.tree.leaves();
    ASSERT_EQ(e.sentence.words.size(), leaves.size());
    std::vector<std::uint64_t> idx;
    const int r = e.sentence.header.hilbert_r;
    for (const SentenceWord& w : e.sentence.words) {
        const auto cell = [&](double v) { return static_cast<std::uint32_t>(std::floor((v + 0.5) / 64.0 * (1 << r))); };
        idx.push_back(hilbert_xy2d(r, cell(w.pose.xg), cell(w.pose.yg)));
    }
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    // The curve starts at the bottom-left cell, so the left ramp comes first.
    EXPECT_LT(e.sentence.words.front().pose.xg, 32);
}

TEST(Coder, WordCountEqualsLeafCountPlusCompounds) {
    const auto pp = fixtures::piecewise_planar(64, 64);
    const Encoded leaves_only = encode_default(pp.image);
    EXPECT_EQ(leaves_only.sentence.words.size(), leaves_only.tree.leaves().size());
    const Encoded with = encode_default(pp.image, true);
    EXPECT_EQ(with.sentence.words.size(), with.tree.nodes.size());
    for (std::size_t i = 0; i < with.sentence.words.size(); ++i)
        EXPECT_EQ(with.sentence.words[i].kind, i < with.tree.leaves().size() ? WordKind::Leaf : WordKind::Compound);
    EXPECT_EQ(synthesize(with.sentence, with.book.alphabet, with.book.dictionary),
              synthesize(leaves_only.sentence, leaves_only.book.alphabet, leaves_only.book.dictionary));
}

TEST(Coder, PlanarInteriorIsReproduced) {
    const auto pp = fixtures::piecewise_planar(128, 128);
    const Encoded e = encode_default(pp.image);
    std::vector<std::uint32_t> labels;
    const MultiImage out = synthesize(e.sentence, e.book.alphabet, e.book.dictionary, &labels);
    const auto interior = interior_mask(pp.labels, 128, 128, 2);
    EXPECT_LE(max_abs_error(out, pp.image, interior), 3);
    for (std::uint32_t l : labels) ASSERT_NE(l, kUnclaimed);
    const MultiImage part = synthesize_partition(e);
    EXPECT_LE(max_abs_error(part, pp.image, interior), 3);
}

TEST(Coder, EmptySentenceIsBlack) {
    Sentence s;
    s.header = {8, 4, 2, 256, 2.0, 3, ""};
    const MultiImage out = synthesize(s, Alphabet({}, 2), Dictionary{});
    EXPECT_EQ(out, MultiImage(8, 4, 2));
    s.header.width = 0;
    EXPECT_THROW(synthesize(s, Alphabet({}, 2), Dictionary{}), std::invalid_argument);
}

TEST(Coder, UnknownCodeThrows) {
    const Encoded e = encode_default(fixtures::constant_image(16, 16, 1, 5));
    Sentence s = e.sentence;
    s.words[0].word = 999;
    EXPECT_THROW(synthesize(s, e.book.alphabet, e.book.dictionary), std::out_of_range);
}

TEST(Coder, SerializationRoundTrips) {
    const auto pp = fixtures::piecewise_planar(64, 64);
    const Encoded e = encode_default(pp.image, true);
    const std::string js = sentence_to_json(e.sentence);
    const Sentence sj = sentence_from_json(js);
    EXPECT_EQ(sentence_to_json(sj), js);
    EXPECT_EQ(synthesize(sj, e.book.alphabet, e.book.dictionary),
              synthesize(e.sentence, e.book.alphabet, e.book.dictionary));
    const auto bin = sentence_to_binary(e.sentence);
    EXPECT_EQ(std::string(bin.begin(), bin.begin() + 4), "VSN1");
    const Sentence sb = sentence_from_binary(bin);
    EXPECT_EQ(sb.header.dictionary, e.sentence.header.dictionary);
    ASSERT_EQ(sb.words.size(), e.sentence.words.size());
    for (std::size_t i = 0; i < sb.words.size(); ++i) {
        EXPECT_EQ(sb.words[i].word, e.sentence.words[i].word);
        EXPECT_EQ(sb.words[i].kind, e.sentence.words[i].kind);
        EXPECT_FLOAT_EQ(static_cast<float>(sb.words[i].pose.xg), static_cast<float>(e.sentence.words[i].pose.xg));
    }
    EXPECT_EQ(sentence_to_binary(sb), bin);
    auto bad = bin;
    bad.resize(bin.size() - 3);
    EXPECT_THROW(sentence_from_binary(bad), std::exception);
}

TEST(Coder, EncodingIsDeterministicAcrossThreadCounts) {
    const auto pp = fixtures::piecewise_planar(96, 96);
    omp_set_num_threads(1);
    const Encoded a = encode_default(pp.image, true);
    const MultiImage da = synthesize(a.sentence, a.book.alphabet, a.book.dictionary);
    omp_set_num_threads(4);
    const Encoded b = encode_default(pp.image, true);
    const MultiImage db = synthesize(b.sentence, b.book.alphabet, b.book.dictionary);
    EXPECT_EQ(sentence_to_binary(a.sentence), sentence_to_binary(b.sentence));
    EXPECT_EQ(alphabet_to_json(a.book.alphabet), alphabet_to_json(b.book.alphabet));
    EXPECT_EQ(da, db);
}

TEST(FillHoles, LowerMedianOfClaimedNeighbours) {
    const std::uint32_t U = kUnclaimed;
    std::vector<std::uint32_t> l{1, 2, 3,
                                 4, U, 6,
                                 7, 8, 9};
    fill_holes(l, 3, 3, 4);
    EXPECT_EQ(l[4], 4u);  // sorted {1,2,3,4,6,7,8,9}, lower median 4
}

TEST(FillHoles, PropagatesIntoLargeHoles) {
    std::vector<std::uint32_t> l(10 * 10, kUnclaimed);
    l[0] = 7;
    fill_holes(l, 10, 10, 32);
    for (std::uint32_t v : l) EXPECT_EQ(v, 7u);
    std::vector<std::uint32_t> none(4, kUnclaimed);
    fill_holes(none, 2, 2, 8);
    for (std::uint32_t v : none) EXPECT_EQ(v, kUnclaimed);
}

TEST(Metrics, PsnrAndErrors) {
    MultiImage a(4, 4, 1), b(4, 4, 1);
    b.set(0, 1, 1, 16);
    EXPECT_EQ(max_abs_error(a, b), 16);
    EXPECT_NEAR(psnr(a, b), 10 * std::log10(255.0 * 255.0 / (256.0 / 16)), 1e-9);
    std::vector<std::uint8_t> mask(16, 1);
    mask[5] = 0;
    EXPECT_EQ(max_abs_error(a, b, mask), 0);
    EXPECT_THROW(max_abs_error(a, MultiImage(3, 4, 1)), std::invalid_argument);
}

TEST(Metrics, InteriorMask) {
    std::vector<std::uint32_t> labels(10 * 10, 0);
    for (int y = 0; y < 10; ++y)
        for (int x = 5; x < 10; ++x) labels[y * 10 + x] = 1;
    const auto m = interior_mask(labels, 10, 10, 2);
    for (int y = 0; y < 10; ++y)
        for (int x = 0; x < 10; ++x) EXPECT_EQ(m[y * 10 + x], (x <= 2 || x >= 7) ? 1 : 0) << x << "," << y;
}
