#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "synthetic.hpp"
#include "viseme/coder.hpp"
#include "viseme/dictionary.hpp"

using namespace viseme;

namespace {

SimpleShape shape(double ecc, double a1, double lv) {
    SimpleShape s;
    s.domain.invariants = {ecc, a1, 0.1, -0.2, 0.05};
    s.domain.area = 20;
    BandRendering br;
    br.invariants = {lv, 0.0, 0.0, 0.0, 0.0};
    s.rendering.bands = {br};
    return s;
}

std::vector<SimpleShape> random_shapes(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0, 1), w(-2, 2);
    std::vector<SimpleShape> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(shape(u(rng), w(rng), w(rng) / 2));
    return out;
}

}  // namespace

TEST(Normalize, Ranges) {
    EXPECT_EQ(normalize_unit(0.3), 0.3);
    EXPECT_LT(normalize_unit(1.0), 1.0);
    EXPECT_EQ(normalize_unit(-0.1), 0.0);
    EXPECT_EQ(normalize_signed(0.0, 2.0), 0.5);
    EXPECT_EQ(normalize_signed(-2.0, 2.0), 0.0);
    EXPECT_EQ(normalize_signed(-7.0, 2.0), 0.0);
    EXPECT_LT(normalize_signed(2.0, 2.0), 1.0);
    EXPECT_NEAR(normalize_signed(1.0, 2.0), 0.75, 1e-15);
    EXPECT_THROW(normalize_signed(0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(normalize_unit(INFINITY), std::domain_error);
    EXPECT_THROW(parse_profile("bogus"), std::invalid_argument);
    EXPECT_EQ(parse_profile(to_string(Profile::ConvexHull)), Profile::ConvexHull);
}

TEST(Normalize, ProfileDimensions) {
    const SimpleShape s = shape(0.5, 0.3, -0.4);
    VqConfig full, hull;
    hull.profile = Profile::ConvexHull;
    EXPECT_EQ(normalize_domain(s.domain, full).size(), 5u);
    EXPECT_EQ(normalize_domain(s.domain, hull).size(), 3u);
    EXPECT_EQ(normalize_rendering(s.rendering.bands[0], full).size(), 5u);
    EXPECT_EQ(normalize_rendering(s.rendering.bands[0], hull).size(), 1u);
    for (double v : normalize_domain(s.domain, full)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Alphabet, SingleShapeSingleEntry) {
    const std::vector<SimpleShape> shapes{shape(0.5, 0.3, 0.2)};
    const Alphabet a = build_alphabet(shapes, {}, 1);
    ASSERT_EQ(a.size(), 1u);
    const AlphabetEntry& e = a.domain.entries.begin()->second;
    EXPECT_EQ(e.count, 1u);
    EXPECT_EQ(e.representative[0], 0.5);
}

TEST(Alphabet, DuplicatesAccumulate) {
    std::vector<SimpleShape> shapes(3, shape(0.5, 0.3, 0.2));
    shapes[1].label = "cat";
    Alphabet a = build_alphabet(shapes, {}, 1);
    ASSERT_EQ(a.size(), 1u);
    const AlphabetEntry& e = a.domain.entries.begin()->second;
    EXPECT_EQ(e.count, 3u);
    EXPECT_EQ(e.labels.at("cat"), 1u);
    EXPECT_EQ(a.render[0].entries.begin()->second.count, 3u);
}

TEST(Alphabet, RepresentativeIsTheMean) {
    // Both shapes fall in the same r = 1 cell.
    const std::vector<SimpleShape> shapes{shape(0.6, 0.2, 0.0), shape(0.8, 0.4, 0.0)};
    VqConfig cfg;
    cfg.r = 1;
    const Alphabet a = build_alphabet(shapes, cfg, 1);
    ASSERT_EQ(a.size(), 1u);
    const auto& rep = a.domain.entries.begin()->second.representative;
    EXPECT_NEAR(rep[0], 0.7, 1e-15);
    EXPECT_NEAR(rep[1], 0.3, 1e-15);
}

TEST(Alphabet, SizeGrowsWithPrecision) {
    std::mt19937_64 rng(1);
    const auto shapes = random_shapes(rng, 300);
    std::size_t prev = 0;
    for (int r = 1; r <= 6; ++r) {
        VqConfig cfg;
        cfg.r = r;
        const std::size_t n = build_alphabet(shapes, cfg, 1).size();
        EXPECT_GE(n, prev);
        EXPECT_LE(n, shapes.size());
        prev = n;
    }
}

TEST(Alphabet, DegenerateShapesSkippedByDefault) {
    std::vector<SimpleShape> shapes{shape(0.5, 0.3, 0.2), shape(0.1, 0.1, 0.1)};
    shapes[1].domain.degenerate = true;
    EXPECT_EQ(build_alphabet(shapes, {}, 1).size(), 1u);
    EXPECT_EQ(build_alphabet(shapes, {}, 1, false).size(), 2u);
}

TEST(Alphabet, QuantizeMatchesAdd) {
    std::mt19937_64 rng(2);
    Alphabet a({}, 1);
    for (const SimpleShape& s : random_shapes(rng, 50)) {
        const Letter l = a.add(s);
        EXPECT_EQ(a.quantize(s), l);
    }
    EXPECT_THROW(a.add(SimpleShape{}), std::invalid_argument);
}

TEST(Alphabet, MaskVariantsAreIndexed) {
    SimpleShape s = shape(0.5, 0.3, 0.2);
    Alphabet a({}, 1);
    s.mask = DomainMask{6, 1.0, 1, {0x40}};
    EXPECT_EQ(a.add(s).mask, 0u);
    s.mask = DomainMask{6, 1.0, 1, {0x80}};
    EXPECT_EQ(a.add(s).mask, 1u);
    s.mask = DomainMask{6, 1.0, 1, {0x40}};
    EXPECT_EQ(a.add(s).mask, 0u);
    EXPECT_EQ(a.domain.entries.begin()->second.masks.size(), 2u);
}

TEST(Dictionary, WordsCountAndSynonyms) {
    const Letter a{1, 0, {2}}, b{3, 0, {4}};
    Dictionary d;
    EXPECT_EQ(d.add({a}, "x"), 0);
    EXPECT_EQ(d.add({a, b}, "x"), 1);
    EXPECT_EQ(d.add({a}), 0);
    EXPECT_EQ(d.add({b}, "y"), 2);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.words()[0].count, 2u);
    EXPECT_EQ(d.find({a, b}), 1);
    EXPECT_FALSE(d.find({b, a}).has_value());
    const auto syn = d.synonyms();
    ASSERT_EQ(syn.size(), 1u);
    EXPECT_EQ(syn.at("x"), (std::vector<int>{0, 1}));
    EXPECT_THROW(d.add({}), std::invalid_argument);
}

TEST(Dictionary, BuildOrdersLettersByRankAndRequiresCodes) {
    CompoundShape leaf1, leaf2, both;
    leaf1.members = {1};
    leaf2.members = {2};
    both.members = {1, 2};
    const std::map<int, Letter> letters{{1, Letter{10, 0, {}}}, {2, Letter{20, 0, {}}}};
    const std::map<int, std::size_t> rank{{1, 1}, {2, 0}};
    const Dictionary d = build_dictionary({leaf1, leaf2, both}, letters, rank);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.words()[2].letters[0].domain, 20u);
    EXPECT_EQ(d.words()[2].letters[1].domain, 10u);
    CompoundShape orphan;
    orphan.members = {3};
    EXPECT_THROW(build_dictionary({orphan}, letters, rank), std::invalid_argument);
}

TEST(Serialization, AlphabetAndDictionaryRoundTrip) {
    const auto pp = fixtures::piecewise_planar(64, 64);
    const DecompTree t = decompose(pp.image, {});
    const Codebook book = build_codebook(t, {}, false, {{0, "scene"}});
    const std::string aj = alphabet_to_json(book.alphabet), dj = dictionary_to_json(book.dictionary);
    const Alphabet a2 = alphabet_from_json(aj);
    const Dictionary d2 = dictionary_from_json(dj);
    EXPECT_EQ(alphabet_to_json(a2), aj);
    EXPECT_EQ(dictionary_to_json(d2), dj);
    EXPECT_EQ(a2.domain.tree, book.alphabet.domain.tree);
    EXPECT_EQ(codebook_fingerprint(a2, d2), codebook_fingerprint(book.alphabet, book.dictionary));
    EXPECT_EQ(codebook_fingerprint(a2, d2).size(), 16u);
    Dictionary other = d2;
    other.add({Letter{12345, 0, {1}}});
    EXPECT_NE(codebook_fingerprint(a2, other), codebook_fingerprint(a2, d2));
    EXPECT_THROW(alphabet_from_json("{}"), std::exception);
}

TEST(Codebook, OneLetterPerLeafOneWordPerCompound) {
    const auto pp = fixtures::piecewise_planar(64, 64);
    const DecompTree t = decompose(pp.image, {});
    const Codebook book = build_codebook(t, {}, false);
    EXPECT_EQ(book.letters.size(), t.leaves().size());
    EXPECT_EQ(book.leaf_order.size(), t.leaves().size());
    std::size_t total = 0;
    for (const Word& w : book.dictionary.words()) total += w.count;
    EXPECT_EQ(total, t.nodes.size());
    for (int leaf : t.leaves()) EXPECT_TRUE(book.dictionary.find({book.letters.at(leaf)}).has_value());
}
