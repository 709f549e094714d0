#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "viseme/dictionary.hpp"
#include "viseme/grouping.hpp"
#include "viseme/image.hpp"
#include "viseme/segmenter.hpp"

namespace viseme {

struct WordPose {
    double xg = 0.0, yg = 0.0, theta = 0.0, scale = 0.0;
    double area = 0.0;
    std::vector<BandPose> bands;
};

enum class WordKind : std::uint8_t { Leaf = 0, Compound = 1 };

struct SentenceWord {
    std::uint32_t word = 0;  // dictionary word id
    WordKind kind = WordKind::Leaf;
    WordPose pose;
};

struct SentenceHeader {
    int width = 0, height = 0, bands = 0, levels = 256;
    double precision = 0.0;
    int hilbert_r = 1;
    std::string dictionary;  // fingerprint of the alphabet and dictionary
};

struct Sentence {
    SentenceHeader header;
    std::vector<SentenceWord> words;
};

struct EncodeConfig {
    SegmentParams segment;
    VqConfig vq;
    bool compounds = false;  // list internal nodes after the leaves
};

struct Codebook {
    std::vector<CompoundShape> shapes;  // indexed by node id
    Alphabet alphabet;
    Dictionary dictionary;
    std::vector<int> leaf_order;  // leaf node ids in Hilbert order of their centres
    std::map<int, Letter> letters;
};

// Descriptors, grouping, alphabet and dictionary of a decomposition. Labels
// attach to node ids. Skipped degenerate leaves get no letter and the
// compounds containing them no word.
Codebook build_codebook(const DecompTree& tree, const VqConfig& vq, bool skip_degenerate = false,
                        const std::map<int, std::string>& labels = {});

struct Encoded {
    DecompTree tree;
    Codebook book;
    Sentence sentence;
};

int hilbert_resolution(int width, int height);

Encoded encode(const MultiImage& img, const EncodeConfig& cfg);

// Pose-based synthesis. Only leaf words are drawn; `labels` receives the
// sentence position owning each pixel after hole filling.
MultiImage synthesize(const Sentence& s, const Alphabet& alphabet, const Dictionary& dict,
                      std::vector<std::uint32_t>* labels = nullptr);

// Debug mode: the true leaf partition with the descriptor-chain models.
MultiImage synthesize_partition(const Encoded& e);

// Fill unclaimed entries (kUnclaimed) by the lower median of claimed 3x3
// neighbours, iterated until stable or `max_iter` passes.
inline constexpr std::uint32_t kUnclaimed = 0xffffffffu;
void fill_holes(std::vector<std::uint32_t>& labels, int width, int height, int max_iter);

double psnr(const MultiImage& a, const MultiImage& b);
int max_abs_error(const MultiImage& a, const MultiImage& b);
// Restricted to pixels whose mask entry is nonzero.
int max_abs_error(const MultiImage& a, const MultiImage& b, std::span<const std::uint8_t> mask);

// 1 where every label within Chebyshev distance `radius` equals the pixel's.
std::vector<std::uint8_t> interior_mask(std::span<const std::uint32_t> labels, int width, int height, int radius);

// Serialisation. Texts are canonical JSON; the binary sentence mirrors the
// JSON field order with 32-bit float poses.
std::string alphabet_to_json(const Alphabet& a);
Alphabet alphabet_from_json(const std::string& text);
std::string dictionary_to_json(const Dictionary& d);
Dictionary dictionary_from_json(const std::string& text);
std::string codebook_fingerprint(const Alphabet& a, const Dictionary& d);
std::string sentence_to_json(const Sentence& s);
Sentence sentence_from_json(const std::string& text);
std::vector<std::uint8_t> sentence_to_binary(const Sentence& s);
Sentence sentence_from_binary(std::span<const std::uint8_t> bytes);

}  // namespace viseme
