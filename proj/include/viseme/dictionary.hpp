#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "viseme/domain.hpp"
#include "viseme/grouping.hpp"
#include "viseme/mask.hpp"
#include "viseme/quant_tree.hpp"
#include "viseme/rendering.hpp"

namespace viseme {

enum class Profile { Full, ConvexHull };

const char* to_string(Profile p);
Profile parse_profile(const std::string& s);

struct VqConfig {
    int r = 4;
    Profile profile = Profile::Full;
    double clamp = 2.0;
};

int domain_dims(Profile p);
int render_dims(Profile p);

double normalize_unit(double v);
double normalize_signed(double v, double clamp);
std::vector<double> normalize_domain(const DomainDescriptor& d, const VqConfig& cfg);
std::vector<double> normalize_rendering(const BandRendering& b, const VqConfig& cfg);

struct AlphabetEntry {
    std::uint64_t code = 0;
    std::vector<double> sum;             // running sum of raw invariant vectors
    std::vector<double> representative;  // their mean
    std::uint64_t count = 0;
    std::vector<DomainMask> masks;       // distinct masks in arrival order
    std::map<std::string, std::uint64_t> labels;
};

struct AlphabetTree {
    QuantTree tree;
    std::map<std::uint64_t, AlphabetEntry> entries;
};

struct SimpleShape {
    DomainDescriptor domain;
    RenderingDescriptor rendering;
    std::optional<DomainMask> mask;
    std::optional<std::string> label;
};

struct Letter {
    std::uint64_t domain = 0;
    std::uint32_t mask = 0;  // variant index within the domain entry
    std::vector<std::uint64_t> render;

    auto operator<=>(const Letter&) const = default;
};

struct Alphabet {
    VqConfig config;
    int bands = 1;
    AlphabetTree domain;
    std::vector<AlphabetTree> render;

    Alphabet() = default;
    Alphabet(const VqConfig& cfg, int bands);

    Letter add(const SimpleShape& s);
    // Codes of a shape without inserting it; mask variant 0.
    Letter quantize(const SimpleShape& s) const;
    std::size_t size() const { return domain.entries.size(); }
};

Alphabet build_alphabet(std::span<const SimpleShape> shapes, const VqConfig& cfg, int bands,
                        bool skip_degenerate = true);

struct Word {
    std::vector<Letter> letters;
    std::uint64_t count = 0;
    std::set<std::string> labels;
};

class Dictionary {
public:
    int add(const std::vector<Letter>& letters, const std::optional<std::string>& label = std::nullopt);
    std::optional<int> find(const std::vector<Letter>& letters) const;
    const std::vector<Word>& words() const { return words_; }
    std::size_t size() const { return words_.size(); }
    // Word ids sharing each label, for labels carried by two or more words.
    std::map<std::string, std::vector<int>> synonyms() const;

private:
    std::vector<Word> words_;
    std::map<std::vector<Letter>, int> index_;
};

// One word per compound: member letters sorted by `leaf_rank` (Hilbert rank
// of the leaf centres).
Dictionary build_dictionary(const std::vector<CompoundShape>& compounds, const std::map<int, Letter>& leaf_letters,
                            const std::map<int, std::size_t>& leaf_rank);

}  // namespace viseme
