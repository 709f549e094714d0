#include "viseme/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace viseme {

const char* to_string(Profile p) { return p == Profile::Full ? "full" : "convex-hull"; }

Profile parse_profile(const std::string& s) {
    if (s == "full") return Profile::Full;
    if (s == "convex-hull") return Profile::ConvexHull;
    throw std::invalid_argument("unknown profile: " + s);
}

int domain_dims(Profile p) { return p == Profile::Full ? kDomainDims : 3; }
int render_dims(Profile p) { return p == Profile::Full ? kRenderDims : 1; }

namespace {

const double kBelowOne = std::nextafter(1.0, 0.0);

void check_finite(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite descriptor value");
}

}  // namespace

double normalize_unit(double v) {
    check_finite(v);
    return std::clamp(v, 0.0, kBelowOne);
}

double normalize_signed(double v, double clamp) {
    check_finite(v);
    if (!(clamp > 0.0)) throw std::invalid_argument("clamp bound must be positive");
    const double c = std::clamp(v, -clamp, clamp);
    return std::clamp((c + clamp) / (2.0 * clamp), 0.0, kBelowOne);
}

std::vector<double> normalize_domain(const DomainDescriptor& d, const VqConfig& cfg) {
    const auto& v = d.invariants;
    if (cfg.profile == Profile::ConvexHull)
        return {normalize_unit(v[0]), normalize_signed(v[1], cfg.clamp), normalize_signed(v[4], cfg.clamp)};
    std::vector<double> out{normalize_unit(v[0])};
    for (int i = 1; i < kDomainDims; ++i) out.push_back(normalize_signed(v[i], cfg.clamp));
    return out;
}

std::vector<double> normalize_rendering(const BandRendering& b, const VqConfig& cfg) {
    std::vector<double> out;
    const int dims = render_dims(cfg.profile);
    for (int i = 0; i < dims; ++i) out.push_back(normalize_signed(b.invariants[i], cfg.clamp));
    return out;
}

Alphabet::Alphabet(const VqConfig& cfg, int nbands) : config(cfg), bands(nbands) {
    domain.tree = QuantTree(domain_dims(cfg.profile), cfg.r);
    render.resize(nbands);
    for (auto& t : render) t.tree = QuantTree(render_dims(cfg.profile), cfg.r);
}

namespace {

AlphabetEntry& add_entry(AlphabetTree& t, std::uint64_t code, std::span<const double> raw,
                         const std::optional<std::string>& label) {
    AlphabetEntry& e = t.entries[code];
    e.code = code;
    if (e.sum.empty()) e.sum.assign(raw.size(), 0.0);
    for (std::size_t i = 0; i < raw.size(); ++i) e.sum[i] += raw[i];
    ++e.count;
    e.representative.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) e.representative[i] = e.sum[i] / static_cast<double>(e.count);
    if (label) ++e.labels[*label];
    return e;
}

}  // namespace

Letter Alphabet::add(const SimpleShape& s) {
    if (static_cast<int>(s.rendering.bands.size()) != bands) throw std::invalid_argument("band count mismatch");
    Letter l;
    l.domain = domain.tree.insert(normalize_domain(s.domain, config));
    AlphabetEntry& de = add_entry(domain, l.domain, s.domain.invariants, s.label);
    if (s.mask) {
        const auto it = std::find(de.masks.begin(), de.masks.end(), *s.mask);
        l.mask = static_cast<std::uint32_t>(it - de.masks.begin());
        if (it == de.masks.end()) de.masks.push_back(*s.mask);
    }
    for (int b = 0; b < bands; ++b) {
        const BandRendering& br = s.rendering.bands[b];
        const std::uint64_t code = render[b].tree.insert(normalize_rendering(br, config));
        add_entry(render[b], code, br.invariants, s.label);
        l.render.push_back(code);
    }
    return l;
}

Letter Alphabet::quantize(const SimpleShape& s) const {
    Letter l;
    l.domain = domain.tree.cell_code(normalize_domain(s.domain, config));
    for (int b = 0; b < bands; ++b)
        l.render.push_back(render[b].tree.cell_code(normalize_rendering(s.rendering.bands[b], config)));
    return l;
}

Alphabet build_alphabet(std::span<const SimpleShape> shapes, const VqConfig& cfg, int bands, bool skip_degenerate) {
    Alphabet a(cfg, bands);
    for (const SimpleShape& s : shapes) {
        if (skip_degenerate && s.domain.degenerate) continue;
        a.add(s);
    }
    return a;
}

int Dictionary::add(const std::vector<Letter>& letters, const std::optional<std::string>& label) {
    if (letters.empty()) throw std::invalid_argument("empty word");
    auto [it, fresh] = index_.try_emplace(letters, static_cast<int>(words_.size()));
    if (fresh) words_.push_back({letters, 0, {}});
    Word& w = words_[it->second];
    ++w.count;
    if (label) w.labels.insert(*label);
    return it->second;
}

std::optional<int> Dictionary::find(const std::vector<Letter>& letters) const {
    const auto it = index_.find(letters);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::map<std::string, std::vector<int>> Dictionary::synonyms() const {
    std::map<std::string, std::vector<int>> by_label;
    for (std::size_t i = 0; i < words_.size(); ++i)
        for (const std::string& l : words_[i].labels) by_label[l].push_back(static_cast<int>(i));
    std::erase_if(by_label, [](const auto& kv) { return kv.second.size() < 2; });
    return by_label;
}

Dictionary build_dictionary(const std::vector<CompoundShape>& compounds, const std::map<int, Letter>& leaf_letters,
                            const std::map<int, std::size_t>& leaf_rank) {
    Dictionary d;
    for (const CompoundShape& c : compounds) {
        std::vector<int> members = c.members;
        for (int m : members)
            if (!leaf_letters.count(m) || !leaf_rank.count(m))
                throw std::invalid_argument("leaf " + std::to_string(m) + " has no alphabet code");
        std::stable_sort(members.begin(), members.end(),
                         [&](int a, int b) { return leaf_rank.at(a) < leaf_rank.at(b); });
        std::vector<Letter> letters;
        for (int m : members) letters.push_back(leaf_letters.at(m));
        d.add(letters, c.label);
    }
    return d;
}

}  // namespace viseme
