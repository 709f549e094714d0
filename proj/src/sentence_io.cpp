#include <bit>
#include <cstring>
#include <stdexcept>

#include "json.hpp"
#include "viseme/coder.hpp"

namespace viseme {

using Json = nlohmann::ordered_json;

namespace {

constexpr int kVersion = 1;

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 15]);
    }
    return s;
}

std::vector<std::uint8_t> from_hex(const std::string& s) {
    if (s.size() % 2) throw std::runtime_error("odd-length hex string");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw std::runtime_error("invalid hex digit");
    };
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<std::uint8_t>(nib(s[2 * i]) << 4 | nib(s[2 * i + 1]));
    return out;
}

void check_format(const Json& j, const char* format) {
    if (!j.is_object() || j.value("format", "") != format)
        throw std::runtime_error(std::string("not a ") + format + " file");
    if (j.at("version").get<int>() != kVersion)
        throw std::runtime_error(std::string(format) + " version mismatch");
}

Json tree_json(const AlphabetTree& t) {
    Json entries = Json::array();
    for (const auto& [code, e] : t.entries) {
        Json je{{"code", code}, {"count", e.count}, {"sum", e.sum}, {"representative", e.representative}};
        Json labels = Json::object();
        for (const auto& [l, c] : e.labels) labels[l] = c;
        je["labels"] = labels;
        if (!e.masks.empty()) {
            Json masks = Json::array();
            for (const DomainMask& m : e.masks)
                masks.push_back({{"m", m.m}, {"extent", m.extent}, {"symbols", m.symbols}, {"stream", to_hex(m.stream)}});
            je["masks"] = masks;
        }
        entries.push_back(je);
    }
    return {{"tree", to_hex(t.tree.serialize())}, {"entries", entries}};
}

AlphabetTree tree_from(const Json& j) {
    AlphabetTree t;
    t.tree = QuantTree::deserialize(from_hex(j.at("tree").get<std::string>()));
    for (const Json& je : j.at("entries")) {
        AlphabetEntry e;
        e.code = je.at("code").get<std::uint64_t>();
        e.count = je.at("count").get<std::uint64_t>();
        e.sum = je.at("sum").get<std::vector<double>>();
        e.representative = je.at("representative").get<std::vector<double>>();
        for (const auto& [l, c] : je.at("labels").items()) e.labels[l] = c.get<std::uint64_t>();
        if (je.contains("masks"))
            for (const Json& jm : je.at("masks"))
                e.masks.push_back({jm.at("m").get<int>(), jm.at("extent").get<double>(),
                                   jm.at("symbols").get<std::uint32_t>(), from_hex(jm.at("stream").get<std::string>())});
        t.entries[e.code] = std::move(e);
    }
    return t;
}

Json letter_json(const Letter& l) { return {{"domain", l.domain}, {"mask", l.mask}, {"render", l.render}}; }

Letter letter_from(const Json& j) {
    return {j.at("domain").get<std::uint64_t>(), j.at("mask").get<std::uint32_t>(),
            j.at("render").get<std::vector<std::uint64_t>>()};
}

Json band_pose_json(const BandPose& p) {
    return {{"z0", p.z0}, {"theta_xz", p.theta_xz}, {"theta_yz", p.theta_yz}, {"theta_xu", p.theta_xu},
            {"lambda_u", p.lambda_u}};
}

}  // namespace

std::string alphabet_to_json(const Alphabet& a) {
    Json j{{"format", "viseme-alphabet"}, {"version", kVersion},       {"r", a.config.r},
           {"profile", to_string(a.config.profile)}, {"clamp", a.config.clamp}, {"bands", a.bands},
           {"domain", tree_json(a.domain)}};
    Json render = Json::array();
    for (const AlphabetTree& t : a.render) render.push_back(tree_json(t));
    j["render"] = render;
    return j.dump(1);
}

Alphabet alphabet_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    check_format(j, "viseme-alphabet");
    VqConfig cfg{j.at("r").get<int>(), parse_profile(j.at("profile").get<std::string>()), j.at("clamp").get<double>()};
    Alphabet a(cfg, j.at("bands").get<int>());
    a.domain = tree_from(j.at("domain"));
    const Json& render = j.at("render");
    if (static_cast<int>(render.size()) != a.bands) throw std::runtime_error("alphabet band count mismatch");
    for (int b = 0; b < a.bands; ++b) a.render[b] = tree_from(render[b]);
    return a;
}

std::string dictionary_to_json(const Dictionary& d) {
    Json words = Json::array();
    for (const Word& w : d.words()) {
        Json letters = Json::array();
        for (const Letter& l : w.letters) letters.push_back(letter_json(l));
        words.push_back({{"letters", letters}, {"count", w.count}, {"labels", w.labels}});
    }
    Json j{{"format", "viseme-dictionary"}, {"version", kVersion}, {"words", words}};
    return j.dump(1);
}

Dictionary dictionary_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    check_format(j, "viseme-dictionary");
    Dictionary d;
    for (const Json& jw : j.at("words")) {
        std::vector<Letter> letters;
        for (const Json& jl : jw.at("letters")) letters.push_back(letter_from(jl));
        const auto labels = jw.at("labels").get<std::vector<std::string>>();
        const auto count = jw.at("count").get<std::uint64_t>();
        for (std::uint64_t c = 0; c < count; ++c)
            d.add(letters, c < labels.size() ? std::optional<std::string>(labels[c]) : std::nullopt);
    }
    return d;
}

std::string codebook_fingerprint(const Alphabet& a, const Dictionary& d) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    feed(alphabet_to_json(a));
    feed("\n");
    feed(dictionary_to_json(d));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string sentence_to_json(const Sentence& s) {
    const SentenceHeader& h = s.header;
    Json words = Json::array();
    for (const SentenceWord& w : s.words) {
        Json bands = Json::array();
        for (const BandPose& b : w.pose.bands) bands.push_back(band_pose_json(b));
        words.push_back({{"code", w.word},
                         {"kind", w.kind == WordKind::Leaf ? "leaf" : "compound"},
                         {"pose",
                          {{"xg", w.pose.xg},
                           {"yg", w.pose.yg},
                           {"theta", w.pose.theta},
                           {"scale", w.pose.scale},
                           {"area", w.pose.area},
                           {"bands", bands}}}});
    }
    Json j{{"format", "viseme-sentence"},
           {"version", kVersion},
           {"header",
            {{"width", h.width},
             {"height", h.height},
             {"bands", h.bands},
             {"levels", h.levels},
             {"precision", h.precision},
             {"hilbert_r", h.hilbert_r},
             {"dictionary", h.dictionary}}},
           {"words", words}};
    return j.dump(1);
}

Sentence sentence_from_json(const std::string& text) {
    const Json j = Json::parse(text);
    check_format(j, "viseme-sentence");
    Sentence s;
    const Json& h = j.at("header");
    s.header = {h.at("width").get<int>(),        h.at("height").get<int>(),    h.at("bands").get<int>(),
                h.at("levels").get<int>(),       h.at("precision").get<double>(), h.at("hilbert_r").get<int>(),
                h.at("dictionary").get<std::string>()};
    for (const Json& jw : j.at("words")) {
        SentenceWord w;
        w.word = jw.at("code").get<std::uint32_t>();
        const std::string kind = jw.at("kind").get<std::string>();
        if (kind != "leaf" && kind != "compound") throw std::runtime_error("unknown word kind: " + kind);
        w.kind = kind == "leaf" ? WordKind::Leaf : WordKind::Compound;
        const Json& p = jw.at("pose");
        w.pose.xg = p.at("xg").get<double>();
        w.pose.yg = p.at("yg").get<double>();
        w.pose.theta = p.at("theta").get<double>();
        w.pose.scale = p.at("scale").get<double>();
        w.pose.area = p.at("area").get<double>();
        for (const Json& b : p.at("bands"))
            w.pose.bands.push_back({b.at("z0").get<double>(), b.at("theta_xz").get<double>(),
                                    b.at("theta_yz").get<double>(), b.at("theta_xu").get<double>(),
                                    b.at("lambda_u").get<double>()});
        s.words.push_back(std::move(w));
    }
    return s;
}

namespace {

struct Writer {
    std::vector<std::uint8_t> out;
    void u8(std::uint8_t v) { out.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out.insert(out.end(), s.begin(), s.end());
    }
};

struct Reader {
    std::span<const std::uint8_t> in;
    std::size_t pos = 0;
    void need(std::size_t n) const {
        if (pos + n > in.size()) throw std::runtime_error("truncated sentence file");
    }
    std::uint8_t u8() {
        need(1);
        return in[pos++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[pos + i]} << (8 * i);
        pos += 4;
        return v;
    }
    double f32() { return std::bit_cast<float>(u32()); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(in.begin() + pos, in.begin() + pos + n);
        pos += n;
        return s;
    }
};

constexpr char kMagic[4] = {'V', 'S', 'N', '1'};

}  // namespace

std::vector<std::uint8_t> sentence_to_binary(const Sentence& s) {
    Writer w;
    w.out.assign(kMagic, kMagic + 4);
    const SentenceHeader& h = s.header;
    w.u32(h.width);
    w.u32(h.height);
    w.u32(h.bands);
    w.u32(h.levels);
    w.f32(h.precision);
    w.u32(h.hilbert_r);
    w.str(h.dictionary);
    w.u32(static_cast<std::uint32_t>(s.words.size()));
    for (const SentenceWord& sw : s.words) {
        if (static_cast<int>(sw.pose.bands.size()) != h.bands) throw std::invalid_argument("band count mismatch");
        w.u32(sw.word);
        w.u8(static_cast<std::uint8_t>(sw.kind));
        for (double v : {sw.pose.xg, sw.pose.yg, sw.pose.theta, sw.pose.scale, sw.pose.area}) w.f32(v);
        for (const BandPose& b : sw.pose.bands)
            for (double v : {b.z0, b.theta_xz, b.theta_yz, b.theta_xu, b.lambda_u}) w.f32(v);
    }
    return std::move(w.out);
}

Sentence sentence_from_binary(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        throw std::runtime_error("not a binary sentence file or version mismatch");
    Reader r{bytes, 4};
    Sentence s;
    SentenceHeader& h = s.header;
    h.width = static_cast<int>(r.u32());
    h.height = static_cast<int>(r.u32());
    h.bands = static_cast<int>(r.u32());
    h.levels = static_cast<int>(r.u32());
    h.precision = r.f32();
    h.hilbert_r = static_cast<int>(r.u32());
    h.dictionary = r.str();
    const std::uint32_t n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        SentenceWord w;
        w.word = r.u32();
        const std::uint8_t kind = r.u8();
        if (kind > 1) throw std::runtime_error("unknown word kind");
        w.kind = static_cast<WordKind>(kind);
        w.pose.xg = r.f32();
        w.pose.yg = r.f32();
        w.pose.theta = r.f32();
        w.pose.scale = r.f32();
        w.pose.area = r.f32();
        for (int b = 0; b < h.bands; ++b) {
            BandPose p;
            p.z0 = r.f32();
            p.theta_xz = r.f32();
            p.theta_yz = r.f32();
            p.theta_xu = r.f32();
            p.lambda_u = r.f32();
            w.pose.bands.push_back(p);
        }
        s.words.push_back(std::move(w));
    }
    if (r.pos != bytes.size()) throw std::runtime_error("trailing bytes in sentence file");
    return s;
}

}  // namespace viseme
