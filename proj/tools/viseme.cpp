#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "viseme/coder.hpp"
#include "viseme/config.hpp"
#include "viseme/hilbert.hpp"
#include "viseme/image.hpp"
#include "viseme/plot.hpp"
#include "viseme/quant_tree.hpp"
#include "viseme/tree_io.hpp"

namespace fs = std::filesystem;
using namespace viseme;
using Json = nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Flags {
    std::optional<double> precision;
    std::optional<std::size_t> min_card;
    std::optional<int> vq_bits;
    std::optional<std::string> profile;
    std::optional<double> clamp;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> config;
    bool compounds = false;
    std::string strategy = "best-candidate";
};

RunConfig resolve(const Flags& f) {
    RunConfig c;
    if (f.config) c = load_config(*f.config);
    if (f.precision) c.precision = *f.precision;
    if (f.min_card) c.min_card = *f.min_card;
    if (f.vq_bits) c.vq_bits = *f.vq_bits;
    if (f.profile) c.profile = parse_profile(*f.profile);
    if (f.clamp) c.clamp = *f.clamp;
    if (f.seed) c.seed = *f.seed;
    if (f.out) c.out = *f.out;
    if (f.compounds) c.compounds = true;
    validate(c);
    return c;
}

SegmentParams segment_params(const RunConfig& c, const std::string& strategy) {
    SegmentParams p;
    p.precision = c.precision;
    p.min_card = c.min_card;
    if (strategy == "singular") p.strategy = SplitStrategy::Singular;
    else if (strategy != "best-candidate") throw UsageError("unknown split strategy: " + strategy);
    return p;
}

VqConfig vq_config(const RunConfig& c) { return {c.vq_bits, c.profile, c.clamp}; }

std::string read_text(const fs::path& p) {
    const auto b = read_file(p);
    return {b.begin(), b.end()};
}

fs::path out_file(const RunConfig& c, const std::string& name) {
    fs::create_directories(c.out);
    return c.out / name;
}

std::map<int, std::string> parse_labels(const std::vector<std::string>& specs) {
    std::map<int, std::string> out;
    for (const std::string& s : specs) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
            throw UsageError("label must be NODE=NAME: " + s);
        std::size_t used = 0;
        int node = -1;
        try {
            node = std::stoi(s.substr(0, eq), &used);
        } catch (const std::exception&) {
        }
        if (node < 0 || used != eq) throw UsageError("bad node id in label: " + s);
        out[node] = s.substr(eq + 1);
    }
    return out;
}

const char* image_ext(int bands) { return bands == 1 ? ".pgm" : (bands == 3 ? ".ppm" : ".raw"); }

void save_any(const fs::path& p, const MultiImage& img) {
    if (p.extension() == ".raw") save_raw(p, img);
    else save_image(p, img);
}

Json error_report(const MultiImage& original, const MultiImage& decoded, const DecompTree& tree) {
    const auto labels = tree.label_map();
    const auto interior = interior_mask(labels, tree.width, tree.height, 2);
    const double p = psnr(original, decoded);
    Json r{{"max_error", max_abs_error(original, decoded)},
           {"interior_max_error", max_abs_error(original, decoded, interior)},
           {"psnr", std::isinf(p) ? Json("inf") : Json(p)}};
    return r;
}

int cmd_segment(const RunConfig& c, const Flags& f, const std::string& image) {
    const MultiImage img = load_image(image);
    const DecompTree tree = decompose(img, segment_params(c, f.strategy));
    write_text(out_file(c, "tree.json"), tree_to_json(tree));
    save_label_pgm(out_file(c, "labels.pgm"), tree.width, tree.height, tree.label_map());
    const std::string stats = stats_to_json(segment_stats(tree));
    write_text(out_file(c, "stats.json"), stats);
    std::cout << stats << "\n";
    return 0;
}

int cmd_describe(const RunConfig& c, const std::string& tree_path) {
    const DecompTree tree = tree_from_json(read_text(tree_path));
    auto shapes = aggregate_domain(tree);
    attach_rendering(tree, shapes);
    write_text(out_file(c, "descriptors.json"), descriptors_to_json(tree, shapes));
    std::cout << shapes.size() << " records\n";
    return 0;
}

int cmd_group(const RunConfig& c, const std::string& tree_path, const std::vector<std::string>& labels) {
    const DecompTree tree = tree_from_json(read_text(tree_path));
    auto shapes = aggregate_domain(tree);
    for (const auto& [id, l] : parse_labels(labels)) shapes.at(id).label = l;
    write_text(out_file(c, "compounds.json"), compounds_to_json(tree, shapes));
    std::cout << shapes.size() << " compounds\n";
    return 0;
}

int cmd_dict(const RunConfig& c, const std::string& tree_path, const std::vector<std::string>& labels,
             bool keep_degenerate) {
    const DecompTree tree = tree_from_json(read_text(tree_path));
    const Codebook b = build_codebook(tree, vq_config(c), !keep_degenerate, parse_labels(labels));
    write_text(out_file(c, "alphabet.json"), alphabet_to_json(b.alphabet));
    write_text(out_file(c, "dictionary.json"), dictionary_to_json(b.dictionary));
    Json s{{"letters", b.alphabet.size()}, {"words", b.dictionary.size()}, {"synonyms", b.dictionary.synonyms()}};
    std::cout << s.dump(1) << "\n";
    return 0;
}

int cmd_encode(const RunConfig& c, const Flags& f, const std::string& image, bool partition) {
    const MultiImage img = load_image(image);
    EncodeConfig ec;
    ec.segment = segment_params(c, f.strategy);
    ec.vq = vq_config(c);
    ec.compounds = c.compounds;
    const Encoded e = encode(img, ec);
    write_text(out_file(c, "tree.json"), tree_to_json(e.tree));
    write_text(out_file(c, "sentence.json"), sentence_to_json(e.sentence));
    write_file(out_file(c, "sentence.bin"), sentence_to_binary(e.sentence));
    write_text(out_file(c, "alphabet.json"), alphabet_to_json(e.book.alphabet));
    write_text(out_file(c, "dictionary.json"), dictionary_to_json(e.book.dictionary));
    const MultiImage decoded = synthesize(e.sentence, e.book.alphabet, e.book.dictionary);
    save_any(out_file(c, std::string("decoded") + image_ext(img.bands())), decoded);
    Json report{{"leaves", e.tree.leaves().size()},
                {"words", e.sentence.words.size()},
                {"letters", e.book.alphabet.size()},
                {"dictionary", e.book.dictionary.size()}};
    report["decoded"] = error_report(img, decoded, e.tree);
    if (partition) {
        const MultiImage exact = synthesize_partition(e);
        save_any(out_file(c, std::string("partition") + image_ext(img.bands())), exact);
        report["partition"] = error_report(img, exact, e.tree);
    }
    write_text(out_file(c, "report.json"), report.dump(1));
    std::cout << report.dump(1) << "\n";
    return 0;
}

int cmd_decode(const RunConfig& c, const std::string& sentence_path, std::string alphabet, std::string dictionary,
               std::string output) {
    const fs::path sp(sentence_path);
    const auto bytes = read_file(sp);
    const bool binary = bytes.size() >= 4 && std::string(bytes.begin(), bytes.begin() + 4) == "VSN1";
    const Sentence s = binary ? sentence_from_binary(bytes) : sentence_from_json(std::string(bytes.begin(), bytes.end()));
    if (alphabet.empty()) alphabet = (sp.parent_path() / "alphabet.json").string();
    if (dictionary.empty()) dictionary = (sp.parent_path() / "dictionary.json").string();
    const Alphabet a = alphabet_from_json(read_text(alphabet));
    const Dictionary d = dictionary_from_json(read_text(dictionary));
    if (codebook_fingerprint(a, d) != s.header.dictionary)
        throw std::runtime_error("sentence was not encoded with this alphabet and dictionary");
    const MultiImage img = synthesize(s, a, d);
    const fs::path out = output.empty() ? out_file(c, std::string("decoded") + image_ext(img.bands())) : fs::path(output);
    save_any(out, img);
    std::cout << "wrote " << out.string() << "\n";
    return 0;
}

// Region labels from a tree JSON or a label PGM.
std::vector<std::uint32_t> region_labels(const fs::path& p, int* w, int* h) {
    if (p.extension() != ".json") return load_label_pgm(p, w, h);
    const DecompTree tree = tree_from_json(read_text(p));
    *w = tree.width;
    *h = tree.height;
    return tree.label_map();
}

int cmd_plot(const RunConfig& c, const std::string& kind, const std::vector<std::string>& inputs, int r,
             std::string output) {
    auto need = [&](std::size_t n) {
        if (inputs.size() != n) throw UsageError(kind + " takes " + std::to_string(n) + " input(s)");
    };
    auto target = [&](const std::string& name) { return output.empty() ? out_file(c, name) : fs::path(output); };
    if (kind == "hilbert-curve") {
        need(0);
        write_text(target("hilbert.svg"), hilbert_curve_svg(r));
    } else if (kind == "point-tour") {
        need(1);
        const auto pts = parse_points(read_text(inputs[0]));
        if (pts.empty()) throw UsageError("no points in " + inputs[0]);
        const auto order = order_points(pts, r);
        write_text(target("tour.svg"), point_tour_svg(pts, order));
        std::mt19937_64 rng(c.seed);
        std::vector<std::size_t> perm(pts.size());
        double mean = 0.0;
        constexpr int kTrials = 200;
        for (int t = 0; t < kTrials; ++t) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            std::shuffle(perm.begin(), perm.end(), rng);
            mean += path_length(pts, perm) / kTrials;
        }
        Json j{{"points", pts.size()}, {"hilbert_length", path_length(pts, order)}, {"random_mean_length", mean}};
        std::cout << j.dump(1) << "\n";
    } else if (kind == "segmentation-overlay") {
        need(2);
        const MultiImage img = load_image(inputs[0]);
        int w = 0, h = 0;
        const auto labels = region_labels(inputs[1], &w, &h);
        if (w != img.width() || h != img.height()) throw UsageError("label map and image sizes differ");
        save_image(target("overlay.ppm"), segmentation_overlay(img, labels));
    } else if (kind == "label-map") {
        need(1);
        int w = 0, h = 0;
        const auto labels = region_labels(inputs[0], &w, &h);
        save_image(target("labels.ppm"), label_map_image(w, h, labels));
    } else {
        throw UsageError("unknown plot kind: " + kind);
    }
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    auto check = [&](bool ok, const char* what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
        failures += !ok;
    };
    bool bij = true;
    for (std::uint64_t d = 0; d < (1u << 10); ++d) {
        const auto [i, j] = hilbert_d2xy(5, d);
        bij &= hilbert_xy2d(5, i, j) == d;
        if (d) {
            const auto [pi, pj] = hilbert_d2xy(5, d - 1);
            bij &= std::abs(int(i) - int(pi)) + std::abs(int(j) - int(pj)) == 1;
        }
    }
    check(bij, "hilbert bijection and adjacency at r = 5");
    QuantTree q(2, 1);
    for (double x : {0.25, 0.75})
        for (double y : {0.25, 0.75}) q.insert(std::vector<double>{x, y});
    check(q.root_kind() == QuantTree::Kind::Black, "full occupancy collapses to a black root");
    MultiImage img(16, 12, 1);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x) img.set(0, x, y, 77);
    const Encoded e = encode(img, {});
    check(e.sentence.words.size() == 1 && synthesize(e.sentence, e.book.alphabet, e.book.dictionary) == img,
          "constant image round trip");
    return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* t = std::getenv("VISEME_THREADS")) {
        const int n = std::atoi(t);
        if (n > 0) omp_set_num_threads(n);
    }
    CLI::App app{"Self-descriptive visual coding: segmentation, descriptors, alphabets and sentences"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;
    app.add_option("--precision", f.precision, "L-infinity precision in levels");
    app.add_option("--min-card", f.min_card, "smallest region that may be split");
    app.add_option("--vq-bits", f.vq_bits, "quantization bits per dimension");
    app.add_option("--profile", f.profile, "full | convex-hull");
    app.add_option("--clamp", f.clamp, "clamp bound for signed invariants");
    app.add_option("--seed", f.seed, "seed for randomized diagnostics");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--config", f.config, "key = value config file; flags override it");
    app.add_option("--strategy", f.strategy, "split strategy: best-candidate | singular");

    std::string input, input2, alphabet, dictionary, output, kind;
    std::vector<std::string> labels, inputs;
    bool partition = false, keep_degenerate = false;
    int r = 3;

    auto* segment = app.add_subcommand("segment", "decompose an image into regular patches");
    segment->add_option("image", input, "input image")->required();
    auto* describe = app.add_subcommand("describe", "domain and rendering descriptors of a tree");
    describe->add_option("tree", input, "tree JSON")->required();
    auto* group = app.add_subcommand("group", "compound shapes of a tree");
    group->add_option("tree", input, "tree JSON")->required();
    group->add_option("--label", labels, "NODE=NAME label for a node");
    auto* dict = app.add_subcommand("dict", "visual alphabet and dictionary of a tree");
    dict->add_option("tree", input, "tree JSON")->required();
    dict->add_option("--label", labels, "NODE=NAME label for a node");
    dict->add_flag("--keep-degenerate", keep_degenerate, "also code collinear and single pixel regions");
    auto* enc = app.add_subcommand("encode", "encode an image as a sentence and decode it back");
    enc->add_option("image", input, "input image")->required();
    enc->add_flag("--compounds", f.compounds, "append compound words to the sentence");
    enc->add_flag("--partition", partition, "also synthesize on the true partition");
    auto* dec = app.add_subcommand("decode", "synthesize an image from a sentence");
    dec->add_option("sentence", input, "sentence JSON or binary")->required();
    dec->add_option("--alphabet", alphabet, "alphabet JSON (default next to the sentence)");
    dec->add_option("--dictionary", dictionary, "dictionary JSON (default next to the sentence)");
    dec->add_option("-o,--output", output, "output image");
    auto* plot = app.add_subcommand("plot", "SVG and PPM diagnostics");
    plot->add_option("kind", kind, "hilbert-curve | point-tour | segmentation-overlay | label-map (labels from tree.json or labels.pgm)")->required();
    plot->add_option("inputs", inputs, "input files for the kind");
    plot->add_option("--r", r, "Hilbert resolution");
    plot->add_option("-o,--output", output, "output file");
    auto* selftest = app.add_subcommand("selftest", "quick internal checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) return cmd_selftest();
        RunConfig c;
        try {
            c = resolve(f);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
        if (segment->parsed()) return cmd_segment(c, f, input);
        if (describe->parsed()) return cmd_describe(c, input);
        if (group->parsed()) return cmd_group(c, input, labels);
        if (dict->parsed()) return cmd_dict(c, input, labels, keep_degenerate);
        if (enc->parsed()) return cmd_encode(c, f, input, partition);
        if (dec->parsed()) return cmd_decode(c, input, alphabet, dictionary, output);
        if (plot->parsed()) return cmd_plot(c, kind, inputs, r, output);
    } catch (const IoError& e) {
        std::cerr << "viseme: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "viseme: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "viseme: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "viseme: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
