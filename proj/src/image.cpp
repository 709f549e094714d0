#include "viseme/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <sstream>

namespace viseme {

MultiImage::MultiImage(int width, int height, int bands, int levels)
    : width_(width), height_(height), bands_(bands), levels_(levels) {
    if (width < 1 || height < 1 || bands < 1)
        throw std::invalid_argument("image dimensions must be positive");
    if (levels < 2 || levels > 256) throw std::invalid_argument("levels must be in [2, 256]");
    data_.assign(static_cast<std::size_t>(bands) * pixel_count(), 0);
}

void MultiImage::set(int band, int x, int y, std::uint8_t v) {
    if (v >= levels_) throw std::out_of_range("sample exceeds image depth");
    data_[band * pixel_count() + static_cast<std::size_t>(y) * width_ + x] = v;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write on " + path.string());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    write_file(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

namespace {

struct NetpbmHeader {
    char kind = 0;
    long width = 0, height = 0, maxval = 0;
    std::size_t offset = 0;
};

NetpbmHeader parse_header(std::span<const std::uint8_t> b) {
    if (b.size() < 2 || b[0] != 'P') throw IoError("not a netpbm file");
    NetpbmHeader h;
    h.kind = static_cast<char>(b[1]);
    if (h.kind != '5' && h.kind != '6') throw IoError("unsupported netpbm variant");
    std::size_t pos = 2;
    auto next_int = [&]() -> long {
        while (pos < b.size()) {
            if (b[pos] == '#') {
                while (pos < b.size() && b[pos] != '\n') ++pos;
            } else if (std::isspace(b[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        if (pos >= b.size() || !std::isdigit(b[pos])) throw IoError("malformed netpbm header");
        long v = 0;
        while (pos < b.size() && std::isdigit(b[pos])) {
            v = v * 10 + (b[pos] - '0');
            if (v > (1L << 30)) throw IoError("netpbm header value too large");
            ++pos;
        }
        return v;
    };
    h.width = next_int();
    h.height = next_int();
    h.maxval = next_int();
    if (pos >= b.size() || !std::isspace(b[pos])) throw IoError("malformed netpbm header");
    h.offset = pos + 1;
    if (h.width < 1 || h.height < 1) throw IoError("netpbm dimensions must be positive");
    if (h.maxval < 1 || h.maxval > 65535) throw IoError("netpbm maxval out of range");
    return h;
}

}  // namespace

MultiImage parse_netpbm(std::span<const std::uint8_t> bytes) {
    const NetpbmHeader h = parse_header(bytes);
    if (h.maxval > 255) throw IoError("declared depth exceeds 8-bit samples");
    const int bands = h.kind == '5' ? 1 : 3;
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    if (bytes.size() - h.offset < n * bands) throw IoError("truncated netpbm payload");
    MultiImage img(static_cast<int>(h.width), static_cast<int>(h.height), bands,
                   static_cast<int>(h.maxval) + 1);
    const std::uint8_t* p = bytes.data() + h.offset;
    for (std::size_t k = 0; k < n; ++k) {
        for (int b = 0; b < bands; ++b) {
            const std::uint8_t v = p[k * bands + b];
            if (v > h.maxval) throw IoError("sample out of declared depth");
            img.plane(b)[k] = v;
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_netpbm(const MultiImage& img) {
    if (img.bands() != 1 && img.bands() != 3)
        throw std::invalid_argument("netpbm output needs 1 or 3 bands");
    std::ostringstream hdr;
    hdr << 'P' << (img.bands() == 1 ? '5' : '6') << '\n'
        << img.width() << ' ' << img.height() << '\n'
        << img.levels() - 1 << '\n';
    const std::string s = hdr.str();
    std::vector<std::uint8_t> out(s.begin(), s.end());
    const std::size_t n = img.pixel_count();
    out.reserve(out.size() + n * img.bands());
    for (std::size_t k = 0; k < n; ++k)
        for (int b = 0; b < img.bands(); ++b) out.push_back(img.plane(b)[k]);
    return out;
}

namespace {

std::filesystem::path sidecar(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".hdr");
}

MultiImage load_raw(const std::filesystem::path& path) {
    const auto hdr = read_file(sidecar(path));
    std::istringstream in(std::string(hdr.begin(), hdr.end()));
    long w = 0, h = 0, bands = 0, depth = 0;
    if (!(in >> w >> h >> bands >> depth)) throw IoError("malformed raw sidecar header");
    if (w < 1 || h < 1 || bands < 1 || bands > 64 || depth < 2 || depth > 256)
        throw IoError("raw sidecar values out of range");
    const auto bytes = read_file(path);
    MultiImage img(static_cast<int>(w), static_cast<int>(h), static_cast<int>(bands),
                   static_cast<int>(depth));
    if (bytes.size() < img.data().size()) throw IoError("truncated raw payload");
    for (int b = 0; b < img.bands(); ++b) {
        auto dst = img.plane(b);
        for (std::size_t k = 0; k < dst.size(); ++k) {
            const std::uint8_t v = bytes[b * img.pixel_count() + k];
            if (v >= depth) throw IoError("sample out of declared depth");
            dst[k] = v;
        }
    }
    return img;
}

}  // namespace

MultiImage load_image(const std::filesystem::path& path, ImageFormat hint) {
    if (hint == ImageFormat::Auto) {
        const auto ext = path.extension().string();
        if (ext == ".raw" || ext == ".bsq" || std::filesystem::exists(sidecar(path)))
            hint = ImageFormat::Raw;
    }
    if (hint == ImageFormat::Raw) return load_raw(path);
    const auto bytes = read_file(path);
    MultiImage img = parse_netpbm(bytes);
    if (hint == ImageFormat::Pgm && img.bands() != 1) throw IoError("expected a PGM file");
    if (hint == ImageFormat::Ppm && img.bands() != 3) throw IoError("expected a PPM file");
    return img;
}

void save_raw(const std::filesystem::path& path, const MultiImage& img) {
    write_file(path, img.data());
    std::ostringstream hdr;
    hdr << img.width() << ' ' << img.height() << ' ' << img.bands() << ' ' << img.levels() << '\n';
    write_text(sidecar(path), hdr.str());
}

void save_image(const std::filesystem::path& path, const MultiImage& img) {
    if (img.bands() == 1 || img.bands() == 3)
        write_file(path, encode_netpbm(img));
    else
        save_raw(path, img);
}

void save_label_pgm(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint32_t> labels) {
    if (labels.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("label map size mismatch");
    const std::uint32_t maxl = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
    if (maxl > 65535) throw std::invalid_argument("too many labels for a 16-bit map");
    const bool wide = maxl > 255;
    std::ostringstream hdr;
    hdr << "P5\n" << width << ' ' << height << '\n' << (wide ? 65535 : 255) << '\n';
    const std::string s = hdr.str();
    std::vector<std::uint8_t> out(s.begin(), s.end());
    for (std::uint32_t l : labels) {
        if (wide) out.push_back(static_cast<std::uint8_t>(l >> 8));
        out.push_back(static_cast<std::uint8_t>(l & 0xff));
    }
    write_file(path, out);
}

std::vector<std::uint32_t> load_label_pgm(const std::filesystem::path& path, int* width,
                                          int* height) {
    const auto bytes = read_file(path);
    const NetpbmHeader h = parse_header(bytes);
    if (h.kind != '5') throw IoError("label map must be P5");
    const bool wide = h.maxval > 255;
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    if (bytes.size() - h.offset < n * (wide ? 2 : 1)) throw IoError("truncated label map");
    std::vector<std::uint32_t> labels(n);
    const std::uint8_t* p = bytes.data() + h.offset;
    for (std::size_t k = 0; k < n; ++k)
        labels[k] = wide ? (static_cast<std::uint32_t>(p[2 * k]) << 8) | p[2 * k + 1] : p[k];
    *width = static_cast<int>(h.width);
    *height = static_cast<int>(h.height);
    return labels;
}

SampleSet::SampleSet(const MultiImage& img, std::vector<std::uint32_t> indices)
    : img_(&img), idx_(std::move(indices)) {
    if (idx_.empty()) throw std::invalid_argument("sample set must be non-empty");
    for (std::size_t i = 0; i < idx_.size(); ++i) {
        if (idx_[i] >= img.pixel_count()) throw std::out_of_range("sample outside image");
        if (i > 0 && idx_[i] <= idx_[i - 1])
            throw std::invalid_argument("sample indices must be strictly ascending");
    }
}

SampleSet full_sample_set(const MultiImage& img) {
    std::vector<std::uint32_t> idx(img.pixel_count());
    for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = static_cast<std::uint32_t>(k);
    return SampleSet(img, std::move(idx));
}

}  // namespace viseme
