#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace viseme {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for unreadable, truncated or malformed files.
class IoError : public Error {
public:
    using Error::Error;
};

// Band-sequential raster with integer samples in [0, levels - 1].
class MultiImage {
public:
    MultiImage() = default;
    MultiImage(int width, int height, int bands, int levels = 256);

    int width() const { return width_; }
    int height() const { return height_; }
    int bands() const { return bands_; }
    int levels() const { return levels_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    std::uint8_t at(int band, int x, int y) const {
        return data_[band * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
    }
    void set(int band, int x, int y, std::uint8_t v);

    // Value of band `band` at raster index k = y * width + x.
    std::uint8_t sample(int band, std::uint32_t k) const { return data_[band * pixel_count() + k]; }

    std::span<const std::uint8_t> plane(int band) const {
        return {data_.data() + band * pixel_count(), pixel_count()};
    }
    std::span<std::uint8_t> plane(int band) {
        return {data_.data() + band * pixel_count(), pixel_count()};
    }
    const std::vector<std::uint8_t>& data() const { return data_; }

    bool operator==(const MultiImage&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int bands_ = 0;
    int levels_ = 256;
    std::vector<std::uint8_t> data_;
};

enum class ImageFormat { Auto, Pgm, Ppm, Raw };

// Reads P5 (1 band), P6 (3 bands) or raw band-sequential data described by
// the sidecar "<path>.hdr" holding "width height bands depth".
MultiImage load_image(const std::filesystem::path& path, ImageFormat hint = ImageFormat::Auto);
MultiImage parse_netpbm(std::span<const std::uint8_t> bytes);

// P5 for one band, P6 for three bands; other band counts use the raw layout.
void save_image(const std::filesystem::path& path, const MultiImage& img);
std::vector<std::uint8_t> encode_netpbm(const MultiImage& img);
void save_raw(const std::filesystem::path& path, const MultiImage& img);

// 8-bit or 16-bit (big-endian, maxval > 255) single-channel map.
void save_label_pgm(const std::filesystem::path& path, int width, int height,
                    std::span<const std::uint32_t> labels);
std::vector<std::uint32_t> load_label_pgm(const std::filesystem::path& path, int* width,
                                          int* height);

// Index view over an image: raster indices k = y * width + x, ascending.
class SampleSet {
public:
    SampleSet(const MultiImage& img, std::vector<std::uint32_t> indices);

    const MultiImage& image() const { return *img_; }
    std::size_t size() const { return idx_.size(); }
    std::span<const std::uint32_t> indices() const { return idx_; }
    int x(std::size_t i) const { return static_cast<int>(idx_[i] % img_->width()); }
    int y(std::size_t i) const { return static_cast<int>(idx_[i] / img_->width()); }
    std::uint8_t z(std::size_t i, int band) const { return img_->sample(band, idx_[i]); }

private:
    const MultiImage* img_;
    std::vector<std::uint32_t> idx_;
};

SampleSet full_sample_set(const MultiImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace viseme
