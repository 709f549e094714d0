#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "viseme/dictionary.hpp"

namespace viseme {

struct RunConfig {
    double precision = 2.0;
    std::size_t min_card = 8;
    int vq_bits = 4;
    Profile profile = Profile::Full;
    double clamp = 2.0;
    std::filesystem::path out = ".";
    std::uint64_t seed = 1;
    bool compounds = false;

    bool operator==(const RunConfig&) const = default;
};

// Throws std::invalid_argument on a field out of range.
void validate(const RunConfig& c);

// Flat `key = value` lines; '#' starts a comment. Unknown keys are errors.
RunConfig parse_config(const std::string& text, RunConfig base = {});
std::string config_to_text(const RunConfig& c);
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace viseme
