#include "viseme/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "viseme/image.hpp"

namespace viseme {

void validate(const RunConfig& c) {
    if (!(c.precision >= 0.0 && c.precision <= 255.0)) throw std::invalid_argument("precision must be in [0, 255]");
    if (c.min_card < 6) throw std::invalid_argument("min_card must be at least 6");
    if (c.vq_bits < 1 || c.vq_bits * 5 > 63) throw std::invalid_argument("vq_bits must be in [1, 12]");
    if (!(c.clamp > 0.0 && c.clamp <= 1e6)) throw std::invalid_argument("clamp must be in (0, 1e6]");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T number(const std::string& key, const std::string& v) {
    T out{};
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("bad value for " + key + ": " + v);
    return out;
}

bool boolean(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("bad value for " + key + ": " + v);
}

std::string real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig c) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (key == "precision") c.precision = number<double>(key, v);
        else if (key == "min_card") c.min_card = number<std::size_t>(key, v);
        else if (key == "vq_bits") c.vq_bits = number<int>(key, v);
        else if (key == "profile") c.profile = parse_profile(v);
        else if (key == "clamp") c.clamp = number<double>(key, v);
        else if (key == "out") c.out = v;
        else if (key == "seed") c.seed = number<std::uint64_t>(key, v);
        else if (key == "compounds") c.compounds = boolean(key, v);
        else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key " + key);
    }
    validate(c);
    return c;
}

std::string config_to_text(const RunConfig& c) {
    std::ostringstream o;
    o << "precision = " << real(c.precision) << "\n"
      << "min_card = " << c.min_card << "\n"
      << "vq_bits = " << c.vq_bits << "\n"
      << "profile = " << to_string(c.profile) << "\n"
      << "clamp = " << real(c.clamp) << "\n"
      << "out = " << c.out.string() << "\n"
      << "seed = " << c.seed << "\n"
      << "compounds = " << (c.compounds ? "true" : "false") << "\n";
    return o.str();
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    const auto bytes = read_file(path);
    return parse_config(std::string(bytes.begin(), bytes.end()), base);
}

}  // namespace viseme
