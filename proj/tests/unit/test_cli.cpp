#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "synthetic.hpp"
#include "viseme/image.hpp"

namespace fs = std::filesystem;
using namespace viseme;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(VISEME_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("viseme_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, MissingInputIsExitTwo) { EXPECT_EQ(run("segment " + path("nope.pgm") + " --out " + path("o")), 2); }

TEST_F(Cli, BadArgumentsAreExitTwo) {
    EXPECT_EQ(run("frobnicate"), 2);
    save_image(path("c.pgm"), fixtures::constant_image(8, 8, 1, 3));
    EXPECT_EQ(run("segment " + path("c.pgm") + " --min-card 2 --out " + path("o")), 2);
    EXPECT_EQ(run("segment " + path("c.pgm") + " --profile round --out " + path("o")), 2);
}

TEST_F(Cli, ConstantEncodeIsExact) {
    save_image(path("c.pgm"), fixtures::constant_image(24, 16, 1, 77));
    ASSERT_EQ(run("encode " + path("c.pgm") + " --out " + path("o")), 0);
    const auto report = nlohmann::json::parse(slurp(path("o/report.json")));
    EXPECT_EQ(report.at("decoded").at("max_error").get<int>(), 0);
    EXPECT_EQ(report.at("leaves").get<int>(), 1);
    EXPECT_EQ(load_image(path("o/decoded.pgm")), load_image(path("c.pgm")));
}

TEST_F(Cli, SegmentDescribeGroupDictPipeline) {
    save_image(path("p.pgm"), fixtures::piecewise_planar(64, 64).image);
    ASSERT_EQ(run("segment " + path("p.pgm") + " --out " + path("o")), 0);
    for (const char* f : {"tree.json", "labels.pgm", "stats.json"}) EXPECT_TRUE(fs::exists(path(std::string("o/") + f))) << f;
    ASSERT_EQ(run("describe " + path("o/tree.json") + " --out " + path("o")), 0);
    EXPECT_TRUE(fs::exists(path("o/descriptors.json")));
    ASSERT_EQ(run("group " + path("o/tree.json") + " --label 0=scene --out " + path("o")), 0);
    EXPECT_TRUE(fs::exists(path("o/compounds.json")));
    ASSERT_EQ(run("dict " + path("o/tree.json") + " --out " + path("o")), 0);
    EXPECT_TRUE(fs::exists(path("o/alphabet.json")));
    EXPECT_TRUE(fs::exists(path("o/dictionary.json")));
    EXPECT_EQ(run("group " + path("o/tree.json") + " --label zero=scene --out " + path("o")), 2);
}

TEST_F(Cli, DecodeMatchesEncodeAndRejectsForeignDictionary) {
    save_image(path("p.pgm"), fixtures::piecewise_planar(64, 64).image);
    save_image(path("q.pgm"), fixtures::two_ramp(64, 64).image);
    ASSERT_EQ(run("encode " + path("p.pgm") + " --out " + path("a")), 0);
    ASSERT_EQ(run("encode " + path("q.pgm") + " --out " + path("b")), 0);
    ASSERT_EQ(run("decode " + path("a/sentence.bin") + " -o " + path("a/again.pgm")), 0);
    EXPECT_EQ(slurp(path("a/again.pgm")), slurp(path("a/decoded.pgm")));
    ASSERT_EQ(run("decode " + path("a/sentence.json") + " -o " + path("a/again2.pgm")), 0);
    EXPECT_EQ(slurp(path("a/again2.pgm")), slurp(path("a/decoded.pgm")));
    EXPECT_EQ(run("decode " + path("a/sentence.json") + " --alphabet " + path("b/alphabet.json") + " --dictionary " +
                  path("b/dictionary.json") + " -o " + path("a/bad.pgm")),
              1);
}

TEST_F(Cli, ConfigFileAndFlagPrecedence) {
    save_image(path("q.pgm"), fixtures::two_ramp(64, 32).image);
    std::ofstream(path("run.conf")) << "precision = 40\n";
    ASSERT_EQ(run("segment " + path("q.pgm") + " --config " + path("run.conf") + " --out " + path("o1")), 0);
    ASSERT_EQ(run("segment " + path("q.pgm") + " --config " + path("run.conf") + " --precision 1 --out " + path("o2")), 0);
    const auto a = nlohmann::json::parse(slurp(path("o1/stats.json")));
    const auto b = nlohmann::json::parse(slurp(path("o2/stats.json")));
    EXPECT_LE(a.at("leaf_count").get<int>(), b.at("leaf_count").get<int>());
    EXPECT_LE(b.at("max_error").get<double>(), 1.0);
    std::ofstream(path("bad.conf")) << "speed = 3\n";
    EXPECT_EQ(run("segment " + path("q.pgm") + " --config " + path("bad.conf") + " --out " + path("o3")), 2);
}

TEST_F(Cli, HilbertCurvePlotHasAllVertices) {
    ASSERT_EQ(run("plot hilbert-curve --r 3 -o " + path("h.svg")), 0);
    const std::string svg = slurp(path("h.svg"));
    const auto start = svg.find("points=\"");
    ASSERT_NE(start, std::string::npos);
    const auto end = svg.find('"', start + 8);
    std::istringstream pts(svg.substr(start + 8, end - start - 8));
    int vertices = 0;
    std::string tok;
    while (pts >> tok) ++vertices;
    EXPECT_EQ(vertices, 64);
}

TEST_F(Cli, OverlayAndLabelMap) {
    save_image(path("q.pgm"), fixtures::two_ramp(32, 32).image);
    ASSERT_EQ(run("segment " + path("q.pgm") + " --out " + path("o")), 0);
    EXPECT_EQ(run("plot segmentation-overlay " + path("q.pgm") + " " + path("o/labels.pgm") + " -o " + path("ov.ppm")), 0);
    EXPECT_EQ(load_image(path("ov.ppm")).bands(), 3);
    EXPECT_EQ(run("plot label-map " + path("o/labels.pgm") + " -o " + path("lm.ppm")), 0);
    EXPECT_TRUE(fs::exists(path("lm.ppm")));
}

TEST_F(Cli, Selftest) { EXPECT_EQ(run("selftest"), 0); }
