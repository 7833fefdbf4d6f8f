#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "pbt/schur.hpp"
#include "pbt/store.hpp"

using namespace pbt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("pbt_store_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Store, RoundTripIsBitExact) {
    auto dir = scratch("roundtrip");
    std::mt19937_64 rng(1);
    MatrixFile f;
    f.data = random_unitary(5, rng).leftCols(3) * 1e-300;
    f.data(0, 0) = {-0.0, 1.0 / 3.0};
    f.row_labels = {"a", "b", "c", "d", "e"};
    f.col_labels = {"x", "y", "z"};
    f.version = "v";
    save_matrix(dir / "m.mat", f);
    EXPECT_EQ(fs::file_size(dir / "m.mat"), 32u + 5u * 3u * 16u);
    auto g = load_matrix(dir / "m.mat");
    ASSERT_EQ(g.data.rows(), 5);
    for (Eigen::Index r = 0; r < 5; ++r)
        for (Eigen::Index c = 0; c < 3; ++c) EXPECT_EQ(std::memcmp(&g.data(r, c), &f.data(r, c), 16), 0);
    EXPECT_EQ(g.row_labels, f.row_labels);
    EXPECT_EQ(g.col_labels, f.col_labels);
    EXPECT_EQ(g.version, "v");
}

TEST(Store, RejectsCorruption) {
    auto dir = scratch("corrupt");
    MatrixFile f;
    f.data = Eigen::MatrixXcd::Identity(2, 2);
    save_matrix(dir / "m.mat", f);
    {
        std::fstream io(dir / "m.mat", std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(40);
        io.put('\x7f');
    }
    EXPECT_THROW(load_matrix(dir / "m.mat"), std::runtime_error);
    fs::resize_file(dir / "m.mat", 40);
    EXPECT_THROW(load_matrix(dir / "m.mat"), std::runtime_error);
    EXPECT_THROW(load_matrix(dir / "missing.mat"), std::runtime_error);
}

TEST(Store, CacheHitsAndRebuildsOnVersionChange) {
    auto dir = scratch("cache");
    Cache cache(dir);
    CacheKey key{"schur", 3, 2, ""};
    int builds = 0;
    auto build = [&] {
        ++builds;
        return build_schur(3, 2).U;
    };
    bool hit = true;
    Eigen::MatrixXcd a = cache.get_or_build(key, build, &hit);
    EXPECT_FALSE(hit);
    Eigen::MatrixXcd b = cache.get_or_build(key, build, &hit);
    EXPECT_TRUE(hit);
    EXPECT_EQ(builds, 1);
    EXPECT_TRUE(a == b);

    auto side = fs::path(cache.path(key).string() + ".json");
    nlohmann::json j;
    {
        std::ifstream in(side);
        j = nlohmann::json::parse(in);
    }
    j["version"] = "older";
    {
        std::ofstream out(side);
        out << j.dump();
    }
    cache.get_or_build(key, build, &hit);
    EXPECT_FALSE(hit);
    EXPECT_EQ(builds, 2);
}
