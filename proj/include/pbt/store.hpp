#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace pbt {

/// Bumped whenever a cached construction changes; stale entries are rebuilt.
inline constexpr const char* kConstructionVersion = "pbt-constructions-1";

/// Binary layout: 32-byte header then rows*cols (re, im) little-endian f64 pairs, row-major.
/// A JSON sidecar (path + ".json") holds dims, labels, metadata and a payload checksum.
struct MatrixFile {
    Eigen::MatrixXcd data;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::string version;
    std::string description;
};

std::uint64_t payload_checksum(const Eigen::MatrixXcd& m);

void save_matrix(const std::filesystem::path& path, const MatrixFile& f);

/// Throws std::runtime_error on a malformed header, a size mismatch, or a checksum mismatch.
MatrixFile load_matrix(const std::filesystem::path& path);

struct CacheKey {
    std::string module;
    int n = 0;
    int d = 0;
    std::string variant;  // extra discriminator, may be empty

    std::string stem() const;
};

/// Matrix cache under PBT_CACHE_DIR (default ./.cache).
class Cache {
public:
    explicit Cache(std::filesystem::path dir);
    static Cache from_env();

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path(const CacheKey& k) const;

    /// Loads when the entry exists with the current version and a valid checksum, else builds and saves.
    Eigen::MatrixXcd get_or_build(const CacheKey& k, const std::function<Eigen::MatrixXcd()>& build,
                                  bool* hit = nullptr);

private:
    std::filesystem::path dir_;
};

}  // namespace pbt
