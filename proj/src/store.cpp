#include "pbt/store.hpp"

#include <array>
#include <bit>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace pbt {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'B', 'T', 'M', 'A', 'T', '0', '1'};
constexpr std::size_t kHeaderBytes = 32;
constexpr std::uint8_t kComplexF64 = 1, kRowMajor = 0, kLittle = 0;

static_assert(std::endian::native == std::endian::little, "MatrixFile I/O assumes a little-endian host");

void put_u64(char* out, std::uint64_t v) { std::memcpy(out, &v, 8); }
std::uint64_t get_u64(const char* in) {
    std::uint64_t v;
    std::memcpy(&v, in, 8);
    return v;
}

std::filesystem::path sidecar(const std::filesystem::path& p) { return std::filesystem::path(p.string() + ".json"); }

}  // namespace

std::uint64_t payload_checksum(const Eigen::MatrixXcd& m) {
    // FNV-1a over the row-major payload bytes.
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            double parts[2] = {m(r, c).real(), m(r, c).imag()};
            unsigned char bytes[16];
            std::memcpy(bytes, parts, 16);
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 1099511628211ULL;
            }
        }
    }
    return h;
}

void save_matrix(const std::filesystem::path& path, const MatrixFile& f) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::array<char, kHeaderBytes> head{};
    std::memcpy(head.data(), kMagic.data(), 8);
    put_u64(head.data() + 8, static_cast<std::uint64_t>(f.data.rows()));
    put_u64(head.data() + 16, static_cast<std::uint64_t>(f.data.cols()));
    head[24] = static_cast<char>(kComplexF64);
    head[25] = static_cast<char>(kRowMajor);
    head[26] = static_cast<char>(kLittle);
    out.write(head.data(), head.size());
    std::vector<double> row(static_cast<std::size_t>(2 * f.data.cols()));
    for (Eigen::Index r = 0; r < f.data.rows(); ++r) {
        for (Eigen::Index c = 0; c < f.data.cols(); ++c) {
            row[static_cast<std::size_t>(2 * c)] = f.data(r, c).real();
            row[static_cast<std::size_t>(2 * c + 1)] = f.data(r, c).imag();
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());

    nlohmann::json j;
    j["rows"] = f.data.rows();
    j["cols"] = f.data.cols();
    j["dtype"] = "complex-f64";
    j["layout"] = "row-major";
    j["endianness"] = "little";
    j["row_labels"] = f.row_labels;
    j["col_labels"] = f.col_labels;
    j["version"] = f.version;
    j["description"] = f.description;
    j["checksum"] = payload_checksum(f.data);
    std::ofstream side(sidecar(path));
    side << j.dump(2) << '\n';
    if (!side) throw std::runtime_error("cannot write sidecar for " + path.string());
}

MatrixFile load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::array<char, kHeaderBytes> head{};
    in.read(head.data(), head.size());
    if (in.gcount() != static_cast<std::streamsize>(kHeaderBytes) || std::memcmp(head.data(), kMagic.data(), 8) != 0)
        throw std::runtime_error("not a matrix file: " + path.string());
    if (static_cast<std::uint8_t>(head[24]) != kComplexF64 || static_cast<std::uint8_t>(head[25]) != kRowMajor ||
        static_cast<std::uint8_t>(head[26]) != kLittle)
        throw std::runtime_error("unsupported dtype, layout or endianness in " + path.string());
    const std::uint64_t rows = get_u64(head.data() + 8), cols = get_u64(head.data() + 16);
    const auto payload = std::filesystem::file_size(path) - kHeaderBytes;
    if (payload != rows * cols * 16) throw std::runtime_error("payload length does not match header in " + path.string());

    MatrixFile f;
    f.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::vector<double> row(2 * cols);
    for (std::uint64_t r = 0; r < rows; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
        for (std::uint64_t c = 0; c < cols; ++c)
            f.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {row[2 * c], row[2 * c + 1]};
    }
    if (!in) throw std::runtime_error("truncated payload in " + path.string());

    std::ifstream side(sidecar(path));
    if (!side) throw std::runtime_error("missing sidecar for " + path.string());
    auto j = nlohmann::json::parse(side);
    if (j.at("rows").get<std::uint64_t>() != rows || j.at("cols").get<std::uint64_t>() != cols)
        throw std::runtime_error("sidecar dims disagree with header in " + path.string());
    if (j.at("checksum").get<std::uint64_t>() != payload_checksum(f.data))
        throw std::runtime_error("checksum mismatch in " + path.string());
    f.row_labels = j.value("row_labels", std::vector<std::string>{});
    f.col_labels = j.value("col_labels", std::vector<std::string>{});
    f.version = j.value("version", "");
    f.description = j.value("description", "");
    return f;
}

std::string CacheKey::stem() const {
    std::string s = module + "_n" + std::to_string(n) + "_d" + std::to_string(d);
    if (!variant.empty()) s += "_" + variant;
    return s;
}

Cache::Cache(std::filesystem::path dir) : dir_(std::move(dir)) {}

Cache Cache::from_env() {
    const char* env = std::getenv("PBT_CACHE_DIR");
    return Cache(env && *env ? std::filesystem::path(env) : std::filesystem::path(".cache"));
}

std::filesystem::path Cache::path(const CacheKey& k) const { return dir_ / (k.stem() + ".mat"); }

Eigen::MatrixXcd Cache::get_or_build(const CacheKey& k, const std::function<Eigen::MatrixXcd()>& build, bool* hit) {
    const auto p = path(k);
    if (std::filesystem::exists(p)) {
        try {
            auto f = load_matrix(p);
            if (f.version == kConstructionVersion) {
                if (hit) *hit = true;
                return f.data;
            }
        } catch (const std::exception&) {
            // Corrupt entries are rebuilt below.
        }
    }
    if (hit) *hit = false;
    MatrixFile f;
    f.data = build();
    f.version = kConstructionVersion;
    f.description = k.stem();
    save_matrix(p, f);
    return f.data;
}

}  // namespace pbt
