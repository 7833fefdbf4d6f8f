#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pbt {

/// Young diagram as a weakly decreasing list of positive row lengths.
struct Partition {
    std::vector<int> rows;

    Partition() = default;
    explicit Partition(std::vector<int> r);

    int size() const;
    int height() const { return static_cast<int>(rows.size()); }
    bool empty() const { return rows.empty(); }
    /// Row length, or 0 past the last row.
    int row(int i) const { return i < height() ? rows[static_cast<size_t>(i)] : 0; }

    std::string str() const;

    auto operator<=>(const Partition&) const = default;
};

/// Partitions of n with at most max_height rows, lexicographically decreasing.
std::vector<Partition> enumerate_partitions(int n, int max_height);

/// Number of standard tableaux (hook-length formula). Throws std::overflow_error.
std::uint64_t dim_specht(const Partition& lambda);

/// Dimension of the U(d) irrep (Weyl formula); 0 when height exceeds d.
std::uint64_t dim_weyl(const Partition& lambda, int d);

struct BoxAddition {
    Partition parent;
    std::vector<Partition> children;  // height <= d, ordered by row of the added box
    std::optional<Partition> theta;   // the height-(d+1) addition, when it exists
};

BoxAddition add_box(const Partition& alpha, int d);

/// One-box removals ordered by ascending removed row.
std::vector<Partition> remove_box(const Partition& nu);

/// Row index at which child differs from parent (child = parent + one box).
int added_row(const Partition& parent, const Partition& child);

/// d_theta, or 0 when theta does not exist.
std::uint64_t dim_theta(const Partition& alpha, int d);

}  // namespace pbt
