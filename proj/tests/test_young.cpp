#include <gtest/gtest.h>

#include <functional>

#include "pbt/young.hpp"

using namespace pbt;

namespace {

// Brute-force count of fillings of lambda with 1..m increasing along rows and columns.
std::uint64_t count_standard(const Partition& lambda) {
    std::vector<int> filled(static_cast<size_t>(lambda.height()), 0);
    std::function<std::uint64_t(int)> rec = [&](int left) -> std::uint64_t {
        if (left == 0) return 1;
        std::uint64_t total = 0;
        for (int r = 0; r < lambda.height(); ++r) {
            auto ur = static_cast<size_t>(r);
            if (filled[ur] >= lambda.row(r)) continue;
            if (r > 0 && filled[ur - 1] <= filled[ur]) continue;
            ++filled[ur];
            total += rec(left - 1);
            --filled[ur];
        }
        return total;
    };
    return rec(lambda.size());
}

// Brute-force count of semistandard fillings with entries in 0..d-1.
std::uint64_t count_semistandard(const Partition& lambda, int d) {
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < lambda.height(); ++r)
        for (int c = 0; c < lambda.row(r); ++c) cells.emplace_back(r, c);
    std::vector<std::vector<int>> t(static_cast<size_t>(lambda.height()));
    for (int r = 0; r < lambda.height(); ++r) t[static_cast<size_t>(r)].assign(static_cast<size_t>(lambda.row(r)), 0);
    std::function<std::uint64_t(size_t)> rec = [&](size_t i) -> std::uint64_t {
        if (i == cells.size()) return 1;
        auto [r, c] = cells[i];
        std::uint64_t total = 0;
        for (int v = 0; v < d; ++v) {
            if (c > 0 && t[static_cast<size_t>(r)][static_cast<size_t>(c - 1)] > v) continue;
            if (r > 0 && t[static_cast<size_t>(r - 1)][static_cast<size_t>(c)] >= v) continue;
            t[static_cast<size_t>(r)][static_cast<size_t>(c)] = v;
            total += rec(i + 1);
        }
        return total;
    };
    return rec(0);
}

}  // namespace

TEST(Young, EnumeratesFiveWithTwoRows) {
    auto parts = enumerate_partitions(5, 2);
    ASSERT_EQ(parts.size(), 3u);
    EXPECT_EQ(parts[0], Partition({5}));
    EXPECT_EQ(parts[1], Partition({4, 1}));
    EXPECT_EQ(parts[2], Partition({3, 2}));
}

TEST(Young, PartitionCountsMatchKnownSequence) {
    const std::vector<size_t> p = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30};
    for (int n = 0; n < 10; ++n) EXPECT_EQ(enumerate_partitions(n, std::max(n, 1)).size(), p[static_cast<size_t>(n)]) << n;
}

TEST(Young, HookLengthMatchesBruteForce) {
    EXPECT_EQ(dim_specht(Partition({2, 2, 1})), 5u);
    for (int n = 1; n <= 8; ++n)
        for (const auto& lambda : enumerate_partitions(n, n))
            EXPECT_EQ(dim_specht(lambda), count_standard(lambda)) << lambda.str();
}

TEST(Young, WeylDimensionMatchesBruteForce) {
    EXPECT_EQ(dim_weyl(Partition({2}), 2), 3u);
    EXPECT_EQ(dim_weyl(Partition({1, 1, 1}), 2), 0u);
    for (int d = 1; d <= 4; ++d)
        for (int n = 1; n <= 6; ++n)
            for (const auto& lambda : enumerate_partitions(n, n))
                EXPECT_EQ(dim_weyl(lambda, d), count_semistandard(lambda, d)) << lambda.str() << " d=" << d;
}

TEST(Young, SchurWeylDimensionIdentity) {
    for (int d = 1; d <= 4; ++d) {
        for (int n = 1; n <= 7; ++n) {
            std::uint64_t total = 0, power = 1;
            for (int k = 0; k < n; ++k) power *= static_cast<std::uint64_t>(d);
            for (const auto& lambda : enumerate_partitions(n, d)) total += dim_weyl(lambda, d) * dim_specht(lambda);
            EXPECT_EQ(total, power);
        }
    }
}

TEST(Young, AddBoxSeparatesTheta) {
    auto add = add_box(Partition({1, 1}), 2);
    ASSERT_EQ(add.children.size(), 1u);
    EXPECT_EQ(add.children[0], Partition({2, 1}));
    ASSERT_TRUE(add.theta.has_value());
    EXPECT_EQ(*add.theta, Partition({1, 1, 1}));
    EXPECT_EQ(dim_theta(Partition({1, 1}), 2), 1u);

    auto wide = add_box(Partition({2}), 2);
    ASSERT_EQ(wide.children.size(), 2u);
    EXPECT_EQ(wide.children[0], Partition({3}));
    EXPECT_EQ(wide.children[1], Partition({2, 1}));
    EXPECT_FALSE(wide.theta.has_value());
    EXPECT_EQ(dim_theta(Partition({2}), 2), 0u);
}

TEST(Young, RemoveBoxAscendingRows) {
    auto rem = remove_box(Partition({3, 2, 2, 1}));
    ASSERT_EQ(rem.size(), 3u);
    EXPECT_EQ(rem[0], Partition({2, 2, 2, 1}));
    EXPECT_EQ(rem[1], Partition({3, 2, 1, 1}));
    EXPECT_EQ(rem[2], Partition({3, 2, 2}));
    EXPECT_EQ(added_row(Partition({3, 2, 1, 1}), Partition({3, 2, 2, 1})), 2);
}

TEST(Young, BranchingRuleSumsDimensions) {
    for (int n = 2; n <= 8; ++n) {
        for (const auto& nu : enumerate_partitions(n, n)) {
            std::uint64_t s = 0;
            for (const auto& xi : remove_box(nu)) s += dim_specht(xi);
            EXPECT_EQ(s, dim_specht(nu));
        }
    }
}

TEST(Young, RejectsInvalidPartitions) {
    EXPECT_THROW(Partition({1, 2}), std::invalid_argument);
    EXPECT_THROW(Partition({2, 0}), std::invalid_argument);
    EXPECT_THROW(Partition({-1}), std::invalid_argument);
}

TEST(Young, OverflowIsReported) {
    EXPECT_THROW(dim_specht(Partition({30, 30, 30})), std::overflow_error);
}
