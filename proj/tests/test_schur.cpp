#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pbt/schur.hpp"
#include "pbt/symrep.hpp"

using namespace pbt;

namespace {

double covariance_error(const SchurTransform& t, const Perm& p) {
    Eigen::MatrixXcd v = permutation_operator(t.m, t.d, p).dense();
    Eigen::MatrixXcd lhs = t.U * v * t.U.adjoint();
    return (lhs - schur_block_rep(t, p).cast<cd>()).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd kron_power(const Eigen::MatrixXcd& u, int m) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int k = 0; k < m; ++k) {
        Eigen::MatrixXcd next(out.rows() * u.rows(), out.cols() * u.cols());
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j)
                next.block(i * u.rows(), j * u.cols(), u.rows(), u.cols()) = out(i, j) * u;
        out = next;
    }
    return out;
}

}  // namespace

TEST(Schur, PermutationOperatorBasics) {
    EXPECT_TRUE(permutation_operator(3, 2, identity_perm(3)).dense().isIdentity());
    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    EXPECT_TRUE(permutation_operator(2, 2, transposition(2, 0, 1)).dense().isApprox(swap));
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Perm a = random_perm(4, rng), b = random_perm(4, rng);
        Eigen::MatrixXcd lhs = permutation_operator(4, 3, a).dense() * permutation_operator(4, 3, b).dense();
        EXPECT_TRUE(lhs.isApprox(permutation_operator(4, 3, compose(a, b)).dense()));
    }
}

TEST(Schur, MovesFactorToImagePosition) {
    // V(sigma) sends the factor at position k to position sigma(k).
    Perm cyc = {1, 2, 0};
    auto v = permutation_operator(3, 2, cyc);
    EXPECT_EQ(v.image(0b100), 0b010);
    EXPECT_EQ(v.image(0b001), 0b100);
}

TEST(Schur, PartialTransposeLast) {
    const int d = 3;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d * d);
    for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(double(d));
    Eigen::MatrixXcd proj = phi * phi.adjoint();
    Eigen::MatrixXcd swap = permutation_operator(2, d, transposition(2, 0, 1)).dense();
    EXPECT_LT((partial_transpose_last(proj, 2, d) - swap / double(d)).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Random(27, 27);
    EXPECT_TRUE(partial_transpose_last(partial_transpose_last(r, 3, d), 3, d).isApprox(r));
    EXPECT_TRUE(partial_transpose_last(Eigen::MatrixXcd::Identity(27, 27), 3, d).isIdentity());
}

TEST(Schur, DenseGuard) {
    EXPECT_THROW(dense_dim(21, 2), std::invalid_argument);
    EXPECT_EQ(dense_dim(20, 2), 1 << 20);
}

TEST(Schur, SingleQuditIsIdentity) {
    auto t = build_schur(1, 3);
    EXPECT_TRUE(t.U.isIdentity(1e-14));
    ASSERT_EQ(t.slots.size(), 1u);
    EXPECT_EQ(t.slots[0].mult, 3);
}

TEST(Schur, TwoQubitSinglet) {
    auto t = build_schur(2, 2);
    EXPECT_EQ(t.slot(Partition({2})).mult, 3);
    EXPECT_EQ(t.slot(Partition({1, 1})).mult, 1);
    Eigen::RowVectorXcd s = schur_row(t, Partition({1, 1}), 0, 0);
    Eigen::RowVectorXcd expect(4);
    expect << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
    EXPECT_NEAR(std::abs(s.dot(expect)), 1.0, 1e-12);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(s.dot(schur_row(t, Partition({2}), 1, 0))), 0.0, 1e-12);
}

TEST(Schur, ThreeQubitBlockSizes) {
    auto t = build_schur(3, 2);
    ASSERT_EQ(t.slots.size(), 2u);
    EXPECT_EQ(t.slots[0].mult, 4);
    EXPECT_EQ(t.slots[0].dim, 1);
    EXPECT_EQ(t.slots[1].mult, 2);
    EXPECT_EQ(t.slots[1].dim, 2);
}

TEST(Schur, CovarianceUnderTranspositionsAndRandomPerms) {
    std::mt19937_64 rng(5);
    std::vector<std::pair<int, int>> cases;
    for (int m = 2; m <= 7; ++m) cases.emplace_back(m, 2);
    for (int m = 2; m <= 4; ++m) cases.emplace_back(m, 3);
    for (auto [m, d] : cases) {
        auto t = build_schur(m, d);
        EXPECT_LT((t.U * t.U.adjoint() - Eigen::MatrixXcd::Identity(t.U.rows(), t.U.cols())).cwiseAbs().maxCoeff(),
                  1e-10);
        for (int a = 0; a < m; ++a)
            for (int b = a + 1; b < m; ++b) EXPECT_LT(covariance_error(t, transposition(m, a, b)), 1e-10);
        for (int trial = 0; trial < 20; ++trial) EXPECT_LT(covariance_error(t, random_perm(m, rng)), 1e-10);
    }
}

TEST(Schur, GaugedTransformStaysCovariant) {
    auto t = build_schur(4, 2, 99);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) EXPECT_LT(covariance_error(t, random_perm(4, rng)), 1e-10);
    auto t0 = build_schur(4, 2);
    EXPECT_GT((t.U - t0.U).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Schur, UnitaryActionIsBlockDiagonal) {
    std::mt19937_64 rng(13);
    for (auto [m, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {3, 3}}) {
        auto t = build_schur(m, d);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::MatrixXcd u = random_unitary(d, rng);
            Eigen::MatrixXcd b = t.U * kron_power(u, m) * t.U.adjoint();
            // Entries between different (lambda, path) labels vanish; same path across copies forms q(U).
            for (Eigen::Index i = 0; i < b.rows(); ++i) {
                for (Eigen::Index j = 0; j < b.cols(); ++j) {
                    const auto& li = t.index[static_cast<size_t>(i)];
                    const auto& lj = t.index[static_cast<size_t>(j)];
                    if (li.lambda != lj.lambda || li.path != lj.path) {
                        EXPECT_LT(std::abs(b(i, j)), 1e-10);
                    } else {
                        const auto& s = t.slot(li.lambda);
                        EXPECT_NEAR(std::abs(b(i, j) - b(s.offset + li.r * s.dim, s.offset + lj.r * s.dim)), 0.0,
                                    1e-10);
                    }
                }
            }
        }
    }
}

TEST(Schur, SubmatricesForThreeQubits) {
    auto t = build_schur(2, 2);
    Partition alpha({1});
    auto u2 = submatrix_U_nu_alpha(t, Partition({2}), alpha);
    auto u11 = submatrix_U_nu_alpha(t, Partition({1, 1}), alpha);
    EXPECT_EQ(u2.rows(), 1);
    EXPECT_EQ(u2.cols(), 4);
    EXPECT_EQ(u11.rows(), 1);
    EXPECT_EQ(submatrix_U_alpha(t, alpha).rows(), 2);
    EXPECT_NEAR(std::abs((u2 * u11.adjoint())(0, 0)), 0.0, 1e-12);

    auto t4 = build_schur(4, 2);
    for (const auto& a : enumerate_partitions(3, 2)) {
        for (const auto& nu : add_box(a, 2).children) {
            auto u = submatrix_U_nu_alpha(t4, nu, a);
            EXPECT_LT((u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.rows())).cwiseAbs().maxCoeff(),
                      1e-12);
        }
        auto ua = submatrix_U_alpha(t4, a);
        EXPECT_LT((ua * ua.adjoint() - Eigen::MatrixXcd::Identity(ua.rows(), ua.rows())).cwiseAbs().maxCoeff(),
                  1e-12);
    }
}
