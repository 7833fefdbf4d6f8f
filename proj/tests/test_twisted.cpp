#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pbt/pbt.hpp"
#include "pbt/symrep.hpp"
#include "pbt/twisted.hpp"

using namespace pbt;

namespace {

std::vector<std::pair<int, int>> small_cases() { return {{2, 2}, {3, 2}, {4, 2}, {5, 2}, {3, 3}, {4, 3}}; }

Eigen::MatrixXd nu_block_rep(const BlockLayout& l, const Perm& small) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l.D, l.D);
    for (const auto& s : l.nus) out.block(s.offset, s.offset, s.dim, s.dim) = yor(s.nu, small);
    return out;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXcd column_projector(const Eigen::MatrixXcd& cols) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cols);
    qr.setThreshold(1e-10);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd basis = q.leftCols(qr.rank());
    return basis * basis.adjoint();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

}  // namespace

TEST(Twisted, PsiVectorsThreeQubits) {
    Eigen::MatrixXcd psi = psi_vectors(3, 2, Partition({1}), 0);
    ASSERT_EQ(psi.cols(), 2);
    Eigen::VectorXcd p1 = Eigen::VectorXcd::Zero(8), p2 = Eigen::VectorXcd::Zero(8);
    p1(0b000) = p1(0b101) = 1.0;
    p2(0b000) = p2(0b011) = 1.0;
    EXPECT_LT(max_abs(psi.col(0) - p1), 1e-14);
    EXPECT_LT(max_abs(psi.col(1) - p2), 1e-14);
}

TEST(Twisted, PsiNormsAndTwoQudits) {
    for (auto [n, d] : small_cases()) {
        for (const auto& a : alpha_set(n, d)) {
            Eigen::MatrixXcd psi = psi_vectors(n, d, a, 0);
            for (Eigen::Index c = 0; c < psi.cols(); ++c) EXPECT_NEAR(psi.col(c).squaredNorm(), d, 1e-12);
        }
    }
    Eigen::MatrixXcd psi = psi_vectors(2, 3, Partition(), 0);
    ASSERT_EQ(psi.cols(), 1);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(std::abs(psi(a * 3 + a)), 1.0, 1e-14);
}

TEST(Twisted, GramExampleThreeQubits) {
    auto g = gram_spectrum(3, 2, Partition({1}));
    ASSERT_EQ(g.closed.size(), 2u);
    EXPECT_EQ(g.closed[0].first, Partition({2}));
    EXPECT_DOUBLE_EQ(g.closed[0].second, 3.0);
    EXPECT_EQ(g.closed[1].first, Partition({1, 1}));
    EXPECT_DOUBLE_EQ(g.closed[1].second, 1.0);
    Eigen::MatrixXcd psi = psi_vectors(3, 2, Partition({1}), 0);
    Eigen::Matrix2cd expect;
    expect << 2, 1, 1, 2;
    EXPECT_LT(max_abs(psi.adjoint() * psi - expect), 1e-14);
    EXPECT_DOUBLE_EQ(lambda_nu(2, 2, Partition(), Partition({1})), 2.0);
}

TEST(Twisted, GramSpectrumAgreesEverywhere) {
    for (int d = 2; d <= 3; ++d) {
        for (int n = 2; n <= 7; ++n) {
            for (const auto& a : alpha_set(n, d)) {
                auto g = gram_spectrum(n, d, a);
                EXPECT_LT(g.max_error, 1e-8);
                double tr = 0.0;
                for (double v : g.expected) tr += v;
                EXPECT_NEAR(tr, (n - 1) * static_cast<double>(dim_specht(a)) * d, 1e-9);
            }
        }
    }
}

TEST(Twisted, ZMatrixOrthonormalUnderGram) {
    for (auto [n, d] : small_cases()) {
        for (const auto& a : alpha_set(n, d)) {
            Eigen::MatrixXcd psi = psi_vectors(n, d, a, 0);
            Eigen::MatrixXcd z = z_matrix(n, d, a).cast<cd>();
            Eigen::MatrixXcd m = z.adjoint() * (psi.adjoint() * psi) * z;
            EXPECT_LT(max_abs(m - Eigen::MatrixXcd::Identity(m.rows(), m.cols())), 1e-10);
        }
    }
    // The last port block uses pi = identity, so it is the alpha rows of the identity scaled.
    auto l = block_layout(3, 2, Partition({1}));
    Eigen::MatrixXd z = z_matrix(3, 2, Partition({1}));
    EXPECT_NEAR(z(1, 0), 1.0 / std::sqrt(6.0), 1e-15);
    EXPECT_NEAR(z(1, 1), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_EQ(l.D, 2);
}

TEST(Twisted, FBasisThreeQubitExample) {
    auto b = f_basis(3, 2, Partition({1}), 0);
    Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(8);
    expect(0b000) = 2.0 / std::sqrt(6.0);
    expect(0b101) = expect(0b011) = 1.0 / std::sqrt(6.0);
    EXPECT_NEAR(std::abs(expect.dot(b.f.col(0))), 1.0, 1e-12);
}

TEST(Twisted, FBasisOrthonormalAndCovariant) {
    std::mt19937_64 rng(21);
    for (auto [n, d] : small_cases()) {
        auto t2 = build_schur(n - 2, d);
        for (const auto& a : alpha_set(n, d)) {
            const int m_alpha = static_cast<int>(dim_weyl(a, d));
            for (int r = 0; r < m_alpha; ++r) {
                auto b = f_basis(n, d, a, r, t2);
                EXPECT_LT(max_abs(b.f.adjoint() * b.f - Eigen::MatrixXcd::Identity(b.f.cols(), b.f.cols())), 1e-10);
                for (int trial = 0; trial < 5; ++trial) {
                    Perm small = random_perm(n - 1, rng);
                    PermutationOperator v(n, d, extend_perm(small, n));
                    Eigen::MatrixXcd lhs = v.apply(b.f);
                    Eigen::MatrixXcd rhs = b.f * nu_block_rep(b.layout, small).cast<cd>();
                    EXPECT_LT(max_abs(lhs - rhs), 1e-10);
                }
            }
        }
    }
}

TEST(Twisted, BlocksOrthogonalAndSpanHM) {
    for (auto [n, d] : small_cases()) {
        auto tw = build_twisted(n, d);
        for (size_t x = 0; x < tw.blocks.size(); ++x) {
            for (size_t y = 0; y < tw.blocks.size(); ++y) {
                Eigen::MatrixXcd g = tw.blocks[x].f.adjoint() * tw.blocks[y].f;
                if (x == y)
                    EXPECT_LT(max_abs(g - Eigen::MatrixXcd::Identity(g.rows(), g.cols())), 1e-10);
                else
                    EXPECT_LT(max_abs(g), 1e-10);
            }
        }
        int expected_dim = 0;
        for (const auto& a : alpha_set(n, d)) expected_dim += static_cast<int>(dim_weyl(a, d)) * block_layout(n, d, a).D;
        EXPECT_EQ(tw.hm_dim(), expected_dim);

        // Span of V_L(pi_k) (|x> ⊗ |phi+>) over all computational x and ports k.
        const int dim = dense_dim(n, d);
        const int small = dense_dim(n - 2, d);
        Eigen::MatrixXcd gen(dim, small * (n - 1));
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(small, small);
        Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d * d);
        for (int a = 0; a < d; ++a) phi(a * d + a) = 1.0;
        Eigen::MatrixXcd base = kron(id, phi);
        for (int k = 0; k <= n - 2; ++k)
            gen.middleCols(k * small, small) = PermutationOperator(n, d, extend_perm(port_transposition(n, k), n)).apply(base);
        EXPECT_LT(max_abs(column_projector(gen) - tw.hm_projector), 1e-9);
    }
    EXPECT_EQ(build_twisted(3, 2).hm_dim(), 4);
}

TEST(Twisted, FactoredBlockMatchesDirect) {
    for (auto [n, d] : small_cases()) {
        for (std::uint64_t seed : {0ULL, 17ULL}) {
            auto t1 = build_schur(n - 1, d, seed);
            auto t2 = build_schur(n - 2, d, seed);
            for (const auto& a : alpha_set(n, d)) {
                auto b = f_basis(n, d, a, 0, t2);
                Eigen::MatrixXcd fac = twisted_schur_block_factored(n, d, a, 0, t1, t2);
                EXPECT_LT(max_abs(fac - b.f.adjoint()), 1e-10);
            }
        }
    }
    EXPECT_NO_THROW(twisted_schur_block(4, 2, Partition({1, 1}), 0));
}

TEST(Twisted, GeneratorsMatchDenseOracle) {
    std::mt19937_64 rng(8);
    for (auto [n, d] : small_cases()) {
        auto tw = build_twisted(n, d);
        for (const auto& b : tw.blocks) {
            const auto& a = b.layout.alpha;
            for (int i = 0; i <= n - 2; ++i) {
                Eigen::MatrixXcd oracle = b.f.adjoint() * eta_i_dense(n, d, i) * b.f;
                Eigen::MatrixXd mf = mf_generator(n, d, a, transposition(n, i, n - 1), true);
                EXPECT_LT(max_abs(oracle - mf.cast<cd>()), 1e-10);
            }
            for (int trial = 0; trial < 4; ++trial) {
                Perm s = extend_perm(random_perm(n - 1, rng), n);
                Eigen::MatrixXcd oracle = b.f.adjoint() * permutation_operator(n, d, s).dense() * b.f;
                EXPECT_LT(max_abs(oracle - mf_generator(n, d, a, s, false).cast<cd>()), 1e-10);
            }
            EXPECT_TRUE(mf_generator(n, d, a, identity_perm(n), false).isIdentity());
        }
    }
    Eigen::MatrixXd g = mf_generator(3, 2, Partition({1}), transposition(3, 0, 2), true);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    EXPECT_EQ(lu.rank(), 1);
    EXPECT_NEAR(g.trace(), 2.0, 1e-12);
    EXPECT_THROW(mf_generator(3, 2, Partition({1}), transposition(3, 0, 2), false), std::invalid_argument);
}

TEST(Twisted, RhoBlocks) {
    EXPECT_TRUE(mf_rho(3, 2, Partition({1})).isApprox((Eigen::Vector2d() << 3, 1).finished().asDiagonal().toDenseMatrix()));
    for (auto [n, d] : small_cases()) {
        auto tw = build_twisted(n, d);
        double tr = 0.0;
        for (const auto& b : tw.blocks) tr += mf_rho(n, d, b.layout.alpha).trace();
        EXPECT_NEAR(tr, std::pow(d, n - 1) * (n - 1), 1e-9);
        Eigen::MatrixXcd eta = eta_dense(n, d);
        for (const auto& b : tw.blocks)
            EXPECT_LT(max_abs(b.f.adjoint() * eta * b.f - mf_rho(n, d, b.layout.alpha).cast<cd>()), 1e-10);
    }
}

TEST(Twisted, PiBlocksThreeQubits) {
    Eigen::Matrix2d p1, p2;
    p1 << 0.5, -0.5, -0.5, 0.5;
    p2 << 0.5, 0.5, 0.5, 0.5;
    EXPECT_LT((mf_pi(3, 2, Partition({1}), 0) - p1).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LT((mf_pi(3, 2, Partition({1}), 1) - p2).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE((mf_pi(3, 2, Partition({1}), 0) + mf_pi(3, 2, Partition({1}), 1)).isIdentity(1e-14));
}

TEST(Twisted, PiPseudoprojectorsAndFactoredRoot) {
    for (int d = 2; d <= 3; ++d) {
        for (int n = 2; n <= 6; ++n) {
            auto t1 = build_schur(n - 1, d, 5);
            for (const auto& a : alpha_set(n, d)) {
                auto l = block_layout(n, d, a);
                Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(l.D, l.D);
                for (int i = 0; i <= n - 2; ++i) {
                    Eigen::MatrixXd p = mf_pi(n, d, a, i);
                    sum += p;
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
                    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
                        double ev = es.eigenvalues()(k);
                        EXPECT_LT(std::min(std::abs(ev), std::abs(ev - l.pseudo_eigenvalue())), 1e-10);
                    }
                    Eigen::MatrixXd s = mf_sqrt_pi(n, d, a, i);
                    EXPECT_LT((s * s - p).cwiseAbs().maxCoeff(), 1e-10);
                    EXPECT_LT(max_abs(mf_sqrt_pi_factored(n, d, a, i, t1) - s.cast<cd>()), 1e-10);
                }
                if (l.d_theta == 0) EXPECT_TRUE(sum.isIdentity(1e-10));
            }
        }
    }
}

TEST(Twisted, ReconstructionMatchesDenseOperators) {
    for (auto [n, d] : small_cases()) {
        auto tw = build_twisted(n, d);
        auto pgm = pgm_dense(n, d);
        Eigen::MatrixXcd eta = tw.reconstruct([&](const Partition& a) { return mf_rho(n, d, a); });
        EXPECT_LT(max_abs(eta - eta_dense(n, d)), 1e-8);
        Eigen::MatrixXcd hs = tw.hs_basis();
        for (int i = 0; i <= n - 2; ++i) {
            Eigen::MatrixXcd pt = tw.reconstruct([&](const Partition& a) { return mf_pi(n, d, a, i); });
            EXPECT_LT(max_abs(pt - pgm.pi_tilde[static_cast<size_t>(i)]), 1e-8);
            Eigen::MatrixXcd rt = tw.reconstruct([&](const Partition& a) { return mf_sqrt_pi(n, d, a, i); });
            EXPECT_LT(max_abs(rt - psd_sqrt(pgm.pi_tilde[static_cast<size_t>(i)])), 1e-8);
            EXPECT_LT(max_abs(rt * hs), 1e-8);
        }
    }
}

TEST(Twisted, EtaCommutesWithCollectiveUnitaries) {
    std::mt19937_64 rng(4);
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {3, 3}}) {
        Eigen::MatrixXcd eta = eta_dense(n, d);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::MatrixXcd u = random_unitary(d, rng);
            Eigen::MatrixXcd chi = Eigen::MatrixXcd::Identity(1, 1);
            for (int q = 0; q < n - 1; ++q) chi = kron(chi, u);
            chi = kron(chi, u.conjugate());
            EXPECT_LT(max_abs(eta * chi - chi * eta), 1e-10);
            Eigen::MatrixXcd v = permutation_operator(n, d, extend_perm(random_perm(n - 1, rng), n)).dense();
            EXPECT_LT(max_abs(eta * v - v * eta), 1e-10);
        }
    }
}

TEST(Twisted, GaugeIndependentScalars) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {4, 3}}) {
        auto a = build_twisted(n, d, 0);
        auto b = build_twisted(n, d, 123);
        EXPECT_LT(max_abs(a.hm_projector - b.hm_projector), 1e-8);
        for (int i = 0; i <= n - 2; ++i)
            EXPECT_LT(max_abs(kraus_from_twisted(a, i) - kraus_from_twisted(b, i)), 1e-8);
    }
}
