#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pbt/pbt.hpp"

using namespace pbt;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Closed-form fidelity of standard port-based teleportation with N = n-1 ports.
double fidelity_formula(int n, int d) {
    double total = 0.0;
    for (const auto& a : enumerate_partitions(n - 2, d)) {
        double s = 0.0;
        for (const auto& mu : add_box(a, d).children)
            s += std::sqrt(static_cast<double>(dim_specht(mu) * dim_weyl(mu, d)));
        total += s * s;
    }
    return total / std::pow(d, n + 1);
}

Eigen::MatrixXcd random_density(int d, std::mt19937_64& rng) {
    Eigen::MatrixXcd u = random_unitary(d, rng);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    Eigen::VectorXd p(d);
    for (int k = 0; k < d; ++k) p(k) = w(rng);
    p /= p.sum();
    return u * p.cast<cd>().asDiagonal() * u.adjoint();
}

}  // namespace

TEST(Pbt, RhoConstructionsAgree) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {4, 2}, {3, 3}, {5, 2}}) {
        for (int i = 0; i <= n - 2; ++i) {
            Eigen::MatrixXcd r = rho_i_dense(n, d, i);
            EXPECT_NEAR(r.trace().real(), 1.0, 1e-12);
            EXPECT_LT(max_abs(r - rho_i_tensor(n, d, i)), 1e-14);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
            EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12);
        }
    }
    Eigen::MatrixXcd phi = Eigen::MatrixXcd::Zero(4, 4);
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
    EXPECT_LT(max_abs(rho_i_dense(2, 2, 0) - phi), 1e-15);
}

TEST(Pbt, PgmIsAValidPovm) {
    auto p2 = pgm_dense(2, 2);
    EXPECT_TRUE(p2.povm.operators[0].isIdentity(1e-10));
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {5, 2}, {6, 2}, {3, 3}, {4, 3}}) {
        auto c = check_povm(pgm_dense(n, d).povm);
        EXPECT_LT(c.completeness, 1e-9);
        EXPECT_GT(c.min_eigenvalue, -1e-10);
    }
}

TEST(Pbt, DeltaLivesOnComplement) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {3, 3}}) {
        auto pgm = pgm_dense(n, d);
        auto tw = build_twisted(n, d);
        Eigen::MatrixXcd hs = tw.hs_basis();
        Eigen::MatrixXcd expect = hs * hs.adjoint() / static_cast<double>(n - 1);
        EXPECT_LT(max_abs(pgm.delta - expect), 1e-9);
        EXPECT_LT(max_abs(pgm.support - tw.hm_projector), 1e-9);
        for (const auto& t : pgm.pi_tilde) EXPECT_LT(max_abs(t * hs), 1e-9);
    }
}

TEST(Pbt, TwistedKrausMatchesDense) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {4, 2}, {5, 2}, {3, 3}, {4, 3}}) {
        auto pgm = pgm_dense(n, d);
        auto tw = build_twisted(n, d);
        std::vector<Eigen::MatrixXcd> ks;
        for (int i = 0; i <= n - 2; ++i) {
            Eigen::MatrixXcd k = kraus_from_twisted(tw, i);
            Eigen::MatrixXcd dense = psd_sqrt(pgm.povm.operators[static_cast<size_t>(i)]);
            EXPECT_LT(max_abs(k - dense), 1e-8);
            EXPECT_LT(max_abs(k * k - pgm.povm.operators[static_cast<size_t>(i)]), 1e-9);
            Eigen::MatrixXcd rt = psd_sqrt(pgm.pi_tilde[static_cast<size_t>(i)]);
            EXPECT_LE(rt.operatorNorm(), std::sqrt(double(d)) + 1e-12);
            ks.push_back(k);
        }
        auto f_tw = entanglement_fidelity(povm_from_kraus(n, d, ks));
        auto f_dense = entanglement_fidelity(pgm.povm);
        EXPECT_NEAR(f_tw.choi, f_dense.choi, 1e-8);
    }
}

TEST(Pbt, ChannelProperties) {
    std::mt19937_64 rng(9);
    auto p2 = pgm_dense(2, 2).povm;
    Eigen::MatrixXcd eta = random_density(2, rng);
    EXPECT_LT(max_abs(channel_apply(p2, eta) - Eigen::MatrixXcd::Identity(2, 2) / 2.0), 1e-12);
    for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 2}, {4, 2}, {3, 3}}) {
        auto p = pgm_dense(n, d).povm;
        Eigen::MatrixXcd mixed = Eigen::MatrixXcd::Identity(d, d) / double(d);
        EXPECT_LT(max_abs(channel_apply(p, mixed) - mixed), 1e-10);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::MatrixXcd in = random_density(d, rng);
            Eigen::MatrixXcd u = random_unitary(d, rng);
            Eigen::MatrixXcd out = channel_apply(p, in);
            EXPECT_NEAR(out.trace().real(), 1.0, 1e-9);
            EXPECT_LT(max_abs(channel_apply(p, u * in * u.adjoint()) - u * out * u.adjoint()), 1e-10);
        }
    }
}

TEST(Pbt, FidelityTable) {
    EXPECT_NEAR(entanglement_fidelity(pgm_dense(2, 2).povm).choi, 0.25, 1e-12);
    std::vector<double> f;
    for (int n = 2; n <= 7; ++n) {
        double v = entanglement_fidelity(pgm_dense(n, 2).povm).choi;
        EXPECT_NEAR(v, fidelity_formula(n, 2), 1e-10) << n;
        f.push_back(v);
    }
    for (size_t k = 1; k < f.size(); ++k) EXPECT_GT(f[k], f[k - 1]);
    EXPECT_GT(f[4], f[1]);
    for (int n = 2; n <= 4; ++n)
        EXPECT_NEAR(entanglement_fidelity(pgm_dense(n, 3).povm).choi, fidelity_formula(n, 3), 1e-10);
    // Frozen from the dense oracle: (2 + sqrt 3) / 8 for two qubit ports.
    EXPECT_NEAR(entanglement_fidelity(pgm_dense(3, 2).povm).choi, 0.46650635094610965, 1e-12);
}
