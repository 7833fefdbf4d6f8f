#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pbt/amplify.hpp"
#include "pbt/schur.hpp"

using namespace pbt;

namespace {

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Unitary dilation [[A, sqrt(I - A A^dagger)], [sqrt(I - A^dagger A), -A^dagger]] of a contraction A.
Eigen::MatrixXcd dilate(const Eigen::MatrixXcd& a) {
    const auto k = a.rows();
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(k, k);
    auto root = [](const Eigen::MatrixXcd& m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        return Eigen::MatrixXcd(es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cd>().asDiagonal() *
                                es.eigenvectors().adjoint());
    };
    Eigen::MatrixXcd v(2 * k, 2 * k);
    v << a, root(id - a * a.adjoint()), root(id - a.adjoint() * a), -a.adjoint();
    return v;
}

std::vector<char> top_mask(long dim, long k) {
    std::vector<char> m(static_cast<size_t>(dim), 0);
    for (long i = 0; i < k; ++i) m[static_cast<size_t>(i)] = 1;
    return m;
}

}  // namespace

TEST(Plan, OddDegreeAndPhases) {
    auto p1 = plan(1.0);
    EXPECT_EQ(p1.m, 1);
    EXPECT_NEAR(p1.phases[0], 0.0, 1e-15);
    auto p2 = plan(2.0);
    EXPECT_EQ(p2.m, 3);
    EXPECT_NEAR(p2.inflated_total, 2.0, 1e-12);
    EXPECT_NEAR(p2.phases[0], -std::numbers::pi, 1e-15);
    EXPECT_NEAR(p2.phases[1], std::numbers::pi / 2, 1e-15);
    for (double s : {2.5, 7.0, 13.4, 62.3}) {
        auto p = plan(s);
        EXPECT_EQ(p.m % 2, 1);
        EXPECT_GE(p.inflated_total, s);
        EXPECT_LT(1.0 / std::sin(std::numbers::pi / (2.0 * (p.m - 2))), s);
        EXPECT_NEAR(p.inflated_scale(5), p.inflated_total / 2.0, 1e-15);
    }
    EXPECT_THROW(plan(0.5), std::invalid_argument);
}

TEST(Plan, PhaseGadgetMatchesReflectionExponential) {
    std::vector<char> mask{1, 0, 1, 0, 0};
    for (double phi : {0.0, 0.3, -1.7, std::numbers::pi / 2}) {
        Eigen::MatrixXcd g = phase_gadget(mask, phi);
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Identity(5, 5);
        apply_phase(e, mask, phi);
        for (int s = 0; s < 5; ++s) {
            for (int t = 0; t < 5; ++t) {
                EXPECT_NEAR(std::abs(g(2 * s, 2 * t) - e(s, t)), 0.0, 1e-15);
                EXPECT_NEAR(std::abs(g(2 * s + 1, 2 * t)), 0.0, 1e-15);
            }
        }
    }
}

TEST(Amplify, DegreeOneIsTheInput) {
    std::mt19937_64 rng(3);
    Eigen::MatrixXcd v = random_unitary(6, rng);
    auto m = top_mask(6, 2);
    EXPECT_LT(max_abs(amplified_V(v, plan(1.0), m, m) - v), 1e-14);
}

TEST(Amplify, ExactForMatchedScale) {
    std::mt19937_64 rng(11);
    for (auto [scale, k] : std::vector<std::pair<double, long>>{{2.0, 1}, {2.0, 3}, {1.0 / std::sin(std::numbers::pi / 10), 2}}) {
        auto p = plan(scale);
        Eigen::MatrixXcd u = random_unitary(static_cast<int>(k), rng);
        Eigen::MatrixXcd v = dilate(u / p.inflated_total);
        auto m = top_mask(2 * k, k);
        Eigen::MatrixXcd amp = amplified_V(v, p, m, m);
        EXPECT_LT(max_abs(amp.topLeftCorner(k, k) - u), 1e-12) << p.m;
        EXPECT_LT(max_abs(amp.adjoint() * amp - Eigen::MatrixXcd::Identity(2 * k, 2 * k)), 1e-12);
    }
}

TEST(Amplify, PerturbedInputStaysWithinBound) {
    std::mt19937_64 rng(5);
    auto p = plan(2.0);
    Eigen::MatrixXcd u = random_unitary(2, rng);
    Eigen::MatrixXcd v = dilate(u / 2.0);
    Eigen::MatrixXcd kick = random_unitary(4, rng);
    const double t = 1e-4;
    Eigen::MatrixXcd h = (kick + kick.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    Eigen::MatrixXcd e = es.eigenvectors() *
                         es.eigenvalues().unaryExpr([&](double x) { return std::polar(1.0, t * x); }).asDiagonal() *
                         es.eigenvectors().adjoint();
    Eigen::MatrixXcd vp = v * e;
    const double eps = (vp - v).topLeftCorner(2, 2).operatorNorm();
    auto m = top_mask(4, 2);
    Eigen::MatrixXcd amp = amplified_V(vp, p, m, m);
    EXPECT_LE((amp.topLeftCorner(2, 2) - u).operatorNorm(), 2.0 * p.m * (vp - v).operatorNorm() + 1e-12);
    EXPECT_GT(eps, 0.0);
}

TEST(EndToEnd, CompressedQubitsThreePorts) {
    auto r = end_to_end(3, 2, ScaleVariant::Compressed);
    EXPECT_LE(r.isometry_residual, r.epsilon);
    EXPECT_LE(r.discrepancy, r.bound);
    EXPECT_LT(r.leakage, 1e-6);
    EXPECT_LT(r.unitarity_defect, 1e-10);
    EXPECT_LT(r.trace_distance, 1e-6);
    EXPECT_NEAR(r.ancilla_purity, 1.0, 1e-6);
    for (size_t i = 0; i < r.p_dense.size(); ++i) EXPECT_NEAR(r.p_amplified[i], r.p_dense[i], 1e-4);
    EXPECT_NEAR(r.p_dense[0], 0.5, 1e-12);
}
