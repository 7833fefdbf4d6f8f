#include "pbt/simulate.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <unsupported/Eigen/KroneckerProduct>
#include <random>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "pbt/pbt.hpp"

namespace pbt {

namespace {

long ipow(long b, int e) {
    long r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

// Amplified isometry columns, built once per (n, d, variant).
const Eigen::MatrixXcd& amplified_isometry(int n, int d, ScaleVariant v) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, Eigen::MatrixXcd> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(n, d, static_cast<int>(v));
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, end_to_end(n, d, v).isometry).first;
    return it->second;
}

// Purification of eta on A_n ⊗ R as a d x d matrix (rows A_n, columns R).
Eigen::MatrixXcd purify(const Eigen::MatrixXcd& eta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(eta);
    Eigen::VectorXd p = es.eigenvalues().cwiseMax(0.0);
    return es.eigenvectors() * p.cwiseSqrt().cast<cd>().asDiagonal();
}

// Columns (B, R): |Phi>_{AB} ⊗ |psi>_{A_n R} as a d^n x d^{n-1} d matrix.
Eigen::MatrixXcd initial_state(int n, int d, const Eigen::MatrixXcd& psi) {
    const long nb = ipow(d, n - 1), dr = psi.cols();
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(nb * d, nb * dr);
    const double a = 1.0 / std::sqrt(static_cast<double>(nb));
    for (long b = 0; b < nb; ++b)
        for (long s = 0; s < d; ++s)
            for (long r = 0; r < dr; ++r) x(b * d + s, b * dr + r) = a * psi(s, r);
    return x;
}

// Keeps port i of B and R: traces A, A_n and the other ports of y (columns (B, R)).
Eigen::MatrixXcd port_state(const Eigen::MatrixXcd& y, int n, int d, int i, long dr) {
    Eigen::MatrixXcd full = y.transpose() * y.conjugate();  // on (B, R)
    const long nb = ipow(d, n - 1), stride = ipow(d, n - 2 - i);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d * dr, d * dr);
    for (long b = 0; b < nb; ++b) {
        const long bi = (b / stride) % d, rest = b - bi * stride;
        for (long c = 0; c < d; ++c) {
            const long b2 = rest + c * stride;
            for (long r = 0; r < dr; ++r)
                for (long r2 = 0; r2 < dr; ++r2) out(bi * dr + r, c * dr + r2) += full(b * dr + r, b2 * dr + r2);
        }
    }
    return out;
}

// Eigenvalues below kRootFloor are round-off; their square roots would reach 1e-8.
constexpr double kRootFloor = 1e-12;

Eigen::VectorXd floored_sqrt(const Eigen::VectorXd& ev) {
    return ev.unaryExpr([](double x) { return x < kRootFloor ? 0.0 : std::sqrt(x); });
}

Eigen::MatrixXcd psd_root(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((m + m.adjoint()) / 2.0);
    return es.eigenvectors() * floored_sqrt(es.eigenvalues()).cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const Eigen::MatrixXcd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((h + h.adjoint()) / 2.0);
    return es.eigenvalues().cwiseAbs().sum();
}

struct Branches {
    std::vector<Eigen::MatrixXcd> unnormalized;
    long dr = 1;
};

Branches branches(int n, int d, const Eigen::MatrixXcd& psi, const std::vector<Eigen::MatrixXcd>& kraus,
                  const Eigen::MatrixXcd* bob = nullptr) {
    Eigen::MatrixXcd x = initial_state(n, d, psi);
    if (bob) x = x * bob->transpose();
    Branches b;
    b.dr = psi.cols();
    for (int i = 0; i < n - 1; ++i) b.unnormalized.push_back(port_state(kraus[static_cast<size_t>(i)] * x, n, d, i, b.dr));
    return b;
}

std::vector<Eigen::MatrixXcd> dense_kraus(int n, int d) {
    auto pgm = pgm_dense(n, d);
    std::vector<Eigen::MatrixXcd> k;
    for (const auto& op : pgm.povm.operators) k.push_back(psd_sqrt(op));
    return k;
}

Eigen::MatrixXcd kron_power(const Eigen::MatrixXcd& u, int k) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int j = 0; j < k; ++j) out = Eigen::kroneckerProduct(out, u).eval();
    return out;
}

}  // namespace

std::string engine_name(Engine e) { return e == Engine::Dense ? "dense" : "amplified"; }

double uhlmann_fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
    Eigen::MatrixXcd r = psd_root(rho);
    Eigen::MatrixXcd inner = r * sigma * r;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((inner + inner.adjoint()) / 2.0);
    const double t = floored_sqrt(es.eigenvalues()).sum();
    return t * t;
}

std::string RunReport::json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["d"] = d;
    j["engine"] = engine_name(engine);
    j["probabilities"] = probabilities;
    j["fidelity"] = fidelity;
    j["discrepancy"] = discrepancy;
    return j.dump(2);
}

RunReport run(const ProtocolRun& spec) {
    if (spec.n < 2 || spec.d < 2) throw std::invalid_argument("run needs n >= 2 and d >= 2");
    const int n = spec.n, d = spec.d;
    Eigen::MatrixXcd psi, target;
    if (spec.input) {
        const auto& eta = *spec.input;
        if (eta.rows() != d || eta.cols() != d) throw std::invalid_argument("input state must be d x d");
        if (std::abs(eta.trace() - 1.0) > 1e-9) throw std::invalid_argument("input state must have unit trace");
        psi = purify(eta);
        target = eta;
    } else {
        psi = Eigen::MatrixXcd::Identity(d, d) / std::sqrt(static_cast<double>(d));
        Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(d * d);
        for (int k = 0; k < d; ++k) phi(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
        target = phi * phi.adjoint();
    }

    auto dense = branches(n, d, psi, dense_kraus(n, d));
    Branches used = dense;
    if (spec.engine == Engine::Amplified) {
        if (n < 3) throw std::invalid_argument("the amplified engine needs n >= 3");
        const auto& iso = amplified_isometry(n, d, spec.variant);
        const long sys = ipow(d, n);
        std::vector<Eigen::MatrixXcd> k;
        for (int i = 0; i < n - 1; ++i) k.push_back(iso.middleRows(i * sys, sys));
        used = branches(n, d, psi, k);
    }

    RunReport rep;
    rep.n = n;
    rep.d = d;
    rep.engine = spec.engine;
    const long dr = used.dr;
    rep.channel = Eigen::MatrixXcd::Zero(d * dr, d * dr);
    for (size_t i = 0; i < used.unnormalized.size(); ++i) {
        const auto& b = used.unnormalized[i];
        const double p = b.trace().real();
        rep.probabilities.push_back(p);
        rep.outputs.push_back(p > 0 ? Eigen::MatrixXcd(b / p) : b);
        rep.channel += b;
        rep.discrepancy = std::max(rep.discrepancy, trace_norm(b - dense.unnormalized[i]));
    }
    // Entangled mode keeps R; otherwise trace it out.
    if (spec.input) {
        Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(d, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (long r = 0; r < dr; ++r) reduced(a, b) += rep.channel(a * dr + r, b * dr + r);
        rep.channel = reduced;
        for (auto& o : rep.outputs) {
            Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(d, d);
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b)
                    for (long r = 0; r < dr; ++r) t(a, b) += o(a * dr + r, b * dr + r);
            o = t;
        }
    }
    rep.fidelity = uhlmann_fidelity(target, rep.channel);
    return rep;
}

Equivariance equivariance(int n, int d, const Eigen::MatrixXcd& eta, const Eigen::MatrixXcd& u) {
    Eigen::MatrixXcd psi = purify(eta);
    auto kraus = dense_kraus(n, d);
    Eigen::MatrixXcd bob = Eigen::kroneckerProduct(kron_power(u, n - 1), Eigen::MatrixXcd::Identity(psi.cols(), psi.cols()));
    auto plain = branches(n, d, psi, kraus);
    auto rotated = branches(n, d, psi, kraus, &bob);
    Eigen::MatrixXcd ur = Eigen::kroneckerProduct(u, Eigen::MatrixXcd::Identity(psi.cols(), psi.cols()));
    Equivariance e;
    Eigen::MatrixXcd sum_rot = Eigen::MatrixXcd::Zero(d, d), sum_after = Eigen::MatrixXcd::Zero(d, d);
    const long dr = psi.cols();
    for (size_t i = 0; i < plain.unnormalized.size(); ++i) {
        Eigen::MatrixXcd after = ur * plain.unnormalized[i] * ur.adjoint();
        e.branch_residual = std::max(e.branch_residual, (rotated.unnormalized[i] - after).cwiseAbs().maxCoeff());
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b)
                for (long r = 0; r < dr; ++r) {
                    sum_rot(a, b) += rotated.unnormalized[i](a * dr + r, b * dr + r);
                    sum_after(a, b) += after(a * dr + r, b * dr + r);
                }
    }
    Eigen::MatrixXcd goal = u * eta * u.adjoint();
    e.fidelity_rotated = uhlmann_fidelity(goal, sum_rot);
    e.fidelity_after = uhlmann_fidelity(goal, sum_after);
    return e;
}

Histogram sample(const ProtocolRun& spec, long shots) {
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    auto rep = run(spec);
    std::mt19937_64 rng(spec.seed);
    std::discrete_distribution<int> dist(rep.probabilities.begin(), rep.probabilities.end());
    Histogram h;
    h.counts.assign(rep.probabilities.size(), 0);
    for (long s = 0; s < shots; ++s) ++h.counts[static_cast<size_t>(dist(rng))];
    for (size_t i = 0; i < h.counts.size(); ++i) {
        const double p = rep.probabilities[i], e = static_cast<double>(shots) * p;
        h.expected.push_back(e);
        const double diff = static_cast<double>(h.counts[i]) - e;
        if (e > 0) h.chi_square += diff * diff / e;
        const double sd = std::sqrt(e * (1.0 - p));
        if (sd > 0) h.max_sigma = std::max(h.max_sigma, std::abs(diff) / sd);
    }
    return h;
}

}  // namespace pbt
