#include "pbt/pbt.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pbt {

namespace {

int ipow(int base, int e) {
    int out = 1;
    for (int k = 0; k < e; ++k) out *= base;
    return out;
}

void check_hermitian_size(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix must be square");
}

}  // namespace

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
    check_hermitian_size(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    // Eigenvalues within round-off of zero would otherwise contribute sqrt(eps) ~ 1e-8.
    const double floor = 64 * std::numeric_limits<double>::epsilon() * es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd ev = es.eigenvalues().unaryExpr([floor](double v) { return v > floor ? std::sqrt(v) : 0.0; });
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd psd_inv_sqrt(const Eigen::MatrixXcd& m, double rel_tol) {
    check_hermitian_size(m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cut = rel_tol * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd inv(ev.size());
    for (Eigen::Index k = 0; k < ev.size(); ++k) inv(k) = ev(k) > cut ? 1.0 / std::sqrt(ev(k)) : 0.0;
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd eta_i_dense(int n, int d, int i) {
    if (n < 2 || i < 0 || i > n - 2) throw std::invalid_argument("port index out of range");
    return partial_transpose_last(permutation_operator(n, d, transposition(n, i, n - 1)).dense(), n, d);
}

Eigen::MatrixXcd rho_i_dense(int n, int d, int i) {
    return eta_i_dense(n, d, i) / static_cast<double>(ipow(d, n - 1));
}

Eigen::MatrixXcd rho_i_tensor(int n, int d, int i) {
    if (n < 2 || i < 0 || i > n - 2) throw std::invalid_argument("port index out of range");
    const int dim = dense_dim(n, d);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    const double w = 1.0 / static_cast<double>(ipow(d, n - 1));
    auto digit = [&](int x, int q) { return (x / ipow(d, n - 1 - q)) % d; };
    for (int x = 0; x < dim; ++x) {
        for (int y = 0; y < dim; ++y) {
            bool ok = digit(x, i) == digit(x, n - 1) && digit(y, i) == digit(y, n - 1);
            for (int q = 0; ok && q < n - 1; ++q)
                if (q != i && digit(x, q) != digit(y, q)) ok = false;
            if (ok) out(x, y) = w;
        }
    }
    return out;
}

Eigen::MatrixXcd eta_dense(int n, int d) {
    Eigen::MatrixXcd out = eta_i_dense(n, d, 0);
    for (int i = 1; i <= n - 2; ++i) out += eta_i_dense(n, d, i);
    return out;
}

PgmDense pgm_dense(int n, int d) {
    PgmDense p;
    p.povm.n = n;
    p.povm.d = d;
    const int dim = dense_dim(n, d);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<Eigen::MatrixXcd> rhos;
    for (int i = 0; i <= n - 2; ++i) {
        rhos.push_back(rho_i_dense(n, d, i));
        rho += rhos.back();
    }
    Eigen::MatrixXcd inv = psd_inv_sqrt(rho);
    p.support = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& r : rhos) {
        p.pi_tilde.push_back(inv * r * inv);
        p.support += p.pi_tilde.back();
    }
    p.delta = (Eigen::MatrixXcd::Identity(dim, dim) - p.support) / static_cast<double>(n - 1);
    for (const auto& t : p.pi_tilde) p.povm.operators.push_back(t + p.delta);
    return p;
}

PovmCheck check_povm(const Povm& p) {
    PovmCheck c;
    const int dim = dense_dim(p.n, p.d);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    c.min_eigenvalue = 1.0;
    for (const auto& op : p.operators) {
        sum += op;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op, Eigen::EigenvaluesOnly);
        c.min_eigenvalue = std::min(c.min_eigenvalue, es.eigenvalues().minCoeff());
    }
    c.completeness = (sum - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    return c;
}

Eigen::MatrixXcd kraus_from_twisted(const TwistedSchur& tw, int i) {
    const int n = tw.n, d = tw.d;
    Eigen::MatrixXcd k = tw.reconstruct([&](const Partition& a) { return mf_sqrt_pi(n, d, a, i); });
    const Eigen::Index dim = tw.hm_projector.rows();
    k += (Eigen::MatrixXcd::Identity(dim, dim) - tw.hm_projector) / std::sqrt(static_cast<double>(n - 1));
    return k;
}

Povm povm_from_kraus(int n, int d, const std::vector<Eigen::MatrixXcd>& kraus) {
    Povm p;
    p.n = n;
    p.d = d;
    for (const auto& k : kraus) p.operators.push_back(k.adjoint() * k);
    return p;
}

Eigen::MatrixXcd channel_branch(const Povm& p, int i, const Eigen::MatrixXcd& eta) {
    const int n = p.n, d = p.d;
    if (i < 0 || i >= static_cast<int>(p.operators.size())) throw std::invalid_argument("outcome out of range");
    if (eta.rows() != d || eta.cols() != d) throw std::invalid_argument("input must be d x d");
    const Eigen::MatrixXcd& pi = p.operators[static_cast<size_t>(i)];
    const int na = ipow(d, n - 1);
    const int place = ipow(d, n - 2 - i);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
    for (int a = 0; a < na; ++a) {
        const int y = (a / place) % d;
        const int base = a - y * place;
        for (int yp = 0; yp < d; ++yp) {
            const int ap = base + yp * place;
            cd acc = 0.0;
            for (int s = 0; s < d; ++s)
                for (int sp = 0; sp < d; ++sp) acc += pi(ap * d + sp, a * d + s) * eta(s, sp);
            out(y, yp) += acc;
        }
    }
    return out / static_cast<double>(na);
}

Eigen::MatrixXcd channel_apply(const Povm& p, const Eigen::MatrixXcd& eta) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(p.d, p.d);
    for (int i = 0; i < static_cast<int>(p.operators.size()); ++i) out += channel_branch(p, i, eta);
    return out;
}

Fidelity entanglement_fidelity(const Povm& p) {
    const int d = p.d;
    Fidelity f;
    for (int s = 0; s < d; ++s) {
        for (int sp = 0; sp < d; ++sp) {
            Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(d, d);
            e(s, sp) = 1.0;
            f.choi += channel_apply(p, e)(s, sp).real();
        }
    }
    f.choi /= static_cast<double>(d * d);
    for (int i = 0; i < static_cast<int>(p.operators.size()); ++i)
        f.direct += (p.operators[static_cast<size_t>(i)] * rho_i_dense(p.n, d, i)).trace().real();
    f.direct /= static_cast<double>(d * d);
    if (std::abs(f.choi - f.direct) > 1e-10) throw std::runtime_error("fidelity forms disagree");
    return f;
}

}  // namespace pbt
