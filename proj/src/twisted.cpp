#include "pbt/twisted.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbt/symrep.hpp"

namespace pbt {

namespace {

void check_port(int n, int i) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (i < 0 || i > n - 2) throw std::invalid_argument("port index out of range");
}

// Columns of yor(nu, sigma) in the alpha branch (rows: all tableaux of nu).
Eigen::MatrixXd alpha_columns(const Partition& nu, const Perm& sigma, const Partition& alpha) {
    const auto& br = tableau_basis(nu)->branch(alpha);
    Eigen::MatrixXd y = yor(nu, sigma);
    return y.middleCols(br.offset, br.size);
}

// Coefficient matrix sum_{omega,nu} w_omega w_nu G_omega H_nu with G, H the alpha columns/rows of yor(., pi_i).
Eigen::MatrixXd rank_dalpha_form(const BlockLayout& l, int i, const std::vector<double>& weight, double scale) {
    Perm pi = port_transposition(l.n, i);
    Eigen::MatrixXd g(l.D, l.d_alpha);
    for (size_t s = 0; s < l.nus.size(); ++s) {
        const auto& slot = l.nus[s];
        g.middleRows(slot.offset, slot.dim) = weight[s] * alpha_columns(slot.nu, pi, l.alpha);
    }
    return scale * g * g.transpose();
}

Eigen::MatrixXcd embed_phi_plus(const Eigen::MatrixXcd& w, int d) {
    // Column x of w (on n-2 qudits) becomes sqrt(d) |x>|phi+>.
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(w.rows() * d * d, w.cols());
    for (Eigen::Index x = 0; x < w.rows(); ++x)
        for (int a = 0; a < d; ++a) out.row(x * d * d + a * d + a) = w.row(x);
    return out;
}

Eigen::MatrixXcd alpha_kets(const SchurTransform& t2, const Partition& alpha, int r) {
    const auto& s = t2.slot(alpha);
    Eigen::MatrixXcd w(t2.U.cols(), s.dim);
    for (int k = 0; k < s.dim; ++k) w.col(k) = t2.U.row(t2.row(alpha, r, k)).adjoint();
    return w;
}

}  // namespace

Perm port_transposition(int n, int k) {
    check_port(n, k);
    return transposition(n - 1, k, n - 2);
}

double lambda_nu(int n, int d, const Partition& alpha, const Partition& nu) {
    const double m_nu = static_cast<double>(dim_weyl(nu, d));
    const double m_alpha = static_cast<double>(dim_weyl(alpha, d));
    if (m_nu == 0.0 || m_alpha == 0.0) return 0.0;
    return (n - 1) * m_nu * static_cast<double>(dim_specht(alpha)) / (m_alpha * static_cast<double>(dim_specht(nu)));
}

const NuSlot& BlockLayout::slot(const Partition& nu) const {
    for (const auto& s : nus)
        if (s.nu == nu) return s;
    throw std::invalid_argument(nu.str() + " is not in the block of " + alpha.str());
}

double BlockLayout::pseudo_eigenvalue() const {
    return 1.0 - static_cast<double>(d_theta) / static_cast<double>((n - 1) * d_alpha);
}

BlockLayout block_layout(int n, int d, const Partition& alpha) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    if (alpha.size() != n - 2) throw std::invalid_argument("alpha must have n-2 boxes");
    if (alpha.height() > d) throw std::invalid_argument("alpha is taller than d");
    BlockLayout l;
    l.n = n;
    l.d = d;
    l.alpha = alpha;
    l.d_alpha = static_cast<int>(dim_specht(alpha));
    l.d_theta = static_cast<int>(dim_theta(alpha, d));
    for (const auto& nu : add_box(alpha, d).children) {
        NuSlot s{nu, static_cast<int>(dim_specht(nu)), l.D, lambda_nu(n, d, alpha, nu)};
        auto basis = tableau_basis(nu);
        for (const auto& br : basis->branches)
            for (int j = 0; j < br.size; ++j) l.labels.push_back(TwistedLabel{nu, br.xi, j});
        l.D += s.dim;
        l.nus.push_back(std::move(s));
    }
    return l;
}

std::vector<Partition> alpha_set(int n, int d) {
    if (n < 2) throw std::invalid_argument("n must be at least 2");
    return enumerate_partitions(n - 2, d);
}

Eigen::MatrixXcd psi_vectors(int n, int d, const Partition& alpha, int r, const SchurTransform& t2) {
    auto l = block_layout(n, d, alpha);
    if (t2.m != n - 2 || t2.d != d) throw std::invalid_argument("Schur transform has wrong size");
    Eigen::MatrixXcd base = embed_phi_plus(alpha_kets(t2, alpha, r), d);
    Eigen::MatrixXcd psi(base.rows(), (n - 1) * l.d_alpha);
    for (int k = 0; k <= n - 2; ++k) {
        PermutationOperator v(n, d, extend_perm(port_transposition(n, k), n));
        psi.middleCols(k * l.d_alpha, l.d_alpha) = v.apply(base);
    }
    return psi;
}

Eigen::MatrixXcd psi_vectors(int n, int d, const Partition& alpha, int r) {
    return psi_vectors(n, d, alpha, r, build_schur(n - 2, d));
}

GramSpectrum gram_spectrum(int n, int d, const Partition& alpha) {
    auto l = block_layout(n, d, alpha);
    GramSpectrum g;
    for (const auto& s : l.nus) {
        g.closed.emplace_back(s.nu, s.lambda);
        for (int k = 0; k < s.dim; ++k) g.expected.push_back(s.lambda);
    }
    for (int k = 0; k < l.d_theta; ++k) g.expected.push_back(0.0);
    std::sort(g.expected.begin(), g.expected.end());

    Eigen::MatrixXcd psi = psi_vectors(n, d, alpha, 0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(psi.adjoint() * psi);
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) g.numeric.push_back(es.eigenvalues()(k));
    if (g.numeric.size() != g.expected.size()) throw std::logic_error("Gram size mismatch");
    for (size_t k = 0; k < g.numeric.size(); ++k)
        g.max_error = std::max(g.max_error, std::abs(g.numeric[k] - g.expected[k]));
    if (g.max_error > 1e-8) throw std::runtime_error("Gram spectrum disagrees with the closed form");
    return g;
}

Eigen::MatrixXd z_matrix(int n, int d, const Partition& alpha) {
    auto l = block_layout(n, d, alpha);
    Eigen::MatrixXd z((n - 1) * l.d_alpha, l.D);
    const double pre = 1.0 / std::sqrt(static_cast<double>((n - 1) * l.d_alpha));
    for (int k = 0; k <= n - 2; ++k) {
        Perm pi = port_transposition(n, k);
        for (const auto& s : l.nus) {
            const auto& br = tableau_basis(s.nu)->branch(alpha);
            Eigen::MatrixXd y = yor(s.nu, pi);
            z.block(k * l.d_alpha, s.offset, l.d_alpha, s.dim) =
                pre * std::sqrt(s.dim / s.lambda) * y.middleRows(br.offset, br.size);
        }
    }
    return z;
}

IrrepBlock f_basis(int n, int d, const Partition& alpha, int r, const SchurTransform& t2) {
    IrrepBlock b;
    b.layout = block_layout(n, d, alpha);
    b.r = r;
    b.psi = psi_vectors(n, d, alpha, r, t2);
    b.f = b.psi * z_matrix(n, d, alpha).cast<cd>();
    return b;
}

IrrepBlock f_basis(int n, int d, const Partition& alpha, int r) {
    return f_basis(n, d, alpha, r, build_schur(n - 2, d));
}

Eigen::MatrixXcd phi_matrix(int n, int d, const Partition& alpha, int r, const SchurTransform& t2) {
    if (t2.m != n - 2 || t2.d != d) throw std::invalid_argument("Schur transform has wrong size");
    return embed_phi_plus(alpha_kets(t2, alpha, r), d).adjoint();
}

Eigen::MatrixXcd twisted_schur_block_factored(int n, int d, const Partition& alpha, int r,
                                              const SchurTransform& t1, const SchurTransform& t2, int r_nu) {
    auto l = block_layout(n, d, alpha);
    if (t1.m != n - 1 || t1.d != d) throw std::invalid_argument("Schur transform has wrong size");
    Eigen::MatrixXcd ua = submatrix_U_alpha(t1, alpha, r_nu);
    Eigen::MatrixXcd phi = phi_matrix(n, d, alpha, r, t2);
    const double pre = 1.0 / std::sqrt(static_cast<double>((n - 1) * l.d_alpha));
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(l.D, phi.cols());
    for (int k = 0; k <= n - 2; ++k) {
        Perm pi = port_transposition(n, k);
        PermutationOperator v(n - 1, d, pi);
        PermutationOperator vl(n, d, extend_perm(pi, n));
        Eigen::MatrixXcd inner = Eigen::MatrixXcd::Zero(l.D, l.d_alpha);
        for (const auto& s : l.nus) {
            Eigen::MatrixXcd una = submatrix_U_nu_alpha(t1, s.nu, alpha, r_nu);
            inner += std::sqrt(s.dim / s.lambda) * (ua * v.apply(Eigen::MatrixXcd(una.adjoint())));
        }
        Eigen::MatrixXcd phiv(phi.rows(), phi.cols());
        for (int x = 0; x < vl.dim(); ++x) phiv.col(x) = phi.col(vl.image(x));
        out += pre * inner * phiv;
    }
    return out;
}

Eigen::MatrixXcd twisted_schur_block(int n, int d, const Partition& alpha, int r) {
    auto t1 = build_schur(n - 1, d);
    auto t2 = build_schur(n - 2, d);
    Eigen::MatrixXcd direct = f_basis(n, d, alpha, r, t2).f.adjoint();
    Eigen::MatrixXcd factored = twisted_schur_block_factored(n, d, alpha, r, t1, t2);
    if ((direct - factored).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("factored twisted Schur block disagrees with the direct form");
    return direct;
}

Eigen::MatrixXd mf_generator(int n, int d, const Partition& alpha, const Perm& sigma, bool transposed) {
    auto l = block_layout(n, d, alpha);
    check_perm(sigma, n);
    if (sigma[static_cast<size_t>(n - 1)] == n - 1) {
        Perm small(sigma.begin(), sigma.end() - 1);
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l.D, l.D);
        for (const auto& s : l.nus) out.block(s.offset, s.offset, s.dim, s.dim) = yor(s.nu, small);
        return out;
    }
    int i = sigma[static_cast<size_t>(n - 1)];
    if (!transposed || sigma != transposition(n, i, n - 1))
        throw std::invalid_argument("only (i n) with partial transpose or permutations fixing n are supported");
    std::vector<double> w;
    for (const auto& s : l.nus) w.push_back(std::sqrt(s.dim * s.lambda));
    return rank_dalpha_form(l, i, w, 1.0 / ((n - 1) * l.d_alpha));
}

Eigen::MatrixXd mf_rho(int n, int d, const Partition& alpha) {
    auto l = block_layout(n, d, alpha);
    Eigen::VectorXd diag(l.D);
    for (const auto& s : l.nus) diag.segment(s.offset, s.dim).setConstant(s.lambda);
    return diag.asDiagonal();
}

Eigen::MatrixXd mf_pi(int n, int d, const Partition& alpha, int i) {
    check_port(n, i);
    auto l = block_layout(n, d, alpha);
    std::vector<double> w;
    for (const auto& s : l.nus) w.push_back(std::sqrt(static_cast<double>(s.dim)));
    Eigen::MatrixXd p = rank_dalpha_form(l, i, w, 1.0 / ((n - 1) * l.d_alpha));
    double residual = (p * p - l.pseudo_eigenvalue() * p).cwiseAbs().maxCoeff();
    if (residual > 1e-8) throw std::runtime_error("mf_pi fails the pseudoprojector identity");
    return p;
}

Eigen::MatrixXd mf_sqrt_pi(int n, int d, const Partition& alpha, int i) {
    auto l = block_layout(n, d, alpha);
    return mf_pi(n, d, alpha, i) / std::sqrt(l.pseudo_eigenvalue());
}

Eigen::MatrixXcd mf_sqrt_pi_factored(int n, int d, const Partition& alpha, int i, const SchurTransform& t1,
                                     int r_nu) {
    auto l = block_layout(n, d, alpha);
    PermutationOperator v(n - 1, d, port_transposition(n, i));
    Eigen::MatrixXcd ua = submatrix_U_alpha(t1, alpha, r_nu);
    Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(l.D, l.d_alpha);
    for (const auto& s : l.nus) {
        Eigen::MatrixXcd una = submatrix_U_nu_alpha(t1, s.nu, alpha, r_nu);
        left += std::sqrt(static_cast<double>(s.dim)) * (ua * v.apply(Eigen::MatrixXcd(una.adjoint())));
    }
    const double pre = 1.0 / std::sqrt(static_cast<double>((n - 1) * l.d_alpha - l.d_theta)) /
                       std::sqrt(static_cast<double>((n - 1) * l.d_alpha));
    return pre * left * left.adjoint();
}

int TwistedSchur::hm_dim() const {
    int total = 0;
    for (const auto& b : blocks) total += b.layout.D;
    return total;
}

Eigen::MatrixXcd TwistedSchur::hs_basis() const {
    const Eigen::Index dim = hm_projector.rows();
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Identity(dim, dim) - hm_projector;
    std::vector<Eigen::VectorXcd> basis;
    for (Eigen::Index c = 0; c < dim; ++c) {
        Eigen::VectorXcd v = comp.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        double nv = v.norm();
        if (nv <= 1e-9) continue;
        basis.push_back(v / nv);
    }
    Eigen::MatrixXcd out(dim, static_cast<Eigen::Index>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = basis[k];
    return out;
}

TwistedSchur build_twisted(int n, int d, std::uint64_t gauge_seed) {
    TwistedSchur tw;
    tw.n = n;
    tw.d = d;
    tw.t1 = std::make_shared<const SchurTransform>(build_schur(n - 1, d, gauge_seed));
    tw.t2 = std::make_shared<const SchurTransform>(build_schur(n - 2, d, gauge_seed == 0 ? 0 : gauge_seed + 1));
    const int dim = dense_dim(n, d);
    tw.hm_projector = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& alpha : alpha_set(n, d)) {
        const int m_alpha = static_cast<int>(dim_weyl(alpha, d));
        for (int r = 0; r < m_alpha; ++r) {
            auto b = f_basis(n, d, alpha, r, *tw.t2);
            tw.hm_projector += b.f * b.f.adjoint();
            tw.blocks.push_back(std::move(b));
        }
    }
    return tw;
}

}  // namespace pbt
