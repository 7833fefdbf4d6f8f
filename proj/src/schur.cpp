#include "pbt/schur.hpp"

#include <cmath>
#include <stdexcept>

#include "pbt/symrep.hpp"

namespace pbt {

namespace {

constexpr double kRankTol = 1e-9;

std::vector<int> digits_of(int x, int m, int d) {
    std::vector<int> dig(static_cast<size_t>(m));
    for (int k = m - 1; k >= 0; --k) {
        dig[static_cast<size_t>(k)] = x % d;
        x /= d;
    }
    return dig;
}

// Orthonormal basis of the column space with in-order pivoting (two-pass Gram-Schmidt).
std::vector<Eigen::VectorXd> column_basis(const Eigen::MatrixXd& a) {
    double scale = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c) scale = std::max(scale, a.col(c).norm());
    std::vector<Eigen::VectorXd> basis;
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
        Eigen::VectorXd v = a.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        double nv = v.norm();
        if (nv <= kRankTol * scale) continue;
        v /= nv;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            if (std::abs(v(i)) > 1e-12) {
                if (v(i) < 0) v = -v;
                break;
            }
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace

PermutationOperator::PermutationOperator(int m, int d, Perm sigma)
    : m_(m), d_(d), sigma_(std::move(sigma)) {
    check_perm(sigma_, m_);
    const int dim = dense_dim(m, d);
    map_.resize(static_cast<size_t>(dim));
    std::vector<int> out(static_cast<size_t>(m));
    for (int x = 0; x < dim; ++x) {
        auto in = digits_of(x, m, d);
        for (int k = 0; k < m; ++k) out[static_cast<size_t>(sigma_[static_cast<size_t>(k)])] = in[static_cast<size_t>(k)];
        int y = 0;
        for (int k = 0; k < m; ++k) y = y * d + out[static_cast<size_t>(k)];
        map_[static_cast<size_t>(x)] = y;
    }
}

Eigen::MatrixXcd PermutationOperator::dense() const {
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(dim(), dim());
    for (int x = 0; x < dim(); ++x) v(image(x), x) = 1.0;
    return v;
}

Eigen::VectorXcd PermutationOperator::apply(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(v.size());
    for (int x = 0; x < dim(); ++x) out(image(x)) = v(x);
    return out;
}

Eigen::MatrixXcd PermutationOperator::apply(const Eigen::MatrixXcd& mat) const {
    Eigen::MatrixXcd out(mat.rows(), mat.cols());
    for (int x = 0; x < dim(); ++x) out.row(image(x)) = mat.row(x);
    return out;
}

PermutationOperator permutation_operator(int m, int d, const Perm& sigma) {
    return PermutationOperator(m, d, sigma);
}

int dense_dim(int m, int d) {
    if (m < 0 || d < 1) throw std::invalid_argument("invalid qudit count or dimension");
    long long dim = 1;
    for (int k = 0; k < m; ++k) {
        dim *= d;
        if (dim > (1LL << 20)) throw std::invalid_argument("d^m exceeds the dense guard 2^20");
    }
    return static_cast<int>(dim);
}

Eigen::MatrixXcd partial_transpose_last(const Eigen::MatrixXcd& op, int m, int d) {
    const int dim = dense_dim(m, d);
    if (op.rows() != dim || op.cols() != dim) throw std::invalid_argument("operator has wrong size");
    Eigen::MatrixXcd out(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            int ra = r / d, rb = r % d, ca = c / d, cb = c % d;
            out(ra * d + cb, ca * d + rb) = op(r, c);
        }
    }
    return out;
}

const IrrepSlot& SchurTransform::slot(const Partition& lambda) const {
    for (const auto& s : slots)
        if (s.lambda == lambda) return s;
    throw std::invalid_argument("no irrep " + lambda.str() + " in this Schur transform");
}

int SchurTransform::row(const Partition& lambda, int r, int path) const {
    const auto& s = slot(lambda);
    if (r < 0 || r >= s.mult || path < 0 || path >= s.dim) throw std::invalid_argument("label out of range");
    return s.offset + r * s.dim + path;
}

Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = cd(g(rng), g(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        double mag = std::abs(r(j, j));
        if (mag > 0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

SchurTransform build_schur(int m, int d, std::uint64_t gauge_seed) {
    const int dim = dense_dim(m, d);
    SchurTransform t;
    t.m = m;
    t.d = d;
    t.U = Eigen::MatrixXcd::Zero(dim, dim);

    const auto perms = all_perms(m);
    std::vector<PermutationOperator> ops;
    ops.reserve(perms.size());
    for (const auto& p : perms) ops.emplace_back(m, d, p);
    std::mt19937_64 rng(gauge_seed);

    int offset = 0;
    for (const auto& lambda : enumerate_partitions(m, d)) {
        const int dl = static_cast<int>(dim_specht(lambda));
        const int ml = static_cast<int>(dim_weyl(lambda, d));
        const double norm = static_cast<double>(dl) / static_cast<double>(perms.size());

        // First column of yor(lambda, sigma) for every sigma.
        Eigen::VectorXd e0 = Eigen::VectorXd::Unit(dl, 0);
        std::vector<Eigen::VectorXd> first_col;
        first_col.reserve(perms.size());
        for (const auto& p : perms) first_col.push_back(yor_apply(lambda, p, e0));

        Eigen::MatrixXd e11 = Eigen::MatrixXd::Zero(dim, dim);
        for (size_t s = 0; s < perms.size(); ++s) {
            double c = norm * first_col[s](0);
            if (c == 0.0) continue;
            for (int x = 0; x < dim; ++x) e11(ops[s].image(x), x) += c;
        }
        auto basis = column_basis(e11);
        if (static_cast<int>(basis.size()) != ml)
            throw std::runtime_error("rank of E_11 for " + lambda.str() + " differs from m_lambda");

        Eigen::MatrixXcd v(dim, ml);
        for (int r = 0; r < ml; ++r) v.col(r) = basis[static_cast<size_t>(r)].cast<cd>();
        if (gauge_seed != 0) v = v * random_unitary(ml, rng);

        // Column (r, j) holds E_{j1} v_r.
        Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(dim, static_cast<Eigen::Index>(ml) * dl);
        for (size_t s = 0; s < perms.size(); ++s) {
            Eigen::MatrixXcd pv = ops[s].apply(v);
            for (int j = 0; j < dl; ++j) {
                double c = norm * first_col[s](j);
                if (c == 0.0) continue;
                for (int r = 0; r < ml; ++r) w.col(r * dl + j) += c * pv.col(r);
            }
        }
        for (int r = 0; r < ml; ++r) {
            for (int j = 0; j < dl; ++j) {
                t.U.row(offset + r * dl + j) = w.col(r * dl + j).adjoint();
                t.index.push_back(SchurLabel{lambda, r, j});
            }
        }
        t.slots.push_back(IrrepSlot{lambda, ml, dl, offset});
        offset += ml * dl;
    }
    if (offset != dim) throw std::runtime_error("Schur-Weyl dimension count failed");
    double defect = (t.U * t.U.adjoint() - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    if (defect > 1e-8) throw std::runtime_error("Schur transform is not unitary");
    return t;
}

Eigen::RowVectorXcd schur_row(const SchurTransform& t, const Partition& lambda, int r, int path) {
    return t.U.row(t.row(lambda, r, path));
}

Eigen::MatrixXcd submatrix_U_alpha(const SchurTransform& t, const Partition& alpha, int r_nu) {
    if (alpha.size() + 1 != t.m) throw std::invalid_argument("alpha must have m-1 boxes");
    auto add = add_box(alpha, t.d);
    std::vector<int> rows;
    for (const auto& nu : add.children) {
        const auto& s = t.slot(nu);
        for (int j = 0; j < s.dim; ++j) rows.push_back(t.row(nu, r_nu, j));
    }
    Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), t.U.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = t.U.row(rows[i]);
    return out;
}

Eigen::MatrixXcd submatrix_U_nu_alpha(const SchurTransform& t, const Partition& nu,
                                      const Partition& alpha, int r_nu) {
    if (alpha.size() + 1 != t.m) throw std::invalid_argument("alpha must have m-1 boxes");
    const auto& br = tableau_basis(nu)->branch(alpha);
    Eigen::MatrixXcd out(br.size, t.U.cols());
    for (int k = 0; k < br.size; ++k) out.row(k) = t.U.row(t.row(nu, r_nu, br.offset + k));
    return out;
}

Eigen::MatrixXd schur_block_rep(const SchurTransform& t, const Perm& sigma) {
    const int dim = static_cast<int>(t.U.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& s : t.slots) {
        Eigen::MatrixXd y = yor(s.lambda, sigma);
        for (int r = 0; r < s.mult; ++r) out.block(s.offset + r * s.dim, s.offset + r * s.dim, s.dim, s.dim) = y;
    }
    return out;
}

}  // namespace pbt
