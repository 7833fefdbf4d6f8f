#include "pbt/symrep.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace pbt {

namespace {

std::shared_ptr<const TableauBasis> build_basis(const Partition& lambda) {
    auto basis = std::make_shared<TableauBasis>();
    basis->shape = lambda;
    const int m = lambda.size();
    if (m == 0) {
        basis->tableaux.push_back(StandardTableau{lambda, {}, {}});
        return basis;
    }
    auto removals = remove_box(lambda);
    std::reverse(removals.begin(), removals.end());
    for (const auto& xi : removals) {
        auto sub = tableau_basis(xi);
        int row = added_row(xi, lambda);
        int col = lambda.row(row) - 1;
        Branch br{xi, basis->dim(), sub->dim()};
        for (const auto& t : sub->tableaux) {
            StandardTableau ext{lambda, t.row_of, t.col_of};
            ext.row_of.push_back(row);
            ext.col_of.push_back(col);
            basis->tableaux.push_back(std::move(ext));
        }
        basis->branches.push_back(std::move(br));
    }
    return basis;
}

// Sparse form of an adjacent transposition: diagonal plus at most one partner per row.
struct AdjacentForm {
    std::vector<double> diag;
    std::vector<int> partner;
    std::vector<double> off;
};

std::shared_ptr<const AdjacentForm> adjacent_form(const Partition& lambda, int k) {
    static std::mutex mu;
    static std::map<std::pair<Partition, int>, std::shared_ptr<const AdjacentForm>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(lambda, k);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    auto basis = tableau_basis(lambda);
    auto form = std::make_shared<AdjacentForm>();
    const int dim = basis->dim();
    form->diag.assign(static_cast<size_t>(dim), 0.0);
    form->partner.assign(static_cast<size_t>(dim), -1);
    form->off.assign(static_cast<size_t>(dim), 0.0);
    for (int t = 0; t < dim; ++t) {
        const auto& tab = basis->tableaux[static_cast<size_t>(t)];
        int axial = tab.content(k + 1) - tab.content(k);
        double r = 1.0 / axial;
        form->diag[static_cast<size_t>(t)] = r;
        if (axial != 1 && axial != -1) {
            auto rows = tab.row_of;
            std::swap(rows[static_cast<size_t>(k)], rows[static_cast<size_t>(k + 1)]);
            int partner = basis->find(rows);
            if (partner < 0) throw std::logic_error("missing swapped tableau");
            form->partner[static_cast<size_t>(t)] = partner;
            form->off[static_cast<size_t>(t)] = std::sqrt(1.0 - r * r);
        }
    }
    cache.emplace(key, form);
    return form;
}

// rows <- s_k * rows for a dense block whose rows are indexed by tableaux.
void left_apply(const AdjacentForm& f, Eigen::MatrixXd& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index t = 0; t < m.rows(); ++t) {
        out.row(t) = f.diag[static_cast<size_t>(t)] * m.row(t);
        int p = f.partner[static_cast<size_t>(t)];
        if (p >= 0) out.row(t) += f.off[static_cast<size_t>(t)] * m.row(p);
    }
    m.swap(out);
}

int check_shape(const Partition& lambda, const Perm& sigma) {
    int m = lambda.size();
    check_perm(sigma, m);
    return m;
}

Eigen::MatrixXd compute_yor(const Partition& lambda, const Perm& sigma) {
    auto basis = tableau_basis(lambda);
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(basis->dim(), basis->dim());
    for (int j : adjacent_word(sigma)) left_apply(*adjacent_form(lambda, j), out);
    return out;
}

bool is_transposition(const Perm& p) {
    int moved = 0;
    for (size_t x = 0; x < p.size(); ++x)
        if (p[x] != static_cast<int>(x)) ++moved;
    return moved == 2;
}

}  // namespace

int TableauBasis::find(const std::vector<int>& row_of) const {
    for (size_t i = 0; i < tableaux.size(); ++i)
        if (tableaux[i].row_of == row_of) return static_cast<int>(i);
    return -1;
}

const Branch& TableauBasis::branch(const Partition& xi) const {
    for (const auto& b : branches)
        if (b.xi == xi) return b;
    throw std::invalid_argument(xi.str() + " is not a one-box removal of " + shape.str());
}

std::shared_ptr<const TableauBasis> tableau_basis(const Partition& lambda) {
    static std::recursive_mutex mu;
    static std::map<Partition, std::shared_ptr<const TableauBasis>> cache;
    std::lock_guard<std::recursive_mutex> lock(mu);
    if (auto it = cache.find(lambda); it != cache.end()) return it->second;
    auto basis = build_basis(lambda);
    cache.emplace(lambda, basis);
    return basis;
}

Eigen::MatrixXd yor_adjacent(const Partition& lambda, int k) {
    int m = lambda.size();
    if (k < 0 || k + 1 >= m) throw std::invalid_argument("adjacent transposition out of range");
    auto f = adjacent_form(lambda, k);
    const int dim = static_cast<int>(f->diag.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (int t = 0; t < dim; ++t) {
        out(t, t) = f->diag[static_cast<size_t>(t)];
        int p = f->partner[static_cast<size_t>(t)];
        if (p >= 0) out(t, p) = f->off[static_cast<size_t>(t)];
    }
    return out;
}

Eigen::MatrixXd yor(const Partition& lambda, const Perm& sigma) {
    check_shape(lambda, sigma);
    if (!is_transposition(sigma)) return compute_yor(lambda, sigma);
    static std::mutex mu;
    static std::map<std::pair<Partition, Perm>, Eigen::MatrixXd> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find({lambda, sigma}); it != cache.end()) return it->second;
    }
    Eigen::MatrixXd m = compute_yor(lambda, sigma);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(std::make_pair(lambda, sigma), m);
    return m;
}

Eigen::VectorXd yor_apply(const Partition& lambda, const Perm& sigma, const Eigen::VectorXd& v) {
    check_shape(lambda, sigma);
    Eigen::MatrixXd out = v;
    for (int j : adjacent_word(sigma)) left_apply(*adjacent_form(lambda, j), out);
    return out.col(0);
}

Eigen::MatrixXd prir_block(const Partition& nu, const Perm& sigma, const Partition& xi_row,
                           const Partition& xi_col) {
    auto basis = tableau_basis(nu);
    const auto& br = basis->branch(xi_row);
    const auto& bc = basis->branch(xi_col);
    return yor(nu, sigma).block(br.offset, bc.offset, br.size, bc.size);
}

}  // namespace pbt
