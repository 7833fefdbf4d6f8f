#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "pbt/perm.hpp"
#include "pbt/young.hpp"

namespace pbt {

/// Standard tableau stored by the cell of each letter 0..m-1.
struct StandardTableau {
    Partition shape;
    std::vector<int> row_of;
    std::vector<int> col_of;

    int content(int letter) const {
        return col_of[static_cast<size_t>(letter)] - row_of[static_cast<size_t>(letter)];
    }
};

/// Contiguous block of tableaux sharing the same (m-1)-subdiagram.
struct Branch {
    Partition xi;
    int offset = 0;
    int size = 0;
};

/// Standard tableaux of a shape in Gelfand-Tsetlin order: grouped by the
/// subdiagram left after removing the largest letter (lower removed row first),
/// recursively.
struct TableauBasis {
    Partition shape;
    std::vector<StandardTableau> tableaux;
    std::vector<Branch> branches;

    int dim() const { return static_cast<int>(tableaux.size()); }
    /// Index of the tableau with the given letter rows, or -1.
    int find(const std::vector<int>& row_of) const;
    const Branch& branch(const Partition& xi) const;
};

/// Shared, cached basis for a shape (thread-safe).
std::shared_ptr<const TableauBasis> tableau_basis(const Partition& lambda);

/// Orthogonal matrix of the adjacent transposition (k k+1), 0-based k.
Eigen::MatrixXd yor_adjacent(const Partition& lambda, int k);

/// Young orthogonal form of sigma; transpositions are memoized.
Eigen::MatrixXd yor(const Partition& lambda, const Perm& sigma);

/// yor(lambda, sigma) * v without forming the matrix.
Eigen::VectorXd yor_apply(const Partition& lambda, const Perm& sigma, const Eigen::VectorXd& v);

/// Sub-block of yor(nu, sigma) with rows in branch xi_row and columns in branch xi_col.
Eigen::MatrixXd prir_block(const Partition& nu, const Perm& sigma, const Partition& xi_row,
                           const Partition& xi_col);

}  // namespace pbt
