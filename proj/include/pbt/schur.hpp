#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "pbt/perm.hpp"
#include "pbt/young.hpp"

namespace pbt {

using cd = std::complex<double>;

/// Qudit permutation V(sigma) on (C^d)^{⊗m}; qudit 0 is the most significant digit.
class PermutationOperator {
public:
    PermutationOperator(int m, int d, Perm sigma);

    int m() const { return m_; }
    int d() const { return d_; }
    const Perm& sigma() const { return sigma_; }
    /// V|x> = |image(x)>.
    int image(int x) const { return map_[static_cast<size_t>(x)]; }
    int dim() const { return static_cast<int>(map_.size()); }

    Eigen::MatrixXcd dense() const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    /// V * M for a dense M with dim() rows.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& mat) const;

private:
    int m_, d_;
    Perm sigma_;
    std::vector<int> map_;
};

PermutationOperator permutation_operator(int m, int d, const Perm& sigma);

/// d^m, throwing std::invalid_argument past the dense guard (2^20).
int dense_dim(int m, int d);

/// Transpose on the last tensor factor of a d^m x d^m operator.
Eigen::MatrixXcd partial_transpose_last(const Eigen::MatrixXcd& op, int m, int d);

struct SchurLabel {
    Partition lambda;
    int r = 0;     // multiplicity copy, 0-based
    int path = 0;  // tableau index in Gelfand-Tsetlin order
};

struct IrrepSlot {
    Partition lambda;
    int mult = 0;    // m_lambda(d)
    int dim = 0;     // d_lambda
    int offset = 0;  // first row; rows ordered (r, path)
};

/// Dense Schur transform: rows are bras labelled by (lambda, r, path).
struct SchurTransform {
    int m = 0;
    int d = 0;
    Eigen::MatrixXcd U;
    std::vector<SchurLabel> index;
    std::vector<IrrepSlot> slots;

    const IrrepSlot& slot(const Partition& lambda) const;
    int row(const Partition& lambda, int r, int path) const;
};

/// Builds the transform from matrix-unit symmetrizers. A nonzero gauge_seed
/// rotates every multiplicity basis by a seeded random unitary.
SchurTransform build_schur(int m, int d, std::uint64_t gauge_seed = 0);

Eigen::RowVectorXcd schur_row(const SchurTransform& t, const Partition& lambda, int r, int path);

/// Rows (nu, r_nu, path) for every nu = alpha + box != theta, ordered (nu, xi, j). t.m = |alpha| + 1.
Eigen::MatrixXcd submatrix_U_alpha(const SchurTransform& t, const Partition& alpha, int r_nu = 0);

/// The d_alpha rows of copy r_nu of nu whose path passes through alpha.
Eigen::MatrixXcd submatrix_U_nu_alpha(const SchurTransform& t, const Partition& nu,
                                      const Partition& alpha, int r_nu = 0);

/// Block-diagonal ⊕_lambda I_{m_lambda} ⊗ yor(lambda, sigma) in the transform's row order.
Eigen::MatrixXd schur_block_rep(const SchurTransform& t, const Perm& sigma);

/// Seeded Haar-random unitary (QR of a complex Gaussian matrix with phase fix).
Eigen::MatrixXcd random_unitary(int n, std::mt19937_64& rng);

}  // namespace pbt
