#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pbt/twisted.hpp"

namespace pbt {

/// Principal square root of a Hermitian PSD matrix (negative eigenvalues clipped).
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m);

/// Pseudo-inverse square root on the support; eigenvalues below rel_tol * max are dropped.
Eigen::MatrixXcd psd_inv_sqrt(const Eigen::MatrixXcd& m, double rel_tol = 1e-10);

/// eta_i = V[(i n)]^{t_n} on n qudits, 0-based port i.
Eigen::MatrixXcd eta_i_dense(int n, int d, int i);

/// rho_i = eta_i / d^{n-1} = |phi+><phi+|_{i n} ⊗ I / d^{n-2}.
Eigen::MatrixXcd rho_i_dense(int n, int d, int i);

/// Explicit tensor construction of rho_i, independent of the permutation route.
Eigen::MatrixXcd rho_i_tensor(int n, int d, int i);

/// eta = sum_i eta_i.
Eigen::MatrixXcd eta_dense(int n, int d);

struct Povm {
    int n = 0;
    int d = 0;
    std::vector<Eigen::MatrixXcd> operators;  // Pi_i, i = 0..n-2
};

struct PgmDense {
    Povm povm;
    std::vector<Eigen::MatrixXcd> pi_tilde;
    Eigen::MatrixXcd delta;
    Eigen::MatrixXcd support;  // projector onto supp(rho)
};

PgmDense pgm_dense(int n, int d);

struct PovmCheck {
    double completeness = 0.0;   // max |sum Pi_i - I|
    double min_eigenvalue = 0.0;
};

PovmCheck check_povm(const Povm& p);

/// sqrt(Pi_i) = sum U^dagger mf_sqrt_pi U + (I - P_HM) / sqrt(n-1).
Eigen::MatrixXcd kraus_from_twisted(const TwistedSchur& tw, int i);

/// Povm whose operators are the squares of the given Kraus operators.
Povm povm_from_kraus(int n, int d, const std::vector<Eigen::MatrixXcd>& kraus);

/// Output on B_n of the port-based channel for input eta on A_n, with Bell-pair resource.
Eigen::MatrixXcd channel_apply(const Povm& p, const Eigen::MatrixXcd& eta);

/// Contribution of a single outcome i (unnormalized; trace is its probability).
Eigen::MatrixXcd channel_branch(const Povm& p, int i, const Eigen::MatrixXcd& eta);

struct Fidelity {
    double choi = 0.0;    // <phi+| (id ⊗ Lambda)(phi+) |phi+>
    double direct = 0.0;  // (1/d^2) sum Tr[Pi_i rho_i]
};

/// Both forms; throws std::runtime_error when they differ by more than 1e-10.
Fidelity entanglement_fidelity(const Povm& p);

}  // namespace pbt
