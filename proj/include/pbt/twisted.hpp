#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "pbt/schur.hpp"
#include "pbt/young.hpp"

namespace pbt {

/// pi_k = (k, n-2) on n-1 letters (0-based ports k in [0, n-2]).
Perm port_transposition(int n, int k);

/// lambda_nu(alpha) = (n-1) m_nu d_alpha / (m_alpha d_nu): spectrum of eta = sum_i V[(i n)]^{t_n} on H_M.
double lambda_nu(int n, int d, const Partition& alpha, const Partition& nu);

/// One nu = alpha + box != theta inside the D_alpha-dimensional block.
struct NuSlot {
    Partition nu;
    int dim = 0;     // d_nu
    int offset = 0;  // first index in (nu, xi, j) order
    double lambda = 0.0;
};

struct TwistedLabel {
    Partition nu;
    Partition xi;
    int j = 0;
};

/// Index bookkeeping of a D_alpha block; independent of any Schur transform.
struct BlockLayout {
    int n = 0;
    int d = 0;
    Partition alpha;
    int d_alpha = 0;
    int d_theta = 0;
    int D = 0;
    std::vector<NuSlot> nus;
    std::vector<TwistedLabel> labels;

    const NuSlot& slot(const Partition& nu) const;
    /// 1 - d_theta / ((n-1) d_alpha): the nonzero eigenvalue of mf_pi.
    double pseudo_eigenvalue() const;
};

BlockLayout block_layout(int n, int d, const Partition& alpha);

/// Irreps alpha of S(n-2) with height <= d, in enumeration order.
std::vector<Partition> alpha_set(int n, int d);

struct IrrepBlock {
    BlockLayout layout;
    int r = 0;
    Eigen::MatrixXcd psi;  // d^n x (n-1) d_alpha, columns (k outer, k_alpha inner)
    Eigen::MatrixXcd f;    // d^n x D_alpha, orthonormal
};

/// Columns sqrt(d) V_L(pi_k) |r, alpha, k_alpha>|phi+>; t2 is the (n-2)-qudit transform.
Eigen::MatrixXcd psi_vectors(int n, int d, const Partition& alpha, int r, const SchurTransform& t2);
Eigen::MatrixXcd psi_vectors(int n, int d, const Partition& alpha, int r);

struct GramSpectrum {
    std::vector<std::pair<Partition, double>> closed;  // lambda_nu per nu, multiplicity d_nu
    std::vector<double> expected;                      // closed form expanded, zeros for theta, ascending
    std::vector<double> numeric;                       // eigenvalues of psi^dagger psi, ascending
    double max_error = 0.0;
};

/// Throws std::runtime_error when the numeric and closed-form spectra differ by more than 1e-8.
GramSpectrum gram_spectrum(int n, int d, const Partition& alpha);

/// Stacked z-tilde: rows (k, k_alpha), columns (nu, xi, j).
Eigen::MatrixXd z_matrix(int n, int d, const Partition& alpha);

IrrepBlock f_basis(int n, int d, const Partition& alpha, int r, const SchurTransform& t2);
IrrepBlock f_basis(int n, int d, const Partition& alpha, int r);

/// Phi(alpha, r) = sum_k |k><r, alpha, k| sqrt(d) <phi+|, a d_alpha x d^n matrix.
Eigen::MatrixXcd phi_matrix(int n, int d, const Partition& alpha, int r, const SchurTransform& t2);

/// U_twSch from the sum over k of U_alpha V(pi_k) U_{nu,alpha}^dagger Phi V_L(pi_k) with coefficients.
Eigen::MatrixXcd twisted_schur_block_factored(int n, int d, const Partition& alpha, int r,
                                              const SchurTransform& t1, const SchurTransform& t2,
                                              int r_nu = 0);

/// U_twSch(alpha, r) = f^dagger; throws when the factored form disagrees beyond 1e-10.
Eigen::MatrixXcd twisted_schur_block(int n, int d, const Partition& alpha, int r);

/// M_f of V[sigma]^{t_n} (transposed, sigma = (i n)) or of V_L(sigma) (sigma fixes the last qudit).
Eigen::MatrixXd mf_generator(int n, int d, const Partition& alpha, const Perm& sigma, bool transposed);

/// diag(lambda_nu repeated d_nu times).
Eigen::MatrixXd mf_rho(int n, int d, const Partition& alpha);

/// M_f of the pretty-good-measurement part for port i; throws on pseudoprojector residual > 1e-8.
Eigen::MatrixXd mf_pi(int n, int d, const Partition& alpha, int i);
Eigen::MatrixXd mf_sqrt_pi(int n, int d, const Partition& alpha, int i);

/// Schur-submatrix form of mf_sqrt_pi built from the (n-1)-qudit transform.
Eigen::MatrixXcd mf_sqrt_pi_factored(int n, int d, const Partition& alpha, int i, const SchurTransform& t1,
                                     int r_nu = 0);

struct TwistedSchur {
    int n = 0;
    int d = 0;
    std::shared_ptr<const SchurTransform> t1;  // n-1 qudits
    std::shared_ptr<const SchurTransform> t2;  // n-2 qudits
    std::vector<IrrepBlock> blocks;             // (alpha, r), alpha outer
    Eigen::MatrixXcd hm_projector;

    int hm_dim() const;
    /// Orthonormal basis of the complement of H_M.
    Eigen::MatrixXcd hs_basis() const;
    /// sum_{alpha,r} U^dagger mf(alpha) U for a per-alpha matrix.
    template <class Fn>
    Eigen::MatrixXcd reconstruct(Fn&& mf) const {
        const Eigen::Index dim = hm_projector.rows();
        Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& b : blocks) {
            Eigen::MatrixXcd m = mf(b.layout.alpha).template cast<cd>();
            out += b.f * m * b.f.adjoint();
        }
        return out;
    }
};

/// A nonzero gauge_seed rotates both Schur transforms' multiplicity bases.
TwistedSchur build_twisted(int n, int d, std::uint64_t gauge_seed = 0);

}  // namespace pbt
