#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pbt/circuit.hpp"
#include "pbt/twisted.hpp"

namespace pbt {

/// First k rows equal the input; the rest complete an orthonormal basis (largest-residual pivoting,
/// first nonzero entry real positive). Throws when the rows are not orthonormal within 1e-10.
Eigen::MatrixXcd unitary_complete(const Eigen::MatrixXcd& rows);

struct Coefficients {
    double c = 0.0;        // C(alpha, nu)
    double c_prime = 0.0;  // C'(alpha, nu)
};

Coefficients coefficients(int n, int d, const Partition& alpha, const Partition& nu);

enum class Variant { C, CPrime };
enum class Padding { Tight, PowerOfTwo };

/// max over alpha of sum_nu C(alpha, nu) (or C'): the smallest admissible x^2.
double min_scale_squared(int n, int d, Variant v);

/// Register sizes shared by every encoding at fixed (n, d).
struct EncodingLayout {
    int n = 0;
    int d = 0;
    Padding padding = Padding::Tight;
    bool alpha_guard = true;
    std::vector<Partition> nus;     // irreps of n-1 qudits; nu register value = index + 1
    std::vector<Partition> alphas;  // irreps of n-2 qudits; alpha register value = index
    long n_rnu = 0, n_nu = 0, n_g = 1, n_alpha = 0, n_dalpha = 0, n_r = 0, n_k = 0;

    long anc0() const { return n_rnu * n_nu * n_g; }
    long sys() const { return n_alpha * n_dalpha; }
    long L() const { return n_rnu * n_nu * n_alpha * n_dalpha; }
    long Lp() const { return n_r * n_alpha * n_dalpha; }
    long pad1() const;  // L / d^{n-1}
    long pad2() const;  // Lp / d^{n-2}
    long a13() const;   // anc0^2 / d^2
    long in_dim() const { return Lp() * d * d; }
    /// Index of (r, nu, alpha, k_alpha) in the (n-1)-qudit label space.
    long label(long r, long nu, long alpha, long k) const {
        return ((r * n_nu + nu) * n_alpha + alpha) * n_dalpha + k;
    }
};

/// Tight sizes are bumped until every divisibility and padding-sector constraint holds;
/// power-of-two sizes require d to be a power of two.
EncodingLayout make_layout(int n, int d, Padding p = Padding::Tight, bool alpha_guard = true);

/// Coefficient-injection matrices on the (r, nu) registers, one per alpha register value.
struct Injection {
    std::vector<Eigen::MatrixXcd> PL, PR, P2;
    Eigen::MatrixXcd P1;
    bool collision = false;      // (1,1) coincides with a valid (e_{r_nu}, e_nu)
    double min_remainder = 1.0;  // min over alpha of C_rem
};

Injection build_PL_PR(const EncodingLayout& lay, double x, Variant v);

/// (n-1)-qudit Schur transform padded to the label space (copy c of nu at r = c + 1): column
/// pad * d^{n-1} + x maps to labels; invalid labels of the two remainder classes land in disjoint pad sectors.
Eigen::MatrixXcd padded_schur_large(const EncodingLayout& lay, const SchurTransform& t1);
/// (n-2)-qudit Schur transform padded to (r, alpha, k_alpha).
Eigen::MatrixXcd padded_schur_small(const EncodingLayout& lay, const SchurTransform& t2);

/// U[x^2] on (r, nu, g, alpha, k_alpha) encoding V(pi_a) V(pi_b) weighted by C or C'.
Eigen::MatrixXcd lcu_unitary(const EncodingLayout& lay, const Injection& inj, const Eigen::MatrixXcd& upad,
                             int a, int b);

/// Dense sum_alpha |alpha><alpha| ⊗ sum_nu C U_{nu,alpha} V(pi_a) V(pi_b) U_{nu,alpha}^dagger on (alpha, k_alpha).
Eigen::MatrixXcd o_target(const EncodingLayout& lay, const SchurTransform& t1, Variant v, int a, int b,
                          int r_nu = 0);

/// Unitary circuit on (ancilla ⊗ target) with the ancilla most significant.
struct BlockEncoding {
    std::string name;
    Circuit circuit;
    double scale = 1.0;
    long ancilla_dim = 1;
    long target_dim = 1;
    double error_bound = 0.0;
    int ancilla_qubits = 0;
    Eigen::MatrixXcd target;
    /// Target indices on which the encoding is specified (sorted); empty means all.
    std::vector<long> support;

    /// <0|U|0> on the target.
    Eigen::MatrixXcd block() const;
    /// ||target - scale * block|| (spectral norm) on the support.
    double residual() const;
    bool verify() const { return residual() <= error_bound; }
};

/// Allowance for floating-point round-off added to every measured primitive residual.
inline constexpr double kFloatAllowance = 1e-11;

BlockEncoding identity_encoding(long dim);
/// (scale_a scale_b, a + b, scale_a err_b + scale_b err_a)-encoding of A B.
BlockEncoding product(const BlockEncoding& a, const BlockEncoding& b);
BlockEncoding adjoint(const BlockEncoding& a);

struct KrausOptions {
    double x2 = 0.0;   // x^2; 0 selects d
    double xp2 = 0.0;  // x'^2; 0 selects d
    Padding padding = Padding::Tight;
    bool alpha_guard = true;
    long min_i_dim = 0;  // lower bound on the Naimark I register size
};

/// alpha = (n-1)^2 d x^4 + (n-1)^{3/2} d x'^2 + (n-1)^{-1/2}.
double kraus_scale(int n, int d, double x2, double xp2);

BlockEncoding encode_O(const TwistedSchur& tw, int k, int i, const KrausOptions& opt = {});
BlockEncoding encode_O_prime(const TwistedSchur& tw, int kl, int kr, const KrausOptions& opt = {});
BlockEncoding encode_Phi(const TwistedSchur& tw, const KrausOptions& opt = {});
BlockEncoding encode_kraus(const TwistedSchur& tw, int i, const KrausOptions& opt = {});

/// One row of the scale / ancilla ledger.
struct LedgerRow {
    std::string encoding;
    double scale = 0.0;
    int ancilla_qubits = 0;  // from the register sizes
    int formula_qubits = 0;  // closed-form count
    double error_bound = 0.0;
    int guard_qubits = 0;    // added by the alpha guard; ancilla = formula + guard
};

std::vector<LedgerRow> kraus_ledger(const TwistedSchur& tw, int i, const KrausOptions& opt = {});

/// I-register-controlled U^c with optional leading scale qubit, plus U_0.
struct Naimark {
    int n = 0;
    int d = 0;
    EncodingLayout layout;
    Circuit uc;         // on [S?, I, A4, kl, kr, A11, A12, A2, A3, A13, pad', qudits]
    Eigen::MatrixXcd u0;
    Shape registers;    // dims in the order above
    bool scale_qubit = false;
    double alpha = 0.0;
    double epsilon = 0.0;    // bound on ||W/(alpha sqrt(n-1)) - Pi~ U^c U_0 Pi||
    double kraus_delta = 0.0;
    long i_dim = 0;
    long system_dim = 0;     // d^n
    long dim() const { return uc.dim; }
    /// 1 where every a-ancilla register (all but I and the qudits) is zero.
    std::vector<char> pi_tilde_mask() const;
    /// pi_tilde_mask and I = 0.
    std::vector<char> pi_mask() const;
    /// Row index of |0_S, i, 0_a, x>.
    long index(long i, long x) const;
    /// V = U^c U_0 (or its adjoint) applied in place.
    void apply_V(Eigen::MatrixXcd& state, bool adjoint = false) const;
};

/// scale_ratio < 1 adds a scale qubit rotating the block by that factor.
Naimark naimark_Uc(const TwistedSchur& tw, const KrausOptions& opt = {}, double scale_ratio = 1.0);

}  // namespace pbt
