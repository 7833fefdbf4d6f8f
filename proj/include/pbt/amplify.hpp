#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pbt/blockenc.hpp"

namespace pbt {

struct AmplificationPlan {
    int m = 1;
    std::vector<double> phases;  // phi_1 .. phi_m
    double scale_total = 1.0;    // alpha sqrt(n-1) before inflation
    double inflated_total = 1.0; // 1 / sin(pi / 2m)

    /// inflated_total / sqrt(n-1).
    double inflated_scale(int n) const;
};

/// Smallest odd m with sin(pi/2m) <= 1/scale_total; throws when scale_total < 1.
AmplificationPlan plan(double scale_total);

/// Rows where mask is 1 get e^{i phi}, the others e^{-i phi}: e^{i phi (2P - I)}.
void apply_phase(Eigen::MatrixXcd& state, const std::vector<char>& mask, double phi);

/// C_P NOT (I ⊗ e^{-i phi Z}) C_P NOT on system ⊗ qubit (qubit least significant).
Eigen::MatrixXcd phase_gadget(const std::vector<char>& mask, double phi);

using LinearApply = std::function<void(Eigen::MatrixXcd&, bool adjoint)>;

/// Applies the phase-modulated sequence to the columns of state in place.
void amplified_apply(const LinearApply& v, const AmplificationPlan& p, const std::vector<char>& pi,
                     const std::vector<char>& pi_tilde, Eigen::MatrixXcd& state);

/// Dense form for explicit unitaries.
Eigen::MatrixXcd amplified_V(const Eigen::MatrixXcd& v, const AmplificationPlan& p, const std::vector<char>& pi,
                             const std::vector<char>& pi_tilde);

enum class ScaleVariant { Honest, Compressed };

/// x^2 = x'^2 = d (honest) or the per-variant minima max_alpha sum C (compressed).
KrausOptions scale_options(int n, int d, ScaleVariant v);

struct EndToEnd {
    int n = 0;
    int d = 0;
    ScaleVariant variant = ScaleVariant::Honest;
    int m = 0;
    double alpha = 0.0;           // kraus scale before inflation
    double inflated_alpha = 0.0;
    double epsilon = 0.0;         // Naimark bound after inflation
    double isometry_residual = 0.0;  // ||W / (alpha' sqrt(n-1)) - Pi~ U^c U_0 Pi||
    double discrepancy = 0.0;     // ||W - Pi~ V~ Pi||
    double bound = 0.0;           // 2 m epsilon
    double leakage = 0.0;         // ||(I - Pi~) V~ Pi||
    double unitarity_defect = 0.0;  // max |<x|V~^dagger V~|y> - delta| on the Pi image
    double trace_distance = 0.0;  // || rho_G_ref - V~ rho_ini V~^dagger ||_1 for the given pure input
    double ancilla_purity = 0.0;  // Tr rho_a^2 of the a-ancillae
    std::vector<double> p_amplified;
    std::vector<double> p_dense;
    /// Columns V~|0_I, 0_a, x> restricted to the I register and the system, (n-1) d^n x d^n.
    Eigen::MatrixXcd isometry;
};

/// Runs the full pipeline for a pure input state psi on A_n.
EndToEnd end_to_end(int n, int d, ScaleVariant v, const Eigen::VectorXcd& psi);
EndToEnd end_to_end(int n, int d, ScaleVariant v);

}  // namespace pbt
