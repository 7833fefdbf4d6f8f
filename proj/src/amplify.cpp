#include "pbt/amplify.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pbt/pbt.hpp"

namespace pbt {

namespace {

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0);
}

void check_mask(const std::vector<char>& mask, Eigen::Index rows) {
    if (static_cast<Eigen::Index>(mask.size()) != rows) throw std::invalid_argument("projector mask has wrong size");
}

}  // namespace

double AmplificationPlan::inflated_scale(int n) const { return inflated_total / std::sqrt(static_cast<double>(n - 1)); }

AmplificationPlan plan(double scale_total) {
    if (!(scale_total >= 1.0)) throw std::invalid_argument("scale_total must be at least 1");
    AmplificationPlan p;
    p.scale_total = scale_total;
    const double target = 1.0 / scale_total;
    int m = 1;
    while (std::sin(std::numbers::pi / (2.0 * m)) > target) m += 2;
    p.m = m;
    p.inflated_total = 1.0 / std::sin(std::numbers::pi / (2.0 * m));
    p.phases.assign(static_cast<size_t>(m), std::numbers::pi / 2);
    p.phases[0] = (1 - m) * std::numbers::pi / 2;
    return p;
}

void apply_phase(Eigen::MatrixXcd& state, const std::vector<char>& mask, double phi) {
    check_mask(mask, state.rows());
    const cd in = std::polar(1.0, phi), out = std::polar(1.0, -phi);
    for (Eigen::Index r = 0; r < state.rows(); ++r) state.row(r) *= mask[static_cast<size_t>(r)] ? in : out;
}

Eigen::MatrixXcd phase_gadget(const std::vector<char>& mask, double phi) {
    const auto n = static_cast<Eigen::Index>(mask.size());
    Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index s = 0; s < n; ++s) {
        if (mask[static_cast<size_t>(s)]) {
            cnot(2 * s, 2 * s + 1) = cnot(2 * s + 1, 2 * s) = 1.0;
        } else {
            cnot(2 * s, 2 * s) = cnot(2 * s + 1, 2 * s + 1) = 1.0;
        }
    }
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    for (Eigen::Index s = 0; s < n; ++s) {
        z(2 * s, 2 * s) = std::polar(1.0, -phi);
        z(2 * s + 1, 2 * s + 1) = std::polar(1.0, phi);
    }
    return cnot * z * cnot;
}

void amplified_apply(const LinearApply& v, const AmplificationPlan& p, const std::vector<char>& pi,
                     const std::vector<char>& pi_tilde, Eigen::MatrixXcd& state) {
    // Rightmost factor first: the (m-1)/2 pairs, then V, then the phi_1 phase.
    for (int j = (p.m - 1) / 2; j >= 1; --j) {
        v(state, false);
        apply_phase(state, pi_tilde, p.phases[static_cast<size_t>(2 * j)]);
        v(state, true);
        apply_phase(state, pi, p.phases[static_cast<size_t>(2 * j - 1)]);
    }
    v(state, false);
    apply_phase(state, pi_tilde, p.phases[0]);
    if (((p.m - 1) / 2) % 2 == 1) state = -state;
}

Eigen::MatrixXcd amplified_V(const Eigen::MatrixXcd& v, const AmplificationPlan& p, const std::vector<char>& pi,
                             const std::vector<char>& pi_tilde) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(v.rows(), v.cols());
    amplified_apply(
        [&](Eigen::MatrixXcd& s, bool adj) { s = adj ? Eigen::MatrixXcd(v.adjoint() * s) : Eigen::MatrixXcd(v * s); },
        p, pi, pi_tilde, out);
    return out;
}

KrausOptions scale_options(int n, int d, ScaleVariant v) {
    KrausOptions opt;
    if (v == ScaleVariant::Compressed) {
        opt.x2 = min_scale_squared(n, d, Variant::C);
        opt.xp2 = min_scale_squared(n, d, Variant::CPrime);
    } else {
        opt.x2 = opt.xp2 = d;
    }
    return opt;
}

EndToEnd end_to_end(int n, int d, ScaleVariant v) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(d);
    psi(0) = 1.0;
    return end_to_end(n, d, v, psi);
}

EndToEnd end_to_end(int n, int d, ScaleVariant v, const Eigen::VectorXcd& psi) {
    if (psi.size() != d) throw std::invalid_argument("input state must have dimension d");
    EndToEnd r;
    r.n = n;
    r.d = d;
    r.variant = v;
    auto tw = build_twisted(n, d);
    auto opt = scale_options(n, d, v);
    r.alpha = kraus_scale(n, d, opt.x2, opt.xp2);
    auto pl = plan(r.alpha * std::sqrt(static_cast<double>(n - 1)));
    r.m = pl.m;
    r.inflated_alpha = pl.inflated_scale(n);
    auto nm = naimark_Uc(tw, opt, r.alpha / r.inflated_alpha);
    r.epsilon = nm.epsilon;
    r.bound = 2.0 * r.m * r.epsilon;

    const long sys = nm.system_dim, ports = n - 1;
    auto pgm = pgm_dense(n, d);
    std::vector<Eigen::MatrixXcd> kraus;
    for (int i = 0; i < ports; ++i) kraus.push_back(psd_sqrt(pgm.povm.operators[static_cast<size_t>(i)]));
    auto w_rows = [&](const Eigen::MatrixXcd& cols) {
        Eigen::MatrixXcd out(nm.i_dim * sys, cols.cols());
        for (long i = 0; i < nm.i_dim; ++i)
            for (long x = 0; x < sys; ++x) out.row(i * sys + x) = cols.row(nm.index(i, x));
        return out;
    };
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(nm.i_dim * sys, sys);
    for (long i = 0; i < ports; ++i) w.middleRows(i * sys, sys) = kraus[static_cast<size_t>(i)];

    Eigen::MatrixXcd start = Eigen::MatrixXcd::Zero(nm.dim(), sys);
    for (long x = 0; x < sys; ++x) start(nm.index(0, x), x) = 1.0;

    Eigen::MatrixXcd once = start;
    nm.apply_V(once);
    r.isometry_residual = spectral_norm(w / (r.inflated_alpha * std::sqrt(static_cast<double>(ports))) - w_rows(once));

    const auto pi = nm.pi_mask(), pi_tilde = nm.pi_tilde_mask();
    Eigen::MatrixXcd amp = start;
    amplified_apply([&](Eigen::MatrixXcd& s, bool adj) { nm.apply_V(s, adj); }, pl, pi, pi_tilde, amp);

    Eigen::MatrixXcd kept = w_rows(amp);
    r.isometry = kept.topRows(ports * sys);
    r.discrepancy = spectral_norm(w - kept);
    Eigen::MatrixXcd leak = amp;
    for (Eigen::Index row = 0; row < leak.rows(); ++row)
        if (pi_tilde[static_cast<size_t>(row)]) leak.row(row).setZero();
    r.leakage = spectral_norm(leak);
    r.unitarity_defect = (amp.adjoint() * amp - Eigen::MatrixXcd::Identity(sys, sys)).cwiseAbs().maxCoeff();

    // Input |Phi>_{A B} |psi>_{A_n} as a d^n x d^{n-1} matrix (columns: B basis).
    const long nb = sys / d;
    Eigen::MatrixXcd in = Eigen::MatrixXcd::Zero(sys, nb);
    const double amp_b = 1.0 / std::sqrt(static_cast<double>(nb));
    for (long b = 0; b < nb; ++b)
        for (long s = 0; s < d; ++s) in(b * d + s, b) = amp_b * psi(s);
    Eigen::MatrixXcd out_ref = w * in;     // rows (I, x), a = 0
    Eigen::MatrixXcd out_amp = amp * in;   // all rows
    Eigen::MatrixXcd out_amp_kept = kept * in;
    const double nr = out_ref.squaredNorm(), na = out_amp.squaredNorm();
    const cd overlap = (out_ref.conjugate().cwiseProduct(out_amp_kept)).sum();
    r.trace_distance = std::sqrt(std::max(0.0, (nr + na) * (nr + na) - 4.0 * std::norm(overlap)));

    // Purity of the a-ancillae: group rows by everything except I and the system.
    const long per_i = nm.dim() / (nm.scale_qubit ? 2 : 1) / nm.i_dim;
    const long n_a = nm.dim() / (nm.i_dim * sys);
    Eigen::MatrixXcd grouped = Eigen::MatrixXcd::Zero(n_a, nm.i_dim * sys * nb);
    for (Eigen::Index row = 0; row < out_amp.rows(); ++row) {
        const long s = row / (nm.i_dim * per_i), rem = row % (nm.i_dim * per_i);
        const long iv = rem / per_i, rest = rem % per_i;
        const long a_idx = s * (per_i / sys) + rest / sys, x = rest % sys;
        grouped.row(a_idx).segment((iv * sys + x) * nb, nb) = out_amp.row(row);
    }
    Eigen::MatrixXcd gram = grouped.adjoint() * grouped;
    r.ancilla_purity = gram.squaredNorm() / (na * na);

    Eigen::MatrixXcd eta = psi * psi.adjoint();
    for (long i = 0; i < ports; ++i) {
        r.p_dense.push_back(channel_branch(pgm.povm, static_cast<int>(i), eta).trace().real());
        double p = 0.0;
        for (Eigen::Index row = 0; row < out_amp.rows(); ++row) {
            const long rem = row % (nm.i_dim * per_i);
            if (rem / per_i == i) p += out_amp.row(row).squaredNorm();
        }
        r.p_amplified.push_back(p);
    }
    return r;
}

}  // namespace pbt
