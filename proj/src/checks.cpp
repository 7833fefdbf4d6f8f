#include "pbt/checks.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "pbt/amplify.hpp"
#include "pbt/blockenc.hpp"
#include "pbt/pbt.hpp"
#include "pbt/perm.hpp"
#include "pbt/schur.hpp"
#include "pbt/symrep.hpp"
#include "pbt/twisted.hpp"
#include "pbt/young.hpp"

namespace pbt {

namespace {

using Cases = std::vector<CheckResult>;

std::string tag(int n, int d) { return "n=" + std::to_string(n) + ",d=" + std::to_string(d); }
std::string tag(int n, int d, const Partition& a) { return tag(n, d) + ",alpha=" + a.str(); }

void add(Cases& c, std::string label, double residual, double tol) {
    c.push_back({std::move(label), residual, tol, std::isfinite(residual) && residual <= tol});
}

// Exceptions from self-checking builders count as failures.
void guarded(Cases& c, const std::string& label, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        c.push_back({label + " threw: " + e.what(), INFINITY, 0.0, false});
    }
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
double spectral(const Eigen::MatrixXcd& m) {
    return m.size() ? Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0) : 0.0;
}

Cases gram(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds)
        for (int n : ns)
            for (const auto& a : alpha_set(n, d))
                guarded(c, tag(n, d, a), [&] { add(c, tag(n, d, a), gram_spectrum(n, d, a).max_error, 1e-8); });
    return c;
}

Cases induced(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            if (n < 2) continue;
            for (const auto& a : enumerate_partitions(n - 2, d)) {
                auto add_b = add_box(a, d);
                std::uint64_t sum = add_b.theta ? dim_specht(*add_b.theta) : 0;
                for (const auto& nu : add_b.children) sum += dim_specht(nu);
                const std::uint64_t lhs = static_cast<std::uint64_t>(n - 1) * dim_specht(a);
                add(c, tag(n, d, a), lhs == sum ? 0.0 : std::abs(double(lhs) - double(sum)), 0.0);
            }
        }
    }
    return c;
}

Eigen::MatrixXd nu_block_rep(const BlockLayout& l, const Perm& small) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(l.D, l.D);
    for (const auto& s : l.nus) out.block(s.offset, s.offset, s.dim, s.dim) = yor(s.nu, small);
    return out;
}

Cases fbasis(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    std::mt19937_64 rng(2024);
    for (int d : ds) {
        for (int n : ns) {
            auto t2 = build_schur(n - 2, d);
            for (const auto& a : alpha_set(n, d)) {
                const int m_alpha = static_cast<int>(dim_weyl(a, d));
                for (int r = 0; r < m_alpha; ++r) {
                    const std::string label = tag(n, d, a) + ",r=" + std::to_string(r);
                    guarded(c, label, [&] {
                        auto b = f_basis(n, d, a, r, t2);
                        const auto k = b.f.cols();
                        add(c, label + " orthonormal", max_abs(b.f.adjoint() * b.f - Eigen::MatrixXcd::Identity(k, k)), 1e-10);
                        double cov = 0.0;
                        for (int trial = 0; trial < 20; ++trial) {
                            Perm small = random_perm(n - 1, rng);
                            PermutationOperator v(n, d, extend_perm(small, n));
                            cov = std::max(cov, max_abs(v.apply(b.f) - b.f * nu_block_rep(b.layout, small).cast<cd>()));
                        }
                        add(c, label + " covariant", cov, 1e-9);
                    });
                }
            }
        }
    }
    return c;
}

Cases pseudo(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            for (const auto& a : alpha_set(n, d)) {
                const double pe = block_layout(n, d, a).pseudo_eigenvalue();
                for (int i = 0; i <= n - 2; ++i) {
                    const std::string label = tag(n, d, a) + ",i=" + std::to_string(i);
                    guarded(c, label, [&] {
                        Eigen::MatrixXd p = mf_pi(n, d, a, i);
                        add(c, label, (p * p - pe * p).cwiseAbs().maxCoeff(), 1e-9);
                    });
                }
            }
        }
    }
    return c;
}

Cases kraus(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            guarded(c, tag(n, d), [&] {
                auto pgm = pgm_dense(n, d);
                auto tw = build_twisted(n, d);
                const auto dim = pgm.povm.operators[0].rows();
                Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
                double err = 0.0;
                for (int i = 0; i <= n - 2; ++i) {
                    const auto& op = pgm.povm.operators[static_cast<size_t>(i)];
                    err = std::max(err, max_abs(kraus_from_twisted(tw, i) - psd_sqrt(op)));
                    sum += op;
                }
                add(c, tag(n, d) + " sqrt", err, 1e-8);
                add(c, tag(n, d) + " complete", max_abs(sum - Eigen::MatrixXcd::Identity(dim, dim)), 1e-9);
            });
        }
    }
    return c;
}

double twisted_fidelity(const TwistedSchur& tw) {
    std::vector<Eigen::MatrixXcd> ks;
    for (int i = 0; i <= tw.n - 2; ++i) ks.push_back(kraus_from_twisted(tw, i));
    return entanglement_fidelity(povm_from_kraus(tw.n, tw.d, ks)).choi;
}

Cases fidelity(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        std::vector<double> dense;
        for (int n : ns) {
            guarded(c, tag(n, d), [&] {
                const double f = entanglement_fidelity(pgm_dense(n, d).povm).choi;
                dense.push_back(f);
                add(c, tag(n, d) + " twisted vs dense", std::abs(twisted_fidelity(build_twisted(n, d)) - f), 1e-8);
                if (n == 2 && d == 2) add(c, "n=2,d=2 exact 1/4", std::abs(f - 0.25), 1e-12);
            });
        }
        if (dense.size() > 1) {
            double worst = -INFINITY;
            for (size_t k = 1; k < dense.size(); ++k) worst = std::max(worst, dense[k - 1] - dense[k]);
            c.push_back({"d=" + std::to_string(d) + " strictly increasing in n", worst, 0.0, worst < 0.0});
        }
    }
    return c;
}

Cases norm(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        const double bound = std::sqrt(static_cast<double>(d));
        for (int n : ns) {
            for (int i = 0; i <= n - 2; ++i) {
                const std::string label = tag(n, d) + ",i=" + std::to_string(i);
                guarded(c, label, [&] {
                    // The f blocks are orthonormal, so the norm is the largest block norm.
                    double worst = 0.0;
                    for (const auto& a : alpha_set(n, d)) {
                        Eigen::MatrixXd s = mf_sqrt_pi(n, d, a, i);
                        worst = std::max(worst, Eigen::JacobiSVD<Eigen::MatrixXd>(s).singularValues()(0));
                    }
                    add(c, label + " (excess over sqrt d)", std::max(0.0, worst - bound), 1e-12);
                });
            }
        }
    }
    return c;
}

Cases gauge(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            guarded(c, tag(n, d), [&] {
                auto a = build_twisted(n, d, 0);
                auto b = build_twisted(n, d, kAlternativeGauge);
                double lam = 0.0;
                for (const auto& alpha : alpha_set(n, d)) {
                    const int m_alpha = static_cast<int>(dim_weyl(alpha, d));
                    for (int r = 0; r < m_alpha; ++r) {
                        auto ga = psi_vectors(n, d, alpha, r, *a.t2), gb = psi_vectors(n, d, alpha, r, *b.t2);
                        Eigen::VectorXd ea = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(ga.adjoint() * ga).eigenvalues();
                        Eigen::VectorXd eb = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(gb.adjoint() * gb).eigenvalues();
                        lam = std::max(lam, (ea - eb).cwiseAbs().maxCoeff());
                    }
                }
                add(c, tag(n, d) + " lambda table", lam, 1e-8);
                add(c, tag(n, d) + " fidelity", std::abs(twisted_fidelity(a) - twisted_fidelity(b)), 1e-8);
                auto pgm = pgm_dense(n, d);
                double res = 0.0;
                for (int i = 0; i <= n - 2; ++i) {
                    Eigen::MatrixXcd ref = psd_sqrt(pgm.povm.operators[static_cast<size_t>(i)]);
                    res = std::max(res, std::abs(max_abs(kraus_from_twisted(a, i) - ref) -
                                                 max_abs(kraus_from_twisted(b, i) - ref)));
                }
                add(c, tag(n, d) + " kraus residual", res, 1e-8);
                if (n == 3) {
                    double enc = 0.0;
                    for (int i = 0; i <= n - 2; ++i) {
                        Eigen::MatrixXcd ref = psd_sqrt(pgm.povm.operators[static_cast<size_t>(i)]);
                        auto ea = encode_kraus(a, i), eb = encode_kraus(b, i);
                        enc = std::max(enc, std::abs(spectral(ea.scale * ea.block() - ref) - spectral(eb.scale * eb.block() - ref)));
                    }
                    add(c, tag(n, d) + " block-encoding residual", enc, 1e-8);
                }
            });
        }
    }
    return c;
}

Cases kraus_encoding(const std::vector<int>& ns, const std::vector<int>& ds) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            guarded(c, tag(n, d), [&] {
                auto tw = build_twisted(n, d);
                auto pgm = pgm_dense(n, d);
                const double x2 = d, nm1 = n - 1;
                const double alpha = nm1 * nm1 * d * x2 * x2 + std::pow(nm1, 1.5) * d * x2 + 1.0 / std::sqrt(nm1);
                for (int i = 0; i <= n - 2; ++i) {
                    const std::string label = tag(n, d) + ",i=" + std::to_string(i);
                    auto be = encode_kraus(tw, i);
                    add(c, label + " scale", std::abs(be.scale - alpha), 1e-12 * alpha);
                    const double err = spectral(be.scale * be.block() - psd_sqrt(pgm.povm.operators[static_cast<size_t>(i)]));
                    add(c, label + " residual", err, 1e-6);
                    add(c, label + " residual within ledger bound", be.residual(), be.error_bound);
                }
                if ((d & (d - 1)) == 0) {
                    KrausOptions opt;
                    opt.padding = Padding::PowerOfTwo;
                    const std::vector<double> scales{x2, x2 * x2, x2, std::sqrt(double(d)), x2 * x2, d * x2 * x2, alpha, 1.0};
                    auto rows = kraus_ledger(tw, n - 2, opt);
                    for (size_t r = 0; r < rows.size(); ++r) {
                        add(c, tag(n, d) + " ledger " + rows[r].encoding + " qubits",
                            std::abs(rows[r].ancilla_qubits - rows[r].formula_qubits - rows[r].guard_qubits), 0.0);
                        if (r < scales.size())
                            add(c, tag(n, d) + " ledger " + rows[r].encoding + " scale", std::abs(rows[r].scale - scales[r]),
                                1e-12 * scales[r]);
                    }
                    // Closed-form U^c(i) ancilla count, evaluated by hand for two qubit ports.
                    if (n == 3 && d == 2) add(c, "n=3,d=2 U^c(i) qubits = 14", std::abs(rows[6].ancilla_qubits - 14), 0.0);
                }
            });
        }
    }
    return c;
}

Cases naimark_variants(const std::vector<int>& ns, const std::vector<int>& ds, const std::vector<ScaleVariant>& vs) {
    Cases c;
    for (int d : ds) {
        for (int n : ns) {
            for (auto v : vs) {
                const std::string label = tag(n, d) + (v == ScaleVariant::Honest ? " honest" : " compressed");
                guarded(c, label, [&] {
                    auto r = end_to_end(n, d, v);
                    add(c, label + " dilation within eps (m=" + std::to_string(r.m) + ")", r.isometry_residual, r.epsilon);
                    add(c, label + " amplified within 2m eps", r.discrepancy, r.bound);
                    double dp = 0.0;
                    for (size_t i = 0; i < r.p_dense.size(); ++i) dp = std::max(dp, std::abs(r.p_dense[i] - r.p_amplified[i]));
                    add(c, label + " outcome probabilities", dp, 1e-4);
                    add(c, label + " unitarity", r.unitarity_defect, 1e-8);
                    add(c, label + " leakage out of the zero-ancilla subspace", r.leakage, r.bound);
                    add(c, label + " trace distance to the reference", r.trace_distance, 2.0 * r.bound);
                });
            }
        }
    }
    return c;
}

Cases naimark(const std::vector<int>& ns, const std::vector<int>& ds) {
    return naimark_variants(ns, ds, {ScaleVariant::Compressed, ScaleVariant::Honest});
}
Cases naimark_compressed(const std::vector<int>& ns, const std::vector<int>& ds) {
    return naimark_variants(ns, ds, {ScaleVariant::Compressed});
}
Cases naimark_honest(const std::vector<int>& ns, const std::vector<int>& ds) {
    return naimark_variants(ns, ds, {ScaleVariant::Honest});
}

using SuiteFn = Cases (*)(const std::vector<int>&, const std::vector<int>&);

const std::map<std::string, SuiteFn>& registry() {
    static const std::map<std::string, SuiteFn> r{
        {"gram", gram},     {"induced", induced}, {"fbasis", fbasis}, {"pseudo", pseudo},
        {"kraus", kraus},   {"fidelity", fidelity}, {"norm", norm},   {"gauge", gauge},
        {"kraus-encoding", kraus_encoding},       {"naimark", naimark},
        {"naimark-compressed", naimark_compressed}, {"naimark-honest", naimark_honest},
    };
    return r;
}

}  // namespace

bool SuiteReport::pass() const {
    if (cases.empty()) return false;
    for (const auto& c : cases)
        if (!c.pass) return false;
    return true;
}

double SuiteReport::max_residual() const {
    double m = 0.0;
    for (const auto& c : cases) m = std::max(m, c.residual);
    return m;
}

std::string SuiteReport::failures() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& c : cases) {
        if (c.pass) continue;
        os << (first ? "" : ", ") << c.label;
        first = false;
    }
    return os.str();
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"gram",  "induced", "fbasis", "pseudo",         "kraus",
                                                "fidelity", "norm", "gauge",  "kraus-encoding", "naimark",
                                                "naimark-compressed", "naimark-honest"};
    return names;
}

SuiteReport run_suite(const std::string& suite, const std::vector<int>& ns, const std::vector<int>& ds) {
    auto it = registry().find(suite);
    if (it == registry().end()) {
        std::string all;
        for (const auto& s : suite_names()) all += (all.empty() ? "" : ", ") + s;
        throw std::invalid_argument("unknown suite '" + suite + "'; suites: " + all);
    }
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport r;
    r.suite = suite;
    r.cases = it->second(ns, ds);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace pbt
