#include "pbt/blockenc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pbt/pbt.hpp"
#include "pbt/symrep.hpp"

namespace pbt {

namespace {

long ipow(long b, int e) {
    long r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

long pow2_ceil(long v) {
    long p = 1;
    while (p < v) p <<= 1;
    return p;
}

int ceil_log2(long v) {
    int k = 0;
    while ((1L << k) < v) ++k;
    return k;
}

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()(0);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd shift_matrix(long n, long s) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (long g = 0; g < n; ++g) m((g + s) % n, g) = 1.0;
    return m;
}

Eigen::MatrixXcd pauli_x() {
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    return x;
}

Eigen::MatrixXcd qudit_pair_product(int n, int d, int a, int b) {
    Perm p = compose(port_transposition(n, a), port_transposition(n, b));
    return PermutationOperator(n - 1, d, p).dense();
}

// Row with first n_used entries 1/sqrt(n_used), completed to a unitary.
Eigen::MatrixXcd uniform_row_unitary(long dim, long n_used) {
    Eigen::MatrixXcd row = Eigen::MatrixXcd::Zero(1, dim);
    for (long k = 0; k < n_used; ++k) row(0, k) = 1.0 / std::sqrt(static_cast<double>(n_used));
    return unitary_complete(row);
}

bool sectors_ok(const EncodingLayout& l, long s) {
    const long cls = l.n_alpha * l.n_dalpha;
    const long others = l.L() - s - 2 * cls;
    if (others < 0) return false;
    const long fill = (s - (s + cls) % s) % s;
    return fill <= others;
}

bool large_ok(const EncodingLayout& l) {
    const long s = ipow(l.d, l.n - 1);
    return l.L() % s == 0 && l.anc0() % l.d == 0 && sectors_ok(l, s);
}

std::vector<long> valid_sys(const EncodingLayout& lay) {
    std::vector<long> out;
    for (size_t a = 0; a < lay.alphas.size(); ++a)
        for (long k = 0; k < static_cast<long>(dim_specht(lay.alphas[a])); ++k)
            out.push_back(static_cast<long>(a) * lay.n_dalpha + k);
    return out;
}

// Spectral norm of the sub-block on the given indices (all when empty).
double support_norm(const Eigen::MatrixXcd& m, const std::vector<long>& support) {
    if (support.empty()) return spectral_norm(m);
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXcd sub(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = m(support[static_cast<size_t>(a)], support[static_cast<size_t>(b)]);
    return spectral_norm(sub);
}

void check_unitary(const Eigen::MatrixXcd& u, const std::string& what) {
    double defect = (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-9) throw std::runtime_error(what + " is not unitary");
}

}  // namespace

Eigen::MatrixXcd unitary_complete(const Eigen::MatrixXcd& rows) {
    const Eigen::Index k = rows.rows(), m = rows.cols();
    if (m == 0 || k > m) throw std::invalid_argument("unitary_complete needs k <= m rows");
    if (k > 0 && (rows * rows.adjoint() - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("rows are not orthonormal");
    Eigen::MatrixXcd out(m, m);
    out.topRows(k) = rows;
    for (Eigen::Index slot = k; slot < m; ++slot) {
        Eigen::RowVectorXcd best;
        double best_norm = -1.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            Eigen::RowVectorXcd v = Eigen::RowVectorXcd::Unit(m, j);
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index b = 0; b < slot; ++b) v -= out.row(b).dot(v) * out.row(b);
            double nv = v.norm();
            if (nv > best_norm + 1e-12) {
                best_norm = nv;
                best = v;
            }
        }
        best /= best_norm;
        for (Eigen::Index c = 0; c < m; ++c) {
            if (std::abs(best(c)) > 1e-12) {
                best *= std::conj(best(c)) / std::abs(best(c));
                break;
            }
        }
        out.row(slot) = best;
    }
    return out;
}

Coefficients coefficients(int n, int d, const Partition& alpha, const Partition& nu) {
    auto l = block_layout(n, d, alpha);
    const auto& s = l.slot(nu);
    const double big = static_cast<double>((n - 1) * l.d_alpha);
    Coefficients c;
    c.c = std::pow(big - l.d_theta, -0.25) * std::pow(big, -0.75) * s.dim / std::sqrt(s.lambda);
    c.c_prime = s.dim / (big * s.lambda);
    return c;
}

double min_scale_squared(int n, int d, Variant v) {
    double worst = 0.0;
    for (const auto& alpha : alpha_set(n, d)) {
        double sum = 0.0;
        for (const auto& nu : add_box(alpha, d).children) {
            auto c = coefficients(n, d, alpha, nu);
            sum += v == Variant::C ? c.c : c.c_prime;
        }
        worst = std::max(worst, sum);
    }
    return worst;
}

long EncodingLayout::pad1() const { return L() / ipow(d, n - 1); }
long EncodingLayout::pad2() const { return Lp() / ipow(d, n - 2); }
long EncodingLayout::a13() const { return anc0() * anc0() / (static_cast<long>(d) * d); }

EncodingLayout make_layout(int n, int d, Padding p, bool alpha_guard) {
    if (n < 3) throw std::invalid_argument("block-encodings need n >= 3");
    if (d < 2) throw std::invalid_argument("block-encodings need d >= 2");
    EncodingLayout l;
    l.n = n;
    l.d = d;
    l.padding = p;
    l.alpha_guard = alpha_guard;
    l.nus = enumerate_partitions(n - 1, d);
    l.alphas = alpha_set(n, d);
    long max_m_nu = 0, max_m_alpha = 0, max_d_alpha = 0;
    for (const auto& nu : l.nus) max_m_nu = std::max(max_m_nu, static_cast<long>(dim_weyl(nu, d)));
    for (const auto& a : l.alphas) {
        max_m_alpha = std::max(max_m_alpha, static_cast<long>(dim_weyl(a, d)));
        max_d_alpha = std::max(max_d_alpha, static_cast<long>(dim_specht(a)));
    }
    const long n_alphas = static_cast<long>(l.alphas.size());
    if (p == Padding::Tight) {
        l.n_nu = static_cast<long>(l.nus.size()) + 1;
        l.n_alpha = n_alphas;
        l.n_dalpha = max_d_alpha;
        l.n_g = alpha_guard ? n_alphas : 1;
        l.n_rnu = max_m_nu + 1;
        l.n_r = max_m_alpha;
        l.n_k = n - 1;
        while (!large_ok(l)) ++l.n_rnu;
        while (l.Lp() % ipow(d, n - 2) != 0) ++l.n_r;
    } else {
        if ((d & (d - 1)) != 0) throw std::invalid_argument("power-of-two padding needs d a power of two");
        l.n_nu = pow2_ceil(static_cast<long>(l.nus.size()) + 1);
        l.n_alpha = pow2_ceil(n_alphas);
        l.n_dalpha = pow2_ceil(max_d_alpha);
        l.n_g = alpha_guard ? l.n_alpha : 1;
        l.n_rnu = pow2_ceil(max_m_nu + 1);
        l.n_r = pow2_ceil(max_m_alpha);
        l.n_k = pow2_ceil(n - 1);
        if (!large_ok(l) || l.Lp() % ipow(d, n - 2) != 0)
            throw std::runtime_error("power-of-two layout violates a padding constraint");
    }
    return l;
}

Injection build_PL_PR(const EncodingLayout& lay, double x, Variant v) {
    const long nr = lay.n_rnu * lay.n_nu;
    auto idx = [&](long r, long nu) { return r * lay.n_nu + nu; };
    Injection inj;
    inj.min_remainder = 1.0;
    for (long a = 0; a < lay.n_alpha; ++a) {
        Eigen::MatrixXcd pl = Eigen::MatrixXcd::Identity(nr, nr), pr = pl, p2 = pl;
        if (a < static_cast<long>(lay.alphas.size())) {
            const auto& alpha = lay.alphas[static_cast<size_t>(a)];
            const auto children = add_box(alpha, lay.d).children;
            std::vector<long> support;
            std::vector<double> amp;
            double sum = 0.0;
            for (const auto& nu : children) {
                auto it = std::find(lay.nus.begin(), lay.nus.end(), nu);
                support.push_back(idx(0, (it - lay.nus.begin()) + 1));
                auto c = coefficients(lay.n, lay.d, alpha, nu);
                double w = v == Variant::C ? c.c : c.c_prime;
                amp.push_back(std::sqrt(w) / x);
                sum += w / (x * x);
            }
            double rem = 1.0 - sum;
            if (rem < -1e-12) throw std::invalid_argument("x^2 is below the sum of coefficients for " + alpha.str());
            rem = std::max(rem, 0.0);
            inj.min_remainder = std::min(inj.min_remainder, rem);
            support.push_back(idx(1, 0));
            support.push_back(idx(1, 1));
            const auto k = static_cast<Eigen::Index>(support.size());
            Eigen::MatrixXcd row_l = Eigen::MatrixXcd::Zero(1, k), row_r = row_l;
            for (size_t j = 0; j < amp.size(); ++j) row_l(0, static_cast<Eigen::Index>(j)) = row_r(0, static_cast<Eigen::Index>(j)) = amp[j];
            row_l(0, k - 2) = std::sqrt(rem);
            row_r(0, k - 1) = std::sqrt(rem);
            Eigen::MatrixXcd wl = unitary_complete(row_l), wr = unitary_complete(row_r);
            for (Eigen::Index s = 0; s < k; ++s)
                for (Eigen::Index t = 0; t < k; ++t) {
                    pl(support[static_cast<size_t>(s)], support[static_cast<size_t>(t)]) = wl(s, t);
                    pr(support[static_cast<size_t>(s)], support[static_cast<size_t>(t)]) = wr(s, t);
                }
            const long e1 = support.front();
            p2(0, 0) = p2(e1, e1) = 0.0;
            p2(0, e1) = p2(e1, 0) = 1.0;
        }
        inj.PL.push_back(std::move(pl));
        inj.PR.push_back(std::move(pr));
        inj.P2.push_back(std::move(p2));
    }
    inj.P1 = Eigen::MatrixXcd::Identity(nr, nr);
    for (long nu = 1; nu <= static_cast<long>(lay.nus.size()); ++nu) {
        const long a = idx(0, nu), b = idx(1, nu);
        inj.P1(a, a) = inj.P1(b, b) = 0.0;
        inj.P1(a, b) = inj.P1(b, a) = 1.0;
    }
    // (1,1) is the label of copy 0 of the first nu.
    inj.collision = !lay.nus.empty();
    return inj;
}

Eigen::MatrixXcd padded_schur_large(const EncodingLayout& lay, const SchurTransform& t1) {
    if (t1.m != lay.n - 1 || t1.d != lay.d) throw std::invalid_argument("Schur transform has wrong size");
    const long s = ipow(lay.d, lay.n - 1), total = lay.L();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(total, total);
    std::vector<char> valid(static_cast<size_t>(total), 0);
    for (size_t v = 0; v < lay.nus.size(); ++v) {
        const auto& nu = lay.nus[v];
        const auto basis = tableau_basis(nu);
        const int mult = static_cast<int>(dim_weyl(nu, lay.d));
        for (int c = 0; c < mult; ++c) {
            for (const auto& br : basis->branches) {
                auto it = std::find(lay.alphas.begin(), lay.alphas.end(), br.xi);
                const long a = it - lay.alphas.begin();
                for (int k = 0; k < br.size; ++k) {
                    const long lab = lay.label(c + 1, static_cast<long>(v) + 1, a, k);
                    valid[static_cast<size_t>(lab)] = 1;
                    u.row(lab).head(s) = t1.U.row(t1.row(nu, c, br.offset + k));
                }
            }
        }
    }
    std::vector<long> cls_l, cls_r, others;
    for (long r = 0; r < lay.n_rnu; ++r)
        for (long nu = 0; nu < lay.n_nu; ++nu)
            for (long a = 0; a < lay.n_alpha; ++a)
                for (long k = 0; k < lay.n_dalpha; ++k) {
                    const long lab = lay.label(r, nu, a, k);
                    if (valid[static_cast<size_t>(lab)]) continue;
                    if (r == 1 && nu == 0) cls_l.push_back(lab);
                    else if (r == 0 && nu == 1) cls_r.push_back(lab);
                    else others.push_back(lab);
                }
    long pos = s;
    size_t next = 0;
    for (long lab : cls_l) u(lab, pos++) = 1.0;
    while (pos % s != 0) {
        if (next >= others.size()) throw std::runtime_error("not enough padding to separate remainder classes");
        u(others[next++], pos++) = 1.0;
    }
    for (long lab : cls_r) u(lab, pos++) = 1.0;
    while (next < others.size()) u(others[next++], pos++) = 1.0;
    if (pos != total) throw std::logic_error("label count mismatch in padded Schur transform");
    check_unitary(u, "padded Schur transform");
    return u;
}

Eigen::MatrixXcd padded_schur_small(const EncodingLayout& lay, const SchurTransform& t2) {
    if (t2.m != lay.n - 2 || t2.d != lay.d) throw std::invalid_argument("Schur transform has wrong size");
    const long s = ipow(lay.d, lay.n - 2), total = lay.Lp();
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(total, total);
    long pos = s;
    for (long r = 0; r < lay.n_r; ++r)
        for (long a = 0; a < lay.n_alpha; ++a)
            for (long k = 0; k < lay.n_dalpha; ++k) {
                const long lab = (r * lay.n_alpha + a) * lay.n_dalpha + k;
                bool valid = false;
                if (a < static_cast<long>(lay.alphas.size())) {
                    const auto& alpha = lay.alphas[static_cast<size_t>(a)];
                    valid = r < static_cast<long>(dim_weyl(alpha, lay.d)) && k < static_cast<long>(dim_specht(alpha));
                    if (valid) u.row(lab).head(s) = t2.U.row(t2.row(alpha, static_cast<int>(r), static_cast<int>(k)));
                }
                if (!valid) u(lab, pos++) = 1.0;
            }
    if (pos != total) throw std::logic_error("label count mismatch in padded Schur transform");
    check_unitary(u, "padded Schur transform");
    return u;
}

Eigen::MatrixXcd lcu_unitary(const EncodingLayout& lay, const Injection& inj, const Eigen::MatrixXcd& upad,
                             int a, int b) {
    const Shape shape{lay.n_rnu, lay.n_nu, lay.n_g, lay.n_alpha, lay.n_dalpha};
    const std::vector<int> rnu{0, 1}, alpha{3};
    auto per_alpha = [&](const std::vector<Eigen::MatrixXcd>& ms, bool dagger) {
        std::vector<MatPtr> out;
        for (const auto& m : ms) out.push_back(share(dagger ? Eigen::MatrixXcd(m.adjoint()) : m));
        return out;
    };
    std::vector<MatPtr> guard;
    for (long s = 0; s < lay.n_alpha; ++s) guard.push_back(share(shift_matrix(lay.n_g, s % lay.n_g)));
    Eigen::MatrixXcd v = qudit_pair_product(lay.n, lay.d, a, b);
    Eigen::MatrixXcd core = upad * kron(Eigen::MatrixXcd::Identity(lay.pad1(), lay.pad1()), v) * upad.adjoint();

    Circuit c;
    if (lay.n_g > 1) c.push(make_op("guard", shape, {2}, alpha, guard));
    c.push(make_op("P2", shape, rnu, alpha, per_alpha(inj.P2, false)));
    c.push(make_op("PR^dag", shape, rnu, alpha, per_alpha(inj.PR, true)));
    c.push(make_op("P1", shape, rnu, inj.P1));
    c.push(make_op("Sch V Sch^dag", shape, {0, 1, 3, 4}, core));
    c.push(make_op("P1", shape, rnu, inj.P1));
    c.push(make_op("PL", shape, rnu, alpha, per_alpha(inj.PL, false)));
    c.push(make_op("P2", shape, rnu, alpha, per_alpha(inj.P2, false)));
    if (lay.n_g > 1) {
        Op op = make_op("guard^dag", shape, {2}, alpha, guard);
        std::swap(op.mats, op.adj);
        c.push(std::move(op));
    }
    return c.dense();
}

Eigen::MatrixXcd o_target(const EncodingLayout& lay, const SchurTransform& t1, Variant v, int a, int b, int r_nu) {
    Eigen::MatrixXcd vv = qudit_pair_product(lay.n, lay.d, a, b);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(lay.sys(), lay.sys());
    for (size_t s = 0; s < lay.alphas.size(); ++s) {
        const auto& alpha = lay.alphas[s];
        const int da = static_cast<int>(dim_specht(alpha));
        Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(da, da);
        for (const auto& nu : add_box(alpha, lay.d).children) {
            auto c = coefficients(lay.n, lay.d, alpha, nu);
            Eigen::MatrixXcd una = submatrix_U_nu_alpha(t1, nu, alpha, r_nu);
            o += (v == Variant::C ? c.c : c.c_prime) * una * vv * una.adjoint();
        }
        const auto off = static_cast<Eigen::Index>(s) * lay.n_dalpha;
        out.block(off, off, da, da) = o;
    }
    return out;
}

Eigen::MatrixXcd BlockEncoding::block() const {
    // Columns are pushed through in batches to bound memory.
    const long batch = std::max(1L, std::min(target_dim, (1L << 22) / std::max(1L, circuit.dim)));
    Eigen::MatrixXcd out(target_dim, target_dim);
    for (long t0 = 0; t0 < target_dim; t0 += batch) {
        const long nb = std::min(batch, target_dim - t0);
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(circuit.dim, nb);
        for (long t = 0; t < nb; ++t) e(t0 + t, t) = 1.0;
        circuit.apply(e);
        out.middleCols(t0, nb) = e.topRows(target_dim);
    }
    return out;
}

double BlockEncoding::residual() const { return support_norm(target - scale * block(), support); }

BlockEncoding identity_encoding(long dim) {
    BlockEncoding be;
    be.name = "I";
    be.circuit.push(make_op("I", {1, dim}, {0, 1}, Eigen::MatrixXcd::Identity(dim, dim), 1));
    be.target_dim = dim;
    be.target = Eigen::MatrixXcd::Identity(dim, dim);
    return be;
}

BlockEncoding product(const BlockEncoding& a, const BlockEncoding& b) {
    if (a.target_dim != b.target_dim) throw std::invalid_argument("product needs equal target dimensions");
    BlockEncoding out;
    out.name = a.name + " * " + b.name;
    for (const auto& op : b.circuit.ops) {
        if (op.anc_axes < 0) throw std::invalid_argument("operand view does not split at the ancilla");
        out.circuit.push(insert_axis(op, 0, a.ancilla_dim));
    }
    for (const auto& op : a.circuit.ops) {
        if (op.anc_axes < 0) throw std::invalid_argument("operand view does not split at the ancilla");
        out.circuit.push(insert_axis(op, op.anc_axes, b.ancilla_dim));
    }
    out.scale = a.scale * b.scale;
    out.ancilla_dim = a.ancilla_dim * b.ancilla_dim;
    out.target_dim = a.target_dim;
    out.error_bound = a.scale * b.error_bound + b.scale * a.error_bound;
    out.ancilla_qubits = a.ancilla_qubits + b.ancilla_qubits;
    out.target = a.target * b.target;
    if (a.support.empty()) out.support = b.support;
    else if (b.support.empty()) out.support = a.support;
    else std::set_intersection(a.support.begin(), a.support.end(), b.support.begin(), b.support.end(),
                               std::back_inserter(out.support));
    return out;
}

BlockEncoding adjoint(const BlockEncoding& a) {
    BlockEncoding out = a;
    out.name = a.name + "^dag";
    out.circuit = a.circuit.adjoint();
    out.target = a.target.adjoint();
    return out;
}

double kraus_scale(int n, int d, double x2, double xp2) {
    const double m = n - 1;
    return m * m * d * x2 * x2 + std::pow(m, 1.5) * d * xp2 + 1.0 / std::sqrt(m);
}

namespace {

struct Parts {
    EncodingLayout lay;
    int n = 0, d = 0;
    double x2 = 0, xp2 = 0;
    std::vector<std::vector<MatPtr>> ux, ux_adj;  // [k][i]
    std::vector<std::vector<MatPtr>> uxp;         // [kl][kr]
    double eps2 = 0, eps2p = 0, eps3 = 0, eps_rows = 0;
    MatPtr uphi, uphi_adj;
    std::vector<MatPtr> vl;
    Eigen::MatrixXcd ul, ur, uk;
    double a = 0, b = 0, c = 0;
};

double resolve(double v, int d) { return v > 0 ? v : static_cast<double>(d); }

Eigen::MatrixXcd phi_unitary(const EncodingLayout& lay, const Eigen::MatrixXcd& upad2, const Eigen::MatrixXcd& us) {
    const long lp = lay.Lp(), dd = static_cast<long>(lay.d) * lay.d, in = lay.in_dim();
    Eigen::MatrixXcd t0 = Eigen::MatrixXcd::Zero(in, in), t1 = t0;
    for (long c = 0; c < lp; ++c)
        for (long qp = 0; qp < dd; ++qp)
            for (long l = 0; l < lp; ++l) {
                const cd u = upad2(l, c);
                if (u == cd(0)) continue;
                for (long q = 0; q < dd; ++q) (q == 0 ? t0 : t1)(q * lp + l, c * dd + qp) = u * us(q, qp);
            }
    Eigen::MatrixXcd out(2 * in, 2 * in);
    out << t0, t1, t1, t0;
    return out;
}

Eigen::MatrixXcd phi_target(const EncodingLayout& lay, const Eigen::MatrixXcd& upad2) {
    const long lp = lay.Lp(), dd = static_cast<long>(lay.d) * lay.d, in = lay.in_dim();
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(in, in);
    for (long c = 0; c < lp; ++c)
        for (long l = 0; l < lp; ++l)
            for (long a = 0; a < lay.d; ++a) t(l, c * dd + a * lay.d + a) = upad2(l, c);
    return t;
}

Eigen::MatrixXcd phi_plus_row_unitary(int d) {
    Eigen::MatrixXcd row = Eigen::MatrixXcd::Zero(1, static_cast<long>(d) * d);
    for (int a = 0; a < d; ++a) row(0, a * d + a) = 1.0 / std::sqrt(static_cast<double>(d));
    return unitary_complete(row);
}

Parts build_parts(const TwistedSchur& tw, const KrausOptions& opt) {
    Parts p;
    p.n = tw.n;
    p.d = tw.d;
    p.lay = make_layout(tw.n, tw.d, opt.padding, opt.alpha_guard);
    p.x2 = resolve(opt.x2, tw.d);
    p.xp2 = resolve(opt.xp2, tw.d);
    const auto& lay = p.lay;
    const int np = tw.n - 1;
    Eigen::MatrixXcd upad1 = padded_schur_large(lay, *tw.t1);
    auto inj = build_PL_PR(lay, std::sqrt(p.x2), Variant::C);
    auto injp = build_PL_PR(lay, std::sqrt(p.xp2), Variant::CPrime);
    const long sys = lay.sys();
    const auto valid = valid_sys(lay);
    p.ux.assign(static_cast<size_t>(np), std::vector<MatPtr>(static_cast<size_t>(np)));
    p.ux_adj = p.ux;
    p.uxp = p.ux;
    for (int k = 0; k < np; ++k)
        for (int i = 0; i < np; ++i) {
            Eigen::MatrixXcd u = lcu_unitary(lay, inj, upad1, k, i);
            double res = support_norm(o_target(lay, *tw.t1, Variant::C, k, i) - p.x2 * u.topLeftCorner(sys, sys), valid);
            p.eps2 = std::max(p.eps2, res + kFloatAllowance);
            p.ux_adj[static_cast<size_t>(k)][static_cast<size_t>(i)] = share(u.adjoint());
            p.ux[static_cast<size_t>(k)][static_cast<size_t>(i)] = share(std::move(u));
            Eigen::MatrixXcd up = lcu_unitary(lay, injp, upad1, k, i);
            res = support_norm(o_target(lay, *tw.t1, Variant::CPrime, k, i) - p.xp2 * up.topLeftCorner(sys, sys), valid);
            p.eps2p = std::max(p.eps2p, res + kFloatAllowance);
            p.uxp[static_cast<size_t>(k)][static_cast<size_t>(i)] = share(std::move(up));
        }
    Eigen::MatrixXcd upad2 = padded_schur_small(lay, *tw.t2);
    Eigen::MatrixXcd uphi = phi_unitary(lay, upad2, phi_plus_row_unitary(tw.d));
    const long in = lay.in_dim();
    p.eps3 = spectral_norm(phi_target(lay, upad2) - std::sqrt(static_cast<double>(tw.d)) * uphi.topLeftCorner(in, in)) +
             kFloatAllowance;
    p.uphi_adj = share(uphi.adjoint());
    p.uphi = share(std::move(uphi));
    for (int k = 0; k < np; ++k)
        p.vl.push_back(share(PermutationOperator(tw.n, tw.d, extend_perm(port_transposition(tw.n, k), tw.n)).dense()));

    const double m = np, dd = tw.d;
    const double norm2 = std::pow(m, 2.5) * dd * p.x2 * p.x2 + m * m * dd * p.xp2 + 1.0;
    p.c = 1.0 / std::sqrt(norm2);
    p.a = std::pow(m, 1.25) * std::sqrt(dd) * p.x2 * p.c;
    p.b = m * std::sqrt(dd) * std::sqrt(p.xp2) * p.c;
    Eigen::MatrixXcd rl = Eigen::MatrixXcd::Zero(1, 4), rr = rl;
    rl << p.a, p.b, p.c, 0.0;
    rr << p.a, -p.b, p.c, 0.0;
    p.ul = unitary_complete(rl);
    p.ur = unitary_complete(rr);
    p.uk = uniform_row_unitary(lay.n_k, np);
    p.eps_rows = (p.ul.row(0) - rl).norm() + (p.ur.row(0) - rr).norm() + kFloatAllowance;
    return p;
}

// delta of U^c(i): per-(kl,kr) ledger errors weighted by the LCU over A4 and the k registers.
double kraus_delta(const Parts& p) {
    const double m = p.n - 1, d = p.d;
    const double ds = 2 * d * p.x2 * p.eps2 + 2 * std::sqrt(d) * p.x2 * p.x2 * p.eps3;
    const double dsp = d * p.eps2p + 2 * std::sqrt(d) * p.xp2 * p.eps3;
    const double alpha = kraus_scale(p.n, p.d, p.x2, p.xp2);
    return m * m * (ds + dsp / std::sqrt(m)) + alpha * p.eps_rows;
}

struct UcCircuit {
    Circuit c;
    Shape regs;
    int lead = 0;
};

// U^c over the listed ports (I register of size i_dim), optional leading scale qubit.
UcCircuit build_uc(const Parts& p, const std::vector<int>& ports, long i_dim, double scale_ratio) {
    const auto& lay = p.lay;
    const long nk = lay.n_k, np = p.n - 1;
    UcCircuit out;
    Shape lead;
    if (scale_ratio < 1.0) lead.push_back(2);
    const int o = static_cast<int>(lead.size());
    out.lead = o;
    Shape base = lead;
    for (long v : {i_dim, 4L, nk, nk, 2L, 2L, 2L, 2L, lay.a13()}) base.push_back(v);
    Shape phys = base;
    phys.push_back(lay.pad2());
    for (int q = 0; q < p.n; ++q) phys.push_back(p.d);
    Shape whole = base;
    whole.push_back(lay.in_dim());
    Shape label = base;
    for (long v : {static_cast<long>(p.d) * p.d, lay.n_r, lay.n_alpha, lay.n_dalpha}) label.push_back(v);
    Shape anc(base.begin(), base.end() - 1);
    for (long v : {lay.anc0(), lay.anc0(), lay.n_r, lay.n_alpha, lay.n_dalpha}) anc.push_back(v);
    out.regs = phys;

    const int I = o, A4 = o + 1, KL = o + 2, KR = o + 3, A11 = o + 4, A12 = o + 5, A2 = o + 6, A3 = o + 7;
    const int IN = o + 9;
    const std::vector<int> ctrl{I, A4, KL, KR};
    const long ncomb = i_dim * 4 * nk * nk;
    auto decode = [&](long v, long& iv, long& a4, long& kl, long& kr) {
        kr = v % nk;
        v /= nk;
        kl = v % nk;
        v /= nk;
        a4 = v % 4;
        iv = v / 4;
    };
    auto active = [&](long iv, long a4, long kl, long kr) {
        return iv < static_cast<long>(ports.size()) && a4 < 2 && kl < np && kr < np;
    };
    auto select = [&](auto&& pick) {
        std::vector<MatPtr> mats(static_cast<size_t>(ncomb));
        for (long v = 0; v < ncomb; ++v) {
            long iv, a4, kl, kr;
            decode(v, iv, a4, kl, kr);
            if (active(iv, a4, kl, kr)) mats[static_cast<size_t>(v)] = pick(ports[static_cast<size_t>(iv)], a4, kl, kr);
        }
        return mats;
    };
    auto per_i = [&](const Eigen::MatrixXcd& m) {
        std::vector<MatPtr> mats(static_cast<size_t>(i_dim));
        MatPtr s = share(m);
        for (size_t iv = 0; iv < ports.size(); ++iv) mats[iv] = s;
        return mats;
    };
    std::vector<int> qudits;
    for (int q = 0; q < p.n; ++q) qudits.push_back(IN + 1 + q);
    const int anc_axes = IN + 1;

    if (o == 1) {
        const double t = scale_ratio, s = std::sqrt(1.0 - t * t);
        Eigen::MatrixXcd r(2, 2);
        r << t, -s, s, t;
        out.c.push(make_op("scale", phys, {0}, r));
    }
    out.c.push(make_op("U_r^dag", phys, {A4}, {I}, per_i(p.ur.adjoint()), anc_axes));
    out.c.push(make_op("U_k^dag", phys, {KL}, p.uk.adjoint(), anc_axes));
    out.c.push(make_op("U_k^dag", phys, {KR}, p.uk.adjoint(), anc_axes));
    out.c.push(make_op("V_L(pi_kr)", phys, qudits, ctrl,
                       select([&](int, long, long, long kr) { return p.vl[static_cast<size_t>(kr)]; }), anc_axes));
    out.c.push(make_op("U_Phi", whole, {A2, IN}, ctrl, select([&](int, long, long, long) { return p.uphi; })));

    // Controls extended by q for the CX gates of the qudit trick.
    const long dd = static_cast<long>(p.d) * p.d;
    std::vector<MatPtr> cx(static_cast<size_t>(ncomb * dd));
    MatPtr x = share(pauli_x());
    for (long v = 0; v < ncomb; ++v) {
        long iv, a4, kl, kr;
        decode(v, iv, a4, kl, kr);
        if (!active(iv, a4, kl, kr)) continue;
        for (long q = 1; q < dd; ++q) cx[static_cast<size_t>(v * dd + q)] = x;
    }
    std::vector<int> ctrl_q = ctrl;
    ctrl_q.push_back(IN);
    out.c.push(make_op("CX_A12", label, {A12}, ctrl_q, cx));
    const int ANC1 = o + 8, ANC2 = o + 9, AL = o + 11, KA = o + 12;
    out.c.push(make_op("U[x^2](kr,i)^dag", anc, {ANC2, AL, KA}, ctrl, select([&](int i, long a4, long, long kr) -> MatPtr {
                           return a4 == 0 ? p.ux_adj[static_cast<size_t>(kr)][static_cast<size_t>(i)] : nullptr;
                       })));
    out.c.push(make_op("U[x^2](kl,i) | U[x'^2](kl,kr)", anc, {ANC1, AL, KA}, ctrl,
                       select([&](int i, long a4, long kl, long kr) -> MatPtr {
                           return a4 == 0 ? p.ux[static_cast<size_t>(kl)][static_cast<size_t>(i)]
                                          : p.uxp[static_cast<size_t>(kl)][static_cast<size_t>(kr)];
                       })));
    out.c.push(make_op("CX_A11", label, {A11}, ctrl_q, cx));
    out.c.push(make_op("U_Phi^dag", whole, {A3, IN}, ctrl, select([&](int, long, long, long) { return p.uphi_adj; })));
    out.c.push(make_op("V_L(pi_kl)", phys, qudits, ctrl,
                       select([&](int, long, long kl, long) { return p.vl[static_cast<size_t>(kl)]; }), anc_axes));
    out.c.push(make_op("U_k", phys, {KL}, p.uk, anc_axes));
    out.c.push(make_op("U_k", phys, {KR}, p.uk, anc_axes));
    out.c.push(make_op("U_l", phys, {A4}, {I}, per_i(p.ul), anc_axes));
    return out;
}

int log2_dim(long v) { return ceil_log2(v); }


}  // namespace

BlockEncoding encode_O(const TwistedSchur& tw, int k, int i, const KrausOptions& opt) {
    auto lay = make_layout(tw.n, tw.d, opt.padding, opt.alpha_guard);
    const double x2 = resolve(opt.x2, tw.d);
    auto inj = build_PL_PR(lay, std::sqrt(x2), Variant::C);
    Eigen::MatrixXcd u = lcu_unitary(lay, inj, padded_schur_large(lay, *tw.t1), k, i);
    BlockEncoding be;
    be.name = "U[x^2](k,i)";
    be.circuit.push(make_op(be.name, {lay.anc0(), lay.sys()}, {0, 1}, u, 1));
    be.scale = x2;
    be.ancilla_dim = lay.anc0();
    be.target_dim = lay.sys();
    be.ancilla_qubits = log2_dim(lay.n_rnu) + log2_dim(lay.n_nu) + log2_dim(lay.n_g);
    be.target = o_target(lay, *tw.t1, Variant::C, k, i);
    be.support = valid_sys(lay);
    be.error_bound = be.residual() + kFloatAllowance;
    return be;
}

BlockEncoding encode_O_prime(const TwistedSchur& tw, int kl, int kr, const KrausOptions& opt) {
    auto lay = make_layout(tw.n, tw.d, opt.padding, opt.alpha_guard);
    const double xp2 = resolve(opt.xp2, tw.d);
    auto inj = build_PL_PR(lay, std::sqrt(xp2), Variant::CPrime);
    Eigen::MatrixXcd u = lcu_unitary(lay, inj, padded_schur_large(lay, *tw.t1), kl, kr);
    BlockEncoding be;
    be.name = "U[x'^2](kl,kr)";
    be.circuit.push(make_op(be.name, {lay.anc0(), lay.sys()}, {0, 1}, u, 1));
    be.scale = xp2;
    be.ancilla_dim = lay.anc0();
    be.target_dim = lay.sys();
    be.ancilla_qubits = log2_dim(lay.n_rnu) + log2_dim(lay.n_nu) + log2_dim(lay.n_g);
    be.target = o_target(lay, *tw.t1, Variant::CPrime, kl, kr);
    be.support = valid_sys(lay);
    be.error_bound = be.residual() + kFloatAllowance;
    return be;
}

BlockEncoding encode_Phi(const TwistedSchur& tw, const KrausOptions& opt) {
    auto lay = make_layout(tw.n, tw.d, opt.padding, opt.alpha_guard);
    Eigen::MatrixXcd upad2 = padded_schur_small(lay, *tw.t2);
    BlockEncoding be;
    be.name = "U^c_Phi";
    const long in = lay.in_dim();
    be.circuit.push(make_op(be.name, {2, in}, {0, 1}, phi_unitary(lay, upad2, phi_plus_row_unitary(tw.d)), 1));
    be.scale = std::sqrt(static_cast<double>(tw.d));
    be.ancilla_dim = 2;
    be.target_dim = in;
    be.ancilla_qubits = 1;
    be.target = phi_target(lay, upad2);
    be.error_bound = be.residual() + kFloatAllowance;
    return be;
}

BlockEncoding encode_kraus(const TwistedSchur& tw, int i, const KrausOptions& opt) {
    if (i < 0 || i > tw.n - 2) throw std::invalid_argument("port index out of range");
    Parts p = build_parts(tw, opt);
    auto uc = build_uc(p, {i}, 1, 1.0);
    BlockEncoding be;
    be.name = "U^c(i)";
    be.circuit = std::move(uc.c);
    be.scale = kraus_scale(tw.n, tw.d, p.x2, p.xp2);
    be.target_dim = ipow(tw.d, tw.n);
    be.ancilla_dim = be.circuit.dim / be.target_dim;
    be.ancilla_qubits = 2 + 2 * log2_dim(p.lay.n_k) + 4 + log2_dim(p.lay.a13());
    be.target = kraus_from_twisted(tw, i);
    be.error_bound = kraus_delta(p);
    return be;
}

std::vector<LedgerRow> kraus_ledger(const TwistedSchur& tw, int i, const KrausOptions& opt) {
    Parts p = build_parts(tw, opt);
    const auto& l = p.lay;
    const double d = tw.d, sd = std::sqrt(d);
    const int lr = log2_dim(l.n_rnu), ln = log2_dim(l.n_nu), lg = log2_dim(l.n_g), ld = log2_dim(tw.d);
    const int lk = log2_dim(l.n_k);
    const int a13 = log2_dim(l.a13());
    auto enc_o = encode_O(tw, 0, i, opt);
    auto enc_phi = encode_Phi(tw, opt);
    const double e2 = p.eps2, e2p = p.eps2p, e3 = p.eps3;
    std::vector<LedgerRow> rows;
    rows.push_back({"U[x^2](k,i)", enc_o.scale, enc_o.ancilla_qubits, lr + ln, e2, lg});
    rows.push_back({"U_2[x^4](i,kl,kr)", p.x2 * p.x2, 2 * (lr + ln + lg), 2 * (lr + ln), 2 * p.x2 * e2, 2 * lg});
    rows.push_back({"U_1[x'^2](kl,kr)", p.xp2, 2 * (lr + ln + lg), 2 * (lr + ln), e2p, 2 * lg});
    rows.push_back({"U^c_Phi", enc_phi.scale, enc_phi.ancilla_qubits, 1, e3, 0});
    rows.push_back({"U^c_cen(i,kl,kr)", p.x2 * p.x2, 2 + a13, 2 * lr + 2 * ln - 2 * ld + 2, 2 * p.x2 * e2, 2 * lg});
    rows.push_back({"U^c(i,kl,kr)", d * p.x2 * p.x2, 4 + a13, 2 * lr + 2 * ln - 2 * ld + 4,
                    2 * d * p.x2 * e2 + 2 * sd * p.x2 * p.x2 * e3, 2 * lg});
    auto enc = encode_kraus(tw, i, opt);
    rows.push_back({"U^c(i)", enc.scale, enc.ancilla_qubits, 2 * lr + 2 * ln - 2 * ld + 2 * lk + 6, enc.error_bound,
                    2 * lg});
    const int pad = log2_dim(l.pad2());
    const int pad_formula = log2_dim(l.n_r) + log2_dim(l.n_alpha) + log2_dim(l.n_dalpha) - (tw.n - 2) * ld;
    rows.push_back({"#Pad", 1.0, pad, pad_formula, 0.0, 0});
    return rows;
}

long Naimark::index(long i, long x) const {
    const long per_i = dim() / (scale_qubit ? 2 : 1) / i_dim;
    return i * per_i + x;
}

std::vector<char> Naimark::pi_tilde_mask() const {
    std::vector<char> mask(static_cast<size_t>(dim()), 0);
    const long lead = scale_qubit ? 2 : 1;
    const long per_i = dim() / lead / i_dim;
    for (long iv = 0; iv < i_dim; ++iv)
        for (long x = 0; x < system_dim; ++x) mask[static_cast<size_t>(iv * per_i + x)] = 1;
    return mask;
}

std::vector<char> Naimark::pi_mask() const {
    std::vector<char> mask(static_cast<size_t>(dim()), 0);
    for (long x = 0; x < system_dim; ++x) mask[static_cast<size_t>(x)] = 1;
    return mask;
}

void Naimark::apply_V(Eigen::MatrixXcd& state, bool adjoint) const {
    const int axis = scale_qubit ? 1 : 0;
    Op op = make_op("U_0", registers, {axis}, u0);
    if (!adjoint) {
        apply_op(state, op, false);
        uc.apply(state, false);
    } else {
        uc.apply(state, true);
        apply_op(state, op, true);
    }
}

Naimark naimark_Uc(const TwistedSchur& tw, const KrausOptions& opt, double scale_ratio) {
    if (scale_ratio <= 0.0 || scale_ratio > 1.0) throw std::invalid_argument("scale_ratio must lie in (0, 1]");
    Parts p = build_parts(tw, opt);
    Naimark nm;
    nm.n = tw.n;
    nm.d = tw.d;
    nm.layout = p.lay;
    nm.i_dim = std::max(p.lay.n_k, opt.min_i_dim);
    nm.system_dim = ipow(tw.d, tw.n);
    std::vector<int> ports;
    for (int i = 0; i < tw.n - 1; ++i) ports.push_back(i);
    auto uc = build_uc(p, ports, nm.i_dim, scale_ratio);
    nm.uc = std::move(uc.c);
    nm.registers = uc.regs;
    nm.scale_qubit = uc.lead == 1;
    Eigen::MatrixXcd u = uniform_row_unitary(nm.i_dim, tw.n - 1);
    nm.u0 = u.adjoint();
    const double base_alpha = kraus_scale(tw.n, tw.d, p.x2, p.xp2);
    nm.alpha = base_alpha / scale_ratio;
    nm.kraus_delta = kraus_delta(p);
    Eigen::VectorXcd uniform = Eigen::VectorXcd::Zero(nm.i_dim);
    uniform.head(tw.n - 1).setConstant(1.0 / std::sqrt(static_cast<double>(tw.n - 1)));
    const double eps_u0 = (nm.u0.col(0) - uniform).norm() + kFloatAllowance;
    nm.epsilon = scale_ratio * nm.kraus_delta / base_alpha + eps_u0;
    return nm;
}

}  // namespace pbt
