#include "pbt/circuit.hpp"

#include <stdexcept>

namespace pbt {

long shape_size(const Shape& s) {
    long p = 1;
    for (long v : s) p *= v;
    return p;
}

MatPtr share(Eigen::MatrixXcd m) { return std::make_shared<const Eigen::MatrixXcd>(std::move(m)); }

Op make_op(std::string name, Shape shape, std::vector<int> targets, std::vector<int> controls,
           std::vector<MatPtr> mats, int anc_axes) {
    Op op;
    op.name = std::move(name);
    op.shape = std::move(shape);
    op.targets = std::move(targets);
    op.controls = std::move(controls);
    op.anc_axes = anc_axes;
    const int na = static_cast<int>(op.shape.size());
    std::vector<char> used(static_cast<size_t>(na), 0);
    long k = 1, c = 1;
    for (int t : op.targets) {
        if (t < 0 || t >= na || used[static_cast<size_t>(t)]) throw std::invalid_argument(op.name + ": bad target axis");
        used[static_cast<size_t>(t)] = 1;
        k *= op.shape[static_cast<size_t>(t)];
    }
    for (int a : op.controls) {
        if (a < 0 || a >= na || used[static_cast<size_t>(a)]) throw std::invalid_argument(op.name + ": bad control axis");
        used[static_cast<size_t>(a)] = 1;
        c *= op.shape[static_cast<size_t>(a)];
    }
    if (static_cast<long>(mats.size()) != c) throw std::invalid_argument(op.name + ": one matrix per control value");
    for (const auto& m : mats) {
        if (m && (m->rows() != k || m->cols() != k)) throw std::invalid_argument(op.name + ": matrix size mismatch");
        op.adj.push_back(m ? share(m->adjoint()) : nullptr);
    }
    op.mats = std::move(mats);
    return op;
}

Op make_op(std::string name, Shape shape, std::vector<int> targets, const Eigen::MatrixXcd& m, int anc_axes) {
    return make_op(std::move(name), std::move(shape), std::move(targets), {}, {share(m)}, anc_axes);
}

void apply_op(Eigen::MatrixXcd& state, const Op& op, bool adjoint) {
    const int na = static_cast<int>(op.shape.size());
    std::vector<long> stride(static_cast<size_t>(na));
    long total = 1;
    for (int a = na - 1; a >= 0; --a) {
        stride[static_cast<size_t>(a)] = total;
        total *= op.shape[static_cast<size_t>(a)];
    }
    if (total != state.rows()) throw std::invalid_argument(op.name + ": state does not match the view");

    std::vector<char> is_target(static_cast<size_t>(na), 0);
    long k = 1;
    for (int t : op.targets) {
        is_target[static_cast<size_t>(t)] = 1;
        k *= op.shape[static_cast<size_t>(t)];
    }
    std::vector<long> tofs(static_cast<size_t>(k), 0);
    for (long idx = 0; idx < k; ++idx) {
        long rem = idx, off = 0;
        for (int j = static_cast<int>(op.targets.size()) - 1; j >= 0; --j) {
            auto ax = static_cast<size_t>(op.targets[static_cast<size_t>(j)]);
            off += (rem % op.shape[ax]) * stride[ax];
            rem /= op.shape[ax];
        }
        tofs[static_cast<size_t>(idx)] = off;
    }

    std::vector<int> rest;
    for (int a = 0; a < na; ++a)
        if (!is_target[static_cast<size_t>(a)]) rest.push_back(a);
    std::vector<int> ctrl_pos(static_cast<size_t>(na), -1);
    for (size_t j = 0; j < op.controls.size(); ++j) ctrl_pos[static_cast<size_t>(op.controls[j])] = static_cast<int>(j);
    std::vector<long> ctrl_stride(op.controls.size());
    long nctrl = 1;
    for (int j = static_cast<int>(op.controls.size()) - 1; j >= 0; --j) {
        ctrl_stride[static_cast<size_t>(j)] = nctrl;
        nctrl *= op.shape[static_cast<size_t>(op.controls[static_cast<size_t>(j)])];
    }

    std::vector<std::vector<long>> groups(static_cast<size_t>(nctrl));
    const long nrest = total / k;
    std::vector<long> digit(rest.size(), 0);
    long base = 0, cval = 0;
    for (long it = 0; it < nrest; ++it) {
        if (op.mats[static_cast<size_t>(cval)]) groups[static_cast<size_t>(cval)].push_back(base);
        // Odometer increment over the rest axes, last axis fastest.
        for (int j = static_cast<int>(rest.size()) - 1; j >= 0; --j) {
            auto ax = static_cast<size_t>(rest[static_cast<size_t>(j)]);
            auto uj = static_cast<size_t>(j);
            int cp = ctrl_pos[ax];
            if (++digit[uj] < op.shape[ax]) {
                base += stride[ax];
                if (cp >= 0) cval += ctrl_stride[static_cast<size_t>(cp)];
                break;
            }
            base -= (op.shape[ax] - 1) * stride[ax];
            if (cp >= 0) cval -= (op.shape[ax] - 1) * ctrl_stride[static_cast<size_t>(cp)];
            digit[uj] = 0;
        }
    }

    const long ncols = state.cols();
    for (long c = 0; c < nctrl; ++c) {
        const auto& g = groups[static_cast<size_t>(c)];
        if (g.empty()) continue;
        const Eigen::MatrixXcd& m = adjoint ? *op.adj[static_cast<size_t>(c)] : *op.mats[static_cast<size_t>(c)];
        const long nb = static_cast<long>(g.size());
        Eigen::MatrixXcd gathered(k, nb * ncols);
        for (long col = 0; col < ncols; ++col) {
            const std::complex<double>* src = state.col(col).data();
            for (long j = 0; j < nb; ++j)
                for (long t = 0; t < k; ++t) gathered(t, col * nb + j) = src[g[static_cast<size_t>(j)] + tofs[static_cast<size_t>(t)]];
        }
        Eigen::MatrixXcd out = m * gathered;
        for (long col = 0; col < ncols; ++col) {
            std::complex<double>* dst = state.col(col).data();
            for (long j = 0; j < nb; ++j)
                for (long t = 0; t < k; ++t) dst[g[static_cast<size_t>(j)] + tofs[static_cast<size_t>(t)]] = out(t, col * nb + j);
        }
    }
}

void Circuit::push(Op op) {
    const long s = shape_size(op.shape);
    if (dim == 0) dim = s;
    if (s != dim) throw std::invalid_argument(op.name + ": view size differs from circuit dimension");
    ops.push_back(std::move(op));
}

void Circuit::apply(Eigen::MatrixXcd& state, bool adjoint) const {
    if (!adjoint) {
        for (const auto& op : ops) apply_op(state, op, false);
    } else {
        for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply_op(state, *it, true);
    }
}

Circuit Circuit::adjoint() const {
    Circuit c;
    c.dim = dim;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Op op = *it;
        std::swap(op.mats, op.adj);
        c.ops.push_back(std::move(op));
    }
    return c;
}

Eigen::MatrixXcd Circuit::dense() const {
    if (dim > 4096) throw std::invalid_argument("circuit too large for a dense matrix");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
    apply(m);
    return m;
}

Op insert_axis(const Op& op, int pos, long extra) {
    Op out = op;
    out.shape.insert(out.shape.begin() + pos, extra);
    for (auto& t : out.targets)
        if (t >= pos) ++t;
    for (auto& c : out.controls)
        if (c >= pos) ++c;
    if (out.anc_axes >= 0 && pos <= out.anc_axes) ++out.anc_axes;
    return out;
}

}  // namespace pbt
