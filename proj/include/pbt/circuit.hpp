#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace pbt {

/// Row-major factorization of a state index into registers (axis 0 most significant).
using Shape = std::vector<long>;

long shape_size(const Shape& s);

/// Dense operator on the joint index of `targets` (row-major in listed order), optionally selected
/// by the joint value of `controls`. A null matrix acts as the identity.
struct Op {
    std::string name;
    Shape shape;
    std::vector<int> targets;
    std::vector<int> controls;
    std::vector<std::shared_ptr<const Eigen::MatrixXcd>> mats;
    std::vector<std::shared_ptr<const Eigen::MatrixXcd>> adj;
    /// Number of leading axes that make up the ancilla; -1 when the view does not split there.
    int anc_axes = -1;
};

using MatPtr = std::shared_ptr<const Eigen::MatrixXcd>;

MatPtr share(Eigen::MatrixXcd m);

Op make_op(std::string name, Shape shape, std::vector<int> targets, std::vector<int> controls,
           std::vector<MatPtr> mats, int anc_axes = -1);
Op make_op(std::string name, Shape shape, std::vector<int> targets, const Eigen::MatrixXcd& m, int anc_axes = -1);

/// Applies op (or its adjoint) to every column of state; rows are indexed by op.shape.
void apply_op(Eigen::MatrixXcd& state, const Op& op, bool adjoint = false);

struct Circuit {
    long dim = 0;
    std::vector<Op> ops;

    void push(Op op);
    void apply(Eigen::MatrixXcd& state, bool adjoint = false) const;
    Circuit adjoint() const;
    /// Full matrix (only for small dim).
    Eigen::MatrixXcd dense() const;
};

/// Reversible insertion of a passive axis of size `extra` at position `pos` in every op view.
Op insert_axis(const Op& op, int pos, long extra);

}  // namespace pbt
