#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

namespace sdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Time-dependent dense matrix, t in model time [0, T]. eval must be a pure
// function of t: the same t always yields the same matrix.
struct MatrixFn {
    std::function<Matrix(double)> eval;

    // Set when eval(t) does not depend on t. Lets integrators factor the
    // iteration matrix and projectors once per run instead of once per step.
    bool time_constant = false;

    Matrix operator()(double t) const { return eval(t); }
};

inline MatrixFn constant_matrix(Matrix m) {
    return MatrixFn{[m = std::move(m)](double) { return m; }, true};
}

} // namespace sdae
