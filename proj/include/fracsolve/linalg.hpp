#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <utility>

namespace fracsolve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Solve A*x = b for the small dense systems this library works with.
/// Returns nullopt when A is numerically singular.
inline std::optional<Vector> solve_linear(const Matrix& A, const Vector& b) {
    Eigen::FullPivLU<Matrix> lu(A);
    if (!lu.isInvertible()) {
        return std::nullopt;
    }
    return lu.solve(b);
}

/// Max-norm over all entries.
inline double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

/// Central-difference Jacobian with per-component relative step.
template <typename F>
Matrix finite_difference_jacobian(F&& f, const Vector& x, double rel_step = 1e-7) {
    Vector fx = f(x);
    Matrix jac(fx.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = rel_step * std::max(1.0, std::abs(x[k]));
        Vector xp = x;
        Vector xm = x;
        xp[k] += h;
        xm[k] -= h;
        jac.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return jac;
}

}  // namespace fracsolve
