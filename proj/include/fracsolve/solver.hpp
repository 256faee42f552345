#pragma once

// Fixed-point iteration engine x_{i+1} = x_i - A(x_i)^{-1} f(x_i), where A
// is either the fractional Jacobian of f itself (fractional Newton-Raphson,
// power-term systems only) or the fractional Jacobian of the local affine
// model g(x) = a f(x_i) + f'(x_i)(x - b x_i) (quasi-Newton family). Also
// provides convergence-order estimation and the numerical order classifier.

#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fracsolve/fracops.hpp"
#include "fracsolve/linalg.hpp"
#include "fracsolve/polysys.hpp"

namespace fracsolve {

template <typename S>
concept NonlinearSystem = requires(const S& s, const Vector& x) {
    { s.dimension() } -> std::convertible_to<Eigen::Index>;
    { s.value(x) } -> std::convertible_to<Vector>;
    { s.jacobian(x) } -> std::convertible_to<Matrix>;
};

/// Black-box system defined by a callable; the Jacobian defaults to
/// central finite differences with relative step 1e-7.
class CallableSystem {
public:
    using ValueFn = std::function<Vector(const Vector&)>;
    using JacobianFn = std::function<Matrix(const Vector&)>;

    CallableSystem(Eigen::Index n, ValueFn value, JacobianFn jacobian = {})
        : n_(n), value_(std::move(value)), jacobian_(std::move(jacobian)) {
        if (n_ < 1 || !value_) {
            throw std::invalid_argument("CallableSystem: need a dimension >= 1 and a value function");
        }
    }

    Eigen::Index dimension() const { return n_; }
    Vector value(const Vector& x) const { return value_(x); }
    Matrix jacobian(const Vector& x) const {
        if (jacobian_) {
            return jacobian_(x);
        }
        return finite_difference_jacobian(value_, x, 1e-7);
    }

private:
    Eigen::Index n_;
    ValueFn value_;
    JacobianFn jacobian_;
};

enum class MethodFamily { FractionalNewtonRaphson, QuasiNewton };

/// Which iteration matrix to build. The quasi-Newton defaults a = 1, b = 0
/// give the plain local model g(x) = f(x_i) + f'(x_i) x; a in (0,1] with
/// b = 0, and a = 1 with b in (0,1], are the two generalized families.
struct MethodSpec {
    MethodFamily family = MethodFamily::QuasiNewton;
    OrderRule rule = OrderRule::constant(1.0);
    double a = 1.0;
    double b = 0.0;

    static MethodSpec quasi_newton(double alpha) {
        return {MethodFamily::QuasiNewton, OrderRule::beta(alpha), 1.0, 0.0};
    }
    static MethodSpec quasi_newton_accelerated(double alpha, double delta = 13.0) {
        return {MethodFamily::QuasiNewton, OrderRule::alpha_f(alpha, delta), 1.0, 0.0};
    }
    static MethodSpec newton_raphson(double alpha) {
        return {MethodFamily::FractionalNewtonRaphson, OrderRule::constant(alpha), 1.0, 0.0};
    }
    static MethodSpec newton_raphson_accelerated(double alpha, double delta = 13.0) {
        return {MethodFamily::FractionalNewtonRaphson, OrderRule::alpha_f(alpha, delta), 1.0, 0.0};
    }
    static MethodSpec generalized(double alpha, double a, double b) {
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw std::invalid_argument("MethodSpec: a and b must be finite");
        }
        return {MethodFamily::QuasiNewton, OrderRule::beta(alpha), a, b};
    }
};

struct SolverConfig {
    double step_tol = 1e-5;
    double residual_tol = 1e-8;
    int max_iter = 200;
    double classification_tol = 1e-3;

    void validate() const {
        if (!(step_tol > 0.0) || !(residual_tol > 0.0) || !(classification_tol > 0.0)) {
            throw std::invalid_argument("SolverConfig: tolerances must be positive");
        }
        if (max_iter < 1) {
            throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
        }
    }
};

enum class TerminationReason {
    ResidualTolerance,
    StepTolerance,
    MaxIterations,
    SingularMatrix,
    NonFinite
};

inline const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::ResidualTolerance: return "residual_tolerance";
        case TerminationReason::StepTolerance: return "step_tolerance";
        case TerminationReason::MaxIterations: return "max_iterations";
        case TerminationReason::SingularMatrix: return "singular_matrix";
        case TerminationReason::NonFinite: return "non_finite";
    }
    return "unknown";
}

/// Per-run record. iterates[0] is the initial point; step_norms,
/// residual_norms and effective_orders carry one entry per iterate after it.
struct IterationTrace {
    std::vector<Vector> iterates;
    std::vector<double> step_norms;
    std::vector<double> residual_norms;
    std::vector<Vector> effective_orders;
    bool converged = false;
    TerminationReason termination_reason = TerminationReason::MaxIterations;
    int failure_index = -1;  ///< iteration at which a solve or evaluation failed

    std::size_t iteration_count() const { return step_norms.size(); }
    const Vector& final_iterate() const { return iterates.back(); }
    double final_step_norm() const { return step_norms.back(); }
    double final_residual_norm() const { return residual_norms.back(); }
};

struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Iteration matrix of the fractional Newton-Raphson method: the
/// fractional Jacobian of f itself. With an AlphaF rule this is the
/// accelerated fractional Newton method.
inline Matrix newton_raphson_step_matrix(const PowerTermSystem& f, const Vector& x,
                                         const OrderRule& rule, double residual_norm) {
    return fractional_jacobian(f, x, rule, residual_norm);
}

namespace detail {

template <NonlinearSystem S>
Matrix method_matrix(const S& f, const MethodSpec& method, const Vector& x,
                     const Vector& fx, double residual_norm) {
    if (method.family == MethodFamily::FractionalNewtonRaphson) {
        if constexpr (std::same_as<S, PowerTermSystem>) {
            return newton_raphson_step_matrix(f, x, method.rule, residual_norm);
        } else {
            throw std::invalid_argument(
                "iterate: the fractional Newton-Raphson method requires a power-term system");
        }
    }
    const Matrix jac = f.jacobian(x);
    AffineSystem local{method.a * fx - method.b * (jac * x), jac};
    return fractional_jacobian(local, x, method.rule, residual_norm);
}

}  // namespace detail

/// Run the iteration from x0 until the step norm or the residual norm
/// drops to its tolerance, or max_iter is reached. Each step solves
/// A * d = f(x_i) and sets x_{i+1} = x_i - d; no explicit inverse is
/// formed. Numerical failures (singular matrix, departure from the reals)
/// terminate the run and are recorded in the trace rather than thrown.
template <NonlinearSystem S>
IterationTrace iterate(const S& f, const MethodSpec& method, const Vector& x0,
                       const SolverConfig& config = {}) {
    config.validate();
    if (!x0.allFinite()) {
        throw std::invalid_argument("iterate: initial point must be finite");
    }
    const Eigen::Index n = f.dimension();
    if (x0.size() != n) {
        throw std::invalid_argument("iterate: initial point dimension mismatch");
    }

    IterationTrace trace;
    trace.iterates.push_back(x0);
    Vector x = x0;

    for (int i = 1; i <= config.max_iter; ++i) {
        Vector fx;
        Matrix a_matrix;
        Vector orders(n);
        try {
            fx = f.value(x);
            if (!fx.allFinite()) {
                trace.termination_reason = TerminationReason::NonFinite;
                trace.failure_index = i;
                return trace;
            }
            const double residual = fx.norm();
            for (Eigen::Index k = 0; k < n; ++k) {
                orders[k] = effective_order(method.rule, x[k], residual);
            }
            a_matrix = detail::method_matrix(f, method, x, fx, residual);
        } catch (const std::domain_error&) {
            trace.termination_reason = TerminationReason::NonFinite;
            trace.failure_index = i;
            return trace;
        }

        const auto step = solve_linear(a_matrix, fx);
        if (!step) {
            trace.termination_reason = TerminationReason::SingularMatrix;
            trace.failure_index = i;
            return trace;
        }

        const Vector next = x - *step;
        double next_residual = std::numeric_limits<double>::quiet_NaN();
        if (next.allFinite()) {
            try {
                next_residual = f.value(next).norm();
            } catch (const std::domain_error&) {
            }
        }
        if (!next.allFinite() || !std::isfinite(next_residual)) {
            trace.termination_reason = TerminationReason::NonFinite;
            trace.failure_index = i;
            return trace;
        }

        const double step_norm = (next - x).norm();
        trace.iterates.push_back(next);
        trace.step_norms.push_back(step_norm);
        trace.residual_norms.push_back(next_residual);
        trace.effective_orders.push_back(orders);
        x = next;

        // residual first: when both criteria fire at once, report the
        // stronger condition
        if (next_residual <= config.residual_tol) {
            trace.converged = true;
            trace.termination_reason = TerminationReason::ResidualTolerance;
            return trace;
        }
        if (step_norm <= config.step_tol) {
            trace.converged = true;
            trace.termination_reason = TerminationReason::StepTolerance;
            return trace;
        }
    }

    trace.termination_reason = TerminationReason::MaxIterations;
    return trace;
}

/// Independent solves over a grid of orders, sharing the initial point.
/// Per-order failures are recorded in the respective trace and never abort
/// the sweep.
template <NonlinearSystem S>
std::vector<std::pair<double, IterationTrace>> alpha_sweep(const S& f,
                                                           const MethodSpec& method_template,
                                                           const Vector& x0,
                                                           const std::vector<double>& alphas,
                                                           const SolverConfig& config = {}) {
    for (double alpha : alphas) {
        FracOrder check(alpha);  // non-integer or exactly 1
        (void)check;
    }
    std::vector<std::pair<double, IterationTrace>> results;
    results.reserve(alphas.size());
    for (double alpha : alphas) {
        MethodSpec method = method_template;
        method.rule.alpha = alpha;
        results.emplace_back(alpha, iterate(f, method, x0, config));
    }
    return results;
}

/// Converged final iterates of a sweep, deduplicated: a root within tol
/// (Euclidean) of an already-collected one is dropped.
inline std::vector<Vector> distinct_roots(const std::vector<std::pair<double, IterationTrace>>& sweep,
                                          double tol = 1e-6) {
    std::vector<Vector> roots;
    for (const auto& [alpha, trace] : sweep) {
        if (!trace.converged) {
            continue;
        }
        const Vector& candidate = trace.final_iterate();
        bool known = false;
        for (const Vector& r : roots) {
            if ((candidate - r).norm() <= tol) {
                known = true;
                break;
            }
        }
        if (!known) {
            roots.push_back(candidate);
        }
    }
    return roots;
}

/// Computational order of convergence from the last admissible step-norm
/// triple (three consecutive, strictly decreasing, positive step norms):
/// rho = ln(s_i/s_{i-1}) / ln(s_{i-1}/s_{i-2}).
inline double estimate_order(const IterationTrace& trace) {
    const auto& s = trace.step_norms;
    if (s.size() >= 3) {
        for (std::size_t i = s.size() - 1; i >= 2; --i) {
            if (s[i] > 0.0 && s[i - 1] > s[i] && s[i - 2] > s[i - 1]) {
                return std::log(s[i] / s[i - 1]) / std::log(s[i - 1] / s[i - 2]);
            }
        }
    }
    throw InsufficientDataError(
        "estimate_order: need at least three strictly decreasing positive step norms");
}

enum class Classification { Ord1, Ord2, Unknown };

inline const char* to_string(Classification c) {
    switch (c) {
        case Classification::Ord1: return "Ord1";
        case Classification::Ord2: return "Ord2";
        case Classification::Unknown: return "Unknown";
    }
    return "unknown";
}

/// Outcome of the numerical order classifier: the max-norm of the
/// iteration map's Jacobian at a fixed point, and the convergence order it
/// implies (nonzero norm: linear; vanishing norm: at least quadratic).
struct ConvergenceReport {
    double estimated_order = std::numeric_limits<double>::quiet_NaN();
    double phi_jacobian_norm = std::numeric_limits<double>::quiet_NaN();
    Classification classification = Classification::Unknown;
};

/// Classify the local convergence order of a method at a converged
/// approximation xi by central finite differences (relative step 1e-6) of
/// the full iteration map. Matrix singularity inside the probe propagates
/// as SingularMatrixError; a non-finite probe yields Unknown.
template <NonlinearSystem S>
ConvergenceReport classify(const S& f, const MethodSpec& method, const Vector& xi,
                           const SolverConfig& config = {}) {
    config.validate();
    if (f.value(xi).norm() > 10.0 * config.residual_tol) {
        throw std::invalid_argument("classify: xi is not a converged approximation");
    }
    auto phi = [&](const Vector& x) -> Vector {
        const Vector fx = f.value(x);
        const Matrix a_matrix = detail::method_matrix(f, method, x, fx, fx.norm());
        const auto step = solve_linear(a_matrix, fx);
        if (!step) {
            throw SingularMatrixError("classify: iteration matrix is singular near xi");
        }
        return x - *step;
    };

    Matrix phi_jacobian;
    try {
        phi_jacobian = finite_difference_jacobian(phi, xi, 1e-6);
    } catch (const std::domain_error&) {
        return {};
    }
    if (!phi_jacobian.allFinite()) {
        return {};
    }

    ConvergenceReport report;
    report.phi_jacobian_norm = max_abs(phi_jacobian);
    report.classification = report.phi_jacobian_norm <= config.classification_tol
                                ? Classification::Ord2
                                : Classification::Ord1;
    report.estimated_order = report.classification == Classification::Ord2 ? 2.0 : 1.0;
    return report;
}

}  // namespace fracsolve
