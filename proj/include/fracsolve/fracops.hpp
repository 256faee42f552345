#pragma once

// Scalar fractional-calculus kernel: gamma evaluation, Riemann-Liouville
// derivatives of real-power monomials, the magnitude power convention, and
// the order-switching rules used by the iterative methods.

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracsolve {

/// Gamma function. Throws std::domain_error at the poles (0, -1, -2, ...)
/// and for non-finite arguments. Relative error <= 1e-12 for |x| <= 20.
inline double gamma(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("gamma: argument must be finite");
    }
    if (x <= 0.0 && x == std::floor(x)) {
        throw std::domain_error("gamma: pole at non-positive integer " + std::to_string(x));
    }
    return std::tgamma(x);
}

/// 1/Gamma(x), extended by its limit value 0 at the poles of Gamma.
inline double reciprocal_gamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) {
        return 0.0;
    }
    return 1.0 / std::tgamma(x);
}

/// Magnitude power convention: |base|^p, with 0^p = 0 for p > 0 and
/// base^0 = 1 (including 0^0 = 1). Throws on 0 raised to a negative power;
/// callers route zero components through an order rule first, which forces
/// effective order 1 and never produces a negative exponent at zero.
inline double real_power(double base, double p) {
    if (p == 0.0) {
        return 1.0;
    }
    if (base == 0.0) {
        if (p > 0.0) {
            return 0.0;
        }
        throw std::domain_error("real_power: zero base with negative exponent");
    }
    return std::pow(std::abs(base), p);
}

/// Result of differentiating c*x^mu: represents coefficient * x^exponent.
struct MonomialDerivative {
    double coefficient = 0.0;
    double exponent = 0.0;
};

/// Riemann-Liouville derivative of order alpha of the monomial x^mu
/// (lower terminal 0): Gamma(mu+1)/Gamma(mu-alpha+1) * x^(mu-alpha).
/// Requires mu > -1. When mu-alpha+1 is a non-positive integer the
/// 1/Gamma pole makes the coefficient vanish; in particular the ordinary
/// derivative (alpha = 1) annihilates constants (mu = 0), while any
/// non-integer alpha leaves a nonzero derivative of a constant.
inline MonomialDerivative rl_deriv_monomial(double mu, double alpha) {
    if (!(mu > -1.0)) {
        throw std::domain_error("rl_deriv_monomial: exponent must be > -1, got " + std::to_string(mu));
    }
    if (!std::isfinite(alpha)) {
        throw std::domain_error("rl_deriv_monomial: order must be finite");
    }
    const double coef = std::tgamma(mu + 1.0) * reciprocal_gamma(mu - alpha + 1.0);
    return {coef, mu - alpha};
}

/// Nominal fractional order. Must be finite and either non-integer or
/// exactly 1 (the classical baseline); rules may still emit 1 as the
/// effective order regardless of the nominal value.
struct FracOrder {
    double alpha;

    explicit FracOrder(double a) : alpha(a) {
        if (!std::isfinite(a)) {
            throw std::domain_error("FracOrder: order must be finite");
        }
        if (a == std::floor(a) && a != 1.0) {
            throw std::domain_error("FracOrder: integer order " + std::to_string(a) +
                                    " is not a fractional order (only 1 is allowed)");
        }
    }
};

enum class OrderKind {
    Constant,  ///< always the nominal order
    Beta,      ///< nominal order unless the component is zero
    AlphaF     ///< nominal order unless the component is zero or the residual is small
};

/// Rule mapping (component value, residual norm) to the effective
/// derivative order used for that column of the iteration matrix.
struct OrderRule {
    OrderKind kind = OrderKind::Constant;
    double alpha = 1.0;
    double delta = 13.0;  ///< residual threshold, used by AlphaF only

    static OrderRule constant(double alpha) {
        return {OrderKind::Constant, FracOrder(alpha).alpha, 0.0};
    }
    static OrderRule beta(double alpha) {
        return {OrderKind::Beta, FracOrder(alpha).alpha, 0.0};
    }
    static OrderRule alpha_f(double alpha, double delta = 13.0) {
        if (!(delta >= 0.0)) {
            throw std::domain_error("OrderRule: residual threshold must be >= 0");
        }
        return {OrderKind::AlphaF, FracOrder(alpha).alpha, delta};
    }
};

/// Effective order for one component. Beta switches to 1 when the
/// component vanishes; AlphaF additionally switches to 1 once the
/// residual norm drops to the threshold, which is what upgrades the
/// local convergence to (at least) quadratic near a root.
inline double effective_order(const OrderRule& rule, double x_k, double residual_norm) {
    if (!(residual_norm >= 0.0)) {
        throw std::domain_error("effective_order: residual norm must be >= 0");
    }
    switch (rule.kind) {
        case OrderKind::Constant:
            return rule.alpha;
        case OrderKind::Beta:
            return x_k != 0.0 ? rule.alpha : 1.0;
        case OrderKind::AlphaF:
            return (x_k != 0.0 && residual_norm > rule.delta) ? rule.alpha : 1.0;
    }
    throw std::logic_error("effective_order: unknown rule kind");
}

}  // namespace fracsolve
