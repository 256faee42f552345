#pragma once

// Vector functions built from real-power terms, their exact classical
// Jacobians, and Riemann-Liouville fractional Jacobian matrices. The
// fractional partial derivative in variable k freezes every other variable
// as a constant factor; a term whose own exponent in x_k is zero still
// contributes through the nonzero fractional derivative of a constant.

#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsolve/fracops.hpp"
#include "fracsolve/linalg.hpp"

namespace fracsolve {

/// One term coefficient * prod_k x_k^exponents[k], evaluated under the
/// magnitude power convention. Exponents must each be > -1.
struct PowerTerm {
    double coefficient = 0.0;
    std::vector<double> exponents;
};

class PowerTermSystem {
public:
    PowerTermSystem(Eigen::Index n, std::vector<std::vector<PowerTerm>> components)
        : n_(n), components_(std::move(components)) {
        if (n_ < 1) {
            throw std::invalid_argument("PowerTermSystem: dimension must be >= 1");
        }
        if (static_cast<Eigen::Index>(components_.size()) != n_) {
            throw std::invalid_argument("PowerTermSystem: need one term list per component");
        }
        for (const auto& comp : components_) {
            for (const auto& term : comp) {
                if (static_cast<Eigen::Index>(term.exponents.size()) != n_) {
                    throw std::invalid_argument("PowerTermSystem: term exponent count must equal dimension");
                }
                for (double e : term.exponents) {
                    if (!(e > -1.0)) {
                        throw std::invalid_argument("PowerTermSystem: exponents must be > -1, got " +
                                                    std::to_string(e));
                    }
                }
            }
        }
    }

    /// Convenience for 1-D systems: a list of (coefficient, exponent) pairs.
    static PowerTermSystem univariate(std::initializer_list<std::pair<double, double>> terms) {
        std::vector<PowerTerm> comp;
        for (const auto& [c, e] : terms) {
            comp.push_back({c, {e}});
        }
        return {1, {std::move(comp)}};
    }

    Eigen::Index dimension() const { return n_; }
    const std::vector<std::vector<PowerTerm>>& components() const { return components_; }

    Vector value(const Vector& x) const {
        check_dimension(x);
        Vector out = Vector::Zero(n_);
        for (Eigen::Index j = 0; j < n_; ++j) {
            for (const auto& term : components_[static_cast<std::size_t>(j)]) {
                double v = term.coefficient;
                for (Eigen::Index k = 0; k < n_; ++k) {
                    v *= real_power(x[k], term.exponents[static_cast<std::size_t>(k)]);
                }
                out[j] += v;
            }
        }
        return out;
    }

    /// Classical Jacobian: term-wise power rule. Under the magnitude
    /// convention d/dx |x|^e = e * sign(x) * |x|^(e-1); the sign factor
    /// is taken as +1 at x = 0 so the linear term keeps slope 1 there.
    Matrix jacobian(const Vector& x) const {
        check_dimension(x);
        Matrix jac = Matrix::Zero(n_, n_);
        for (Eigen::Index j = 0; j < n_; ++j) {
            for (const auto& term : components_[static_cast<std::size_t>(j)]) {
                for (Eigen::Index k = 0; k < n_; ++k) {
                    const double e = term.exponents[static_cast<std::size_t>(k)];
                    if (e == 0.0) {
                        continue;
                    }
                    double d = term.coefficient * e * real_power(x[k], e - 1.0);
                    if (x[k] < 0.0) {
                        d = -d;
                    }
                    for (Eigen::Index l = 0; l < n_; ++l) {
                        if (l != k) {
                            d *= real_power(x[l], term.exponents[static_cast<std::size_t>(l)]);
                        }
                    }
                    jac(j, k) += d;
                }
            }
        }
        return jac;
    }

private:
    void check_dimension(const Vector& x) const {
        if (x.size() != n_) {
            throw std::invalid_argument("PowerTermSystem: argument dimension mismatch");
        }
    }

    Eigen::Index n_;
    std::vector<std::vector<PowerTerm>> components_;
};

/// Affine map x -> constant + matrix * x. Houses the local models
/// g(x) = a*f(x_i) + f'(x_i)*(x - b*x_i) built by the quasi-Newton
/// methods, with constant = a*f(x_i) - b*f'(x_i)*x_i.
struct AffineSystem {
    Vector constant;
    Matrix matrix;

    Eigen::Index dimension() const { return constant.size(); }

    Vector value(const Vector& x) const { return constant + matrix * x; }

    Matrix jacobian(const Vector&) const { return matrix; }
};

/// Riemann-Liouville fractional Jacobian of a power-term system. Entry
/// (j,k) applies the order given by the rule for component k to the
/// x_k-monomial of each term, with the other variables held fixed.
inline Matrix fractional_jacobian(const PowerTermSystem& sys, const Vector& x,
                                  const OrderRule& rule, double residual_norm) {
    const Eigen::Index n = sys.dimension();
    if (x.size() != n) {
        throw std::invalid_argument("fractional_jacobian: argument dimension mismatch");
    }
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double order = effective_order(rule, x[k], residual_norm);
        for (Eigen::Index j = 0; j < n; ++j) {
            for (const auto& term : sys.components()[static_cast<std::size_t>(j)]) {
                const auto mono = rl_deriv_monomial(term.exponents[static_cast<std::size_t>(k)], order);
                if (mono.coefficient == 0.0) {
                    continue;
                }
                double v = term.coefficient * mono.coefficient * real_power(x[k], mono.exponent);
                for (Eigen::Index l = 0; l < n; ++l) {
                    if (l != k) {
                        v *= real_power(x[l], term.exponents[static_cast<std::size_t>(l)]);
                    }
                }
                out(j, k) += v;
            }
        }
    }
    return out;
}

/// Fractional Jacobian of an affine system in closed form. With o the
/// effective order for column k,
///   entry(j,k) = (c_j + sum_{l != k} M_jl x_l) |x_k|^(-o) / Gamma(1-o)
///              + M_jk |x_k|^(1-o) / Gamma(2-o),
/// and at o = 1 the first addend vanishes so the entry reduces to M_jk.
inline Matrix fractional_jacobian(const AffineSystem& sys, const Vector& x,
                                  const OrderRule& rule, double residual_norm) {
    const Eigen::Index n = sys.dimension();
    if (x.size() != n || sys.matrix.rows() != n || sys.matrix.cols() != n) {
        throw std::invalid_argument("fractional_jacobian: affine system dimension mismatch");
    }
    Matrix out(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double order = effective_order(rule, x[k], residual_norm);
        const double rg1 = reciprocal_gamma(1.0 - order);
        const double rg2 = reciprocal_gamma(2.0 - order);
        for (Eigen::Index j = 0; j < n; ++j) {
            double entry = sys.matrix(j, k) * real_power(x[k], 1.0 - order) * rg2;
            if (rg1 != 0.0) {
                double constant_part = sys.constant[j];
                for (Eigen::Index l = 0; l < n; ++l) {
                    if (l != k) {
                        constant_part += sys.matrix(j, l) * x[l];
                    }
                }
                entry += constant_part * real_power(x[k], -order) * rg1;
            }
            out(j, k) = entry;
        }
    }
    return out;
}

}  // namespace fracsolve
