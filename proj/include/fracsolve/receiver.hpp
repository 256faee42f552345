#pragma once

// Hybrid solar receiver model: a concentrating photovoltaic cell coupled to
// a thermoelectric generator. The full model is a 5-dimensional system in
// s = (T_cell, T_hot, T_cold, eta_cell, eta_TEG); eliminating T_cell,
// eta_cell and eta_TEG algebraically reduces it to a 2-dimensional
// transcendental system in (T_hot, T_cold), and a recovery map restores the
// remaining state. Temperatures are in deg C (a9 = 273.15 performs the
// Kelvin shift), DNI in W/m^2.

#include <array>
#include <cmath>
#include <stdexcept>

#include "fracsolve/linalg.hpp"

namespace fracsolve {

/// Physical constants of the receiver. Defaults are the reference design
/// values; all of them are injectable for sensitivity studies.
struct ReceiverConstants {
    double eta_opt = 0.85;        ///< optical efficiency
    double r_intercon = 2.331e-7; ///< interconnect thermal resistance
    double C_g = 800.0;           ///< geometric concentration ratio
    double A_cell = 9e-6;         ///< cell area, m^2
    double R_heat_exch = 0.5;     ///< heat exchanger resistance
    double A_TEG = 5.04e-5;       ///< thermoelectric module area, m^2
    double eta_cell_ref = 0.43;   ///< cell efficiency at 25 degC
    double r_cell = 3e-6;
    double f_star = 0.7;          ///< TEG fill factor
    double gamma_cell = 4.6e-4;   ///< cell temperature coefficient
    double r_sol = 1.603e-6;
    double b = 5e-4;
    double r_cop = 7.5e-7;
    double r_cer = 8e-6;
    double l = 5e-4;              ///< TEG leg length, m
    double k_TEG = 1.5;           ///< TEG thermal conductivity
    double ZT = 1.0;              ///< thermoelectric figure of merit
};

/// Operating point (DNI, T_air) together with the ten derived model
/// coefficients a0..a9.
struct ReceiverParams {
    double dni = 0.0;
    double t_air = 0.0;
    std::array<double, 10> a{};
};

inline ReceiverParams build_params(double dni, double t_air, const ReceiverConstants& c = {}) {
    if (!(dni > 0.0)) {
        throw std::domain_error("build_params: DNI must be positive");
    }
    if (!(c.A_TEG > 0.0) || !(c.f_star > 0.0) || !(c.k_TEG > 0.0)) {
        throw std::domain_error("build_params: areas, fill factor and conductivity must be positive");
    }
    ReceiverParams p;
    p.dni = dni;
    p.t_air = t_air;
    auto& a = p.a;
    a[0] = 2.0 * c.r_intercon /
           (std::sqrt(c.f_star * c.A_TEG) * (c.b * std::sqrt(c.f_star) + std::sqrt(c.A_TEG)));
    a[1] = c.eta_opt * c.C_g * dni;
    a[2] = c.r_cell + c.r_sol + c.A_cell * ((c.r_cop + c.r_cer) / c.A_TEG + a[0]);
    a[3] = c.A_cell * c.l / (c.f_star * c.A_TEG * c.k_TEG);
    a[4] = t_air;
    a[5] = c.A_cell * (c.r_cer / c.A_TEG + c.R_heat_exch + a[0]);
    a[6] = -c.eta_cell_ref * c.gamma_cell;
    a[7] = c.eta_cell_ref * (1.0 + 25.0 * c.gamma_cell);
    a[8] = std::sqrt(1.0 + c.ZT);
    a[9] = 273.15;
    return p;
}

namespace detail {

inline void check_receiver_dims(const Vector& v, Eigen::Index n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(n));
    }
}

/// Shared rational factor of the reduced system:
///   Q = (a6 x2 + a7 - 1)(a8 (x3 + a9) + (x2 + a9))
///       / ((1 + a1 a2 a6)(a8 (x2 + a9) + (x3 + a9))).
inline double reduced_factor(double x2, double x3, const std::array<double, 10>& a) {
    const double scale = 1.0 + a[1] * a[2] * a[6];
    const double denom = a[8] * (x2 + a[9]) + (x3 + a[9]);
    if (scale == 0.0 || denom == 0.0) {
        throw std::domain_error("receiver: reduced system denominator vanishes");
    }
    const double numer = (a[6] * x2 + a[7] - 1.0) * (a[8] * (x3 + a[9]) + (x2 + a[9]));
    return numer / (scale * denom);
}

}  // namespace detail

/// Residual of the full 5-dimensional receiver system at state
/// s = (T_cell, T_hot, T_cold, eta_cell, eta_TEG).
inline Vector f1(const Vector& s, const ReceiverParams& p) {
    detail::check_receiver_dims(s, 5, "f1");
    const auto& a = p.a;
    const double hot = s[1] + a[9];
    if (hot == 0.0) {
        throw std::domain_error("f1: T_hot at absolute zero");
    }
    const double ratio = (s[2] + a[9]) / hot;
    if (a[8] + ratio == 0.0) {
        throw std::domain_error("f1: TEG efficiency denominator vanishes");
    }
    const double loss = (1.0 - s[3]) * (1.0 - s[4]);
    Vector out(5);
    out[0] = s[0] - s[1] - a[1] * a[2] * (1.0 - s[3]);
    out[1] = s[1] - s[2] - a[1] * a[3] * loss;
    out[2] = s[2] - a[4] - a[1] * a[5] * loss;
    out[3] = s[3] - a[6] * s[0] - a[7];
    out[4] = s[4] - (a[8] - 1.0) * (1.0 - ratio) / (a[8] + ratio);
    return out;
}

/// Residual of the reduced 2-dimensional transcendental system in
/// x = (T_hot, T_cold).
inline Vector f2(const Vector& x, const ReceiverParams& p) {
    detail::check_receiver_dims(x, 2, "f2");
    const auto& a = p.a;
    const double q = detail::reduced_factor(x[0], x[1], a);
    Vector out(2);
    out[0] = x[0] - x[1] + a[1] * a[3] * q;
    out[1] = x[1] - a[4] + a[1] * a[5] * q;
    return out;
}

/// Analytic Jacobian of f2.
inline Matrix f2_jacobian(const Vector& x, const ReceiverParams& p) {
    detail::check_receiver_dims(x, 2, "f2_jacobian");
    const auto& a = p.a;
    const double scale = 1.0 + a[1] * a[2] * a[6];
    const double denom = a[8] * (x[0] + a[9]) + (x[1] + a[9]);
    if (scale == 0.0 || denom == 0.0) {
        throw std::domain_error("f2_jacobian: reduced system denominator vanishes");
    }
    const double cell_term = a[6] * x[0] + a[7] - 1.0;
    const double numer = cell_term * (a[8] * (x[1] + a[9]) + (x[0] + a[9]));
    const double dvalue = scale * denom;
    // d/dx of numer/(scale*denom)
    const double dn_dx2 = a[6] * (a[8] * (x[1] + a[9]) + (x[0] + a[9])) + cell_term;
    const double dn_dx3 = cell_term * a[8];
    const double dd_dx2 = scale * a[8];
    const double dd_dx3 = scale;
    const double dq_dx2 = (dn_dx2 * dvalue - numer * dd_dx2) / (dvalue * dvalue);
    const double dq_dx3 = (dn_dx3 * dvalue - numer * dd_dx3) / (dvalue * dvalue);
    Matrix jac(2, 2);
    jac(0, 0) = 1.0 + a[1] * a[3] * dq_dx2;
    jac(0, 1) = -1.0 + a[1] * a[3] * dq_dx3;
    jac(1, 0) = a[1] * a[5] * dq_dx2;
    jac(1, 1) = 1.0 + a[1] * a[5] * dq_dx3;
    return jac;
}

/// Recovery map: rebuilds the full state (T_cell, T_hot, T_cold, eta_cell,
/// eta_TEG) from a solution x = (T_hot, T_cold) of the reduced system.
inline Vector recover(const Vector& x, const ReceiverParams& p) {
    detail::check_receiver_dims(x, 2, "recover");
    const auto& a = p.a;
    const double scale = 1.0 + a[1] * a[2] * a[6];
    const double denom = a[8] * (x[0] + a[9]) + (x[1] + a[9]);
    if (scale == 0.0 || denom == 0.0) {
        throw std::domain_error("recover: denominator vanishes");
    }
    Vector s(5);
    s[0] = (x[0] - a[1] * a[2] * (a[7] - 1.0)) / scale;
    s[1] = x[0];
    s[2] = x[1];
    s[3] = (a[6] * (a[1] * a[2] + x[0]) + a[7]) / scale;
    s[4] = (a[8] - 1.0) * (x[0] - x[1]) / denom;
    return s;
}

/// Adapter exposing the reduced system to the solver engine.
class ReceiverSystem {
public:
    explicit ReceiverSystem(ReceiverParams params) : params_(std::move(params)) {}
    ReceiverSystem(double dni, double t_air, const ReceiverConstants& c = {})
        : params_(build_params(dni, t_air, c)) {}

    Eigen::Index dimension() const { return 2; }
    Vector value(const Vector& x) const { return f2(x, params_); }
    Matrix jacobian(const Vector& x) const { return f2_jacobian(x, params_); }
    const ReceiverParams& params() const { return params_; }

private:
    ReceiverParams params_;
};

}  // namespace fracsolve
