#pragma once

// File formats for CLI-supplied problems:
//   power-term system  {"n": int, "components": [[{"coef": r, "exp": [r,...]},...],...]}
//   receiver operating point  {"DNI": r, "T_air": r, "constants": {...overrides...}}
//   batch CSV with header DNI,T_air

#include <nlohmann/json.hpp>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracsolve/polysys.hpp"
#include "fracsolve/receiver.hpp"

namespace fracsolve {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline PowerTermSystem power_term_system_from_json(const nlohmann::json& j) {
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    std::vector<std::vector<PowerTerm>> components;
    for (const auto& comp : j.at("components")) {
        std::vector<PowerTerm> terms;
        for (const auto& term : comp) {
            PowerTerm t;
            t.coefficient = term.at("coef").get<double>();
            t.exponents = term.at("exp").get<std::vector<double>>();
            terms.push_back(std::move(t));
        }
        components.push_back(std::move(terms));
    }
    return {n, std::move(components)};
}

inline nlohmann::json power_term_system_to_json(const PowerTermSystem& sys) {
    nlohmann::json components = nlohmann::json::array();
    for (const auto& comp : sys.components()) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& term : comp) {
            terms.push_back({{"coef", term.coefficient}, {"exp", term.exponents}});
        }
        components.push_back(std::move(terms));
    }
    return {{"n", sys.dimension()}, {"components", std::move(components)}};
}

inline PowerTermSystem load_power_term_system(const std::string& path) {
    return power_term_system_from_json(nlohmann::json::parse(read_file(path)));
}

inline ReceiverConstants receiver_constants_from_json(const nlohmann::json& j) {
    ReceiverConstants c;
    auto get = [&j](const char* key, double& field) {
        if (j.contains(key)) {
            field = j.at(key).get<double>();
        }
    };
    get("eta_opt", c.eta_opt);
    get("r_intercon", c.r_intercon);
    get("C_g", c.C_g);
    get("A_cell", c.A_cell);
    get("R_heat_exch", c.R_heat_exch);
    get("A_TEG", c.A_TEG);
    get("eta_cell_ref", c.eta_cell_ref);
    get("r_cell", c.r_cell);
    get("f_star", c.f_star);
    get("gamma_cell", c.gamma_cell);
    get("r_sol", c.r_sol);
    get("b", c.b);
    get("r_cop", c.r_cop);
    get("r_cer", c.r_cer);
    get("l", c.l);
    get("k_TEG", c.k_TEG);
    get("ZT", c.ZT);
    return c;
}

inline ReceiverParams receiver_params_from_json(const nlohmann::json& j) {
    const double dni = j.at("DNI").get<double>();
    const double t_air = j.at("T_air").get<double>();
    ReceiverConstants constants;
    if (j.contains("constants")) {
        constants = receiver_constants_from_json(j.at("constants"));
    }
    return build_params(dni, t_air, constants);
}

/// Batch input: CSV with header line DNI,T_air.
inline std::vector<std::pair<double, double>> load_dni_tair_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty CSV: " + path);
    }
    std::vector<std::pair<double, double>> pairs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string dni_field, tair_field;
        if (!std::getline(row, dni_field, ',') || !std::getline(row, tair_field, ',')) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected DNI,T_air");
        }
        try {
            pairs.emplace_back(std::stod(dni_field), std::stod(tair_field));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number");
        }
    }
    return pairs;
}

}  // namespace fracsolve
