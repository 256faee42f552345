#pragma once

// Trace and report export. Formats are pinned so that reruns with an
// identical manifest produce byte-identical files: JSON numbers carry 17
// significant digits, CSV norm columns use 6-digit scientific notation.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "fracsolve/solver.hpp"

namespace fracsolve {

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_sci6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6E", v);
    return buf;
}

/// JSON number token: 17 significant digits, null for non-finite values.
inline std::string json_number(double v) {
    if (!std::isfinite(v)) {
        return "null";
    }
    return fmt_g17(v);
}

inline uint64_t fnv1a64(std::string_view data) {
    uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

inline std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// CSV with one row per iteration: i,x_1,...,x_n,step_norm,residual_norm.
inline std::string trace_to_csv(const IterationTrace& trace) {
    std::ostringstream out;
    const Eigen::Index n = trace.iterates.empty() ? 0 : trace.iterates.front().size();
    out << "i";
    for (Eigen::Index k = 0; k < n; ++k) {
        out << ",x_" << (k + 1);
    }
    out << ",step_norm,residual_norm\n";
    for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < n; ++k) {
            out << ',' << fmt_g17(trace.iterates[i][k]);
        }
        out << ',' << fmt_sci6(trace.step_norms[i - 1]) << ',' << fmt_sci6(trace.residual_norms[i - 1])
            << '\n';
    }
    return out.str();
}

namespace detail {

inline void json_vector(std::ostringstream& out, const Vector& v) {
    out << '[';
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        if (k) out << ',';
        out << json_number(v[k]);
    }
    out << ']';
}

}  // namespace detail

/// Full-precision JSON mirror of a trace, including the initial point and
/// the effective orders used at each step.
inline std::string trace_to_json(const IterationTrace& trace) {
    std::ostringstream out;
    out << "{\n  \"converged\": " << (trace.converged ? "true" : "false") << ",\n"
        << "  \"termination_reason\": \"" << to_string(trace.termination_reason) << "\",\n"
        << "  \"iterations\": " << trace.iteration_count() << ",\n"
        << "  \"failure_index\": " << trace.failure_index << ",\n";
    out << "  \"iterates\": [";
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        if (i) out << ',';
        detail::json_vector(out, trace.iterates[i]);
    }
    out << "],\n  \"step_norms\": [";
    for (std::size_t i = 0; i < trace.step_norms.size(); ++i) {
        if (i) out << ',';
        out << json_number(trace.step_norms[i]);
    }
    out << "],\n  \"residual_norms\": [";
    for (std::size_t i = 0; i < trace.residual_norms.size(); ++i) {
        if (i) out << ',';
        out << json_number(trace.residual_norms[i]);
    }
    out << "],\n  \"effective_orders\": [";
    for (std::size_t i = 0; i < trace.effective_orders.size(); ++i) {
        if (i) out << ',';
        detail::json_vector(out, trace.effective_orders[i]);
    }
    out << "]\n}\n";
    return out.str();
}

inline std::string report_to_json(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "{\n  \"classification\": \"" << to_string(report.classification) << "\",\n"
        << "  \"estimated_order\": " << json_number(report.estimated_order) << ",\n"
        << "  \"phi_jacobian_norm\": " << json_number(report.phi_jacobian_norm) << "\n}\n";
    return out.str();
}

inline const char* to_string(MethodFamily family) {
    return family == MethodFamily::FractionalNewtonRaphson ? "fractional_newton_raphson"
                                                           : "quasi_newton";
}

inline const char* to_string(OrderKind kind) {
    switch (kind) {
        case OrderKind::Constant: return "constant";
        case OrderKind::Beta: return "beta";
        case OrderKind::AlphaF: return "alpha_f";
    }
    return "unknown";
}

/// Provenance record emitted alongside every output file; identical
/// manifests imply byte-identical outputs.
struct RunManifest {
    std::string command;
    SolverConfig config;
    MethodSpec method;
    std::string inputs_digest;
    uint64_t seed = 0;
};

inline std::string manifest_to_json(const RunManifest& m) {
    std::ostringstream out;
    out << "{\n  \"command\": \"" << m.command << "\",\n"
        << "  \"config\": {\"step_tol\": " << json_number(m.config.step_tol)
        << ", \"residual_tol\": " << json_number(m.config.residual_tol)
        << ", \"max_iter\": " << m.config.max_iter
        << ", \"classification_tol\": " << json_number(m.config.classification_tol) << "},\n"
        << "  \"method\": {\"family\": \"" << to_string(m.method.family) << "\", \"rule\": \""
        << to_string(m.method.rule.kind) << "\", \"alpha\": " << json_number(m.method.rule.alpha)
        << ", \"delta\": " << json_number(m.method.rule.delta) << ", \"a\": " << json_number(m.method.a)
        << ", \"b\": " << json_number(m.method.b) << "},\n"
        << "  \"inputs_digest\": \"" << m.inputs_digest << "\",\n"
        << "  \"seed\": " << m.seed << "\n}\n";
    return out.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << contents;
    if (!out) {
        throw std::runtime_error("write failed: " + path);
    }
}

}  // namespace fracsolve
