#pragma once

// Batch efficiency simulation: sample (DNI, T_air) pairs, solve the reduced
// receiver system per pair, recover the full state, and summarize. Sampling
// is decoupled from solving so that results are deterministic for a given
// seed regardless of the worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fracsolve/receiver.hpp"
#include "fracsolve/solver.hpp"
#include "fracsolve/trace_io.hpp"

namespace fracsolve {

/// Worker count: hardware concurrency, capped by FRACSOLVE_THREADS.
inline int worker_count() {
    int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("FRACSOLVE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) {
            n = std::min<long>(n, cap);
        }
    }
    return n;
}

/// Uniform pairs on [dni_min, dni_max] x [tair_min, tair_max], drawn
/// sequentially from a seeded mt19937_64. The unit draw uses the top 53
/// bits of the engine output, so the stream is platform-independent.
inline std::vector<std::pair<double, double>> sample_uniform_pairs(int n, double dni_min,
                                                                   double dni_max, double tair_min,
                                                                   double tair_max, uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample_uniform_pairs: need n >= 1");
    }
    if (!(dni_min <= dni_max) || !(tair_min <= tair_max)) {
        throw std::invalid_argument("sample_uniform_pairs: invalid ranges");
    }
    std::mt19937_64 engine(seed);
    auto unit = [&engine]() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double dni = dni_min + unit() * (dni_max - dni_min);
        const double tair = tair_min + unit() * (tair_max - tair_min);
        pairs.emplace_back(dni, tair);
    }
    return pairs;
}

struct SimulationConfig {
    MethodSpec method = MethodSpec::quasi_newton_accelerated(0.89825);
    SolverConfig solver{};
    ReceiverConstants constants{};
    Vector x0 = (Vector(2) << 3000.0, 3000.0).finished();
    int histogram_bins = 20;
};

struct SampleResult {
    double dni = 0.0;
    double t_air = 0.0;
    Vector state;  ///< recovered 5-state; empty when not converged
    int iterations = 0;
    bool converged = false;
};

struct SummaryStats {
    double mean = 0.0;
    double stddev = 0.0;  ///< sample standard deviation
};

inline SummaryStats summarize(const std::vector<double>& values) {
    SummaryStats s;
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

struct Histogram {
    std::vector<double> edges;   ///< bins+1 edges
    std::vector<int> counts;
};

inline Histogram histogram(const std::vector<double>& values, int bins) {
    Histogram h;
    if (values.empty() || bins < 1) {
        return h;
    }
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (hi <= lo) {
        hi = lo + 1e-12;
    }
    const double width = (hi - lo) / bins;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) {
        h.edges[static_cast<std::size_t>(i)] = lo + width * i;
    }
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (double v : values) {
        int bin = static_cast<int>((v - lo) / width);
        bin = std::clamp(bin, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

struct SimulationResult {
    std::vector<SampleResult> rows;
    double convergence_rate = 0.0;
    SummaryStats dni, t_air, eta_cell, eta_teg;
    Histogram eta_cell_hist;
};

/// Solve every (DNI, T_air) pair with the configured method and recover
/// the full state. Rows are ordered by input index; non-converged samples
/// are flagged, not fatal.
inline SimulationResult run_simulation(const std::vector<std::pair<double, double>>& pairs,
                                       const SimulationConfig& config = {}) {
    SimulationResult result;
    result.rows.resize(pairs.size());

    auto solve_one = [&](std::size_t i) {
        SampleResult row;
        row.dni = pairs[i].first;
        row.t_air = pairs[i].second;
        try {
            const ReceiverSystem system(row.dni, row.t_air, config.constants);
            const IterationTrace trace = iterate(system, config.method, config.x0, config.solver);
            row.iterations = static_cast<int>(trace.iteration_count());
            row.converged = trace.converged;
            if (trace.converged) {
                row.state = recover(trace.final_iterate(), system.params());
            }
        } catch (const std::exception&) {
            row.converged = false;
        }
        result.rows[i] = std::move(row);
    };

    const int workers = std::min<std::size_t>(worker_count(), pairs.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < pairs.size(); ++i) solve_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w]() {
                for (std::size_t i = static_cast<std::size_t>(w); i < pairs.size();
                     i += static_cast<std::size_t>(workers)) {
                    solve_one(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<double> dnis, tairs, cells, tegs;
    std::size_t converged = 0;
    for (const auto& row : result.rows) {
        dnis.push_back(row.dni);
        tairs.push_back(row.t_air);
        if (row.converged) {
            ++converged;
            cells.push_back(row.state[3]);
            tegs.push_back(row.state[4]);
        }
    }
    result.convergence_rate =
        result.rows.empty() ? 0.0 : static_cast<double>(converged) / static_cast<double>(result.rows.size());
    result.dni = summarize(dnis);
    result.t_air = summarize(tairs);
    result.eta_cell = summarize(cells);
    result.eta_teg = summarize(tegs);
    result.eta_cell_hist = histogram(cells, config.histogram_bins);
    return result;
}

/// CSV rows DNI,T_air,T_cell,T_hot,T_cold,eta_cell,eta_TEG,iterations,converged.
inline std::string simulation_to_csv(const SimulationResult& result) {
    std::ostringstream out;
    out << "DNI,T_air,T_cell,T_hot,T_cold,eta_cell,eta_TEG,iterations,converged\n";
    for (const auto& row : result.rows) {
        out << fmt_g17(row.dni) << ',' << fmt_g17(row.t_air);
        if (row.converged) {
            for (Eigen::Index k = 0; k < 5; ++k) {
                out << ',' << fmt_g17(row.state[k]);
            }
        } else {
            out << ",,,,,";
        }
        out << ',' << row.iterations << ',' << (row.converged ? 1 : 0) << '\n';
    }
    return out.str();
}

inline std::string histogram_to_json(const Histogram& h) {
    std::ostringstream out;
    out << "{\n  \"bin_edges\": [";
    for (std::size_t i = 0; i < h.edges.size(); ++i) {
        if (i) out << ',';
        out << json_number(h.edges[i]);
    }
    out << "],\n  \"counts\": [";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        if (i) out << ',';
        out << h.counts[i];
    }
    out << "]\n}\n";
    return out.str();
}

inline std::string summary_to_json(const SimulationResult& result) {
    auto stats = [](const SummaryStats& s) {
        return "{\"mean\": " + json_number(s.mean) + ", \"std\": " + json_number(s.stddev) + "}";
    };
    std::ostringstream out;
    out << "{\n  \"samples\": " << result.rows.size() << ",\n"
        << "  \"convergence_rate\": " << json_number(result.convergence_rate) << ",\n"
        << "  \"DNI\": " << stats(result.dni) << ",\n"
        << "  \"T_air\": " << stats(result.t_air) << ",\n"
        << "  \"eta_cell\": " << stats(result.eta_cell) << ",\n"
        << "  \"eta_TEG\": " << stats(result.eta_teg) << "\n}\n";
    return out.str();
}

}  // namespace fracsolve
