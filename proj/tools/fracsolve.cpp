// fracsolve command-line tool.
//
//   solve             run one method on a built-in or file-supplied system
//   reproduce-tables  check the solver against built-in reference traces
//   simulate          batch receiver efficiency simulation over (DNI, T_air)
//   sweep             solve repeatedly over a grid of fractional orders
//
// Exit codes: 0 success/converged, 1 usage or I/O error, 2 not converged
// (or simulation convergence rate below 99%), 3 singular matrix or
// non-finite iterate.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "fracsolve/problem_io.hpp"
#include "fracsolve/receiver.hpp"
#include "fracsolve/simulate.hpp"
#include "fracsolve/solver.hpp"
#include "fracsolve/trace_io.hpp"

namespace {

using namespace fracsolve;

Vector parse_vector(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string field;
    while (std::getline(in, field, ',')) {
        values.push_back(std::stod(field));
    }
    if (values.empty()) {
        throw std::runtime_error("empty vector: " + text);
    }
    Vector v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = values[i];
    }
    return v;
}

bool near_integer(double v) {
    return std::abs(v - std::round(v)) < 1e-9;
}

// "lo:step:hi" expands to a grid with integer orders dropped; a comma list
// is taken verbatim (validated later: non-integer or exactly 1).
std::vector<double> parse_alpha_grid(const std::string& text) {
    std::vector<double> grid;
    if (std::count(text.begin(), text.end(), ':') == 2) {
        std::istringstream in(text);
        std::string lo_s, step_s, hi_s;
        std::getline(in, lo_s, ':');
        std::getline(in, step_s, ':');
        std::getline(in, hi_s, ':');
        const double lo = std::stod(lo_s), step = std::stod(step_s), hi = std::stod(hi_s);
        if (!(step > 0.0) || !(lo <= hi)) {
            throw std::runtime_error("bad alpha range: " + text);
        }
        for (int k = 0;; ++k) {
            double v = lo + step * k;
            v = std::round(v * 1e12) / 1e12;
            if (v > hi + 1e-12) {
                break;
            }
            if (!near_integer(v)) {
                grid.push_back(v);
            }
        }
    } else {
        std::istringstream in(text);
        std::string field;
        while (std::getline(in, field, ',')) {
            grid.push_back(std::stod(field));
        }
    }
    if (grid.empty()) {
        throw std::runtime_error("empty alpha grid: " + text);
    }
    return grid;
}

struct MethodFlags {
    std::string name = "quasi-newton-accelerated";
    double alpha = 0.89825;
    double delta = 13.0;
    double a = 1.0;
    double b = 0.0;

    MethodSpec build() const {
        MethodSpec m;
        if (name == "quasi-newton") {
            m = MethodSpec::quasi_newton(alpha);
        } else if (name == "quasi-newton-accelerated") {
            m = MethodSpec::quasi_newton_accelerated(alpha, delta);
        } else if (name == "fnr") {
            m = MethodSpec::newton_raphson(alpha);
        } else if (name == "fnr-accelerated") {
            m = MethodSpec::newton_raphson_accelerated(alpha, delta);
        } else {
            throw std::runtime_error("unknown method: " + name +
                                     " (expected quasi-newton, quasi-newton-accelerated, fnr, "
                                     "fnr-accelerated)");
        }
        m.a = a;
        m.b = b;
        return m;
    }

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--method", name,
                        "iteration method: quasi-newton | quasi-newton-accelerated | fnr | "
                        "fnr-accelerated");
        cmd->add_option("--alpha", alpha, "nominal fractional order");
        cmd->add_option("--delta", delta, "residual threshold of the accelerated order rule");
        cmd->add_option("--a", a, "generalized local-model scaling of f(x_i)");
        cmd->add_option("--b", b, "generalized local-model shift b*x_i");
    }
};

struct ConfigFlags {
    SolverConfig config{};
    std::string config_file;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "JSON file overriding solver defaults");
        cmd->add_option("--step-tol", config.step_tol, "step-norm stopping tolerance");
        cmd->add_option("--residual-tol", config.residual_tol, "residual-norm stopping tolerance");
        cmd->add_option("--max-iter", config.max_iter, "iteration cap");
        cmd->add_option("--classification-tol", config.classification_tol,
                        "threshold on the iteration-map Jacobian norm");
    }

    // explicit flags beat the config file, which beats the defaults
    SolverConfig resolve(const CLI::App* cmd) const {
        SolverConfig out = config;
        if (!config_file.empty()) {
            const auto j = nlohmann::json::parse(read_file(config_file));
            if (cmd->count("--step-tol") == 0 && j.contains("step_tol")) {
                out.step_tol = j.at("step_tol").get<double>();
            }
            if (cmd->count("--residual-tol") == 0 && j.contains("residual_tol")) {
                out.residual_tol = j.at("residual_tol").get<double>();
            }
            if (cmd->count("--max-iter") == 0 && j.contains("max_iter")) {
                out.max_iter = j.at("max_iter").get<int>();
            }
            if (cmd->count("--classification-tol") == 0 && j.contains("classification_tol")) {
                out.classification_tol = j.at("classification_tol").get<double>();
            }
        }
        out.validate();
        return out;
    }
};

int exit_code_for(const IterationTrace& trace) {
    switch (trace.termination_reason) {
        case TerminationReason::ResidualTolerance:
        case TerminationReason::StepTolerance:
            return 0;
        case TerminationReason::MaxIterations:
            return 2;
        case TerminationReason::SingularMatrix:
        case TerminationReason::NonFinite:
            return 3;
    }
    return 3;
}

template <NonlinearSystem S>
int solve_and_write(const S& system, const MethodSpec& method, const Vector& x0,
                    const SolverConfig& config, const std::string& out_prefix,
                    const std::string& command, const std::string& digest_source) {
    const IterationTrace trace = iterate(system, method, x0, config);
    write_file(out_prefix + ".csv", trace_to_csv(trace));
    write_file(out_prefix + ".json", trace_to_json(trace));

    ConvergenceReport report;
    if (trace.converged) {
        try {
            report = classify(system, method, trace.final_iterate(), config);
        } catch (const std::exception&) {
            report = {};
        }
    }
    write_file(out_prefix + ".report.json", report_to_json(report));

    RunManifest manifest{command, config, method, hex64(fnv1a64(digest_source)), 0};
    write_file(out_prefix + ".manifest.json", manifest_to_json(manifest));

    std::cout << (trace.converged ? "converged" : "stopped") << " after " << trace.iteration_count()
              << " iterations (" << to_string(trace.termination_reason) << ")";
    if (!trace.iterates.empty() && trace.iteration_count() > 0) {
        std::cout << ", x = [";
        const Vector& x = trace.final_iterate();
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            std::cout << (k ? ", " : "") << fmt_g17(x[k]);
        }
        std::cout << "], residual = " << fmt_sci6(trace.final_residual_norm());
    }
    std::cout << "\n";
    return exit_code_for(trace);
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
    std::string problem;
    std::string file;
    std::string params_file;
    double dni = 900.0;
    double tair = 20.0;
    std::string x0_text;
    std::string out_prefix = "trace";
    MethodFlags method;
    ConfigFlags config;
};

int run_solve(const SolveArgs& args, const CLI::App* cmd) {
    const SolverConfig config = args.config.resolve(cmd);
    const MethodSpec method = args.method.build();
    const std::string command = "solve " + args.problem;

    if (args.problem == "receiver") {
        ReceiverParams params;
        std::string digest_source;
        if (!args.params_file.empty()) {
            const std::string text = read_file(args.params_file);
            params = receiver_params_from_json(nlohmann::json::parse(text));
            digest_source = text;
        } else {
            params = build_params(args.dni, args.tair);
            digest_source = "receiver dni=" + fmt_g17(args.dni) + " tair=" + fmt_g17(args.tair);
        }
        const Vector x0 =
            args.x0_text.empty() ? (Vector(2) << 3000.0, 3000.0).finished() : parse_vector(args.x0_text);
        return solve_and_write(ReceiverSystem(params), method, x0, config, args.out_prefix, command,
                               digest_source);
    }
    if (args.problem == "poly") {
        if (args.file.empty()) {
            throw std::runtime_error("solve poly requires a system JSON file");
        }
        const std::string text = read_file(args.file);
        const PowerTermSystem system = power_term_system_from_json(nlohmann::json::parse(text));
        if (args.x0_text.empty()) {
            throw std::runtime_error("solve poly requires --x0");
        }
        return solve_and_write(system, method, parse_vector(args.x0_text), config, args.out_prefix,
                               command, text);
    }
    throw std::runtime_error("unknown problem '" + args.problem + "' (expected receiver or poly)");
}

// ---------------------------------------------------------------------------
// reproduce-tables

struct ReferenceCase {
    const char* name;
    double dni;
    double tair;
    double alpha;
    bool accelerated;
    int iterations;
    double t_hot;
    double t_cold;
};

// Built-in reference traces for the three operating points, plain and
// accelerated. Iteration counts are checked to +-1, final iterates to 1e-5.
constexpr ReferenceCase kReferenceCases[] = {
    {"case1/quasi-newton", 900.0, 20.0, 0.89825, false, 27, 51.56211928, 22.08753979},
    {"case1/accelerated", 900.0, 20.0, 0.89825, true, 13, 51.56211284, 22.08753788},
    {"case2/quasi-newton", 574.319, 16.832, 0.8996, false, 26, 36.97842703, 18.16449898},
    {"case2/accelerated", 574.319, 16.832, 0.8996, true, 12, 36.97842127, 18.1644969},
    {"case3/quasi-newton", 94.3555, 28.373, 0.89964, false, 26, 31.70528513, 28.59340319},
    {"case3/accelerated", 94.3555, 28.373, 0.89964, true, 13, 31.7052804, 28.5933991},
};

struct ReproduceArgs {
    ConfigFlags config;
    std::optional<double> alpha_override;
    double delta = 13.0;
};

int run_reproduce(const ReproduceArgs& args, const CLI::App* cmd) {
    const SolverConfig config = args.config.resolve(cmd);
    const Vector x0 = (Vector(2) << 3000.0, 3000.0).finished();
    int passed = 0;
    int total = 0;
    for (const auto& ref : kReferenceCases) {
        ++total;
        const double alpha = args.alpha_override.value_or(ref.alpha);
        const MethodSpec method = ref.accelerated
                                      ? MethodSpec::quasi_newton_accelerated(alpha, args.delta)
                                      : MethodSpec::quasi_newton(alpha);
        const ReceiverSystem system(ref.dni, ref.tair);
        const IterationTrace trace = iterate(system, method, x0, config);

        std::string failure;
        if (!trace.converged) {
            failure = "did not converge (" + std::string(to_string(trace.termination_reason)) + ")";
        } else {
            const auto iters = static_cast<int>(trace.iteration_count());
            const Vector& x = trace.final_iterate();
            if (std::abs(iters - ref.iterations) > 1) {
                failure = "iterations " + std::to_string(iters) + " vs expected " +
                          std::to_string(ref.iterations);
            } else if (std::abs(x[0] - ref.t_hot) > 1e-5 || std::abs(x[1] - ref.t_cold) > 1e-5) {
                failure = "final iterate (" + fmt_g17(x[0]) + ", " + fmt_g17(x[1]) +
                          ") vs expected (" + fmt_g17(ref.t_hot) + ", " + fmt_g17(ref.t_cold) + ")";
            }
        }
        if (failure.empty()) {
            ++passed;
            std::cout << "PASS " << ref.name << ": " << trace.iteration_count() << " iterations, ("
                      << fmt_g17(trace.final_iterate()[0]) << ", " << fmt_g17(trace.final_iterate()[1])
                      << ")\n";
        } else {
            std::cout << "FAIL " << ref.name << ": " << failure << "\n";
        }
    }
    std::cout << passed << "/" << total << " PASS\n";
    return passed == total ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    int n = 2410;
    double dni_min = 12.0;
    double dni_max = 958.0;
    double tair_min = 11.0;
    double tair_max = 45.0;
    uint64_t seed = 0;
    std::string distribution = "uniform";
    std::string input_file;
    int bins = 20;
    std::string x0_text;
    std::string out_prefix = "simulation";
    MethodFlags method;
    ConfigFlags config;
};

int run_simulate(const SimulateArgs& args, const CLI::App* cmd) {
    SimulationConfig sim;
    sim.method = args.method.build();
    sim.solver = args.config.resolve(cmd);
    sim.histogram_bins = args.bins;
    if (!args.x0_text.empty()) {
        sim.x0 = parse_vector(args.x0_text);
    }

    std::vector<std::pair<double, double>> pairs;
    std::string digest_source;
    if (args.distribution == "uniform") {
        pairs = sample_uniform_pairs(args.n, args.dni_min, args.dni_max, args.tair_min,
                                     args.tair_max, args.seed);
        digest_source = "uniform n=" + std::to_string(args.n) + " dni=[" + fmt_g17(args.dni_min) +
                        "," + fmt_g17(args.dni_max) + "] tair=[" + fmt_g17(args.tair_min) + "," +
                        fmt_g17(args.tair_max) + "] seed=" + std::to_string(args.seed);
    } else if (args.distribution == "file") {
        if (args.input_file.empty()) {
            throw std::runtime_error("--distribution file requires --input");
        }
        pairs = load_dni_tair_csv(args.input_file);
        digest_source = read_file(args.input_file);
    } else {
        throw std::runtime_error("unknown distribution: " + args.distribution);
    }

    const SimulationResult result = run_simulation(pairs, sim);

    write_file(args.out_prefix + ".csv", simulation_to_csv(result));
    write_file(args.out_prefix + ".hist.json", histogram_to_json(result.eta_cell_hist));
    write_file(args.out_prefix + ".summary.json", summary_to_json(result));
    RunManifest manifest{"simulate", sim.solver, sim.method, hex64(fnv1a64(digest_source)), args.seed};
    write_file(args.out_prefix + ".manifest.json", manifest_to_json(manifest));

    std::printf("%zu samples, convergence rate %.4f\n", result.rows.size(), result.convergence_rate);
    std::printf("DNI      mean %.6g  std %.6g\n", result.dni.mean, result.dni.stddev);
    std::printf("T_air    mean %.6g  std %.6g\n", result.t_air.mean, result.t_air.stddev);
    std::printf("eta_cell mean %.6g  std %.6g\n", result.eta_cell.mean, result.eta_cell.stddev);
    std::printf("eta_TEG  mean %.6g  std %.6g\n", result.eta_teg.mean, result.eta_teg.stddev);
    return result.convergence_rate >= 0.99 ? 0 : 2;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    std::string problem;
    std::string file;
    double dni = 900.0;
    double tair = 20.0;
    std::string x0_text;
    std::string alphas_text = "0.1:0.05:1.9";
    std::string out_prefix = "sweep";
    MethodFlags method;
    ConfigFlags config;
};

template <NonlinearSystem S>
int sweep_and_write(const S& system, const SweepArgs& args, const MethodSpec& method_template,
                    const SolverConfig& config, const Vector& x0, const std::string& digest_source) {
    const std::vector<double> alphas = parse_alpha_grid(args.alphas_text);
    const auto sweep = alpha_sweep(system, method_template, x0, alphas, config);
    const auto roots = distinct_roots(sweep);

    std::ostringstream csv;
    csv << "alpha,converged,reason,iterations,final_residual";
    for (Eigen::Index k = 0; k < x0.size(); ++k) {
        csv << ",x_" << (k + 1);
    }
    csv << "\n";
    for (const auto& [alpha, trace] : sweep) {
        csv << fmt_g17(alpha) << ',' << (trace.converged ? 1 : 0) << ','
            << to_string(trace.termination_reason) << ',' << trace.iteration_count() << ',';
        if (trace.iteration_count() > 0) {
            csv << fmt_sci6(trace.final_residual_norm());
            for (Eigen::Index k = 0; k < x0.size(); ++k) {
                csv << ',' << fmt_g17(trace.final_iterate()[k]);
            }
        } else {
            for (Eigen::Index k = 0; k <= x0.size(); ++k) {
                csv << (k ? "," : "");
            }
        }
        csv << "\n";
    }
    write_file(args.out_prefix + ".csv", csv.str());

    std::ostringstream roots_csv;
    roots_csv << "root";
    for (Eigen::Index k = 1; k < x0.size(); ++k) {
        roots_csv << ",";
    }
    roots_csv.str("");  // header built below with component names
    roots_csv << "x_1";
    for (Eigen::Index k = 1; k < x0.size(); ++k) {
        roots_csv << ",x_" << (k + 1);
    }
    roots_csv << "\n";
    for (const auto& r : roots) {
        for (Eigen::Index k = 0; k < r.size(); ++k) {
            roots_csv << (k ? "," : "") << fmt_g17(r[k]);
        }
        roots_csv << "\n";
    }
    write_file(args.out_prefix + ".roots.csv", roots_csv.str());

    RunManifest manifest{"sweep " + args.problem, config, method_template,
                         hex64(fnv1a64(digest_source + " alphas=" + args.alphas_text)), 0};
    write_file(args.out_prefix + ".manifest.json", manifest_to_json(manifest));

    std::size_t converged = 0;
    for (const auto& [alpha, trace] : sweep) {
        converged += trace.converged ? 1u : 0u;
    }
    std::cout << alphas.size() << " orders, " << converged << " converged, " << roots.size()
              << " distinct roots\n";
    return 0;
}

int run_sweep(const SweepArgs& args, const CLI::App* cmd) {
    const SolverConfig config = args.config.resolve(cmd);
    const MethodSpec method_template = args.method.build();

    if (args.problem == "receiver") {
        const Vector x0 =
            args.x0_text.empty() ? (Vector(2) << 3000.0, 3000.0).finished() : parse_vector(args.x0_text);
        return sweep_and_write(ReceiverSystem(args.dni, args.tair), args, method_template, config, x0,
                               "receiver dni=" + fmt_g17(args.dni) + " tair=" + fmt_g17(args.tair));
    }
    if (args.problem == "poly") {
        if (args.file.empty() || args.x0_text.empty()) {
            throw std::runtime_error("sweep poly requires a system JSON file and --x0");
        }
        const std::string text = read_file(args.file);
        const PowerTermSystem system = power_term_system_from_json(nlohmann::json::parse(text));
        return sweep_and_write(system, args, method_template, config, parse_vector(args.x0_text), text);
    }
    throw std::runtime_error("unknown problem '" + args.problem + "' (expected receiver or poly)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional fixed-point root-finding toolkit"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "solve one system with one method");
    solve_cmd->add_option("problem", solve_args.problem, "receiver | poly")->required();
    solve_cmd->add_option("file", solve_args.file, "power-term system JSON (poly)");
    solve_cmd->add_option("--dni", solve_args.dni, "direct normal irradiance, W/m^2");
    solve_cmd->add_option("--tair", solve_args.tair, "ambient temperature, degC");
    solve_cmd->add_option("--params", solve_args.params_file, "receiver operating-point JSON");
    solve_cmd->add_option("--x0", solve_args.x0_text, "initial point, comma-separated");
    solve_cmd->add_option("--out", solve_args.out_prefix, "output file prefix");
    solve_args.method.add_flags(solve_cmd);
    solve_args.config.add_flags(solve_cmd);

    ReproduceArgs repro_args;
    auto* repro_cmd =
        app.add_subcommand("reproduce-tables", "check the solver against built-in reference traces");
    double repro_alpha = 0.0;
    auto* repro_alpha_opt =
        repro_cmd->add_option("--alpha", repro_alpha, "override the per-case fractional order");
    repro_cmd->add_option("--delta", repro_args.delta, "residual threshold of the accelerated rule");
    repro_args.config.add_flags(repro_cmd);

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "batch receiver efficiency simulation");
    sim_cmd->add_option("--n", sim_args.n, "number of samples");
    sim_cmd->add_option("--dni-min", sim_args.dni_min, "DNI lower bound");
    sim_cmd->add_option("--dni-max", sim_args.dni_max, "DNI upper bound");
    sim_cmd->add_option("--tair-min", sim_args.tair_min, "T_air lower bound");
    sim_cmd->add_option("--tair-max", sim_args.tair_max, "T_air upper bound");
    sim_cmd->add_option("--seed", sim_args.seed, "RNG seed");
    sim_cmd->add_option("--distribution", sim_args.distribution, "uniform | file");
    sim_cmd->add_option("--input", sim_args.input_file, "CSV with DNI,T_air (distribution=file)");
    sim_cmd->add_option("--bins", sim_args.bins, "eta_cell histogram bin count");
    sim_cmd->add_option("--x0", sim_args.x0_text, "initial point per solve");
    sim_cmd->add_option("--out", sim_args.out_prefix, "output file prefix");
    sim_args.method.add_flags(sim_cmd);
    sim_args.config.add_flags(sim_cmd);

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("sweep", "solve over a grid of fractional orders");
    sweep_cmd->add_option("problem", sweep_args.problem, "receiver | poly")->required();
    sweep_cmd->add_option("file", sweep_args.file, "power-term system JSON (poly)");
    sweep_cmd->add_option("--dni", sweep_args.dni, "direct normal irradiance, W/m^2");
    sweep_cmd->add_option("--tair", sweep_args.tair, "ambient temperature, degC");
    sweep_cmd->add_option("--x0", sweep_args.x0_text, "initial point, comma-separated");
    sweep_cmd->add_option("--alphas", sweep_args.alphas_text,
                          "order grid, lo:step:hi (integers dropped) or comma list");
    sweep_cmd->add_option("--out", sweep_args.out_prefix, "output file prefix");
    sweep_args.method.name = "quasi-newton";
    sweep_args.method.add_flags(sweep_cmd);
    sweep_args.config.add_flags(sweep_cmd);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            return run_solve(solve_args, solve_cmd);
        }
        if (repro_cmd->parsed()) {
            if (repro_alpha_opt->count() > 0) {
                repro_args.alpha_override = repro_alpha;
            }
            return run_reproduce(repro_args, repro_cmd);
        }
        if (sim_cmd->parsed()) {
            return run_simulate(sim_args, sim_cmd);
        }
        if (sweep_cmd->parsed()) {
            return run_sweep(sweep_args, sweep_cmd);
        }
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: JSON parse failure at byte " << e.byte << ": " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
