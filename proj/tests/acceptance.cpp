// Acceptance suite. Runs every acceptance criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion; exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "fracsolve/fracops.hpp"
#include "fracsolve/polysys.hpp"
#include "fracsolve/receiver.hpp"
#include "fracsolve/simulate.hpp"
#include "fracsolve/solver.hpp"

using namespace fracsolve;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("%s  criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) {
        ++failures;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Vector vec1(double a) { return (Vector(1) << a).finished(); }

struct ReferenceRun {
    double dni, tair, alpha;
    int plain_iters, accel_iters;
    double plain_x2, plain_x3, accel_x2, accel_x3;
    double rec_x1, rec_x4, rec_x5;  // recovered state at the accelerated solution
};

const ReferenceRun kRuns[] = {
    {900.0, 20.0, 0.89825, 27, 13, 51.56211928, 22.08753979, 51.56211284, 22.08753788,
     53.76746288, 0.4243098, 0.01618235},
    {574.319, 16.832, 0.8996, 26, 12, 36.97842703, 18.16449898, 36.97842127, 18.1644969,
     38.37828503, 0.42735378, 0.01067675},
    {94.3555, 28.373, 0.89964, 26, 13, 31.70528513, 28.59340319, 31.7052804, 28.5933991,
     31.9347537, 0.42862831, 0.00175881},
};

// reference trace of run 1, plain method: (x2, x3) per iteration
const double kPlainTrace1[][2] = {
    {2048.526273, 2036.688326}, {1378.380727, 1357.837031}, {914.5756647, 887.7554749},
    {599.7868499, 568.5654338}, {390.7721777, 356.5990844}, {255.3927888, 219.4044444},
    {170.1536777, 133.2761535}, {118.188164, 81.23045449},  {87.62585188, 51.33933793},
    {70.31181026, 35.35034092}, {60.85889363, 27.58761689}, {55.92035933, 24.22121073},
    {53.49709311, 22.89305436}, {52.38726485, 22.39252245}, {51.90534374, 22.20463447},
    {51.70286627, 22.13313077}, {51.61937072, 22.10548244}, {51.58529753, 22.09465371},
    {51.5714752, 22.09037372},  {51.56588734, 22.0886717},  {51.56363304, 22.08799215},
    {51.56272473, 22.08772013}, {51.56235904, 22.08761106}, {51.56221188, 22.08756728},
    {51.56215268, 22.0875497},  {51.56212886, 22.08754263}, {51.56211928, 22.08753979},
};

// reference trace of run 1, accelerated method
const double kAccelTrace1[][2] = {
    {2048.526273, 2036.688326}, {1378.380727, 1357.837031}, {914.5756647, 887.7554749},
    {599.7868499, 568.5654338}, {390.7721777, 356.5990844}, {255.3927888, 219.4044444},
    {170.1536777, 133.2761535}, {118.188164, 81.23045449},  {87.62585188, 51.33933793},
    {70.31181026, 35.35034092}, {60.85889363, 27.58761689}, {51.56100988, 22.08746493},
    {51.56211284, 22.08753788},
};

const Vector kStart = (Vector(2) << 3000.0, 3000.0).finished();

IterationTrace run_plain(const ReferenceRun& r) {
    return iterate(ReceiverSystem(r.dni, r.tair), MethodSpec::quasi_newton(r.alpha), kStart);
}

IterationTrace run_accel(const ReferenceRun& r) {
    return iterate(ReceiverSystem(r.dni, r.tair), MethodSpec::quasi_newton_accelerated(r.alpha, 13.0),
                   kStart);
}

bool check_run(const ReferenceRun& r, std::string& detail) {
    const auto plain = run_plain(r);
    const auto accel = run_accel(r);
    char buf[256];
    if (!plain.converged || !accel.converged) {
        detail = "a run did not converge";
        return false;
    }
    const auto plain_iters = static_cast<int>(plain.iteration_count());
    const auto accel_iters = static_cast<int>(accel.iteration_count());
    std::snprintf(buf, sizeof buf, "plain %d iters -> (%.8f, %.8f); accelerated %d iters -> (%.8f, %.8f)",
                  plain_iters, plain.final_iterate()[0], plain.final_iterate()[1], accel_iters,
                  accel.final_iterate()[0], accel.final_iterate()[1]);
    detail = buf;
    const bool counts_ok = std::abs(plain_iters - r.plain_iters) <= 1 &&
                           std::abs(accel_iters - r.accel_iters) <= 1;
    const bool values_ok = std::abs(plain.final_iterate()[0] - r.plain_x2) <= 1e-5 &&
                           std::abs(plain.final_iterate()[1] - r.plain_x3) <= 1e-5 &&
                           std::abs(accel.final_iterate()[0] - r.accel_x2) <= 1e-5 &&
                           std::abs(accel.final_iterate()[1] - r.accel_x3) <= 1e-5;
    const bool accel_counts_dominate = accel_iters < plain_iters;
    const bool residual_ok = accel.final_residual_norm() <= 1e-8;
    return counts_ok && values_ok && accel_counts_dominate && residual_ok;
}

void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    const bool ok = check_run(kRuns[0], detail);
    const double elapsed = seconds_since(t0);
    report(1, "reference run 1 (plain and accelerated)", ok && elapsed < 1.0,
           detail + ", " + std::to_string(elapsed) + " s");
}

void criterion_2() {
    bool ok = true;
    std::string detail;
    for (int i = 1; i <= 2; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string d;
        const bool run_ok = check_run(kRuns[i], d);
        const double elapsed = seconds_since(t0);
        ok = ok && run_ok && elapsed < 1.0;
        detail += (i > 1 ? " | " : "") + d;
    }
    report(2, "reference runs 2 and 3", ok, detail);
}

void criterion_3() {
    const auto plain = run_plain(kRuns[0]);
    const auto accel = run_accel(kRuns[0]);
    bool ok = plain.iteration_count() == 27 && accel.iteration_count() == 13;
    double worst = 0.0;
    if (ok) {
        for (std::size_t i = 0; i < 27; ++i) {
            for (int k = 0; k < 2; ++k) {
                const double expect = kPlainTrace1[i][k];
                const double got = plain.iterates[i + 1][k];
                worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
            }
        }
        for (std::size_t i = 0; i < 13; ++i) {
            for (int k = 0; k < 2; ++k) {
                const double expect = kAccelTrace1[i][k];
                const double got = accel.iterates[i + 1][k];
                worst = std::max(worst, std::abs(got - expect) / std::abs(expect));
            }
        }
        ok = worst <= 1e-4;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "worst relative row error %.2E", worst);
    report(3, "row-level trace agreement for run 1", ok, buf);
}

void criterion_4() {
    bool ok = true;
    std::string detail;
    for (const auto& r : kRuns) {
        const auto accel = run_accel(r);
        if (!accel.converged) {
            ok = false;
            detail += "no convergence; ";
            continue;
        }
        const ReceiverParams params = build_params(r.dni, r.tair);
        const Vector state = recover(accel.final_iterate(), params);
        const double full_residual = f1(state, params).norm();
        const bool transport_ok = full_residual <= 1e-5;
        const bool values_ok = std::abs(state[0] - r.rec_x1) <= 1e-5 &&
                               std::abs(state[3] - r.rec_x4) <= 1e-5 &&
                               std::abs(state[4] - r.rec_x5) <= 1e-5;
        ok = ok && transport_ok && values_ok;
        char buf[96];
        std::snprintf(buf, sizeof buf, "||f1||=%.2E ", full_residual);
        detail += buf;
    }
    report(4, "recovered full state at the converged solutions", ok, detail);
}

void criterion_5() {
    std::mt19937 rng(20240501);
    std::uniform_int_distribution<int> n_dist(1, 3);
    std::uniform_int_distribution<int> exp_dist(0, 3);
    std::uniform_int_distribution<int> term_count(1, 4);
    std::uniform_real_distribution<double> coef_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> x_dist(0.3, 2.5);
    const SolverConfig cfg{1e-5, 1e-8, 20, 1e-3};

    bool orbits_ok = true;
    bool jacobians_ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = n_dist(rng);
        std::vector<std::vector<PowerTerm>> components(static_cast<std::size_t>(n));
        for (auto& comp : components) {
            const int terms = term_count(rng);
            for (int t = 0; t < terms; ++t) {
                PowerTerm term;
                term.coefficient = coef_dist(rng);
                for (Eigen::Index k = 0; k < n; ++k) {
                    term.exponents.push_back(static_cast<double>(exp_dist(rng)));
                }
                comp.push_back(std::move(term));
            }
        }
        const PowerTermSystem sys(n, components);
        Vector x0(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            x0[k] = x_dist(rng);
        }

        jacobians_ok = jacobians_ok &&
                       max_abs(fractional_jacobian(sys, x0, OrderRule::constant(1.0), 0.0) -
                               sys.jacobian(x0)) <= 1e-12;

        // classical Newton orbit with identical stopping semantics
        const auto trace = iterate(sys, MethodSpec::quasi_newton(1.0), x0, cfg);
        Vector x = x0;
        std::vector<Vector> oracle{x};
        for (int i = 1; i <= cfg.max_iter; ++i) {
            const Vector fx = sys.value(x);
            const auto step = solve_linear(sys.jacobian(x), fx);
            if (!step) break;
            const Vector next = x - *step;
            if (!next.allFinite()) break;
            oracle.push_back(next);
            const double sn = (next - x).norm();
            x = next;
            bool stop = false;
            try {
                stop = sys.value(x).norm() <= cfg.residual_tol;
            } catch (const std::domain_error&) {
                break;
            }
            if (stop || sn <= cfg.step_tol) break;
        }
        orbits_ok = orbits_ok && trace.iterates.size() == oracle.size();
        for (std::size_t i = 0; orbits_ok && i < oracle.size(); ++i) {
            orbits_ok = (trace.iterates[i] - oracle[i]).norm() <= 1e-12;
        }
    }

    // the receiver system through the same comparison
    const ReceiverSystem receiver(900.0, 20.0);
    const auto trace = iterate(receiver, MethodSpec::quasi_newton(1.0), kStart);
    Vector x = kStart;
    std::vector<Vector> oracle{x};
    for (int i = 1; i <= 200; ++i) {
        const Vector fx = receiver.value(x);
        const auto step = solve_linear(receiver.jacobian(x), fx);
        if (!step) break;
        const Vector next = x - *step;
        if (!next.allFinite()) break;
        oracle.push_back(next);
        const double sn = (next - x).norm();
        x = next;
        if (receiver.value(x).norm() <= 1e-8 || sn <= 1e-5) break;
    }
    bool receiver_ok = trace.iterates.size() == oracle.size();
    for (std::size_t i = 0; receiver_ok && i < oracle.size(); ++i) {
        receiver_ok = (trace.iterates[i] - oracle[i]).norm() <= 1e-12;
    }

    report(5, "order-1 reduction to classical Newton", orbits_ok && jacobians_ok && receiver_ok,
           std::string("orbits ") + (orbits_ok ? "ok" : "mismatch") + ", jacobians " +
               (jacobians_ok ? "ok" : "mismatch") + ", receiver " + (receiver_ok ? "ok" : "mismatch"));
}

void criterion_6() {
    const auto accel = run_accel(kRuns[0]);
    double rho = 0.0;
    bool accel_ok = false;
    try {
        rho = estimate_order(accel);
        accel_ok = rho >= 1.5;
    } catch (const InsufficientDataError&) {
    }

    const auto plain = run_plain(kRuns[0]);
    const auto& s = plain.step_norms;
    bool ratios_ok = s.size() >= 6;
    double lo = 1.0, hi = 0.0;
    if (ratios_ok) {
        for (std::size_t i = s.size() - 5; i < s.size(); ++i) {
            const double ratio = s[i] / s[i - 1];
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
            ratios_ok = ratios_ok && ratio >= 0.35 && ratio <= 0.45;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "accelerated order estimate %.2f; plain ratios in [%.4f, %.4f]",
                  rho, lo, hi);
    report(6, "acceleration raises the convergence order", accel_ok && ratios_ok, buf);
}

void criterion_7() {
    const ReceiverSystem system(900.0, 20.0);
    const auto accel_trace = run_accel(kRuns[0]);
    const Vector root = accel_trace.final_iterate();
    const SolverConfig cfg{1e-5, 1e-8, 200, 1e-3};
    const auto accel = classify(system, MethodSpec::quasi_newton_accelerated(0.89825, 13.0), root, cfg);
    const auto plain = classify(system, MethodSpec::quasi_newton(0.89825), root, cfg);
    char buf[128];
    std::snprintf(buf, sizeof buf, "accelerated ||Phi'||=%.2E -> %s; plain ||Phi'||=%.2E -> %s",
                  accel.phi_jacobian_norm, to_string(accel.classification), plain.phi_jacobian_norm,
                  to_string(plain.classification));
    report(7, "order classification at the run-1 root",
           accel.classification == Classification::Ord2 && plain.classification == Classification::Ord1,
           buf);
}

void criterion_8() {
    bool ok = true;
    // factorials
    double factorial = 1.0;
    for (int n = 0; n <= 10; ++n) {
        if (n > 0) factorial *= n;
        ok = ok && std::abs(fracsolve::gamma(n + 1.0) - factorial) / factorial <= 1e-12;
    }
    // reflection identity at 20 random points
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> dist(0.02, 0.98);
    for (int i = 0; i < 20; ++i) {
        const double x = dist(rng);
        const double lhs = fracsolve::gamma(x) * fracsolve::gamma(1.0 - x);
        const double rhs = M_PI / std::sin(M_PI * x);
        ok = ok && std::abs(lhs - rhs) / std::abs(rhs) <= 1e-12;
    }
    // monomial derivatives against independent evaluations
    const double sqrt_pi = std::sqrt(M_PI);
    const auto d1 = rl_deriv_monomial(0.0, 0.5);
    ok = ok && std::abs(d1.coefficient - 1.0 / sqrt_pi) <= 1e-12 && d1.exponent == -0.5;
    const auto d2 = rl_deriv_monomial(1.0, 1.0);
    ok = ok && std::abs(d2.coefficient - 1.0) <= 1e-12 && d2.exponent == 0.0;
    const auto d3 = rl_deriv_monomial(1.0, 0.5);
    ok = ok && std::abs(d3.coefficient - 2.0 / sqrt_pi) <= 1e-12 && d3.exponent == 0.5;
    report(8, "fractional operator kernel accuracy", ok);
}

void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto cubic = PowerTermSystem::univariate({{1.0, 3.0}, {-1.0, 1.0}});
    std::vector<double> alphas;
    for (int k = 0; k < 37; ++k) {
        const double a = 0.1 + 0.05 * k;
        if (std::abs(a - std::round(a)) > 1e-9) {
            alphas.push_back(a);
        }
    }
    const auto sweep = alpha_sweep(cubic, MethodSpec::quasi_newton(0.5), vec1(0.6), alphas);
    const auto roots = distinct_roots(sweep, 1e-3);
    const double elapsed = seconds_since(t0);
    report(9, "order sweep reaches several zeros from one start",
           roots.size() >= 2 && elapsed < 5.0,
           std::to_string(roots.size()) + " distinct roots in " + std::to_string(elapsed) + " s");
}

void criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pairs = sample_uniform_pairs(2410, 12.0, 958.0, 11.0, 45.0, 1);
    SimulationConfig cfg;  // accelerated quasi-Newton, alpha = 0.89825
    const auto result = run_simulation(pairs, cfg);
    const double elapsed = seconds_since(t0);

    std::size_t in_band = 0, converged = 0;
    for (const auto& row : result.rows) {
        if (!row.converged) continue;
        ++converged;
        if (row.state[3] > 0.40 && row.state[3] < 0.44) {
            ++in_band;
        }
    }
    const bool all_converged = converged == result.rows.size();
    const bool band_ok =
        converged > 0 && static_cast<double>(in_band) / static_cast<double>(converged) >= 0.95;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu/%zu converged, %.1f%% of eta_cell in (0.40, 0.44), %.2f s",
                  converged, result.rows.size(),
                  100.0 * static_cast<double>(in_band) / std::max<std::size_t>(converged, 1), elapsed);
    report(10, "efficiency simulation pipeline", all_converged && band_ok && elapsed < 30.0, buf);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
