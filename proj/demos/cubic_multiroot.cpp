// One initial condition, many roots: sweeping the fractional order of the
// quasi-Newton method over a grid steers x^3 - x = 0 from the single start
// x0 = 0.6 into different zeros.

#include <cstdio>

#include "fracsolve/polysys.hpp"
#include "fracsolve/solver.hpp"

using namespace fracsolve;

int main() {
    const PowerTermSystem cubic = PowerTermSystem::univariate({{1.0, 3.0}, {-1.0, 1.0}});
    const Vector x0 = (Vector(1) << 0.6).finished();

    std::vector<double> alphas;
    for (int k = 0; k < 37; ++k) {
        const double a = 0.1 + 0.05 * k;
        if (std::abs(a - std::round(a)) > 1e-9) {
            alphas.push_back(a);
        }
    }

    const auto sweep = alpha_sweep(cubic, MethodSpec::quasi_newton(0.5), x0, alphas);
    std::printf("%8s %10s %6s %14s\n", "alpha", "status", "iters", "x");
    for (const auto& [alpha, trace] : sweep) {
        std::printf("%8.2f %10s %6zu", alpha, trace.converged ? "converged" : "stopped",
                    trace.iteration_count());
        if (trace.converged) {
            std::printf(" %14.8f", trace.final_iterate()[0]);
        }
        std::printf("\n");
    }

    const auto roots = distinct_roots(sweep, 1e-3);
    std::printf("\ndistinct roots from the single start %.1f:", x0[0]);
    for (const auto& r : roots) {
        std::printf(" %.6f", r[0]);
    }
    std::printf("\n");
    return 0;
}
