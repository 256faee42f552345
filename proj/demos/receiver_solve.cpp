// Solves the reduced receiver system for one operating point with the plain
// and the accelerated fractional quasi-Newton method, and prints both traces
// side by side with the recovered full state.

#include <cstdio>

#include "fracsolve/receiver.hpp"
#include "fracsolve/solver.hpp"

using namespace fracsolve;

namespace {

void print_trace(const char* title, const ReceiverSystem& system, const IterationTrace& trace) {
    std::printf("%s: %zu iterations (%s)\n", title, trace.iteration_count(),
                to_string(trace.termination_reason));
    std::printf("%4s %14s %14s %12s %12s\n", "i", "T_hot", "T_cold", "step", "residual");
    for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
        std::printf("%4zu %14.8f %14.8f %12.2E %12.2E\n", i, trace.iterates[i][0],
                    trace.iterates[i][1], trace.step_norms[i - 1], trace.residual_norms[i - 1]);
    }
    const Vector state = recover(trace.final_iterate(), system.params());
    std::printf("recovered state: T_cell=%.6f  eta_cell=%.6f  eta_TEG=%.6f\n\n", state[0], state[3],
                state[4]);
}

}  // namespace

int main() {
    const ReceiverSystem system(900.0, 20.0);
    const Vector x0 = (Vector(2) << 3000.0, 3000.0).finished();

    print_trace("fractional quasi-Newton (alpha = 0.89825)", system,
                iterate(system, MethodSpec::quasi_newton(0.89825), x0));
    print_trace("accelerated (delta = 13)", system,
                iterate(system, MethodSpec::quasi_newton_accelerated(0.89825, 13.0), x0));
    return 0;
}
