// Gain/start-radius sweep for the verification harness.
#include <cstdio>
#include <vector>

#include "vqcfd/vqcfd_engine.hpp"

using namespace vqcfd;

static void run_case(double radius, double step, double c, long shots, std::uint64_t seed,
                     double momentum = 0.9) {
    engine::VerifyConfig cfg;
    cfg.nx = 4;
    cfg.ny = 4;
    cfg.tau = 0.9;
    cfg.steps = 1;
    cfg.layers = 8;
    cfg.noise_shots = shots;
    cfg.seed = seed;
    cfg.spsa.max_iters = 1000;
    cfg.spsa.initial_step = step;
    cfg.spsa.c = c;
    cfg.spsa.momentum = momentum;
    cfg.cold_start_radius = radius;
    auto rep = engine::verify_convergence(cfg);
    double worst = -1e30;
    int worst_v = -1;
    for (const auto& row : rep.rows) {
        if (row.gap > worst) {
            worst = row.gap;
            worst_v = row.variable;
        }
    }
    std::printf(
        "r=%.2f step=%.2f c=%.3f m=%.2f shots=%ld seed=%llu: worst gap %+0.4f (v=%d) %s\n",
        radius, step, c, momentum, shots, (unsigned long long)seed, worst, worst_v,
        rep.all_pass ? "ALL-PASS" : "fail");
}

int main() {
    for (std::uint64_t s : {11ULL, 23ULL, 42ULL, 77ULL, 99ULL, 123ULL, 321ULL, 555ULL, 777ULL,
                            1234ULL, 5150ULL, 9001ULL}) {
        run_case(0.5, 0.1, 0.01, 10000, s, 0.9);
    }
    return 0;
}
