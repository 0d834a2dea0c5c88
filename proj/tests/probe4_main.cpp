// Trace inspection: where does SPSA stall from perturbed starts, and does a
// full-gradient method from the same start do better (local-min test)?
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "vqcfd/io_util.hpp"
#include "vqcfd/lbm_core.hpp"
#include "vqcfd/quantum_state.hpp"
#include "vqcfd/vqcfd_engine.hpp"

using namespace vqcfd;

int main() {
    engine::VerifyConfig vcfg;
    vcfg.nx = 4;
    vcfg.ny = 4;
    vcfg.tau = 0.9;
    const auto initial = engine::make_sheared_state(vcfg);
    quantum::TrainOptions init_train;
    init_train.iters = 800;
    init_train.restarts = 4;
    init_train.seed = 424242;
    auto field = engine::encode_initial(initial, 8, init_train);

    lbm::LatticeState stepped = field.decode();
    lbm::step(stepped, lbm::BoundarySpec::fully_periodic());

    for (double radius : {0.4, 0.6, 0.8, 1.2}) {
        std::printf("=== radius %.2f\n", radius);
        for (int v = 0; v < 9; ++v) {
            const auto& target = stepped.f[v];
            double tnorm2 = 0;
            for (double t : target) tnorm2 += t * t;

            std::vector<double> theta0 = field.vars[v].theta;
            std::mt19937_64 eng(util::splitmix64((424242ULL ^ v) ^ 0xc01dULL));
            for (auto& t : theta0) {
                const double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
                t += (2.0 * u - 1.0) * radius;
            }
            const double c0 =
                engine::cost_at_optimal_scale(theta0, target, field.ansatz, nullptr);

            // oracle min
            quantum::TrainOptions oracle;
            oracle.iters = 3000;
            oracle.restarts = 6;
            oracle.seed = 5;
            oracle.warm_start = field.vars[v].theta;
            const double cmin = engine::exact_min_cost(target, field.ansatz, oracle);

            // Adam from the same start (no restarts) via train_pqc warm start
            quantum::TrainOptions single;
            single.iters = 2000;
            single.restarts = 1;
            single.seed = 1;
            single.warm_start = theta0;
            auto tr = quantum::train_pqc(target, field.ansatz, single);
            const double c_adam = tnorm2 * (1.0 - tr.fidelity);

            // SPSA from the same start
            engine::SpsaConfig scfg;
            scfg.max_iters = 1000;
            scfg.seed = 424242ULL ^ v;
            scfg.initial_step = 0.1;
            auto costfn = [&](std::span<const double> th) {
                return engine::cost_at_optimal_scale(th, target, field.ansatz, nullptr);
            };
            auto res = engine::spsa_minimize(costfn, theta0, scfg);
            const double c_fin =
                engine::cost_at_optimal_scale(res.theta, target, field.ansatz, nullptr);
            const double denom = c0 - cmin;
            std::printf(
                "v=%d c0/t2=%.4f  spsa gap=%.4f  adam gap=%.5f  trace[0,100,300,600,999]=%.3e %.3e "
                "%.3e %.3e %.3e\n",
                v, c0 / tnorm2, (c_fin - cmin) / denom, (c_adam - cmin) / denom,
                res.trace[0], res.trace[99], res.trace[299], res.trace[599], res.trace[998]);
        }
    }
    return 0;
}
