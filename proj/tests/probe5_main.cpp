// Deep-dive on failing (seed, variable) SPSA trajectories.
#include <cmath>
#include <cstdio>
#include <random>
#include <span>
#include <vector>

#include "vqcfd/io_util.hpp"
#include "vqcfd/lbm_core.hpp"
#include "vqcfd/quantum_state.hpp"
#include "vqcfd/vqcfd_engine.hpp"

using namespace vqcfd;

struct Case {
    std::uint64_t seed;
    int v;
};

int main() {
    engine::VerifyConfig vcfg;
    vcfg.nx = 4;
    vcfg.ny = 4;
    vcfg.tau = 0.9;

    for (const Case cs : {Case{2024, 0}, Case{7, 1}, Case{31337, 3}, Case{1, 0}}) {
        const auto initial = engine::make_sheared_state(vcfg);
        quantum::TrainOptions init_train;
        init_train.iters = 800;
        init_train.restarts = 4;
        init_train.seed = cs.seed;
        auto field = engine::encode_initial(initial, 8, init_train);

        lbm::LatticeState stepped = field.decode();
        lbm::step(stepped, lbm::BoundarySpec::fully_periodic());
        const auto& target = stepped.f[cs.v];
        double tnorm2 = 0;
        for (double t : target) tnorm2 += t * t;

        const std::uint64_t base =
            util::splitmix64(cs.seed + 1000003ULL);  // step 1 base seed in verify
        const std::uint64_t var_seed = base ^ static_cast<std::uint64_t>(cs.v);

        // reproduce the capped start
        std::vector<double> theta0 = field.vars[cs.v].theta;
        std::mt19937_64 eng(util::splitmix64(var_seed ^ 0xc01dULL));
        std::vector<double> offset(theta0.size());
        for (auto& o : offset) {
            const double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
            o = (2.0 * u - 1.0) * 0.5;
        }
        std::vector<double> start(theta0.size());
        double shrink = 1.0;
        for (int attempt = 0; attempt < 12; ++attempt) {
            for (std::size_t j = 0; j < theta0.size(); ++j)
                start[j] = theta0[j] + shrink * offset[j];
            if (engine::cost_at_optimal_scale(start, target, field.ansatz, nullptr) <=
                0.6 * tnorm2)
                break;
            shrink *= 0.7;
        }
        const double c0 = engine::cost_at_optimal_scale(start, target, field.ansatz, nullptr);

        for (double momentum : {0.0, 0.9}) {
            engine::SpsaConfig scfg;
            scfg.max_iters = 1000;
            scfg.seed = var_seed;
            scfg.momentum = momentum;
            auto costfn = [&](std::span<const double> th) {
                return engine::cost_at_optimal_scale(th, target, field.ansatz, nullptr);
            };
            auto res = engine::spsa_minimize(costfn, start, scfg);
            const double cfin =
                engine::cost_at_optimal_scale(res.theta, target, field.ansatz, nullptr);
            // distance traveled
            double d2 = 0;
            for (std::size_t j = 0; j < start.size(); ++j) {
                const double d = res.theta[j] - start[j];
                d2 += d * d;
            }
            std::printf(
                "seed=%llu v=%d m=%.1f shrink=%.2f: c0/t2=%.3f cfin/t2=%.5f |move|=%.2f\n",
                (unsigned long long)cs.seed, cs.v, momentum, shrink, c0 / tnorm2, cfin / tnorm2,
                std::sqrt(d2));
            std::printf("   trace/t2:");
            for (int k : {0, 24, 49, 99, 199, 399, 599, 799, 999})
                std::printf(" %.3e", res.trace[k] / tnorm2);
            std::printf("\n");
        }
    }
    return 0;
}
