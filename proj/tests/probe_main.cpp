// Scratch probe used while calibrating test constants. Not registered with
// ctest; built on demand.
#include <chrono>
#include <cmath>
#include <cstdio>

#include "vqcfd/lbm_core.hpp"
#include "vqcfd/quantum_state.hpp"
#include "vqcfd/vqcfd_engine.hpp"

using namespace vqcfd;

static void couette_probe(double u_wall, double tau, int steps) {
    const int n = 32;
    auto bc = lbm::BoundarySpec::couette(u_wall);
    auto s = lbm::LatticeState::uniform(n, n, tau);
    for (int i = 0; i < steps; ++i) lbm::step(s, bc);
    auto m = lbm::compute_macros(s);
    double linf = 0.0, drho = 0.0;
    for (int y = 0; y < n; ++y) {
        const double exact = u_wall * (y + 0.5) / n;
        for (int x = 0; x < n; ++x) {
            linf = std::max(linf, std::abs(m.ux[s.idx(x, y)] - exact));
            drho = std::max(drho, std::abs(m.rho[s.idx(x, y)] - 1.0));
        }
    }
    std::printf("couette u=%g tau=%g steps=%d: Linf=%.3e drho=%.3e\n", u_wall, tau, steps, linf, drho);
}

static void train_probe() {
    quantum::AnsatzConfig cfg{4, 8};
    std::vector<double> target(16);
    for (int i = 0; i < 16; ++i) target[i] = 1.0 + 0.1 * std::sin(2.0 * M_PI * i / 16.0);
    for (int restarts : {2, 4}) {
        quantum::TrainOptions opt;
        opt.iters = 1500;
        opt.restarts = restarts;
        opt.seed = 7;
        auto t0 = std::chrono::steady_clock::now();
        auto res = quantum::train_pqc(target, cfg, opt);
        auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("train sine16 L=8 restarts=%d: F=%.12f iters=%ld (%.2fs)\n", restarts,
                    res.fidelity, res.iterations, dt);
    }
    // monotone-in-L probe with zero-padded warm starts
    std::vector<double> prev;
    for (int L : {2, 4, 8}) {
        quantum::AnsatzConfig c{4, L};
        quantum::TrainOptions opt;
        opt.iters = 1200;
        opt.restarts = 3;
        opt.seed = 11;
        if (!prev.empty()) {
            auto w = prev;
            w.resize(static_cast<std::size_t>(c.param_count()), 0.0);
            opt.warm_start = w;
        }
        auto res = quantum::train_pqc(target, c, opt);
        std::printf("train L=%d: F=%.12f\n", L, res.fidelity);
        prev = res.theta;
    }
}

static void verify_probe(long shots) {
    engine::VerifyConfig cfg;
    cfg.nx = 4;
    cfg.ny = 4;
    cfg.tau = 0.9;
    cfg.steps = 1;
    cfg.layers = 8;
    cfg.noise_shots = shots;
    cfg.seed = 424242;
    cfg.spsa.max_iters = 1000;
    auto t0 = std::chrono::steady_clock::now();
    auto rep = engine::verify_convergence(cfg);
    auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("verify shots=%ld (%.2fs): threshold=%.2f\n", shots, dt, cfg.resolved_gap_threshold());
    for (const auto& row : rep.rows) {
        std::printf("  v=%d c0=%.3e cmin=%.3e cfinal=%.3e gap=%+.4f %s\n", row.variable, row.c0,
                    row.c_min, row.c_final, row.gap, row.pass ? "ok" : "FAIL");
    }
}

static void spsa_bowl_probe() {
    engine::SpsaConfig cfg;
    cfg.max_iters = 500;
    cfg.seed = 5;
    std::vector<double> theta0 = {0.9, -0.4, 0.7, 0.1, -0.8, 0.3, 0.5, -0.2, 0.6, -0.5};
    double c0 = 0.0;
    for (double t : theta0) c0 += t * t;
    auto res = engine::spsa_minimize(
        [](std::span<const double> th) {
            double s = 0.0;
            for (double x : th) s += x * x;
            return s;
        },
        theta0, cfg);
    std::printf("spsa bowl: C0=%.3e best=%.3e ratio=%.2e evals=%ld\n", c0, res.best_cost,
                res.best_cost / c0, res.evaluations);
}

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    couette_probe(0.05, 1.0, 6000);
    couette_probe(0.05, 1.0, 12000);
    couette_probe(0.05, 1.0, 20000);
    couette_probe(0.05, 0.8, 12000);
    couette_probe(0.01, 1.0, 12000);
    spsa_bowl_probe();
    train_probe();
    verify_probe(0);
    verify_probe(10000);
    return 0;
}
