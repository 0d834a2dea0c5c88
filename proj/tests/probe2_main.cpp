// Expressivity probe for the Ry+CZ-chain template.
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "vqcfd/quantum_state.hpp"

using namespace vqcfd;

static std::vector<double> state_of(const std::vector<double>& theta,
                                    const quantum::AnsatzConfig& cfg) {
    return quantum::decode_field(quantum::build_state(theta, cfg), 1.0);
}

// Numerical Jacobian rank of theta -> s(theta) at a random point.
static void jacobian_rank(int n_q, int L, unsigned seed) {
    quantum::AnsatzConfig cfg{n_q, L};
    const int p = cfg.param_count();
    const int dim = 1 << n_q;
    std::mt19937_64 eng(seed);
    std::vector<double> theta(p);
    for (auto& t : theta) t = (eng() % 10000) / 10000.0 * 6.28 - 3.14;

    // columns of J
    std::vector<std::vector<double>> cols(p, std::vector<double>(dim));
    const double h = 1e-5;
    for (int j = 0; j < p; ++j) {
        auto tp = theta, tm = theta;
        tp[j] += h;
        tm[j] -= h;
        auto sp = state_of(tp, cfg), sm = state_of(tm, cfg);
        for (int i = 0; i < dim; ++i) cols[j][i] = (sp[i] - sm[i]) / (2 * h);
    }
    // Gram-Schmidt rank with tolerance
    int rank = 0;
    std::vector<std::vector<double>> basis;
    for (auto& c : cols) {
        for (const auto& b : basis) {
            double d = 0;
            for (int i = 0; i < dim; ++i) d += b[i] * c[i];
            for (int i = 0; i < dim; ++i) c[i] -= d * b[i];
        }
        double nn = 0;
        for (int i = 0; i < dim; ++i) nn += c[i] * c[i];
        nn = std::sqrt(nn);
        if (nn > 1e-7) {
            for (int i = 0; i < dim; ++i) c[i] /= nn;
            basis.push_back(c);
            ++rank;
        }
    }
    std::printf("n_q=%d L=%d params=%d: jacobian rank = %d (sphere dim = %d)\n", n_q, L, p, rank,
                dim - 1);
}

static void train_hard(int L, int restarts, int iters, unsigned seed) {
    quantum::AnsatzConfig cfg{4, L};
    std::vector<double> target(16);
    for (int i = 0; i < 16; ++i) target[i] = 1.0 + 0.5 * std::sin(2.0 * M_PI * i / 16.0);
    quantum::TrainOptions opt;
    opt.iters = iters;
    opt.restarts = restarts;
    opt.seed = seed;
    auto res = quantum::train_pqc(target, cfg, opt);
    std::printf("sine16 L=%d restarts=%d iters=%d seed=%u: F=%.12f\n", L, restarts, iters, seed,
                res.fidelity);
}

int main() {
    jacobian_rank(4, 2, 1);
    jacobian_rank(4, 4, 2);
    jacobian_rank(4, 8, 3);
    train_hard(8, 12, 3000, 1);
    train_hard(8, 12, 3000, 99);
    train_hard(16, 8, 3000, 1);
    // different smooth targets
    {
        quantum::AnsatzConfig cfg{4, 8};
        std::vector<double> g(16);
        for (int i = 0; i < 16; ++i) g[i] = std::exp(-0.5 * std::pow((i - 7.5) / 3.0, 2));
        quantum::TrainOptions opt;
        opt.iters = 3000;
        opt.restarts = 12;
        opt.seed = 5;
        auto res = quantum::train_pqc(g, cfg, opt);
        std::printf("gauss16 L=8: F=%.12f\n", res.fidelity);
    }
    return 0;
}
