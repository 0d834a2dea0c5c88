#include "vqcfd/quantum_state.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vqcfd/io_util.hpp"

namespace vqcfd::quantum {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Ry(theta) on qubit q of a real amplitude vector.
void apply_ry(std::vector<double>& a, int q, double theta) {
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const std::size_t bit = std::size_t{1} << q;
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (i & bit) continue;
        const std::size_t j = i | bit;
        const double a0 = a[i], a1 = a[j];
        a[i] = c * a0 - s * a1;
        a[j] = s * a0 + c * a1;
    }
}

// CZ on each nearest-neighbor pair (q, q+1); all gates are diagonal.
void apply_cz_chain(std::vector<double>& a, int n_q) {
    const std::size_t n = a.size();
    for (int q = 0; q + 1 < n_q; ++q) {
        const std::size_t mask = (std::size_t{3} << q);
        for (std::size_t i = 0; i < n; ++i) {
            if ((i & mask) == mask) a[i] = -a[i];
        }
    }
}

std::vector<double> build_state_real(std::span<const double> theta, const AnsatzConfig& cfg) {
    cfg.validate();
    if (static_cast<int>(theta.size()) != cfg.param_count()) {
        throw std::invalid_argument("build_state: expected " +
                                    std::to_string(cfg.param_count()) + " parameters, got " +
                                    std::to_string(theta.size()));
    }
    std::vector<double> a(cfg.dim(), 0.0);
    a[0] = 1.0;
    int p = 0;
    for (int layer = 0; layer < cfg.layers; ++layer) {
        for (int q = 0; q < cfg.n_q; ++q) {
            apply_ry(a, q, theta[p++]);
        }
        apply_cz_chain(a, cfg.n_q);
    }
    return a;
}

double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

void AnsatzConfig::validate() const {
    if (n_q < 1) {
        throw std::invalid_argument("ansatz: n_q must be at least 1");
    }
    if (n_q > max_qubits) {
        throw std::invalid_argument("ansatz: n_q = " + std::to_string(n_q) +
                                    " exceeds the qubit cap " + std::to_string(max_qubits) +
                                    " (raise max_qubits to allocate 2^n_q amplitudes)");
    }
    if (layers < 1) {
        throw std::invalid_argument("ansatz: layers must be at least 1");
    }
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

double StateVector::max_imag() const {
    double m = 0.0;
    for (const auto& a : amplitudes) m = std::max(m, std::abs(a.imag()));
    return m;
}

StateVector build_state(std::span<const double> theta, const AnsatzConfig& cfg) {
    const auto real = build_state_real(theta, cfg);
    StateVector sv;
    sv.n_q = cfg.n_q;
    sv.amplitudes.assign(real.begin(), real.end());
    return sv;
}

std::vector<double> decode_field(const StateVector& state, double scale) {
    if (state.max_imag() > 1e-12) {
        throw std::invalid_argument("decode_field: state has non-real amplitudes");
    }
    std::vector<double> out(state.dim());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = scale * state.amplitudes[i].real();
    }
    return out;
}

double multiproduct(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("multiproduct: length mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double multiproduct(const std::vector<std::vector<double>>& vectors) {
    if (vectors.size() < 2) {
        throw std::invalid_argument("multiproduct: need at least two vectors");
    }
    const std::size_t n = vectors.front().size();
    for (const auto& v : vectors) {
        if (v.size() != n) {
            throw std::invalid_argument("multiproduct: length mismatch");
        }
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = 1.0;
        for (const auto& v : vectors) p *= v[i];
        s += p;
    }
    return s;
}

ShotModel::ShotModel(long n_shots, std::uint64_t seed)
    : n_shots_(n_shots), seed_(seed), eng_(util::splitmix64(seed)) {
    if (n_shots < 1) {
        throw std::invalid_argument("shot model: n_shots must be at least 1");
    }
}

double ShotModel::normal() {
    const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
    const double u2 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double estimate_multiproduct(double exact, double bound, ShotModel& shots) {
    if (!(bound >= 0.0) || std::abs(exact) > bound) {
        throw std::invalid_argument("estimate_multiproduct: requires |exact| <= bound");
    }
    const double sigma = bound / std::sqrt(static_cast<double>(shots.n_shots()));
    return exact + sigma * shots.normal();
}

namespace {

struct OverlapFn {
    const AnsatzConfig& cfg;
    const std::vector<double>& target_hat;

    double operator()(std::span<const double> theta) const {
        const auto s = build_state_real(theta, cfg);
        double g = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) g += s[i] * target_hat[i];
        return g;
    }
};

}  // namespace

TrainResult train_pqc(const std::vector<double>& target, const AnsatzConfig& cfg,
                      const TrainOptions& opt) {
    cfg.validate();
    if (!is_power_of_two(target.size())) {
        throw std::invalid_argument("train_pqc: target length " +
                                    std::to_string(target.size()) +
                                    " is not a power of two");
    }
    if (target.size() != cfg.dim()) {
        throw std::invalid_argument("train_pqc: target length " +
                                    std::to_string(target.size()) + " does not match 2^n_q = " +
                                    std::to_string(cfg.dim()));
    }
    const double nrm = l2_norm(target);
    if (nrm == 0.0) {
        throw std::invalid_argument("train_pqc: target is the zero vector");
    }
    std::vector<double> that(target.size());
    for (std::size_t i = 0; i < that.size(); ++i) that[i] = target[i] / nrm;

    const OverlapFn overlap{cfg, that};
    const int p = cfg.param_count();
    if (opt.warm_start && static_cast<int>(opt.warm_start->size()) != p) {
        throw std::invalid_argument("train_pqc: warm start has wrong parameter count");
    }

    TrainResult best;
    best.fidelity = -1.0;
    long total_iters = 0;

    constexpr double kB1 = 0.9, kB2 = 0.999, kEps = 1e-8, kLr = 0.1;

    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        std::vector<double> theta(p, 0.0);
        if (r == 0 && opt.warm_start) {
            theta = *opt.warm_start;
        } else if (r > 0) {
            std::mt19937_64 eng(util::splitmix64(opt.seed + 0x9e37 * static_cast<std::uint64_t>(r)));
            for (auto& t : theta) {
                const double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
                t = (2.0 * u - 1.0) * std::numbers::pi;
            }
        }

        std::vector<double> m(p, 0.0), v(p, 0.0), grad(p);
        double restart_best = -1.0;
        int stalled = 0;

        for (int it = 1; it <= opt.iters; ++it) {
            ++total_iters;
            const double g = overlap(theta);
            const double fid = g * g;
            if (fid > best.fidelity) {
                best.fidelity = fid;
                best.overlap = g;
                best.theta = theta;
            }
            if (fid > restart_best + opt.stall_tol) {
                restart_best = fid;
                stalled = 0;
            } else if (++stalled >= opt.stall_window) {
                break;
            }

            // dg/dtheta_j for an Ry angle is g(theta + pi e_j) / 2.
            for (int j = 0; j < p; ++j) {
                theta[j] += std::numbers::pi;
                grad[j] = g * overlap(theta);  // dF = 2 g dg = g * g(theta+pi)
                theta[j] -= std::numbers::pi;
            }

            const double lr = it <= (2 * opt.iters) / 5 ? kLr
                              : it <= (4 * opt.iters) / 5 ? kLr / 5.0
                                                          : kLr / 25.0;
            const double b1t = 1.0 - std::pow(kB1, it);
            const double b2t = 1.0 - std::pow(kB2, it);
            for (int j = 0; j < p; ++j) {
                m[j] = kB1 * m[j] + (1.0 - kB1) * grad[j];
                v[j] = kB2 * v[j] + (1.0 - kB2) * grad[j] * grad[j];
                theta[j] += lr * (m[j] / b1t) / (std::sqrt(v[j] / b2t) + kEps);
            }
        }
        const double g_final = overlap(theta);
        if (g_final * g_final > best.fidelity) {
            best.fidelity = g_final * g_final;
            best.overlap = g_final;
            best.theta = theta;
        }
    }

    if (best.overlap < 0.0) {
        // Ry(theta + 2 pi) = -Ry(theta): shifting one angle flips the global
        // sign, making the decoded field match the target's sign.
        best.theta[0] += 2.0 * std::numbers::pi;
        best.overlap = -best.overlap;
    }
    best.iterations = total_iters;
    return best;
}

std::string vector_to_csv(std::span<const double> values) {
    std::string out = "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += util::fmt_double(values[i]);
        out += '\n';
    }
    return out;
}

}  // namespace vqcfd::quantum
