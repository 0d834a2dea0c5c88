#include "vqcfd/vqcfd_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "vqcfd/io_util.hpp"

namespace vqcfd::engine {

namespace {

double l2_norm_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

int log2_exact(std::size_t n) {
    int k = 0;
    while ((std::size_t{1} << k) < n) ++k;
    if ((std::size_t{1} << k) != n) {
        throw std::invalid_argument("grid cell count " + std::to_string(n) +
                                    " is not a power of two");
    }
    return k;
}

constexpr std::uint64_t kNoiseSalt = 0xd1ceb01dULL;
constexpr std::uint64_t kOracleSalt = 0x0eac1e00ULL;

}  // namespace

SpsaResult spsa_minimize(const std::function<double(std::span<const double>)>& costfn,
                         std::vector<double> theta0, const SpsaConfig& cfg) {
    if (cfg.max_iters < 1) throw std::invalid_argument("spsa: max_iters must be >= 1");
    if (!(cfg.c > 0.0)) throw std::invalid_argument("spsa: c must be positive");
    if (!(cfg.gamma > 0.0 && cfg.gamma < cfg.alpha && cfg.alpha <= 1.0)) {
        throw std::invalid_argument("spsa: need 0 < gamma < alpha <= 1");
    }
    const int p = static_cast<int>(theta0.size());
    const double A =
        cfg.stability_offset < 0.0 ? 0.1 * cfg.max_iters : cfg.stability_offset;

    std::mt19937_64 eng(util::splitmix64(cfg.seed));
    std::vector<double> theta = theta0;
    std::vector<double> delta(p), work(p), ghat(p), gbar(p, 0.0);

    SpsaResult res;
    res.theta = theta0;
    res.best_cost = std::numeric_limits<double>::infinity();
    res.trace.reserve(cfg.max_iters);

    double a = cfg.a;
    bool calibrated = cfg.a > 0.0;
    // Updates are clipped per component; a wild gradient estimate must not
    // throw a warm-started iterate out of its basin.
    const double clip = 2.5 * cfg.initial_step;
    // Auto-gain averages this many gradient magnitudes at theta0 before any
    // update; a single rank-1 estimate is too variable to set the gain.
    const int calibration_iters = calibrated ? 0 : std::min(10, std::max(1, cfg.max_iters / 10));
    std::vector<double> cal_mags;
    // Drift guard: a trajectory that leaves the neighborhood of the best
    // point without improving has diverged; pull it back and tame the gain.
    int since_best = 0;
    int steps = 0;  // momentum bias-correction counter

    for (int k = 1; k <= cfg.max_iters; ++k) {
        double ck = cfg.c / std::pow(static_cast<double>(k), cfg.gamma);
        if (!calibrated) {
            // Measure differences over the intended step scale, not the
            // local slope, which vanishes at a warm start.
            ck = std::max(ck, cfg.initial_step);
        }
        for (int j = 0; j < p; ++j) {
            delta[j] = (eng() >> 63) ? 1.0 : -1.0;
        }

        bool improved = false;
        for (int j = 0; j < p; ++j) work[j] = theta[j] + ck * delta[j];
        const double y_plus = costfn(work);
        if (y_plus < res.best_cost) {
            res.best_cost = y_plus;
            res.theta = work;
            improved = true;
        }
        for (int j = 0; j < p; ++j) work[j] = theta[j] - ck * delta[j];
        const double y_minus = costfn(work);
        if (y_minus < res.best_cost) {
            res.best_cost = y_minus;
            res.theta = work;
            improved = true;
        }
        res.evaluations += 2;
        if (!std::isfinite(y_plus) || !std::isfinite(y_minus)) {
            throw std::runtime_error("spsa: non-finite cost at iteration " + std::to_string(k));
        }
        res.trace.push_back(0.5 * (y_plus + y_minus));
        since_best = improved ? 0 : since_best + 1;

        const double diff = (y_plus - y_minus) / (2.0 * ck);
        for (int j = 0; j < p; ++j) ghat[j] = diff * delta[j];

        if (!calibrated) {
            double mag = 0.0;
            for (int j = 0; j < p; ++j) mag += std::abs(ghat[j]);
            cal_mags.push_back(mag / (p > 0 ? p : 1));
            if (static_cast<int>(cal_mags.size()) >= calibration_iters) {
                auto sorted = cal_mags;
                std::sort(sorted.begin(), sorted.end());
                const double median = sorted[sorted.size() / 2];
                if (median > 1e-30) {
                    a = cfg.initial_step * std::pow(A + 1.0, cfg.alpha) / median;
                    calibrated = true;
                }
            }
            continue;  // no update during gain calibration
        }

        const double beta = cfg.momentum;
        steps += 1;
        const double correction = beta > 0.0 ? 1.0 - std::pow(beta, steps) : 1.0;
        for (int j = 0; j < p; ++j) {
            gbar[j] = beta * gbar[j] + (1.0 - beta) * ghat[j];
        }
        const double ak = a / std::pow(k + A, cfg.alpha);
        double drift = 0.0;
        for (int j = 0; j < p; ++j) {
            theta[j] -= std::clamp(ak * gbar[j] / correction, -clip, clip);
            drift = std::max(drift, std::abs(theta[j] - res.theta[j]));
        }
        if (drift > 1.0 && since_best >= 30) {
            // Diverged trajectory: resume from the best point with a tamer
            // gain rather than spending the budget on a random walk.
            theta = res.theta;
            std::fill(gbar.begin(), gbar.end(), 0.0);
            steps = 0;
            a *= 0.5;
            since_best = 0;
        }
    }
    return res;
}

std::vector<double> VariationalField::decode_variable(int v) const {
    const auto& var = vars.at(v);
    if (var.exact) return *var.exact;
    const auto sv = quantum::build_state(var.theta, ansatz);
    return quantum::decode_field(sv, var.scale);
}

lbm::LatticeState VariationalField::decode() const {
    lbm::LatticeState s;
    s.nx = nx;
    s.ny = ny;
    s.tau = tau;
    for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
        s.f[v] = decode_variable(v);
    }
    return s;
}

VariationalField encode_initial(const lbm::LatticeState& state, int layers,
                                const quantum::TrainOptions& train_opt) {
    VariationalField vf;
    vf.nx = state.nx;
    vf.ny = state.ny;
    vf.tau = state.tau;
    vf.ansatz.n_q = log2_exact(state.cells());
    vf.ansatz.layers = layers;
    vf.ansatz.validate();

    for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
        const auto& field = state.f[v];
        const double nrm = std::sqrt(l2_norm_sq(field));
        EncodedField enc;
        if (nrm == 0.0) {
            enc.theta.assign(vf.ansatz.param_count(), 0.0);
            enc.scale = 0.0;
        } else {
            auto opt = train_opt;
            opt.seed = train_opt.seed ^ static_cast<std::uint64_t>(v);
            const auto tr = quantum::train_pqc(field, vf.ansatz, opt);
            enc.theta = tr.theta;
            enc.scale = nrm * tr.overlap;  // least-squares optimal scale
        }
        vf.vars[v] = std::move(enc);
    }
    return vf;
}

std::vector<double> build_target(int v, const lbm::LatticeState& current,
                                 const lbm::BoundarySpec& bc) {
    if (v < 0 || v >= lbm::D2Q9::kQ) {
        throw std::invalid_argument("build_target: variable index out of range");
    }
    lbm::LatticeState next = current;
    lbm::step(next, bc);
    return std::move(next.f[v]);
}

double cost(std::span<const double> theta, double scale, std::span<const double> target,
            const quantum::AnsatzConfig& cfg, quantum::ShotModel* noise) {
    const auto sv = quantum::build_state(theta, cfg);
    const auto amp = quantum::decode_field(sv, 1.0);
    double mp = quantum::multiproduct(amp, target);
    const double tnorm2 = l2_norm_sq(target);
    if (noise) {
        mp = quantum::estimate_multiproduct(mp, std::sqrt(tnorm2), *noise);
    }
    return scale * scale - 2.0 * scale * mp + tnorm2;
}

double cost_at_optimal_scale(std::span<const double> theta, std::span<const double> target,
                             const quantum::AnsatzConfig& cfg, quantum::ShotModel* noise) {
    const auto sv = quantum::build_state(theta, cfg);
    const auto amp = quantum::decode_field(sv, 1.0);
    double mp = quantum::multiproduct(amp, target);
    const double tnorm2 = l2_norm_sq(target);
    if (noise) {
        mp = quantum::estimate_multiproduct(mp, std::sqrt(tnorm2), *noise);
    }
    return tnorm2 - mp * mp;
}

double exact_min_cost(const std::vector<double>& target, const quantum::AnsatzConfig& cfg,
                      const quantum::TrainOptions& oracle) {
    const double tnorm2 = l2_norm_sq(target);
    if (tnorm2 == 0.0) {
        throw std::invalid_argument("exact_min_cost: target is the zero vector");
    }
    const auto tr = quantum::train_pqc(target, cfg, oracle);
    return std::max(0.0, tnorm2 * (1.0 - tr.fidelity));
}

StepResult vqcfd_step(VariationalField& state, const lbm::BoundarySpec& bc,
                      const StepOptions& opt) {
    // All nine targets come from the previous step's decoded fields.
    lbm::LatticeState stepped = state.decode();
    lbm::step(stepped, bc);

    StepResult result;
    for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
        const std::vector<double>& target = stepped.f[v];
        const double tnorm2 = l2_norm_sq(target);
        VariableReport& rep = result.vars[v];
        const std::uint64_t var_seed = opt.spsa.seed ^ static_cast<std::uint64_t>(v);

        if (opt.mode == StepMode::algebraic) {
            EncodedField enc;
            enc.exact = target;
            if (tnorm2 == 0.0) {
                enc.theta.assign(state.ansatz.param_count(), 0.0);
                enc.scale = 0.0;
            } else {
                quantum::TrainOptions fit;
                fit.iters = opt.algebraic_fit_iters;
                fit.restarts = 1;
                fit.seed = var_seed;
                if (static_cast<int>(state.vars[v].theta.size()) == state.ansatz.param_count()) {
                    fit.warm_start = state.vars[v].theta;
                }
                const auto tr = quantum::train_pqc(target, state.ansatz, fit);
                enc.theta = tr.theta;
                enc.scale = std::sqrt(tnorm2) * tr.overlap;
            }
            state.vars[v] = std::move(enc);
            continue;
        }

        // Variational update.
        std::vector<double> theta0 = state.vars[v].theta;
        if (static_cast<int>(theta0.size()) != state.ansatz.param_count()) {
            theta0.assign(state.ansatz.param_count(), 0.0);
        }
        if (opt.cold_start_radius > 0.0 && tnorm2 > 0.0) {
            std::mt19937_64 eng(util::splitmix64(var_seed ^ 0xc01dULL));
            std::vector<double> offset(theta0.size());
            for (auto& o : offset) {
                const double u = (static_cast<double>(eng() >> 11) + 0.5) * 0x1p-53;
                o = (2.0 * u - 1.0) * opt.cold_start_radius;
            }
            std::vector<double> start(theta0.size());
            auto start_cost = [&](double scale_factor) {
                for (std::size_t j = 0; j < theta0.size(); ++j) {
                    start[j] = theta0[j] + scale_factor * offset[j];
                }
                return cost_at_optimal_scale(start, target, state.ansatz, nullptr);
            };
            double scale_factor = 1.0;
            double c_start = start_cost(scale_factor);
            for (int attempt = 0; attempt < 16; ++attempt) {
                if (c_start > opt.cold_start_cost_cap * tnorm2) {
                    scale_factor *= 0.7;
                } else if (c_start < opt.cold_start_cost_floor * tnorm2) {
                    scale_factor *= 1.3;
                } else {
                    break;
                }
                c_start = start_cost(scale_factor);
            }
            if (c_start > opt.cold_start_cost_cap * tnorm2) {
                c_start = start_cost(scale_factor * 0.7);  // end below the plateau
            }
            theta0 = start;
        }

        if (opt.compute_exact_min) {
            quantum::TrainOptions oracle;
            oracle.iters = opt.oracle_iter_factor * opt.spsa.max_iters;
            oracle.restarts = opt.oracle_restarts;
            oracle.seed = var_seed ^ kOracleSalt;
            oracle.warm_start = theta0;
            rep.exact_min = exact_min_cost(target, state.ansatz, oracle);
        }
        rep.c0 = cost_at_optimal_scale(theta0, target, state.ansatz, nullptr);

        std::optional<quantum::ShotModel> noise;
        if (opt.noise_shots > 0) {
            noise.emplace(opt.noise_shots, var_seed ^ kNoiseSalt);
        }
        quantum::ShotModel* noise_ptr = noise ? &*noise : nullptr;
        auto costfn = [&](std::span<const double> th) {
            return cost_at_optimal_scale(th, target, state.ansatz, noise_ptr);
        };

        SpsaConfig scfg = opt.spsa;
        scfg.seed = var_seed;
        if (opt.noise_shots > 0) {
            // Match the perturbation to the shot noise so the two-point
            // difference resolves curvature instead of noise.
            const double c_noise = std::pow(8.0 / static_cast<double>(opt.noise_shots), 0.25);
            scfg.c = std::max(scfg.c, std::min(0.5, c_noise));
        }
        auto sres = spsa_minimize(costfn, theta0, scfg);

        rep.trace = std::move(sres.trace);
        rep.evaluations = sres.evaluations;
        rep.c_final = cost_at_optimal_scale(sres.theta, target, state.ansatz, nullptr);
        const double denom = rep.c0 - rep.exact_min;
        if (denom < 1e-9 * std::max(tnorm2, 1e-30)) {
            rep.gap = 0.0;
            rep.trivially_converged = true;
        } else {
            rep.gap = (rep.c_final - rep.exact_min) / denom;
        }

        // Scale update: the least-squares optimum at the returned theta,
        // estimated through the same channel the optimizer used.
        const auto sv = quantum::build_state(sres.theta, state.ansatz);
        const auto amp = quantum::decode_field(sv, 1.0);
        double mp = quantum::multiproduct(amp, target);
        if (noise_ptr) {
            mp = quantum::estimate_multiproduct(mp, std::sqrt(tnorm2), *noise_ptr);
        }
        state.vars[v] = EncodedField{std::move(sres.theta), mp, std::nullopt};
    }
    return result;
}

lbm::LatticeState make_sheared_state(const VerifyConfig& cfg) {
    lbm::LatticeState s = lbm::LatticeState::uniform(cfg.nx, cfg.ny, cfg.tau);
    for (int y = 0; y < cfg.ny; ++y) {
        for (int x = 0; x < cfg.nx; ++x) {
            const double rho = 1.0 + cfg.ripple * std::sin(2.0 * std::numbers::pi * (x + 0.5) / cfg.nx);
            const double ux = cfg.shear * (2.0 * (y + 0.5) / cfg.ny - 1.0);
            const auto feq = lbm::equilibrium(rho, ux, 0.0);
            for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
                const double phase = 2.0 * std::numbers::pi * ((x + 0.5) / cfg.nx + v / 9.0);
                s.f[v][s.idx(x, y)] = feq[v] * (1.0 + cfg.kick * std::sin(phase));
            }
        }
    }
    return s;
}

VerifyReport verify_convergence(const VerifyConfig& cfg) {
    cfg.boundary.validate();
    const int n_q = log2_exact(static_cast<std::size_t>(cfg.nx) * cfg.ny);
    if (n_q > 6) {
        throw std::invalid_argument("verify_convergence: desk-scale harness requires n_q <= 6");
    }

    VerifyReport report;
    report.config = cfg;

    const lbm::LatticeState initial = make_sheared_state(cfg);
    quantum::TrainOptions init_train;
    init_train.iters = 800;
    init_train.restarts = 4;
    init_train.seed = cfg.seed;
    VariationalField field = encode_initial(initial, cfg.layers, init_train);

    const double threshold = cfg.resolved_gap_threshold();
    report.all_pass = true;

    for (int s = 1; s <= cfg.steps; ++s) {
        StepOptions sopt;
        sopt.mode = StepMode::variational;
        sopt.spsa = cfg.spsa;
        sopt.spsa.seed = util::splitmix64(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(s));
        sopt.noise_shots = cfg.noise_shots;
        sopt.compute_exact_min = true;
        sopt.cold_start_radius = cfg.cold_start_radius;
        StepResult res = vqcfd_step(field, cfg.boundary, sopt);

        for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
            const auto& rep = res.vars[v];
            VerifyRow row;
            row.step = s;
            row.variable = v;
            row.c0 = rep.c0;
            row.c_final = rep.c_final;
            row.c_min = rep.exact_min;
            row.gap = rep.gap;
            row.evaluations = rep.evaluations;
            row.pass = rep.gap <= threshold;
            report.all_pass = report.all_pass && row.pass;
            report.rows.push_back(row);
        }
        report.steps.push_back(std::move(res));
    }
    return report;
}

std::string verify_traces_csv(const VerifyReport& report) {
    std::string out = "step,variable,iteration,cost,exact_min\n";
    for (std::size_t s = 0; s < report.steps.size(); ++s) {
        for (int v = 0; v < lbm::D2Q9::kQ; ++v) {
            const auto& rep = report.steps[s].vars[v];
            for (std::size_t it = 0; it < rep.trace.size(); ++it) {
                out += std::to_string(s + 1);
                out += ',';
                out += std::to_string(v);
                out += ',';
                out += std::to_string(it + 1);
                out += ',';
                out += util::fmt_double(rep.trace[it]);
                out += ',';
                out += util::fmt_double(rep.exact_min);
                out += '\n';
            }
        }
    }
    return out;
}

}  // namespace vqcfd::engine
