#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace vqcfd::quantum {

/// Hardware-efficient real-amplitude ansatz: per layer, one Ry rotation per
/// qubit followed by a nearest-neighbor CZ chain. Parameter count is
/// layers * n_q (the default two layers give 2 N_q parameters).
struct AnsatzConfig {
    int n_q = 0;
    int layers = 2;
    int max_qubits = 14;  // 2^n amplitudes; larger requests fail fast

    int param_count() const { return layers * n_q; }
    std::size_t dim() const { return std::size_t{1} << n_q; }
    void validate() const;
};

struct StateVector {
    int n_q = 0;
    std::vector<std::complex<double>> amplitudes;

    std::size_t dim() const { return amplitudes.size(); }
    double norm() const;
    /// Largest |imag| over all amplitudes (0 for the Ry/CZ ansatz).
    double max_imag() const;
};

/// Applies the layered circuit to |0...0>. Throws on a parameter-count
/// mismatch and on n_q outside [1, max_qubits].
StateVector build_state(std::span<const double> theta, const AnsatzConfig& cfg);

/// scale * amplitudes, as a real vector. The state must be real within 1e-12.
std::vector<double> decode_field(const StateVector& state, double scale);

/// Sum over i of the product of all vectors' i-th entries. Two and N-vector
/// forms; lengths must match.
double multiproduct(std::span<const double> a, std::span<const double> b);
double multiproduct(const std::vector<std::vector<double>>& vectors);

/// Gaussian shot-noise emulation for multi-product estimates. One instance
/// owns one seeded stream; identical seeds reproduce identical noise. The
/// normal draw is a hand-rolled Box-Muller over mt19937_64 so streams do not
/// depend on the standard library's distribution internals.
class ShotModel {
public:
    ShotModel(long n_shots, std::uint64_t seed);

    long n_shots() const { return n_shots_; }
    std::uint64_t seed() const { return seed_; }
    double normal();  // standard normal draw, advances the stream

private:
    long n_shots_;
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

/// exact + eps with eps ~ N(0, (bound/sqrt(n_shots))^2) drawn from the
/// model's stream. Requires |exact| <= bound.
double estimate_multiproduct(double exact, double bound, ShotModel& shots);

struct TrainOptions {
    int iters = 1500;
    int restarts = 4;
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> warm_start;
    // stop a restart when best fidelity improves by less than stall_tol over
    // stall_window iterations
    double stall_tol = 1e-14;
    int stall_window = 100;
};

struct TrainResult {
    std::vector<double> theta;
    double fidelity = 0.0;  // <s(theta), target/|target|>^2
    double overlap = 0.0;   // signed, >= 0 after the final sign fix
    long iterations = 0;    // total gradient iterations across restarts
};

/// Fits the ansatz to target/||target|| by maximizing fidelity with an exact
/// parameter-shift gradient (Adam, multi-start). Deterministic per seed.
TrainResult train_pqc(const std::vector<double>& target, const AnsatzConfig& cfg,
                      const TrainOptions& opt);

/// `index,value` debug serialization used by the CLI.
std::string vector_to_csv(std::span<const double> values);

}  // namespace vqcfd::quantum
