#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace vqcfd::qperf {

/// One row of a circuit-timing table. runtime_e4s is the tabulated value in
/// units of 1e-4 seconds.
struct TimingRecord {
    int run_no = 0;
    double grid_size = 0.0;
    int n_q = 0;
    int qubits_per_circuit = 0;
    std::string backend;
    long circuit_depth = 0;
    double runtime_e4s = 0.0;
};

/// Expected header: run_no,grid_size,n_q,qubits_per_circuit,backend,
/// circuit_depth,runtime_e4s. Schema violations report the row number; a
/// row-less file yields an empty list with a warning on stderr.
std::vector<TimingRecord> load_records(const std::string& path);
std::vector<TimingRecord> load_records_text(const std::string& text,
                                            const std::string& origin);

enum class FitKind { linear, quadratic, proportional };

struct CircuitTimeFit {
    FitKind kind = FitKind::linear;
    std::vector<double> coefficients;  // ascending powers of n_q
    double r2 = 0.0;
    double adjusted_r2 = 0.0;
    std::vector<std::pair<double, double>> ci95;  // per coefficient, when known
    long n = 0;                                   // points behind the fit
    double unit_scale = 1.0;  // multiplies eval() into seconds
    std::string unit_label = "seconds";

    double eval(double n_q) const;
};

/// Ordinary least squares runtime ~ n_q (intercept + slope), with R^2,
/// adjusted R^2 and 95% confidence intervals. Needs >= 3 records and a
/// non-degenerate regressor.
CircuitTimeFit fit_linear(std::span<const TimingRecord> records);

/// OLS on (1, n_q, n_q^2); needs >= 4 records and a full-rank design.
CircuitTimeFit fit_quadratic(std::span<const TimingRecord> records);

// Published regression coefficients (the defaults the cost model uses).
CircuitTimeFit published_small_fit();
CircuitTimeFit published_large_fit();
CircuitTimeFit ionq_fit();  // proportional, with its 95% CI

/// Trapped-ion small-circuit model: 9.66e-3 * n_q seconds. n_q = 0 warns and
/// returns 0.
double ionq_small_time(int n_q);

struct QuantumCostParams {
    int n_v = 9;
    long n_shot = 10000;
    int n_f = 2;
    int n_ps = 9;
    int n_pl = 45;
    double iter_slope = 125.0;  // mean optimizer iterations = iter_slope * n_q
};

/// The two documented readings of the published fit coefficients: literal
/// seconds, or table units of 1e-4 s. Reports always state which was used.
enum class UnitScale { seconds, table_units };
double unit_scale_factor(UnitScale us);
std::string to_string(UnitScale us);
UnitScale unit_scale_from_string(const std::string& name);

/// Runtime per time step in seconds:
///   n_v * (iter_slope * n_q) * n_f * n_shot * (n_ps * t_ps + n_pl * t_pl)
/// with t_ps/t_pl from the fits, negative fit values clamped to zero with a
/// warning, and the unit preset applied to the fit outputs.
double tq_per_step(int n_q, const QuantumCostParams& params, const CircuitTimeFit& small_fit,
                   const CircuitTimeFit& large_fit, UnitScale us);

/// Full per-variable, per-circuit sum (iterations[v], n_f, shots, t[v][p]);
/// collapses to tq_per_step when every entry sits at its class mean.
double tq_per_step_full(std::span<const double> iterations_per_variable,
                        const std::vector<std::vector<double>>& circuit_seconds, int n_f,
                        long n_shot);

}  // namespace vqcfd::qperf
