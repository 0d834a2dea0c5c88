#pragma once

#include <string>
#include <vector>

#include "vqcfd/cperf_model.hpp"
#include "vqcfd/qperf_model.hpp"

namespace vqcfd::crossover {

/// Everything the quantum/classical comparison needs, resolved up front.
struct Models {
    qperf::QuantumCostParams qparams;
    qperf::CircuitTimeFit small_fit = qperf::published_small_fit();
    qperf::CircuitTimeFit large_fit = qperf::published_large_fit();
    cperf::HardwareSpec hw;
    cperf::RooflineMode roofline = cperf::RooflineMode::cohort;
    int node_search_lo = 1;
    int node_search_hi = 9408;
};

struct CrossoverRow {
    std::string kind;  // model | ibm_small | ibm_large
    double grid = 0.0;
    int n_q = 0;
    double t_quantum_s = 0.0;
    int n_nodes_opt = 0;
    double t_classical_s = 0.0;
    double ratio = 0.0;
};

/// ceil(log2(grid)), anchored to the tables' grid <-> N_q pairing.
int qubits_for_grid(double grid);

CrossoverRow q_ratio(double grid, const Models& models, qperf::UnitScale us);

/// Model rows for every grid plus one overlay row per timing record. Overlay
/// rows use the record's measured mean circuit time (1e-4 s units are
/// physical) for its own class; the other class comes from the paired table
/// at the same n_q when present, else from the fit under the active preset.
std::vector<CrossoverRow> sweep(const std::vector<double>& grids, const Models& models,
                                qperf::UnitScale us,
                                const std::vector<qperf::TimingRecord>& small_records,
                                const std::vector<qperf::TimingRecord>& large_records);

std::string crossover_to_csv(const std::vector<CrossoverRow>& rows);

/// Default sweep grids: 2^16 to 2^30 stepping by x4.
std::vector<double> default_sweep_grids();

}  // namespace vqcfd::crossover
