#include "vqcfd/crossover.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "vqcfd/io_util.hpp"

namespace vqcfd::crossover {

namespace {

// Measured mean circuit time for class records at n_q, in seconds; the
// tabulated column is 1e-4 s.
std::optional<double> measured_seconds(const std::vector<qperf::TimingRecord>& records,
                                       int n_q) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : records) {
        if (r.n_q == n_q) {
            sum += r.runtime_e4s * 1e-4;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

double tq_from_times(int n_q, const qperf::QuantumCostParams& p, double t_ps, double t_pl) {
    return p.n_v * (p.iter_slope * n_q) * p.n_f * static_cast<double>(p.n_shot) *
           (p.n_ps * t_ps + p.n_pl * t_pl);
}

}  // namespace

int qubits_for_grid(double grid) {
    if (!(grid >= 2.0)) throw std::invalid_argument("qubits_for_grid: grid must be >= 2");
    // The 1e-9 slack keeps exact powers of two (2^16 <-> 16) from rounding up.
    return static_cast<int>(std::ceil(std::log2(grid) - 1e-9));
}

CrossoverRow q_ratio(double grid, const Models& models, qperf::UnitScale us) {
    CrossoverRow row;
    row.kind = "model";
    row.grid = grid;
    row.n_q = qubits_for_grid(grid);
    row.t_quantum_s =
        qperf::tq_per_step(row.n_q, models.qparams, models.small_fit, models.large_fit, us);
    const auto opt = cperf::optimal_nodes(grid, models.hw, models.node_search_lo,
                                          std::min(models.node_search_hi,
                                                   models.hw.cluster.n_nodes_max),
                                          models.roofline);
    row.n_nodes_opt = opt.n_nodes;
    row.t_classical_s = opt.t_step;
    row.ratio = row.t_quantum_s / row.t_classical_s;
    return row;
}

std::vector<CrossoverRow> sweep(const std::vector<double>& grids, const Models& models,
                                qperf::UnitScale us,
                                const std::vector<qperf::TimingRecord>& small_records,
                                const std::vector<qperf::TimingRecord>& large_records) {
    std::vector<CrossoverRow> rows;
    for (double g : grids) {
        rows.push_back(q_ratio(g, models, us));
    }

    const double factor = qperf::unit_scale_factor(us);
    auto overlay = [&](const qperf::TimingRecord& rec, bool small_class) {
        CrossoverRow row;
        row.kind = small_class ? "ibm_small" : "ibm_large";
        row.grid = rec.grid_size;
        row.n_q = rec.n_q;
        const double own = rec.runtime_e4s * 1e-4;
        double t_ps, t_pl;
        if (small_class) {
            t_ps = own;
            t_pl = measured_seconds(large_records, rec.n_q)
                       .value_or(std::max(0.0, models.large_fit.eval(rec.n_q)) * factor);
        } else {
            t_pl = own;
            t_ps = measured_seconds(small_records, rec.n_q)
                       .value_or(std::max(0.0, models.small_fit.eval(rec.n_q)) * factor);
        }
        row.t_quantum_s = tq_from_times(rec.n_q, models.qparams, t_ps, t_pl);
        const auto opt = cperf::optimal_nodes(rec.grid_size, models.hw, models.node_search_lo,
                                              std::min(models.node_search_hi,
                                                       models.hw.cluster.n_nodes_max),
                                              models.roofline);
        row.n_nodes_opt = opt.n_nodes;
        row.t_classical_s = opt.t_step;
        row.ratio = row.t_quantum_s / row.t_classical_s;
        rows.push_back(row);
    };
    for (const auto& rec : small_records) overlay(rec, true);
    for (const auto& rec : large_records) overlay(rec, false);
    return rows;
}

std::string crossover_to_csv(const std::vector<CrossoverRow>& rows) {
    std::string out = "kind,grid,n_q,t_quantum_s,n_nodes_opt,t_classical_s,ratio\n";
    for (const auto& r : rows) {
        out += r.kind;
        out += ',';
        out += util::fmt_double(r.grid);
        out += ',';
        out += std::to_string(r.n_q);
        out += ',';
        out += util::fmt_double(r.t_quantum_s);
        out += ',';
        out += std::to_string(r.n_nodes_opt);
        out += ',';
        out += util::fmt_double(r.t_classical_s);
        out += ',';
        out += util::fmt_double(r.ratio);
        out += '\n';
    }
    return out;
}

std::vector<double> default_sweep_grids() {
    std::vector<double> grids;
    for (int k = 16; k <= 30; k += 2) {
        grids.push_back(std::ldexp(1.0, k));
    }
    return grids;
}

}  // namespace vqcfd::crossover
