#include "vqcfd/qperf_model.hpp"

#include <array>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "vqcfd/io_util.hpp"

namespace vqcfd::qperf {

namespace {

const char* kHeader = "run_no,grid_size,n_q,qubits_per_circuit,backend,circuit_depth,runtime_e4s";

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(where + ": not a number: " + s);
    }
    if (pos != s.size()) throw std::runtime_error(where + ": trailing junk in: " + s);
    return v;
}

// Two-sided 95% Student-t quantiles for dof 1..30; 1.96 beyond.
double t95(long dof) {
    static constexpr std::array<double, 30> table = {
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    };
    if (dof < 1) return table[0];
    if (dof <= 30) return table[dof - 1];
    return 1.96;
}

struct OlsSolution {
    std::vector<double> beta;
    double ss_res = 0.0;
    std::vector<double> xtx_inv_diag;
};

// Least squares via Householder QR on the n x k design matrix (k <= 3).
// Independent from the long-double normal-equations oracle used in tests.
OlsSolution solve_ols(std::vector<std::vector<double>> cols, std::vector<double> y) {
    const int k = static_cast<int>(cols.size());
    const std::size_t n = y.size();

    for (int j = 0; j < k; ++j) {
        // Householder vector for column j, rows j..n-1.
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += cols[j][i] * cols[j][i];
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            throw std::runtime_error("least squares: rank-deficient design matrix");
        }
        const double alpha = cols[j][j] >= 0.0 ? -norm : norm;
        std::vector<double> v(n, 0.0);
        v[j] = cols[j][j] - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i] = cols[j][i];
        double vtv = 0.0;
        for (std::size_t i = j; i < n; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;  // column already triangular

        auto reflect = [&](std::vector<double>& target) {
            double dot = 0.0;
            for (std::size_t i = j; i < n; ++i) dot += v[i] * target[i];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = j; i < n; ++i) target[i] -= f * v[i];
        };
        for (int jj = j; jj < k; ++jj) reflect(cols[jj]);
        reflect(y);
    }

    // Back substitution on the k x k triangle.
    OlsSolution sol;
    sol.beta.assign(k, 0.0);
    for (int j = k - 1; j >= 0; --j) {
        double s = y[j];
        for (int jj = j + 1; jj < k; ++jj) s -= cols[jj][j] * sol.beta[jj];
        if (cols[j][j] == 0.0) {
            throw std::runtime_error("least squares: rank-deficient design matrix");
        }
        sol.beta[j] = s / cols[j][j];
    }
    for (std::size_t i = k; i < n; ++i) sol.ss_res += y[i] * y[i];

    // (X^T X)^{-1} = R^{-1} R^{-T}; diagonal via rows of R^{-1}.
    std::vector<std::vector<double>> rinv(k, std::vector<double>(k, 0.0));
    for (int col = 0; col < k; ++col) {
        std::vector<double> e(k, 0.0);
        e[col] = 1.0;
        for (int j = k - 1; j >= 0; --j) {
            double s = e[j];
            for (int jj = j + 1; jj < k; ++jj) s -= cols[jj][j] * rinv[jj][col];
            rinv[j][col] = s / cols[j][j];
        }
    }
    sol.xtx_inv_diag.assign(k, 0.0);
    for (int j = 0; j < k; ++j) {
        for (int m = 0; m < k; ++m) sol.xtx_inv_diag[j] += rinv[j][m] * rinv[j][m];
    }
    return sol;
}

CircuitTimeFit finish_fit(FitKind kind, const OlsSolution& sol,
                          std::span<const TimingRecord> records, int k) {
    const long n = static_cast<long>(records.size());
    double mean = 0.0;
    for (const auto& r : records) mean += r.runtime_e4s;
    mean /= n;
    double ss_tot = 0.0;
    for (const auto& r : records) {
        ss_tot += (r.runtime_e4s - mean) * (r.runtime_e4s - mean);
    }

    CircuitTimeFit fit;
    fit.kind = kind;
    fit.coefficients = sol.beta;
    fit.n = n;
    fit.unit_scale = 1e-4;  // refits regress the tabulated 1e-4 s column
    fit.unit_label = "table-units (1e-4 s)";
    if (ss_tot > 0.0) {
        fit.r2 = 1.0 - sol.ss_res / ss_tot;
        fit.adjusted_r2 = 1.0 - (1.0 - fit.r2) * (n - 1.0) / (n - k);
    } else {
        // Constant response: define both as zero.
        fit.r2 = 0.0;
        fit.adjusted_r2 = 0.0;
    }

    const long dof = n - k;
    const double sigma2 = dof > 0 ? sol.ss_res / dof : 0.0;
    const double t = t95(dof);
    for (int j = 0; j < k; ++j) {
        const double se = std::sqrt(sigma2 * sol.xtx_inv_diag[j]);
        fit.ci95.emplace_back(sol.beta[j] - t * se, sol.beta[j] + t * se);
    }
    return fit;
}

}  // namespace

std::vector<TimingRecord> load_records(const std::string& path) {
    return load_records_text(util::read_file(path), path);
}

std::vector<TimingRecord> load_records_text(const std::string& text,
                                            const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error(origin + ": empty file, expected header " + kHeader);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw std::runtime_error(origin + ": unexpected header: " + line);
    }

    std::vector<TimingRecord> records;
    int row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        const std::string where = origin + ": row " + std::to_string(row);
        const auto fields = split_csv_row(line);
        if (fields.size() != 7) {
            throw std::runtime_error(where + ": expected 7 fields, got " +
                                     std::to_string(fields.size()));
        }
        TimingRecord r;
        r.run_no = static_cast<int>(parse_num(fields[0], where));
        r.grid_size = parse_num(fields[1], where);
        r.n_q = static_cast<int>(parse_num(fields[2], where));
        r.qubits_per_circuit = static_cast<int>(parse_num(fields[3], where));
        r.backend = fields[4];
        r.circuit_depth = static_cast<long>(parse_num(fields[5], where));
        r.runtime_e4s = parse_num(fields[6], where);
        if (!(r.runtime_e4s > 0.0)) {
            throw std::runtime_error(where + ": runtime must be positive");
        }
        if (!(r.grid_size > 0.0) || r.n_q < 1) {
            throw std::runtime_error(where + ": grid_size and n_q must be positive");
        }
        records.push_back(std::move(r));
    }
    if (records.empty()) {
        std::cerr << "warning: " << origin << ": no timing records\n";
    }
    return records;
}

double CircuitTimeFit::eval(double n_q) const {
    switch (kind) {
        case FitKind::proportional:
            return coefficients.at(0) * n_q;
        case FitKind::linear:
            return coefficients.at(0) + coefficients.at(1) * n_q;
        case FitKind::quadratic:
            return coefficients.at(0) + coefficients.at(1) * n_q + coefficients.at(2) * n_q * n_q;
    }
    return 0.0;
}

CircuitTimeFit fit_linear(std::span<const TimingRecord> records) {
    if (records.size() < 3) {
        throw std::invalid_argument("fit_linear: need at least 3 records");
    }
    bool degenerate = true;
    for (const auto& r : records) {
        if (r.n_q != records.front().n_q) degenerate = false;
    }
    if (degenerate) {
        throw std::invalid_argument("fit_linear: regressor n_q is constant");
    }
    std::vector<std::vector<double>> cols(2, std::vector<double>(records.size()));
    std::vector<double> y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        cols[0][i] = 1.0;
        cols[1][i] = records[i].n_q;
        y[i] = records[i].runtime_e4s;
    }
    return finish_fit(FitKind::linear, solve_ols(std::move(cols), std::move(y)), records, 2);
}

CircuitTimeFit fit_quadratic(std::span<const TimingRecord> records) {
    if (records.size() < 4) {
        throw std::invalid_argument("fit_quadratic: need at least 4 records");
    }
    std::vector<std::vector<double>> cols(3, std::vector<double>(records.size()));
    std::vector<double> y(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        cols[0][i] = 1.0;
        cols[1][i] = records[i].n_q;
        cols[2][i] = static_cast<double>(records[i].n_q) * records[i].n_q;
        y[i] = records[i].runtime_e4s;
    }
    return finish_fit(FitKind::quadratic, solve_ols(std::move(cols), std::move(y)), records, 3);
}

CircuitTimeFit published_small_fit() {
    CircuitTimeFit fit;
    fit.kind = FitKind::linear;
    fit.coefficients = {0.0006784, 0.00017502};
    fit.r2 = 0.55;  // as published (the refit reproduces ~0.56 plain R^2)
    fit.adjusted_r2 = 0.55;
    fit.n = 11;
    fit.unit_scale = 1.0;
    fit.unit_label = "preset-dependent (seconds or 1e-4 s)";
    return fit;
}

CircuitTimeFit published_large_fit() {
    CircuitTimeFit fit;
    fit.kind = FitKind::quadratic;
    fit.coefficients = {0.00181582, 0.01748484, 0.01597166};
    fit.r2 = 0.86;
    fit.adjusted_r2 = 0.86;
    fit.n = 9;
    fit.unit_scale = 1.0;
    fit.unit_label = "preset-dependent (seconds or 1e-4 s)";
    return fit;
}

CircuitTimeFit ionq_fit() {
    CircuitTimeFit fit;
    fit.kind = FitKind::proportional;
    fit.coefficients = {9.66e-3};
    fit.ci95 = {{9.36e-3, 9.96e-3}};
    fit.r2 = std::nan("");  // not republished with the coefficient
    fit.adjusted_r2 = std::nan("");
    fit.n = 100;
    fit.unit_scale = 1.0;
    fit.unit_label = "seconds";
    return fit;
}

double ionq_small_time(int n_q) {
    if (n_q < 0) throw std::invalid_argument("ionq_small_time: n_q must be non-negative");
    if (n_q == 0) {
        std::cerr << "warning: ionq_small_time called with n_q = 0\n";
        return 0.0;
    }
    return 9.66e-3 * n_q;
}

double unit_scale_factor(UnitScale us) {
    return us == UnitScale::seconds ? 1.0 : 1e-4;
}

std::string to_string(UnitScale us) {
    return us == UnitScale::seconds ? "seconds" : "table-units";
}

UnitScale unit_scale_from_string(const std::string& name) {
    if (name == "seconds") return UnitScale::seconds;
    if (name == "table-units") return UnitScale::table_units;
    throw std::invalid_argument("unknown unit scale: " + name +
                                " (expected seconds or table-units)");
}

double tq_per_step(int n_q, const QuantumCostParams& params, const CircuitTimeFit& small_fit,
                   const CircuitTimeFit& large_fit, UnitScale us) {
    if (n_q < 1) throw std::invalid_argument("tq_per_step: n_q must be positive");
    double t_ps = small_fit.eval(n_q);
    double t_pl = large_fit.eval(n_q);
    if (t_ps < 0.0) {
        std::cerr << "warning: small-circuit fit negative at n_q = " << n_q << ", clamped to 0\n";
        t_ps = 0.0;
    }
    if (t_pl < 0.0) {
        std::cerr << "warning: large-circuit fit negative at n_q = " << n_q << ", clamped to 0\n";
        t_pl = 0.0;
    }
    const double mean_iters = params.iter_slope * n_q;
    const double inner = params.n_ps * t_ps + params.n_pl * t_pl;
    return params.n_v * mean_iters * params.n_f * static_cast<double>(params.n_shot) * inner *
           unit_scale_factor(us);
}

double tq_per_step_full(std::span<const double> iterations_per_variable,
                        const std::vector<std::vector<double>>& circuit_seconds, int n_f,
                        long n_shot) {
    if (iterations_per_variable.size() != circuit_seconds.size()) {
        throw std::invalid_argument("tq_per_step_full: per-variable sizes disagree");
    }
    double total = 0.0;
    for (std::size_t v = 0; v < circuit_seconds.size(); ++v) {
        double circuits = 0.0;
        for (double t : circuit_seconds[v]) circuits += static_cast<double>(n_shot) * t;
        total += iterations_per_variable[v] * n_f * circuits;
    }
    return total;
}

}  // namespace vqcfd::qperf
