#include "vqcfd/cperf_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "vqcfd/io_util.hpp"
#include "vqcfd/kvfile.hpp"

namespace vqcfd::cperf {

namespace {

constexpr double kBytesPerDouble = 8.0;
constexpr int kNv = 9;

}  // namespace

HardwareSpec load_hardware_spec(const std::string& path) {
    return parse_hardware_spec_text(util::read_file(path), path);
}

HardwareSpec parse_hardware_spec_text(const std::string& text, const std::string& origin) {
    const auto kv = util::KvFile::parse_string(text, origin);
    HardwareSpec hw;
    hw.gpu.flop_max = kv.get_double("flop_max", hw.gpu.flop_max);
    hw.gpu.bw_hbm = kv.get_double("bw_hbm", hw.gpu.bw_hbm);
    hw.gpu.hbm_capacity = kv.get_double("hbm_capacity", hw.gpu.hbm_capacity);
    hw.gpu.n_cu = static_cast<int>(kv.get_long("n_cu", hw.gpu.n_cu));
    hw.gpu.n_simd = static_cast<int>(kv.get_long("n_simd", hw.gpu.n_simd));
    hw.gpu.wavefront = static_cast<int>(kv.get_long("wavefront", hw.gpu.wavefront));
    hw.cluster.n_nodes_max = static_cast<int>(kv.get_long("n_nodes_max", hw.cluster.n_nodes_max));
    hw.cluster.gpus_per_node =
        static_cast<int>(kv.get_long("gpus_per_node", hw.cluster.gpus_per_node));
    hw.cluster.bw_gpu = kv.get_double("bw_gpu", hw.cluster.bw_gpu);
    hw.cluster.bw_node = kv.get_double("bw_node", hw.cluster.bw_node);
    for (int k = 0; k < KernelProfile::kKernels; ++k) {
        const std::string key = "bytes_per_thread_k" + std::to_string(k);
        hw.kernels.bytes_per_thread[k] = kv.get_double(key, hw.kernels.bytes_per_thread[k]);
    }
    hw.bytes_per_point = kv.get_double("bytes_per_point", hw.bytes_per_point);
    kv.reject_unknown_keys();

    if (!(hw.gpu.flop_max > 0) || !(hw.gpu.bw_hbm > 0) || !(hw.cluster.bw_gpu > 0) ||
        !(hw.cluster.bw_node > 0) || !(hw.gpu.hbm_capacity > 0)) {
        throw std::invalid_argument(origin + ": rates and capacities must be positive");
    }
    for (double b : hw.kernels.bytes_per_thread) {
        if (b < 0) throw std::invalid_argument(origin + ": bytes_per_thread must be >= 0");
    }
    return hw;
}

DecompositionState make_decomposition(double grid, int n_nodes, const ClusterSpec& cluster,
                                      const GpuSpec& gpu) {
    if (n_nodes < 1 || n_nodes > cluster.n_nodes_max) {
        throw std::invalid_argument("n_nodes " + std::to_string(n_nodes) + " outside [1, " +
                                    std::to_string(cluster.n_nodes_max) + "]");
    }
    DecompositionState dec;
    dec.grid = grid;
    dec.n_nodes = n_nodes;
    dec.n_gpus = static_cast<long>(n_nodes) * cluster.gpus_per_node;
    dec.threads_per_gpu = grid / static_cast<double>(dec.n_gpus);
    if (dec.threads_per_gpu < 1.0) {
        throw std::invalid_argument("grid smaller than GPU count: threads/GPU < 1");
    }
    dec.boundary_points = std::sqrt(dec.threads_per_gpu);
    dec.n_wave = static_cast<long>(
        std::ceil(dec.threads_per_gpu / static_cast<double>(gpu.concurrent_threads())));
    return dec;
}

RooflineMode roofline_mode_from_string(const std::string& name) {
    if (name == "cohort") return RooflineMode::cohort;
    if (name == "literal") return RooflineMode::literal;
    throw std::invalid_argument("unknown roofline mode: " + name);
}

std::string to_string(RooflineMode mode) {
    return mode == RooflineMode::cohort ? "cohort" : "literal";
}

double collision_time(const DecompositionState& dec, const GpuSpec& gpu,
                      const KernelProfile& kernels, RooflineMode mode) {
    const double conc = static_cast<double>(gpu.concurrent_threads());
    // cohort: threads handled per wave; literal: all threads charged per wave.
    const double threads =
        mode == RooflineMode::cohort ? std::min(dec.threads_per_gpu, conc) : dec.threads_per_gpu;

    auto kernel_time = [&](int k) {
        const double mem = kernels.bytes_per_thread[k] * threads / gpu.bw_hbm;
        const double flop = mode == RooflineMode::cohort
                                ? kernels.flops_per_thread(k) * threads / gpu.flop_max
                                : kernels.flops_per_thread(k) / gpu.flop_max;
        return std::max(mem, flop);
    };

    double once = 0.0, per_variable = 0.0;
    for (int k = 0; k <= 2; ++k) once += kernel_time(k);
    for (int k = 3; k <= 4; ++k) per_variable += kernel_time(k);
    return static_cast<double>(dec.n_wave) * (once + kNv * per_variable);
}

double streaming_time(const DecompositionState& dec, const GpuSpec& gpu,
                      const ClusterSpec& cluster) {
    const double hbm = 2.0 * kBytesPerDouble * dec.threads_per_gpu / gpu.bw_hbm;
    const double gpu_to_gpu = 7.0 * kBytesPerDouble * dec.boundary_points / cluster.bw_gpu;
    const double inter_node =
        static_cast<double>(dec.n_nodes) * kBytesPerDouble * dec.boundary_points / cluster.bw_node;
    return (kNv - 1) * std::max({hbm, gpu_to_gpu, inter_node});
}

double step_time(double grid, int n_nodes, const HardwareSpec& hw, RooflineMode mode) {
    if (!(grid > 0)) throw std::invalid_argument("step_time: grid must be positive");
    const auto dec = make_decomposition(grid, n_nodes, hw.cluster, hw.gpu);
    if (dec.threads_per_gpu * hw.bytes_per_point > hw.gpu.hbm_capacity) {
        throw std::runtime_error("HBM capacity exceeded: " +
                                 util::fmt_double(dec.threads_per_gpu * hw.bytes_per_point) +
                                 " bytes/GPU at " + std::to_string(n_nodes) + " nodes");
    }
    return collision_time(dec, hw.gpu, hw.kernels, mode) +
           streaming_time(dec, hw.gpu, hw.cluster);
}

NodeSearchResult optimal_nodes(double grid, const HardwareSpec& hw, int lo, int hi,
                               RooflineMode mode) {
    if (lo < 1 || hi > hw.cluster.n_nodes_max || lo > hi) {
        throw std::invalid_argument("optimal_nodes: range outside [1, n_nodes_max]");
    }
    NodeSearchResult best;
    best.t_step = std::numeric_limits<double>::infinity();
    for (int n = lo; n <= hi; ++n) {
        double t;
        try {
            t = step_time(grid, n, hw, mode);
        } catch (const std::exception&) {
            continue;  // infeasible at this node count
        }
        if (t < best.t_step) {
            best.t_step = t;
            best.n_nodes = n;
        }
    }
    if (best.n_nodes == 0) {
        throw std::runtime_error("optimal_nodes: no feasible node count in range");
    }
    return best;
}

double mlups(double grid, double t_step) {
    if (!(t_step > 0.0)) throw std::invalid_argument("mlups: t_step must be positive");
    return grid / (t_step * 1e6);
}

std::vector<SweepRow> sweep_nodes(double grid, const HardwareSpec& hw, int lo, int hi,
                                  RooflineMode mode) {
    std::vector<SweepRow> rows;
    for (int n = lo; n <= hi; ++n) {
        DecompositionState dec;
        try {
            dec = make_decomposition(grid, n, hw.cluster, hw.gpu);
        } catch (const std::exception&) {
            continue;
        }
        if (dec.threads_per_gpu * hw.bytes_per_point > hw.gpu.hbm_capacity) continue;
        SweepRow row;
        row.grid = grid;
        row.n_nodes = n;
        row.t_collision = collision_time(dec, hw.gpu, hw.kernels, mode);
        row.t_streaming = streaming_time(dec, hw.gpu, hw.cluster);
        row.t_step = row.t_collision + row.t_streaming;
        row.mlups = mlups(grid, row.t_step);
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
    std::string out = "grid,n_nodes,t_collision,t_streaming,t_step,mlups\n";
    for (const auto& r : rows) {
        out += util::fmt_double(r.grid);
        out += ',';
        out += std::to_string(r.n_nodes);
        out += ',';
        out += util::fmt_double(r.t_collision);
        out += ',';
        out += util::fmt_double(r.t_streaming);
        out += ',';
        out += util::fmt_double(r.t_step);
        out += ',';
        out += util::fmt_double(r.mlups);
        out += '\n';
    }
    return out;
}

}  // namespace vqcfd::cperf
