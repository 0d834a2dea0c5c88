#pragma once

#include <array>
#include <string>
#include <vector>

namespace vqcfd::cperf {

/// Per-GPU constants (MI250X-class defaults).
struct GpuSpec {
    double flop_max = 23.9e12;     // FLOP/s
    double bw_hbm = 1.6e12;        // bytes/s
    double hbm_capacity = 64e9;    // bytes
    int n_cu = 110;
    int n_simd = 4;
    int wavefront = 64;

    long concurrent_threads() const {
        return static_cast<long>(wavefront) * n_simd * n_cu;  // 28160 by default
    }
};

struct ClusterSpec {
    int n_nodes_max = 9408;
    int gpus_per_node = 8;
    double bw_gpu = 200e9;  // GPU-to-GPU bytes/s
    double bw_node = 3e9;   // inter-node bytes/s (low end of the reported range)

    long total_gpus() const { return static_cast<long>(n_nodes_max) * gpus_per_node; }
};

/// Five collision kernels. Only the arithmetic-intensity ratios are pinned;
/// byte counts are configurable and FLOPs follow as ai * bytes.
struct KernelProfile {
    static constexpr int kKernels = 5;
    static constexpr std::array<double, kKernels> ai = {0.1, 0.193, 0.193, 0.425, 0.0};
    std::array<double, kKernels> bytes_per_thread = {80.0, 88.0, 88.0, 40.0, 16.0};

    double flops_per_thread(int k) const { return ai[k] * bytes_per_thread[k]; }
};

struct HardwareSpec {
    GpuSpec gpu;
    ClusterSpec cluster;
    KernelProfile kernels;
    double bytes_per_point = 144.0;  // resident bytes per grid point (capacity check)
};

HardwareSpec load_hardware_spec(const std::string& path);
HardwareSpec parse_hardware_spec_text(const std::string& text, const std::string& origin);

/// Grid decomposition over n_nodes * gpus_per_node GPUs; one thread per grid
/// point, boundary points sqrt(threads_per_gpu) for the 2D halo.
struct DecompositionState {
    double grid = 0.0;
    int n_nodes = 0;
    long n_gpus = 0;
    double threads_per_gpu = 0.0;
    double boundary_points = 0.0;
    long n_wave = 0;  // ceil(threads_per_gpu / concurrent threads)
};

DecompositionState make_decomposition(double grid, int n_nodes, const ClusterSpec& cluster,
                                      const GpuSpec& gpu);

/// cohort: each of the n_wave batches runs min(threads_per_gpu, concurrent)
/// threads through the roofline, so the memory-bound limit reduces to total
/// bytes / bandwidth. literal: the formula exactly as printed, where every
/// wave is charged for all threads on the GPU.
enum class RooflineMode { cohort, literal };
RooflineMode roofline_mode_from_string(const std::string& name);
std::string to_string(RooflineMode mode);

/// Roofline collision time: kernels 0-2 run once, kernels 3-4 per variable.
double collision_time(const DecompositionState& dec, const GpuSpec& gpu,
                      const KernelProfile& kernels, RooflineMode mode = RooflineMode::cohort);

/// (N_v - 1) * max(HBM traffic, GPU-GPU halo, inter-node halo), zero latency,
/// perfectly overlapped.
double streaming_time(const DecompositionState& dec, const GpuSpec& gpu,
                      const ClusterSpec& cluster);

/// collision + streaming; throws when per-GPU resident data exceeds HBM.
double step_time(double grid, int n_nodes, const HardwareSpec& hw,
                 RooflineMode mode = RooflineMode::cohort);

struct NodeSearchResult {
    int n_nodes = 0;
    double t_step = 0.0;
};

/// Exhaustive integer argmin of step_time over [lo, hi]; ties take the
/// smaller node count; capacity-infeasible counts are skipped.
NodeSearchResult optimal_nodes(double grid, const HardwareSpec& hw, int lo, int hi,
                               RooflineMode mode = RooflineMode::cohort);

/// Million lattice updates per second.
double mlups(double grid, double t_step);

struct SweepRow {
    double grid = 0.0;
    int n_nodes = 0;
    double t_collision = 0.0;
    double t_streaming = 0.0;
    double t_step = 0.0;
    double mlups = 0.0;
};

std::vector<SweepRow> sweep_nodes(double grid, const HardwareSpec& hw, int lo, int hi,
                                  RooflineMode mode = RooflineMode::cohort);

std::string sweep_to_csv(const std::vector<SweepRow>& rows);

}  // namespace vqcfd::cperf
