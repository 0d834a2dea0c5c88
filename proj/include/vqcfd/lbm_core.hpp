#pragma once

#include <array>
#include <string>
#include <vector>

namespace vqcfd::lbm {

/// D2Q9 velocity set. Direction order: rest, +x, +y, -x, -y, then the
/// diagonals (+x+y, -x+y, -x-y, +x-y). opposite[] pairs each direction with
/// its reverse for bounce-back.
struct D2Q9 {
    static constexpr int kQ = 9;
    static constexpr std::array<std::array<int, 2>, kQ> e = {{
        {0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1},
        {1, 1}, {-1, 1}, {-1, -1}, {1, -1},
    }};
    static constexpr std::array<double, kQ> w = {
        4.0 / 9.0,
        1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0,
        1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0, 1.0 / 36.0,
    };
    static constexpr std::array<int, kQ> opposite = {0, 3, 4, 1, 2, 7, 8, 5, 6};
    static constexpr double cs2 = 1.0 / 3.0;
};

// Direction indices by compass name, matching D2Q9::e above.
inline constexpr int kC = 0, kE = 1, kN = 2, kW = 3, kS = 4;
inline constexpr int kNE = 5, kNW = 6, kSW = 7, kSE = 8;

enum class EdgeKind { periodic, moving_wall, mass_inflow, pressure_outflow };

struct EdgeSpec {
    EdgeKind kind = EdgeKind::periodic;
    double u_wall = 0.0;   // tangential wall speed (moving_wall)
    double u_in = 0.0;     // inflow speed along the inward normal (mass_inflow)
    double rho_out = 1.0;  // prescribed density (pressure_outflow)
};

/// Which edge is which: north = y = ny-1, south = y = 0, east = x = nx-1,
/// west = x = 0. Periodic edges must come in opposing pairs.
struct BoundarySpec {
    EdgeSpec north, south, east, west;

    bool periodic_x() const { return east.kind == EdgeKind::periodic; }
    bool periodic_y() const { return north.kind == EdgeKind::periodic; }
    void validate() const;

    static BoundarySpec fully_periodic() { return {}; }
    static BoundarySpec couette(double u_top);
    static BoundarySpec cavity(double u_lid);
};

EdgeKind edge_kind_from_string(const std::string& name);
std::string to_string(EdgeKind kind);

/// The nine distribution fields on an nx x ny grid, row-major with x fastest.
struct LatticeState {
    int nx = 0, ny = 0;
    double tau = 1.0;
    std::array<std::vector<double>, D2Q9::kQ> f;

    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * nx + x;
    }
    std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }

    /// Uniform equilibrium at rest: f_v = w_v * rho0.
    static LatticeState uniform(int nx, int ny, double tau, double rho0 = 1.0);
};

struct MacroFields {
    std::vector<double> rho, ux, uy;
};

MacroFields compute_macros(const LatticeState& state);

std::array<double, D2Q9::kQ> equilibrium(double rho, double ux, double uy);

/// BGK relaxation toward local equilibrium; conserves per-cell mass and
/// momentum to round-off. Requires tau > 0.5.
void collide(LatticeState& state);

/// Pull-scheme shift f_v(x) <- f_v(x - e_v) with periodic wrap and half-way
/// bounce-back at moving_wall edges (Ladd momentum correction, local wall
/// density). Pulls that exit through a corner take the y-face rule.
void stream(LatticeState& state, const BoundarySpec& bc);

/// Zou-He wet-node closure for mass_inflow / pressure_outflow edges; no-op
/// for periodic and moving_wall edges. Applied west, east, south, north.
void apply_boundaries(LatticeState& state, const BoundarySpec& bc);

/// One time step: collide, stream, boundary closure.
void step(LatticeState& state, const BoundarySpec& bc);

struct Snapshot {
    long step = 0;
    MacroFields macros;
};

struct SimulationConfig {
    int nx = 0, ny = 0;
    double tau = 1.0;
    BoundarySpec boundary;
    long steps = 0;
    long snapshot_every = 0;  // 0: only initial and final state
    std::string output_path;  // consumed by the CLI, not by run_simulation
};

SimulationConfig parse_simulation_config(const std::string& path);
SimulationConfig parse_simulation_config_text(const std::string& text,
                                              const std::string& origin);

/// Runs from the uniform rest state; snapshots at step 0, every
/// snapshot_every steps, and at the final step. Throws if the state goes
/// non-finite, reporting the step index.
std::vector<Snapshot> run_simulation(const SimulationConfig& config);

std::string snapshots_to_csv(const SimulationConfig& config,
                             const std::vector<Snapshot>& snaps);

}  // namespace vqcfd::lbm
