#include "vqcfd/lbm_core.hpp"

#include <cmath>
#include <stdexcept>

#include "vqcfd/io_util.hpp"
#include "vqcfd/kvfile.hpp"

namespace vqcfd::lbm {

namespace {

bool all_finite(const LatticeState& s) {
    for (int v = 0; v < D2Q9::kQ; ++v) {
        for (double x : s.f[v]) {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

}  // namespace

void BoundarySpec::validate() const {
    if ((east.kind == EdgeKind::periodic) != (west.kind == EdgeKind::periodic)) {
        throw std::invalid_argument("boundary: east/west must both be periodic or neither");
    }
    if ((north.kind == EdgeKind::periodic) != (south.kind == EdgeKind::periodic)) {
        throw std::invalid_argument("boundary: north/south must both be periodic or neither");
    }
}

BoundarySpec BoundarySpec::couette(double u_top) {
    BoundarySpec bc;
    bc.north = {EdgeKind::moving_wall, u_top, 0.0, 1.0};
    bc.south = {EdgeKind::moving_wall, 0.0, 0.0, 1.0};
    return bc;
}

BoundarySpec BoundarySpec::cavity(double u_lid) {
    BoundarySpec bc;
    bc.north = {EdgeKind::moving_wall, u_lid, 0.0, 1.0};
    bc.south = {EdgeKind::moving_wall, 0.0, 0.0, 1.0};
    bc.east = {EdgeKind::moving_wall, 0.0, 0.0, 1.0};
    bc.west = {EdgeKind::moving_wall, 0.0, 0.0, 1.0};
    return bc;
}

EdgeKind edge_kind_from_string(const std::string& name) {
    if (name == "periodic") return EdgeKind::periodic;
    if (name == "moving_wall") return EdgeKind::moving_wall;
    if (name == "mass_inflow") return EdgeKind::mass_inflow;
    if (name == "pressure_outflow") return EdgeKind::pressure_outflow;
    throw std::invalid_argument("unknown boundary kind: " + name);
}

std::string to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::periodic: return "periodic";
        case EdgeKind::moving_wall: return "moving_wall";
        case EdgeKind::mass_inflow: return "mass_inflow";
        case EdgeKind::pressure_outflow: return "pressure_outflow";
    }
    return "?";
}

LatticeState LatticeState::uniform(int nx, int ny, double tau, double rho0) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("lattice must be at least 2x2");
    }
    LatticeState s;
    s.nx = nx;
    s.ny = ny;
    s.tau = tau;
    for (int v = 0; v < D2Q9::kQ; ++v) {
        s.f[v].assign(s.cells(), D2Q9::w[v] * rho0);
    }
    return s;
}

MacroFields compute_macros(const LatticeState& state) {
    MacroFields m;
    const std::size_t n = state.cells();
    m.rho.resize(n);
    m.ux.resize(n);
    m.uy.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double rho = 0.0, jx = 0.0, jy = 0.0;
        for (int v = 0; v < D2Q9::kQ; ++v) {
            const double fv = state.f[v][i];
            rho += fv;
            jx += fv * D2Q9::e[v][0];
            jy += fv * D2Q9::e[v][1];
        }
        if (!(rho > 0.0)) {
            const int x = static_cast<int>(i) % state.nx;
            const int y = static_cast<int>(i) / state.nx;
            throw std::runtime_error("degenerate state: non-positive density " +
                                     util::fmt_double(rho) + " at cell (" +
                                     std::to_string(x) + "," + std::to_string(y) + ")");
        }
        m.rho[i] = rho;
        m.ux[i] = jx / rho;
        m.uy[i] = jy / rho;
    }
    return m;
}

std::array<double, D2Q9::kQ> equilibrium(double rho, double ux, double uy) {
    if (!(rho > 0.0)) {
        throw std::invalid_argument("equilibrium: rho must be positive");
    }
    const double usq = ux * ux + uy * uy;
    std::array<double, D2Q9::kQ> feq;
    for (int v = 0; v < D2Q9::kQ; ++v) {
        const double eu = D2Q9::e[v][0] * ux + D2Q9::e[v][1] * uy;
        // w rho (1 + e.u/cs2 + (e.u)^2/(2 cs4) - u.u/(2 cs2)) with cs2 = 1/3
        feq[v] = D2Q9::w[v] * rho * (1.0 + 3.0 * eu + 4.5 * eu * eu - 1.5 * usq);
    }
    return feq;
}

void collide(LatticeState& state) {
    if (!(state.tau > 0.5)) {
        throw std::invalid_argument("collide: tau must exceed 0.5");
    }
    const double omega = 1.0 / state.tau;
    const std::size_t n = state.cells();
    for (std::size_t i = 0; i < n; ++i) {
        double rho = 0.0, jx = 0.0, jy = 0.0;
        for (int v = 0; v < D2Q9::kQ; ++v) {
            const double fv = state.f[v][i];
            rho += fv;
            jx += fv * D2Q9::e[v][0];
            jy += fv * D2Q9::e[v][1];
        }
        if (!(rho > 0.0)) {
            const int x = static_cast<int>(i) % state.nx;
            const int y = static_cast<int>(i) / state.nx;
            throw std::runtime_error("degenerate state: non-positive density at cell (" +
                                     std::to_string(x) + "," + std::to_string(y) + ")");
        }
        const auto feq = equilibrium(rho, jx / rho, jy / rho);
        for (int v = 0; v < D2Q9::kQ; ++v) {
            state.f[v][i] -= omega * (state.f[v][i] - feq[v]);
        }
    }
}

namespace {

// Tangential wall velocity of an edge as a 2-vector.
void edge_wall_velocity(const EdgeSpec& edge, bool horizontal, double out[2]) {
    if (horizontal) {  // north or south: wall moves along x
        out[0] = edge.u_wall;
        out[1] = 0.0;
    } else {  // east or west: wall moves along y
        out[0] = 0.0;
        out[1] = edge.u_wall;
    }
}

}  // namespace

void stream(LatticeState& state, const BoundarySpec& bc) {
    bc.validate();
    const int nx = state.nx, ny = state.ny;
    const bool px = bc.periodic_x(), py = bc.periodic_y();

    std::array<std::vector<double>, D2Q9::kQ> fnew;
    fnew[0] = state.f[0];  // rest population does not move

    // Local density, needed only for the moving-wall momentum correction.
    auto cell_rho = [&](std::size_t i) {
        double rho = 0.0;
        for (int v = 0; v < D2Q9::kQ; ++v) rho += state.f[v][i];
        return rho;
    };

    for (int v = 1; v < D2Q9::kQ; ++v) {
        fnew[v].resize(state.cells());
        const int ex = D2Q9::e[v][0], ey = D2Q9::e[v][1];
        const int ov = D2Q9::opposite[v];
        for (int y = 0; y < ny; ++y) {
            for (int x = 0; x < nx; ++x) {
                const std::size_t i = state.idx(x, y);
                int sx = x - ex, sy = y - ey;
                bool x_out = sx < 0 || sx >= nx;
                bool y_out = sy < 0 || sy >= ny;
                if (x_out && px) {
                    sx = (sx + nx) % nx;
                    x_out = false;
                }
                if (y_out && py) {
                    sy = (sy + ny) % ny;
                    y_out = false;
                }
                if (!x_out && !y_out) {
                    fnew[v][i] = state.f[v][state.idx(sx, sy)];
                    continue;
                }
                // Source lies beyond a wall face: half-way bounce-back. A pull
                // that exits through a corner is attributed to the y face.
                const EdgeSpec& edge = y_out ? (sy < 0 ? bc.south : bc.north)
                                             : (sx < 0 ? bc.west : bc.east);
                const bool horizontal = y_out;
                double corr = 0.0;
                if (edge.kind == EdgeKind::moving_wall && edge.u_wall != 0.0) {
                    double uw[2];
                    edge_wall_velocity(edge, horizontal, uw);
                    const double eu = ex * uw[0] + ey * uw[1];
                    // 2 w_v rho_w (e_v . u_w) / cs2, cs2 = 1/3
                    corr = 6.0 * D2Q9::w[v] * cell_rho(i) * eu;
                }
                fnew[v][i] = state.f[ov][i] + corr;
            }
        }
    }
    state.f = std::move(fnew);
}

namespace {

// Zou-He reconstruction of the three unknown populations on each edge, given
// the wall-node (rho, ux, uy). The normal non-equilibrium bounces back; the
// diagonal terms carry the transverse momentum correction.
void reconstruct_west(std::array<double, 9>& f, double rho, double ux, double uy) {
    f[kE] = f[kW] + (2.0 / 3.0) * rho * ux;
    f[kNE] = f[kSW] - 0.5 * (f[kN] - f[kS]) + rho * ux / 6.0 + 0.5 * rho * uy;
    f[kSE] = f[kNW] + 0.5 * (f[kN] - f[kS]) + rho * ux / 6.0 - 0.5 * rho * uy;
}

void reconstruct_east(std::array<double, 9>& f, double rho, double ux, double uy) {
    f[kW] = f[kE] - (2.0 / 3.0) * rho * ux;
    f[kNW] = f[kSE] - 0.5 * (f[kN] - f[kS]) - rho * ux / 6.0 + 0.5 * rho * uy;
    f[kSW] = f[kNE] + 0.5 * (f[kN] - f[kS]) - rho * ux / 6.0 - 0.5 * rho * uy;
}

void reconstruct_south(std::array<double, 9>& f, double rho, double ux, double uy) {
    f[kN] = f[kS] + (2.0 / 3.0) * rho * uy;
    f[kNE] = f[kSW] - 0.5 * (f[kE] - f[kW]) + 0.5 * rho * ux + rho * uy / 6.0;
    f[kNW] = f[kSE] + 0.5 * (f[kE] - f[kW]) - 0.5 * rho * ux + rho * uy / 6.0;
}

void reconstruct_north(std::array<double, 9>& f, double rho, double ux, double uy) {
    f[kS] = f[kN] - (2.0 / 3.0) * rho * uy;
    f[kSW] = f[kNE] + 0.5 * (f[kE] - f[kW]) - 0.5 * rho * ux - rho * uy / 6.0;
    f[kSE] = f[kNW] - 0.5 * (f[kE] - f[kW]) + 0.5 * rho * ux - rho * uy / 6.0;
}

enum class Side { west, east, south, north };

void close_edge(LatticeState& s, Side side, const EdgeSpec& edge) {
    if (edge.kind != EdgeKind::mass_inflow && edge.kind != EdgeKind::pressure_outflow) {
        return;
    }
    const int nx = s.nx, ny = s.ny;
    const bool vertical = (side == Side::west || side == Side::east);
    const int count = vertical ? ny : nx;
    for (int t = 0; t < count; ++t) {
        int x = 0, y = 0;
        switch (side) {
            case Side::west: x = 0; y = t; break;
            case Side::east: x = nx - 1; y = t; break;
            case Side::south: x = t; y = 0; break;
            case Side::north: x = t; y = ny - 1; break;
        }
        const std::size_t i = s.idx(x, y);
        std::array<double, 9> f;
        for (int v = 0; v < 9; ++v) f[v] = s.f[v][i];

        double rho = 0.0, ux = 0.0, uy = 0.0;
        switch (side) {
            case Side::west: {
                const double known = f[kC] + f[kN] + f[kS] + 2.0 * (f[kW] + f[kNW] + f[kSW]);
                if (edge.kind == EdgeKind::mass_inflow) {
                    ux = edge.u_in;
                    rho = known / (1.0 - ux);
                } else {
                    rho = edge.rho_out;
                    ux = 1.0 - known / rho;
                }
                reconstruct_west(f, rho, ux, uy);
                break;
            }
            case Side::east: {
                const double known = f[kC] + f[kN] + f[kS] + 2.0 * (f[kE] + f[kNE] + f[kSE]);
                if (edge.kind == EdgeKind::mass_inflow) {
                    ux = -edge.u_in;
                    rho = known / (1.0 + ux);
                } else {
                    rho = edge.rho_out;
                    ux = known / rho - 1.0;
                }
                reconstruct_east(f, rho, ux, uy);
                break;
            }
            case Side::south: {
                const double known = f[kC] + f[kE] + f[kW] + 2.0 * (f[kS] + f[kSW] + f[kSE]);
                if (edge.kind == EdgeKind::mass_inflow) {
                    uy = edge.u_in;
                    rho = known / (1.0 - uy);
                } else {
                    rho = edge.rho_out;
                    uy = 1.0 - known / rho;
                }
                reconstruct_south(f, rho, ux, uy);
                break;
            }
            case Side::north: {
                const double known = f[kC] + f[kE] + f[kW] + 2.0 * (f[kN] + f[kNE] + f[kNW]);
                if (edge.kind == EdgeKind::mass_inflow) {
                    uy = -edge.u_in;
                    rho = known / (1.0 + uy);
                } else {
                    rho = edge.rho_out;
                    uy = known / rho - 1.0;
                }
                reconstruct_north(f, rho, ux, uy);
                break;
            }
        }
        for (int v = 0; v < 9; ++v) s.f[v][i] = f[v];
    }
}

}  // namespace

void apply_boundaries(LatticeState& state, const BoundarySpec& bc) {
    // Corner cells shared with a wall edge were already filled by bounce-back
    // in stream(); the edge formulas below overwrite their open-edge unknowns.
    close_edge(state, Side::west, bc.west);
    close_edge(state, Side::east, bc.east);
    close_edge(state, Side::south, bc.south);
    close_edge(state, Side::north, bc.north);
}

void step(LatticeState& state, const BoundarySpec& bc) {
    collide(state);
    stream(state, bc);
    apply_boundaries(state, bc);
}

SimulationConfig parse_simulation_config(const std::string& path) {
    return parse_simulation_config_text(util::read_file(path), path);
}

SimulationConfig parse_simulation_config_text(const std::string& text,
                                              const std::string& origin) {
    const auto kv = util::KvFile::parse_string(text, origin);
    SimulationConfig cfg;
    cfg.nx = static_cast<int>(kv.get_long("nx"));
    cfg.ny = static_cast<int>(kv.get_long("ny"));
    cfg.tau = kv.get_double("tau");
    cfg.steps = kv.get_long("steps");
    cfg.snapshot_every = kv.get_long("snapshot_every", 0);
    cfg.output_path = kv.get_string("output_path", "snapshots.csv");

    const double u_wall = kv.get_double("u_wall", 0.0);
    const double u_in = kv.get_double("u_in", 0.0);
    const double rho_out = kv.get_double("rho_out", 1.0);

    auto edge = [&](const std::string& name) {
        EdgeSpec e;
        e.kind = edge_kind_from_string(kv.get_string("boundary." + name, "periodic"));
        e.u_wall = kv.get_double("u_wall." + name, u_wall);
        e.u_in = kv.get_double("u_in." + name, u_in);
        e.rho_out = kv.get_double("rho_out." + name, rho_out);
        return e;
    };
    cfg.boundary.north = edge("north");
    cfg.boundary.south = edge("south");
    cfg.boundary.east = edge("east");
    cfg.boundary.west = edge("west");
    kv.reject_unknown_keys();

    if (cfg.nx < 2 || cfg.ny < 2) throw std::invalid_argument(origin + ": nx, ny must be >= 2");
    if (!(cfg.tau > 0.5)) throw std::invalid_argument(origin + ": tau must exceed 0.5");
    if (cfg.steps < 0) throw std::invalid_argument(origin + ": steps must be >= 0");
    if (cfg.snapshot_every < 0) throw std::invalid_argument(origin + ": snapshot_every must be >= 0");
    cfg.boundary.validate();
    return cfg;
}

std::vector<Snapshot> run_simulation(const SimulationConfig& config) {
    LatticeState state = LatticeState::uniform(config.nx, config.ny, config.tau);
    std::vector<Snapshot> snaps;
    snaps.push_back({0, compute_macros(state)});

    for (long s = 1; s <= config.steps; ++s) {
        step(state, config.boundary);
        const bool want_snap =
            (config.snapshot_every > 0 && s % config.snapshot_every == 0) || s == config.steps;
        if (want_snap || s % 64 == 0) {
            if (!all_finite(state)) {
                throw std::runtime_error("simulation unstable: non-finite state at step " +
                                         std::to_string(s));
            }
        }
        if (want_snap) {
            snaps.push_back({s, compute_macros(state)});
        }
    }
    return snaps;
}

std::string snapshots_to_csv(const SimulationConfig& config,
                             const std::vector<Snapshot>& snaps) {
    std::string out = "step,x,y,rho,ux,uy\n";
    for (const auto& snap : snaps) {
        for (int y = 0; y < config.ny; ++y) {
            for (int x = 0; x < config.nx; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * config.nx + x;
                out += std::to_string(snap.step);
                out += ',';
                out += std::to_string(x);
                out += ',';
                out += std::to_string(y);
                out += ',';
                out += util::fmt_double(snap.macros.rho[i]);
                out += ',';
                out += util::fmt_double(snap.macros.ux[i]);
                out += ',';
                out += util::fmt_double(snap.macros.uy[i]);
                out += '\n';
            }
        }
    }
    return out;
}

}  // namespace vqcfd::lbm
