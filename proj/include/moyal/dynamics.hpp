#pragma once

#include "moyal/grid.hpp"
#include "moyal/poly.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace moyal {

enum class Engine { moyal, liouville };

inline const char* engine_name(Engine e) { return e == Engine::moyal ? "moyal" : "liouville"; }

struct EvolutionConfig {
    Engine engine;
    PolySymbol H;
    double dt;
    double t_final;
    int snapshot_stride;
    SpatialGrid grid;
    bool keep_snapshots = false;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Observables> observables;
    std::vector<GridSymbol> snapshots;  // populated only when requested
};

struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using RhsFn = std::function<GridSymbol(const GridSymbol&)>;

inline GridSymbol rk4_step(const RhsFn& rhs, const GridSymbol& rho, double dt) {
    if (dt == 0.0) return rho;
    GridSymbol k1 = rhs(rho);
    GridSymbol tmp = rho;
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = rho.values[i] + 0.5 * dt * k1.values[i];
    GridSymbol k2 = rhs(tmp);
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = rho.values[i] + 0.5 * dt * k2.values[i];
    GridSymbol k3 = rhs(tmp);
    for (std::size_t i = 0; i < tmp.values.size(); ++i)
        tmp.values[i] = rho.values[i] + dt * k3.values[i];
    GridSymbol k4 = rhs(tmp);
    GridSymbol out = rho;
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] +=
            w * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]);
    return out;
}

// Stability-probe dt: start from 1/50 of the harmonic period implied by the
// quadratic part of H, then cap by the RK4 imaginary-axis limit against a
// spectral-radius estimate of the generator on this grid.
inline double suggest_dt(const PolySymbol& H, const SpatialGrid& grid, Engine engine) {
    GridRhsPlan plan(H, grid, engine == Engine::moyal);
    double lam = plan.spectral_radius_estimate();
    double dt = (lam > 0) ? 2.5 / lam : 1e-2;

    // harmonic scale from the q^2 and p^2 coefficients, when both present
    PolySymbol q2 = PolySymbol::variable(1, VariableId::phase(0)).pow(2);
    PolySymbol p2 = PolySymbol::variable(1, VariableId::phase(1)).pow(2);
    double cq = 0, cp = 0;
    for (const auto& [e, c] : H.terms()) {
        if (e == q2.terms().begin()->first) cq = static_cast<double>(c.re);
        if (e == p2.terms().begin()->first) cp = static_cast<double>(c.re);
    }
    if (cq > 0 && cp > 0) {
        double omega = 2.0 * std::sqrt(cq * cp);
        dt = std::min(dt, 2.0 * std::numbers::pi / omega / 50.0);
    }
    return dt;
}

inline Trajectory propagate(const EvolutionConfig& cfg, const GridSymbol& rho0) {
    require_same_grid(cfg.grid, rho0.grid, "propagate");
    if (cfg.dt <= 0 || cfg.t_final < cfg.dt)
        throw std::invalid_argument("propagate: need 0 < dt <= t_final");
    if (cfg.snapshot_stride < 1) throw std::invalid_argument("propagate: stride must be positive");
    check_boundary_mass(rho0, "propagate");

    GridRhsPlan plan(cfg.H, cfg.grid, cfg.engine == Engine::moyal);
    RhsFn rhs = [&plan](const GridSymbol& r) { return plan.apply(r); };

    const long long steps = std::llround(cfg.t_final / cfg.dt);
    Trajectory traj;
    GridSymbol rho = rho0;
    const double norm0 = observables(rho0).norm;

    auto record = [&](long long step) {
        double t = step * cfg.dt;
        Observables obs = observables(rho);
        if (!std::isfinite(obs.norm) || std::abs(obs.norm - norm0) > 1e-3)
            throw InstabilityError("propagate: norm drift " + std::to_string(obs.norm - norm0) +
                                   " at t=" + std::to_string(t) + " (engine " +
                                   engine_name(cfg.engine) + "); reduce dt");
        // inputs are gated at 1e-10; in flight we only flag genuine escape.
        // Sheared densities deposit faint spectral ringing near the edge long
        // before any probability actually leaves, so the bar here is loose.
        if (step > 0 && boundary_mass_fraction(rho) > 1e-2)
            throw BoundaryMassError("propagate: mass reached the box edge at t=" +
                                    std::to_string(t) + "; enlarge the box");
        traj.times.push_back(t);
        traj.observables.push_back(obs);
        if (cfg.keep_snapshots) traj.snapshots.push_back(rho);
    };

    record(0);
    for (long long step = 1; step <= steps; ++step) {
        rho = rk4_step(rhs, rho, cfg.dt);
        if (step % cfg.snapshot_stride == 0 || step == steps) record(step);
    }
    return traj;
}

}  // namespace moyal
