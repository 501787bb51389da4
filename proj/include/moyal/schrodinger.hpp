#pragma once

#include "moyal/dynamics.hpp"
#include "moyal/fft.hpp"
#include "moyal/grid.hpp"
#include "moyal/poly.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

namespace moyal {

// H = p^2/2m + V(q), the exactly separable form the split-operator
// propagator needs.
struct SplitHamiltonian {
    double mass;
    PolySymbol potential;  // polynomial in q only
};

// Recognizes H = c*p^2 + V(q) with c > 0 and no mixed or higher p terms.
inline std::optional<SplitHamiltonian> try_split(const PolySymbol& H) {
    if (H.dim() != 1 || !H.is_phase_only()) return std::nullopt;
    PolySymbol V = PolySymbol::zero(1);
    double c = 0;
    for (const auto& [e, coeff] : H.terms()) {
        if (!coeff.is_real()) return std::nullopt;
        if (e[1] == 0) {
            PolySymbol mono = PolySymbol::constant(1, coeff) *
                              PolySymbol::variable(1, VariableId::phase(0)).pow(e[0]);
            V += mono;
        } else if (e[1] == 2 && e[0] == 0) {
            c = static_cast<double>(coeff.re);
        } else {
            return std::nullopt;
        }
    }
    if (c <= 0) return std::nullopt;
    return SplitHamiltonian{1.0 / (2.0 * c), V};
}

namespace detail {

struct SplitStepPhases {
    std::vector<std::complex<double>> half_potential;  // exp(-i V dt / 2 hbar)
    std::vector<std::complex<double>> kinetic;         // exp(-i hbar k^2 dt / 2m)
};

inline SplitStepPhases make_split_phases(const SpatialGrid& g, const SplitHamiltonian& H,
                                         double dt) {
    SplitStepPhases ph;
    ph.half_potential.resize(g.n_points);
    ph.kinetic.resize(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        double v = H.potential.eval({g.q(j), 0.0}, g.hbar).real();
        ph.half_potential[j] = std::exp(std::complex<double>(0.0, -v * dt / (2.0 * g.hbar)));
        double k = SpatialGrid::wavenumber(j, g.n_points, g.dq());
        ph.kinetic[j] =
            std::exp(std::complex<double>(0.0, -g.hbar * k * k * dt / (2.0 * H.mass)));
    }
    return ph;
}

inline void split_step_inplace(std::vector<std::complex<double>>& amp, const SplitStepPhases& ph) {
    const int n = static_cast<int>(amp.size());
    for (int j = 0; j < n; ++j) amp[j] *= ph.half_potential[j];
    fft_1d(amp.data(), n, FFTW_FORWARD);
    for (int j = 0; j < n; ++j) amp[j] *= ph.kinetic[j] / static_cast<double>(n);
    fft_1d(amp.data(), n, FFTW_BACKWARD);
    for (int j = 0; j < n; ++j) amp[j] *= ph.half_potential[j];
}

}  // namespace detail

// One Strang step exp(-iV dt/2h) exp(-iT dt/h) exp(-iV dt/2h), kinetic factor
// applied in Fourier space. Exactly norm-preserving up to roundoff.
inline StateVector split_operator_step(const StateVector& psi, const SplitHamiltonian& H,
                                       double dt) {
    auto amp = psi.amplitudes;
    if (dt != 0.0) {
        auto ph = detail::make_split_phases(psi.grid, H, dt);
        detail::split_step_inplace(amp, ph);
    }
    return StateVector(psi.grid, std::move(amp));
}

inline double state_mean_q(const StateVector& psi) {
    double acc = 0;
    for (int j = 0; j < psi.grid.n_points; ++j)
        acc += psi.grid.q(j) * std::norm(psi.amplitudes[j]);
    return acc * psi.grid.dq();
}

inline double state_energy(const StateVector& psi, const SplitHamiltonian& H) {
    const int n = psi.grid.n_points;
    double pot = 0;
    for (int j = 0; j < n; ++j)
        pot += H.potential.eval({psi.grid.q(j), 0.0}, psi.grid.hbar).real() *
               std::norm(psi.amplitudes[j]);
    pot *= psi.grid.dq();
    auto amp = psi.amplitudes;
    detail::fft_1d(amp.data(), n, FFTW_FORWARD);
    double kin = 0;
    for (int j = 0; j < n; ++j) {
        double k = SpatialGrid::wavenumber(j, n, psi.grid.dq());
        kin += psi.grid.hbar * psi.grid.hbar * k * k / (2.0 * H.mass) * std::norm(amp[j]);
    }
    kin *= psi.grid.dq() / static_cast<double>(n);  // Parseval: sum|fft|^2 = n sum|psi|^2
    return pot + kin;
}

// Evolves psi with the split-operator propagator and emits Wigner snapshots
// and observables on the same schedule as dynamics::propagate, so the two
// evolutions can be compared sample by sample.
inline Trajectory oracle_wigner_trajectory(const StateVector& psi0, const SplitHamiltonian& H,
                                           double dt, double t_final, int stride,
                                           bool keep_snapshots = false) {
    if (dt <= 0 || t_final < dt)
        throw std::invalid_argument("oracle_wigner_trajectory: need 0 < dt <= t_final");
    if (stride < 1) throw std::invalid_argument("oracle_wigner_trajectory: stride must be positive");

    const long long steps = std::llround(t_final / dt);
    auto phases = detail::make_split_phases(psi0.grid, H, dt);

    Trajectory traj;
    auto amp = psi0.amplitudes;
    auto record = [&](long long step) {
        StateVector psi(psi0.grid, amp);  // re-normalizes against roundoff drift
        GridSymbol w = wigner_of_state(psi);
        traj.times.push_back(step * dt);
        traj.observables.push_back(observables(w));
        if (keep_snapshots) traj.snapshots.push_back(std::move(w));
    };

    record(0);
    for (long long step = 1; step <= steps; ++step) {
        detail::split_step_inplace(amp, phases);
        if (step % stride == 0 || step == steps) record(step);
    }
    return traj;
}

}  // namespace moyal
