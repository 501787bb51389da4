#pragma once

#include "moyal/fft.hpp"
#include "moyal/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace moyal {

struct BoundaryMassError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Periodic position grid of n_points cells over a box of length `length`,
// centred on zero. Momentum spacing is tied to the box by dp = 2*pi*hbar/L,
// so dq*dp*n = 2*pi*hbar always holds.
struct SpatialGrid {
    int n_points;
    double length;
    double hbar;

    SpatialGrid(int n, double box_length, double hbar_value)
        : n_points(n), length(box_length), hbar(hbar_value) {
        if (n < 3) throw std::invalid_argument("SpatialGrid: need at least 3 points");
        if (box_length <= 0 || hbar_value <= 0)
            throw std::invalid_argument("SpatialGrid: box length and hbar must be positive");
    }

    double dq() const { return length / n_points; }
    double dp() const { return 2.0 * std::numbers::pi * hbar / length; }
    int center() const { return (n_points - 1) / 2; }
    double q(int j) const { return (j - center()) * dq(); }
    double p(int k) const { return (k - center()) * dp(); }

    // Spectral wavenumber for FFT bin m at spacing d.
    static double wavenumber(int m, int n, double d) {
        int f = (m <= (n - 1) / 2) ? m : m - n;
        return 2.0 * std::numbers::pi * f / (n * d);
    }

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.n_points == b.n_points && a.length == b.length && a.hbar == b.hbar;
    }
    friend bool operator!=(const SpatialGrid& a, const SpatialGrid& b) { return !(a == b); }
};

inline void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

inline void require_odd(const SpatialGrid& g, const char* who) {
    if (g.n_points % 2 == 0)
        throw std::invalid_argument(std::string(who) + ": discrete Weyl transform needs an odd grid");
}

// Complex wavefunction on the position grid, normalized so that
// sum |psi|^2 dq = 1.
struct StateVector {
    SpatialGrid grid;
    std::vector<std::complex<double>> amplitudes;

    StateVector(SpatialGrid g, std::vector<std::complex<double>> amp)
        : grid(g), amplitudes(std::move(amp)) {
        if (static_cast<int>(amplitudes.size()) != grid.n_points)
            throw std::invalid_argument("StateVector: amplitude count does not match grid");
        double nrm = norm();
        if (nrm <= 0) throw std::invalid_argument("StateVector: zero state");
        double s = 1.0 / std::sqrt(nrm);
        for (auto& a : amplitudes) a *= s;
    }

    double norm() const {
        double acc = 0;
        for (const auto& a : amplitudes) acc += std::norm(a);
        return acc * grid.dq();
    }
};

// Operator as a matrix in the position basis; entries[j*n + k] = <q_j|O|q_k>.
struct OperatorMatrix {
    SpatialGrid grid;
    std::vector<std::complex<double>> entries;

    explicit OperatorMatrix(SpatialGrid g)
        : grid(g), entries(static_cast<std::size_t>(g.n_points) * g.n_points) {}

    std::complex<double>& at(int j, int k) { return entries[static_cast<std::size_t>(j) * grid.n_points + k]; }
    const std::complex<double>& at(int j, int k) const {
        return entries[static_cast<std::size_t>(j) * grid.n_points + k];
    }

    static OperatorMatrix identity(const SpatialGrid& g) {
        OperatorMatrix out(g);
        for (int j = 0; j < g.n_points; ++j) out.at(j, j) = 1.0;
        return out;
    }
    static OperatorMatrix position(const SpatialGrid& g) {
        OperatorMatrix out(g);
        for (int j = 0; j < g.n_points; ++j) out.at(j, j) = g.q(j);
        return out;
    }
};

inline OperatorMatrix matmul(const OperatorMatrix& A, const OperatorMatrix& B) {
    require_same_grid(A.grid, B.grid, "matmul");
    const int n = A.grid.n_points;
    OperatorMatrix C(A.grid);
    for (int j = 0; j < n; ++j) {
        for (int l = 0; l < n; ++l) {
            const std::complex<double> a = A.at(j, l);
            if (a == std::complex<double>(0.0, 0.0)) continue;
            const std::complex<double>* brow = &B.entries[static_cast<std::size_t>(l) * n];
            std::complex<double>* crow = &C.entries[static_cast<std::size_t>(j) * n];
            for (int k = 0; k < n; ++k) crow[k] += a * brow[k];
        }
    }
    return C;
}

// Phase-space function sampled on the n x n grid; values[j*n + k] is the
// value at (q_j, p_k) (row-major, q-major).
struct GridSymbol {
    SpatialGrid grid;
    std::vector<std::complex<double>> values;

    explicit GridSymbol(SpatialGrid g)
        : grid(g), values(static_cast<std::size_t>(g.n_points) * g.n_points) {}

    std::complex<double>& at(int j, int k) { return values[static_cast<std::size_t>(j) * grid.n_points + k]; }
    const std::complex<double>& at(int j, int k) const {
        return values[static_cast<std::size_t>(j) * grid.n_points + k];
    }

    double max_abs() const {
        double m = 0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
};

// --- discrete Weyl transform ------------------------------------------------
//
// On an odd periodic lattice the half shift q +- s*dq/2 is exact index
// arithmetic: 2 is invertible mod n with inverse h = (n+1)/2. The symbol is
//   O(q_j, p_k) = sum_s exp(-2 pi i (k-c) s / n) O[(j+s*h) mod n][(j-s*h) mod n]
// which is a DFT over the relative coordinate, and is exactly invertible.

inline GridSymbol weyl_symbol(const OperatorMatrix& O) {
    require_odd(O.grid, "weyl_symbol");
    const int n = O.grid.n_points;
    const int h = (n + 1) / 2;
    const int c = O.grid.center();
    GridSymbol out(O.grid);
    std::vector<std::complex<double>> a(n);
    for (int j = 0; j < n; ++j) {
        for (int s = 0; s < n; ++s) {
            int u = (j + static_cast<long long>(s) * h) % n;
            int v = ((j - static_cast<long long>(s) * h) % n + n) % n;
            a[s] = O.at(u, v);
        }
        detail::fft_1d(a.data(), n, FFTW_FORWARD);
        for (int k = 0; k < n; ++k) out.at(j, k) = a[((k - c) % n + n) % n];
    }
    return out;
}

inline OperatorMatrix weyl_quantize(const GridSymbol& A) {
    require_odd(A.grid, "weyl_quantize");
    const int n = A.grid.n_points;
    const int h = (n + 1) / 2;
    const int c = A.grid.center();
    OperatorMatrix out(A.grid);
    std::vector<std::complex<double>> a(n);
    for (int j = 0; j < n; ++j) {
        for (int m = 0; m < n; ++m) a[m] = A.at(j, (m + c) % n);
        detail::fft_1d(a.data(), n, FFTW_BACKWARD);
        for (int s = 0; s < n; ++s) {
            int u = (j + static_cast<long long>(s) * h) % n;
            int v = ((j - static_cast<long long>(s) * h) % n + n) % n;
            out.at(u, v) = a[s] / static_cast<double>(n);
        }
    }
    return out;
}

// Wigner function of a pure state, normalized so that sum rho dq dp = 1.
//
// W(q_j, p_k) = dq/(2 pi hbar) sum_s exp(-i p_k s dq / hbar)
//                 psi(q_j + s dq/2) conj(psi(q_j - s dq/2)).
// The half-step samples come from Fourier upsampling psi onto a 2n grid, so
// the correlation lag runs in steps of dq; that keeps the p-aliasing period
// at the full n*dp, where it wraps onto itself. (Even-lag-only correlations
// would alias at n*dp/2 and plant a Nyquist-oscillating ghost in the box.)
inline GridSymbol wigner_of_state(const StateVector& psi) {
    require_odd(psi.grid, "wigner_of_state");
    if (std::abs(psi.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("wigner_of_state: state is not normalized");
    const int n = psi.grid.n_points;
    const int c = psi.grid.center();
    const double scale = psi.grid.dq() / (2.0 * std::numbers::pi * psi.grid.hbar);

    // psi on the dq/2 grid: zero-pad the centred spectrum (n odd, so the
    // frequencies -(n-1)/2 .. (n-1)/2 map unambiguously into 2n bins)
    std::vector<std::complex<double>> half(2 * n, 0.0);
    {
        std::vector<std::complex<double>> spec = psi.amplitudes;
        detail::fft_1d(spec.data(), n, FFTW_FORWARD);
        for (int f = 0; f < n; ++f) {
            int fc = (f <= (n - 1) / 2) ? f : f - n;
            half[(fc + 2 * n) % (2 * n)] = spec[f] / static_cast<double>(n);
        }
        detail::fft_1d(half.data(), 2 * n, FFTW_BACKWARD);
    }

    GridSymbol out(psi.grid);
    std::vector<std::complex<double>> a(n);
    for (int j = 0; j < n; ++j) {
        // lags that stay inside the box; wrapped lags would pair the state
        // with its periodic image and plant interference ghosts at L/2 offsets
        std::fill(a.begin(), a.end(), std::complex<double>(0.0, 0.0));
        const int reach = std::min(2 * j, 2 * n - 1 - 2 * j);
        for (int lag = -reach; lag <= reach; ++lag)
            a[(lag % n + n) % n] += half[2 * j + lag] * std::conj(half[2 * j - lag]);
        detail::fft_1d(a.data(), n, FFTW_FORWARD);
        for (int k = 0; k < n; ++k) out.at(j, k) = a[((k - c) % n + n) % n] * scale;
    }
    return out;
}

// Star product through the operator product: symb(quantize(A) quantize(B)).
inline GridSymbol grid_star(const GridSymbol& A, const GridSymbol& B) {
    require_same_grid(A.grid, B.grid, "grid_star");
    return weyl_symbol(matmul(weyl_quantize(A), weyl_quantize(B)));
}

// --- diagnostics -------------------------------------------------------------

struct Observables {
    double norm;
    double mean_q;
    double mean_p;
    double purity;
    double negativity;
    double min_value;
};

inline Observables observables(const GridSymbol& rho) {
    const int n = rho.grid.n_points;
    const double cell = rho.grid.dq() * rho.grid.dp();
    double norm = 0, mq = 0, mp = 0, sq2 = 0, neg = 0;
    double mn = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            double v = rho.at(j, k).real();
            norm += v;
            mq += rho.grid.q(j) * v;
            mp += rho.grid.p(k) * v;
            sq2 += v * v;
            neg += std::abs(v) - v;
            mn = std::min(mn, v);
        }
    }
    norm *= cell;
    const double safe = (std::abs(norm) > 1e-300) ? norm : 1.0;
    return {norm,
            mq * cell / safe,
            mp * cell / safe,
            2.0 * std::numbers::pi * rho.grid.hbar * sq2 * cell,
            neg * cell,
            mn};
}

inline double boundary_mass_fraction(const GridSymbol& rho, int margin = 3) {
    const int n = rho.grid.n_points;
    double edge = 0, total = 0;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            double v = std::abs(rho.at(j, k));
            total += v;
            if (j < margin || j >= n - margin || k < margin || k >= n - margin) edge += v;
        }
    }
    return (total > 0) ? edge / total : 0.0;
}

inline void check_boundary_mass(const GridSymbol& rho, const char* who, double tol = 1e-10) {
    double f = boundary_mass_fraction(rho);
    if (f > tol)
        throw BoundaryMassError(std::string(who) + ": boundary mass fraction " + std::to_string(f) +
                                " exceeds " + std::to_string(tol) +
                                "; enlarge the box (spectral derivatives need decay at the edges)");
}

// d^oq/dq^oq d^op/dp^op of a grid function, pseudo-spectral on the periodic
// grid in both directions.
inline GridSymbol spectral_derivative(const GridSymbol& f, int oq, int op) {
    const int n = f.grid.n_points;
    GridSymbol out = f;
    if (oq > 0) {
        // transform over the q index: stride n, dist 1
        detail::fft_many(out.values.data(), n, n, n, 1, FFTW_FORWARD);
        for (int m = 0; m < n; ++m) {
            std::complex<double> fac =
                std::pow(std::complex<double>(0.0, SpatialGrid::wavenumber(m, n, f.grid.dq())), oq) /
                static_cast<double>(n);
            for (int k = 0; k < n; ++k) out.at(m, k) *= fac;
        }
        detail::fft_many(out.values.data(), n, n, n, 1, FFTW_BACKWARD);
    }
    if (op > 0) {
        detail::fft_many(out.values.data(), n, n, 1, n, FFTW_FORWARD);
        for (int m = 0; m < n; ++m) {
            std::complex<double> fac =
                std::pow(std::complex<double>(0.0, SpatialGrid::wavenumber(m, n, f.grid.dp())), op) /
                static_cast<double>(n);
            for (int j = 0; j < n; ++j) out.at(j, m) *= fac;
        }
        detail::fft_many(out.values.data(), n, n, 1, n, FFTW_BACKWARD);
    }
    return out;
}

// --- Moyal / Liouville right-hand sides --------------------------------------
//
// {H, rho}_mb = sum_n (-1)^n/(2n+1)! (hbar/2)^{2n} D^{2n+1}(H, rho) with
// D^k(H, rho) = sum_m C(k,m) (-1)^{k-m} (dq^m dp^{k-m} H)(dp^m dq^{k-m} rho).
// Derivatives of the polynomial H are exact and sampled on the grid;
// derivatives of rho are pseudo-spectral. The series terminates at
// 2n+1 <= deg H. Precomputing the sampled H-partials makes repeated
// application (one per RK4 stage) cheap.
class GridRhsPlan {
public:
    GridRhsPlan(const PolySymbol& H, const SpatialGrid& grid, bool quantum)
        : grid_(grid) {
        if (H.dim() != 1) throw std::invalid_argument("grid rhs: the grid engine is N=1 only");
        if (!H.is_phase_only()) throw std::domain_error("grid rhs: H must be a plain (q,p) polynomial");
        const int deg = H.total_phase_degree();
        const int n = grid.n_points;
        for (int order = 0; 2 * order + 1 <= deg; ++order) {
            if (order > 0 && !quantum) break;
            const int k = 2 * order + 1;
            double cn = std::pow(grid.hbar / 2.0, 2 * order);
            for (int j = 2; j <= k; ++j) cn /= j;  // 1/(2n+1)!
            if (order % 2 == 1) cn = -cn;
            for (int m = 0; m <= k; ++m) {
                PolySymbol Hd = H;
                for (int d = 0; d < m && !Hd.is_zero(); ++d)
                    Hd = Hd.derivative(VariableId::phase(0));
                for (int d = 0; d < k - m && !Hd.is_zero(); ++d)
                    Hd = Hd.derivative(VariableId::phase(1));
                if (Hd.is_zero()) continue;
                double binom = 1;
                for (int j = 0; j < m; ++j) binom = binom * (k - j) / (j + 1);
                double sign = ((k - m) % 2 == 1) ? -1.0 : 1.0;
                Term t;
                t.rho_dq = k - m;
                t.rho_dp = m;
                t.h_samples.resize(static_cast<std::size_t>(n) * n);
                for (int j = 0; j < n; ++j) {
                    for (int l = 0; l < n; ++l) {
                        std::complex<double> v = Hd.eval({grid.q(j), grid.p(l)}, grid.hbar);
                        t.h_samples[static_cast<std::size_t>(j) * n + l] =
                            cn * binom * sign * v.real();
                    }
                }
                terms_.push_back(std::move(t));
            }
        }
    }

    GridSymbol apply(const GridSymbol& rho) const {
        require_same_grid(rho.grid, grid_, "grid rhs");
        GridSymbol out(grid_);
        for (const auto& t : terms_) {
            GridSymbol d = spectral_derivative(rho, t.rho_dq, t.rho_dp);
            for (std::size_t i = 0; i < d.values.size(); ++i)
                out.values[i] += t.h_samples[i] * d.values[i];
        }
        return out;
    }

    // Crude spectral-radius estimate of the generator, for the dt probe.
    double spectral_radius_estimate() const {
        const int n = grid_.n_points;
        const double kq = std::numbers::pi / grid_.dq();
        const double kp = std::numbers::pi / grid_.dp();
        double acc = 0;
        for (const auto& t : terms_) {
            double hmax = 0;
            for (double v : t.h_samples) hmax = std::max(hmax, std::abs(v));
            acc += hmax * std::pow(kq, t.rho_dq) * std::pow(kp, t.rho_dp);
        }
        (void)n;
        return acc;
    }

private:
    struct Term {
        std::vector<double> h_samples;
        int rho_dq, rho_dp;
    };
    SpatialGrid grid_;
    std::vector<Term> terms_;
};

inline GridSymbol grid_moyal_rhs(const PolySymbol& H, const GridSymbol& rho) {
    check_boundary_mass(rho, "grid_moyal_rhs");
    return GridRhsPlan(H, rho.grid, true).apply(rho);
}

inline GridSymbol grid_liouville_rhs(const PolySymbol& H, const GridSymbol& rho) {
    check_boundary_mass(rho, "grid_liouville_rhs");
    return GridRhsPlan(H, rho.grid, false).apply(rho);
}

// --- standard initial data ----------------------------------------------------

inline GridSymbol gaussian_wigner(const SpatialGrid& g, double q0, double p0, double sigma_q,
                                  double sigma_p) {
    GridSymbol out(g);
    const double amp = 1.0 / (2.0 * std::numbers::pi * sigma_q * sigma_p);
    for (int j = 0; j < g.n_points; ++j) {
        double dqq = g.q(j) - q0;
        for (int k = 0; k < g.n_points; ++k) {
            double dpp = g.p(k) - p0;
            out.at(j, k) = amp * std::exp(-0.5 * dqq * dqq / (sigma_q * sigma_q) -
                                          0.5 * dpp * dpp / (sigma_p * sigma_p));
        }
    }
    return out;
}

// Coherent Gaussian wavepacket centred at (q0, p0); its Wigner function is
// the symmetric Gaussian with sigma_q = sigma_p = sqrt(hbar/2).
inline StateVector coherent_state(const SpatialGrid& g, double q0, double p0) {
    std::vector<std::complex<double>> amp(g.n_points);
    const double s2 = g.hbar / 2.0;  // sigma_q^2
    for (int j = 0; j < g.n_points; ++j) {
        double x = g.q(j);
        amp[j] = std::exp(std::complex<double>(-(x - q0) * (x - q0) / (4.0 * s2), p0 * x / g.hbar));
    }
    return StateVector(g, std::move(amp));
}

}  // namespace moyal
