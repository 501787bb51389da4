// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
// Symbolic criteria run in exact arithmetic; the dynamical ones replay the
// pinned harmonic and quartic configurations from MOYAL_CONFIG_DIR.

#include "moyal/dynamics.hpp"
#include "moyal/io.hpp"
#include "moyal/moyal.hpp"
#include "moyal/parse.hpp"
#include "moyal/random_poly.hpp"
#include "moyal/schrodinger.hpp"
#include "moyal/selftest.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <string>

using namespace moyal;
using nlohmann::json;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what, double seconds) {
    std::printf("criterion %2d: %s  %-58s (%.2f s)\n", criterion, ok ? "PASS" : "FAIL",
                what.c_str(), seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

template <typename Fn>
void run(int criterion, const std::string& what, Fn&& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string note = what;
    try {
        ok = body();
    } catch (const std::exception& e) {
        note = what + " [exception: " + e.what() + "]";
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(criterion, ok, note, dt);
}

// Brute-force bidifferential kernel: all (2N)^{2k} index tuples.
PolySymbol bidiff_brute(const PolySymbol& A, const PolySymbol& B, unsigned k) {
    const int N = A.dim();
    SymplecticForm w(N);
    PolySymbol acc = PolySymbol::zero(N);
    const int D = 2 * N;
    long total = 1;
    for (unsigned j = 0; j < 2 * k; ++j) total *= D;
    std::vector<int> idx(2 * k);
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (auto& v : idx) {
            v = static_cast<int>(c % D);
            c /= D;
        }
        int sign = 1;
        for (unsigned j = 0; j < k && sign; ++j) sign *= w.upper(idx[2 * j], idx[2 * j + 1]);
        if (!sign) continue;
        PolySymbol dA = A, dB = B;
        for (unsigned j = 0; j < k && !dA.is_zero(); ++j)
            dA = dA.derivative(VariableId::phase(idx[2 * j]));
        for (unsigned j = 0; j < k && !dB.is_zero(); ++j)
            dB = dB.derivative(VariableId::phase(idx[2 * j + 1]));
        if (dA.is_zero() || dB.is_zero()) continue;
        acc += (dA * dB).scaled(ComplexRational(Rational(sign)));
    }
    return acc;
}

double sup_diff(const GridSymbol& a, const GridSymbol& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

struct RunConfig {
    PolySymbol H = PolySymbol::zero(1);
    SpatialGrid grid{65, 16.0, 1.0};
    double dt = 1e-3, t_final = 1.0, q0 = 0.0, p0 = 0.0, tolerance = 1e-3;
    int stride = 100;
};

RunConfig load_run_config(const std::string& name) {
    const char* dir = std::getenv("MOYAL_CONFIG_DIR");
#ifdef MOYAL_CONFIG_DIR
    std::string fallback = MOYAL_CONFIG_DIR;
#else
    std::string fallback = "configs";
#endif
    std::string path = (dir && *dir ? std::string(dir) : fallback) + "/" + name;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    RunConfig c;
    c.H = parse_poly(j.at("hamiltonian").get<std::string>(), 1);
    c.grid = SpatialGrid(j.at("n_points").get<int>(), j.at("box_length").get<double>(),
                         j.at("hbar").get<double>());
    c.dt = j.at("dt").get<double>();
    c.t_final = j.at("t_final").get<double>();
    c.stride = j.at("snapshot_stride").get<int>();
    c.q0 = j.at("q0").get<double>();
    c.p0 = j.at("p0").get<double>();
    c.tolerance = j.at("tolerance").get<double>();
    return c;
}

Trajectory run_engine(const RunConfig& c, Engine engine) {
    EvolutionConfig cfg{engine, c.H, c.dt, c.t_final, c.stride, c.grid, true};
    return propagate(cfg, wigner_of_state(coherent_state(c.grid, c.q0, c.p0)));
}

double norm_drift(const Trajectory& t) {
    double m = 0;
    for (const auto& o : t.observables) m = std::max(m, std::abs(o.norm - t.observables[0].norm));
    return m;
}

double purity_drift(const Trajectory& t) {
    double m = 0;
    for (const auto& o : t.observables)
        m = std::max(m, std::abs(o.purity - t.observables[0].purity));
    return m;
}

}  // namespace

int main() {
    // shared dynamical runs (criteria 7-9)
    Trajectory h_moyal, h_liouville, q_moyal, q_liouville, q_oracle;
    std::string dyn_error;
    try {
        RunConfig h = load_run_config("harmonic.json");
        h_moyal = run_engine(h, Engine::moyal);
        h_liouville = run_engine(h, Engine::liouville);
        RunConfig q = load_run_config("quartic.json");
        q_moyal = run_engine(q, Engine::moyal);
        q_liouville = run_engine(q, Engine::liouville);
        auto split = try_split(q.H);
        if (!split) throw std::runtime_error("quartic config is not of split form");
        q_oracle = oracle_wigner_trajectory(coherent_state(q.grid, q.q0, q.p0), *split, q.dt,
                                            q.t_final, q.stride, false);
    } catch (const std::exception& e) {
        dyn_error = e.what();
    }

    run(1, "dequantisation identity exact for 200 random Hamiltonians", [] {
        std::mt19937_64 rng(101);
        for (int N : {1, 2}) {
            RandomPolyOptions opt{.N = N, .max_degree = 6, .max_terms = 6};
            for (int i = 0; i < 100; ++i)
                if (!dequantise(random_poly(rng, opt)).exact_equal) return false;
        }
        return true;
    });

    run(2, "hbar eliminated before Berezin integration in every run", [] {
        std::mt19937_64 rng(101);  // same population as criterion 1
        for (int N : {1, 2}) {
            RandomPolyOptions opt{.N = N, .max_degree = 6, .max_terms = 6};
            for (int i = 0; i < 100; ++i) {
                DequantReport r = dequantise(random_poly(rng, opt));
                if (!r.shifted_hbar_free || !r.shifted.M.is_hbar_free()) return false;
            }
        }
        return true;
    });

    run(3, "quadratic Hamiltonians collapse to the classical forms", [] {
        std::mt19937_64 rng(103);
        for (int N : {1, 2}) {
            RandomPolyOptions quad{.N = N, .max_degree = 2, .max_terms = 5};
            RandomPolyOptions any{.N = N, .max_degree = 6, .max_terms = 5};
            for (int i = 0; i < 50; ++i) {
                PolySymbol H = random_poly(rng, quad);
                PolySymbol m = marinov_hamiltonian(H).body;
                if (!m.is_hbar_free()) return false;
                if (!(m == classical_extended_hamiltonian(H).body)) return false;
                PolySymbol rho = random_poly(rng, any);
                if (!(moyal_bracket(H, rho) == poisson_bracket(H, rho))) return false;
            }
        }
        return true;
    });

    run(4, "moyal minus poisson is O(hbar^2); {q^3,p^3} spot value", [] {
        std::mt19937_64 rng(104);
        RandomPolyOptions opt{.N = 1, .max_degree = 6, .max_terms = 5};
        for (int i = 0; i < 100; ++i) {
            PolySymbol A = random_poly(rng, opt), B = random_poly(rng, opt);
            PolySymbol diff = moyal_bracket(A, B) - poisson_bracket(A, B);
            if (!diff.is_zero() && diff.min_hbar_degree() < 2) return false;
        }
        PolySymbol q3 = parse_poly("q^3", 1), p3 = parse_poly("p^3", 1);
        PolySymbol expected = parse_poly("9*q^2*p^2 - 3/2*h^2", 1);
        if (!(moyal_bracket(q3, p3) == expected)) return false;
        // independent route: odd series assembled from the brute-force kernel
        PolySymbol brute = bidiff_brute(q3, p3, 1) +
                           bidiff_brute(q3, p3, 3)
                               .scaled(ComplexRational(Rational(-1, 24)))
                               .times_hbar(2);
        return brute == expected && moyal_bracket(q3, p3) == brute;
    });

    run(5, "Bopp bridge between lambda realization and moyal bracket", [] {
        std::mt19937_64 rng(105);
        const ComplexRational I = ComplexRational::unit_i();
        RandomPolyOptions opt{.N = 1, .max_degree = 5, .max_terms = 4};
        for (int i = 0; i < 50; ++i) {
            PolySymbol H = random_poly(rng, opt), f = random_poly(rng, opt);
            PolySymbol lhs = lambda_to_operator(marinov_hamiltonian(H), Rational(1, 2), f)
                                 .scaled(ComplexRational(Rational(2)));
            if (!(lhs == moyal_bracket(H, f).scaled(I))) return false;
            PolySymbol op = lambda_to_operator(classical_extended_hamiltonian(H), Rational(1), f);
            if (!(op.scaled(I) == -poisson_bracket(H, f))) return false;
        }
        PolySymbol Hosc = parse_poly("0.5*q^2 + 0.5*p^2", 1);
        return lambda_to_operator(classical_extended_hamiltonian(Hosc), Rational(1),
                                  parse_poly("q", 1)) == parse_poly("-i*p", 1);
    });

    run(6, "discrete Weyl round-trip and star homomorphism", [] {
        SpatialGrid g(65, 16.0, 1.0);
        std::mt19937_64 rng(106);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        auto random_hermitian = [&] {
            OperatorMatrix O(g);
            for (int j = 0; j < g.n_points; ++j) {
                O.at(j, j) = u(rng);
                for (int k = j + 1; k < g.n_points; ++k) {
                    O.at(j, k) = std::complex<double>(u(rng), u(rng));
                    O.at(k, j) = std::conj(O.at(j, k));
                }
            }
            return O;
        };
        for (int i = 0; i < 20; ++i) {
            OperatorMatrix A = random_hermitian(), B = random_hermitian();
            OperatorMatrix back = weyl_quantize(weyl_symbol(A));
            for (std::size_t e = 0; e < A.entries.size(); ++e)
                if (std::abs(A.entries[e] - back.entries[e]) > 1e-10) return false;
            GridSymbol direct = weyl_symbol(matmul(A, B));
            GridSymbol starred = grid_star(weyl_symbol(A), weyl_symbol(B));
            if (sup_diff(direct, starred) > 1e-9 * std::max(1.0, direct.max_abs())) return false;
        }
        return true;
    });

    run(7,
        dyn_error.empty() ? "harmonic: moyal == liouville, returns after one period"
                          : "harmonic run failed: " + dyn_error,
        [&] {
            if (!dyn_error.empty()) return false;
            if (h_moyal.times.size() != h_liouville.times.size()) return false;
            double sup_engines = 0;
            for (std::size_t i = 0; i < h_moyal.snapshots.size(); ++i)
                sup_engines =
                    std::max(sup_engines, sup_diff(h_moyal.snapshots[i], h_liouville.snapshots[i]));
            if (sup_engines > 1e-6) return false;
            if (sup_diff(h_moyal.snapshots.front(), h_moyal.snapshots.back()) > 1e-5) return false;
            if (sup_diff(h_liouville.snapshots.front(), h_liouville.snapshots.back()) > 1e-5)
                return false;
            return norm_drift(h_moyal) <= 1e-8 && norm_drift(h_liouville) <= 1e-8;
        });

    run(8, "quartic: oracle agreement, engine divergence, negativity", [&] {
        if (!dyn_error.empty()) return false;
        if (q_moyal.times.size() != q_oracle.times.size()) return false;
        double rho0_max = 0;
        for (const auto& v : q_moyal.snapshots.front().values)
            rho0_max = std::max(rho0_max, std::abs(v));
        // The negativity contrast is sampled at a common time: the moyal density
        // must have gone genuinely negative while the liouville density is still
        // non-negative to tolerance.  (Late in the run the classical filaments
        // outrun any fixed grid and Gibbs undershoot sets the classical floor,
        // so the contrast is an early-to-mid-time statement, not a t_final one.)
        double sup_orc = 0, engine_gap = 0;
        double contrast_t = -1, contrast_moyal = 0, contrast_liouville = 0;
        for (std::size_t i = 0; i < q_moyal.times.size(); ++i) {
            sup_orc = std::max(sup_orc, std::abs(q_moyal.observables[i].mean_q -
                                                 q_oracle.observables[i].mean_q));
            engine_gap = std::max(engine_gap, std::abs(q_moyal.observables[i].mean_q -
                                                       q_liouville.observables[i].mean_q));
            double mm = q_moyal.observables[i].min_value;
            double lm = q_liouville.observables[i].min_value;
            if (contrast_t < 0 && mm < -1e-3 * rho0_max && lm >= -1e-6) {
                contrast_t = q_moyal.times[i];
                contrast_moyal = mm;
                contrast_liouville = lm;
            }
        }
        std::printf("   [quartic detail] sup|<q>_moyal - <q>_oracle| = %.3e, "
                    "max engine gap = %.3e,\n"
                    "   [quartic detail] negativity contrast at t=%.3f: "
                    "moyal %.3e, liouville %.3e (max rho0 %.3e)\n",
                    sup_orc, engine_gap, contrast_t, contrast_moyal, contrast_liouville,
                    rho0_max);
        return sup_orc <= 1e-3 && engine_gap > 1e-2 && contrast_t >= 0;
    });

    run(9, "conservation: norm 1e-8, purity 1e-6 across runs", [&] {
        if (!dyn_error.empty()) return false;
        for (const Trajectory* t : {&h_moyal, &h_liouville, &q_moyal, &q_liouville})
            if (norm_drift(*t) > 1e-8) return false;
        for (const Trajectory* t : {&h_moyal, &q_moyal})  // quantum purity
            if (purity_drift(*t) > 1e-6) return false;
        for (const Trajectory* t : {&h_liouville, &q_liouville})  // classical sum rho^2
            if (purity_drift(*t) > 1e-6) return false;
        return true;
    });

    run(10, "mutated conventions falsify the identity", [] {
        PolySymbol probe = parse_poly("q^3 + q*p^2", 1);
        if (dequantise(probe, {.berezin_sign = -1}).exact_equal) return false;
        if (dequantise(probe, {.drop_half = true}).exact_equal) return false;
        for (const auto& r : run_selftest("mutation"))
            if (!r.passed) return false;
        // the honest pipeline still passes on the same probe
        return dequantise(probe).exact_equal;
    });

    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                failures);
    return failures == 0 ? 0 : 1;
}
