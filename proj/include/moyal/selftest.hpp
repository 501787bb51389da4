#pragma once

#include "moyal/grassmann.hpp"
#include "moyal/grid.hpp"
#include "moyal/moyal.hpp"
#include "moyal/parse.hpp"
#include "moyal/random_poly.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace moyal {

struct SuiteResult {
    std::string name;
    bool passed;
    double seconds;
    std::string detail;  // first failure, when any
};

namespace selftest_detail {

class Checker {
public:
    bool ok = true;
    std::string detail;
    void expect(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

inline void suite_symbolic(Checker& c, std::mt19937_64& rng) {
    RandomPolyOptions opt{.N = 2, .max_degree = 4, .max_terms = 4, .allow_hbar = true,
                          .complex_coeffs = true};
    for (int iter = 0; iter < 40; ++iter) {
        PolySymbol a = random_poly(rng, opt), b = random_poly(rng, opt), p = random_poly(rng, opt);
        c.expect((a + b) * p == a * p + b * p, "distributivity");
        c.expect(a * b == b * a, "commutativity");
        c.expect((a * b) * p == a * (b * p), "associativity");
        VariableId u = VariableId::phase(0), v = VariableId::phase(3);
        c.expect(a.derivative(u).derivative(v) == a.derivative(v).derivative(u),
                 "mixed partials commute");
        c.expect(parse_poly(a.render(), 2) == a, "render round-trip");
    }
}

inline void suite_grassmann(Checker& c, std::mt19937_64& rng) {
    RandomPolyOptions opt{.N = 1, .max_degree = 3, .max_terms = 3, .allow_lambda = true,
                          .allow_hbar = true};
    auto rand_g = [&]() {
        return GrassmannElement(random_poly(rng, opt), random_poly(rng, opt),
                                random_poly(rng, opt), random_poly(rng, opt));
    };
    for (int iter = 0; iter < 30; ++iter) {
        GrassmannElement x = rand_g(), y = rand_g(), z = rand_g();
        c.expect(g_mul(g_mul(x, y), z) == g_mul(x, g_mul(y, z)), "g_mul associativity");
        c.expect(g_mul(x + y, z) == g_mul(x, z) + g_mul(y, z), "g_mul bilinearity");
        PolySymbol P = random_poly(rng, opt), Q = random_poly(rng, opt);
        std::vector<PolySymbol> delta{random_poly(rng, opt), random_poly(rng, opt)};
        GrassmannElement sp = grassmann_shift_eval(P, delta);
        GrassmannElement sq = grassmann_shift_eval(Q, delta);
        c.expect(grassmann_shift_eval(P * Q, delta) == g_mul(sp, sq), "shift_eval product rule");
        c.expect(sp.G.is_zero() && sp.L.is_zero(), "shift_eval has no odd components");
    }
}

inline void suite_moyal(Checker& c, std::mt19937_64& rng) {
    RandomPolyOptions opt{.N = 1, .max_degree = 4, .max_terms = 3};
    for (int iter = 0; iter < 15; ++iter) {
        PolySymbol a = random_poly(rng, opt), b = random_poly(rng, opt), d = random_poly(rng, opt);
        c.expect(star_product(star_product(a, b), d) == star_product(a, star_product(b, d)),
                 "star associativity");
        c.expect(moyal_bracket(a, b) == -moyal_bracket(b, a), "moyal antisymmetry");
        PolySymbol diff = moyal_bracket(a, b) - poisson_bracket(a, b);
        c.expect(diff.is_zero() || diff.min_hbar_degree() >= 2, "mb = pb + O(hbar^2)");
        c.expect(moyal_bracket(a, b).with_hbar_zero() == poisson_bracket(a, b).with_hbar_zero(),
                 "hbar->0 limit");
    }
}

inline void suite_dequant(Checker& c, std::mt19937_64& rng) {
    for (int iter = 0; iter < 40; ++iter) {
        RandomPolyOptions opt{.N = 1 + static_cast<int>(iter % 2), .max_degree = 6, .max_terms = 5};
        PolySymbol H = random_poly(rng, opt);
        DequantReport r = dequantise(H);
        c.expect(r.exact_equal, "dequantisation identity on " + H.render());
        c.expect(r.shifted_hbar_free, "hbar elimination on " + H.render());
        PolySymbol m = marinov_hamiltonian(H).body;
        c.expect(m.with_lambda_negated() == -m, "marinov oddness in lambda");
    }
}

inline void suite_weyl(Checker& c, std::mt19937_64& rng) {
    SpatialGrid g(33, 10.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    OperatorMatrix A(g);
    for (int j = 0; j < g.n_points; ++j) {
        A.at(j, j) = gauss(rng);
        for (int k = 0; k < j; ++k) {
            std::complex<double> v{gauss(rng), gauss(rng)};
            A.at(j, k) = v;
            A.at(k, j) = std::conj(v);
        }
    }
    GridSymbol s = weyl_symbol(A);
    double max_im = 0;
    for (const auto& v : s.values) max_im = std::max(max_im, std::abs(v.imag()));
    c.expect(max_im < 1e-10, "hermitian operator has real symbol");
    OperatorMatrix back = weyl_quantize(s);
    double err = 0;
    for (std::size_t i = 0; i < back.entries.size(); ++i)
        err = std::max(err, std::abs(back.entries[i] - A.entries[i]));
    c.expect(err < 1e-10, "weyl round-trip");
}

// Deliberately corrupted conventions must break the dequantisation identity;
// if they do not, the identity test has no teeth.
inline void suite_mutation(Checker& c, std::mt19937_64& rng) {
    RandomPolyOptions opt{.N = 1, .max_degree = 6, .max_terms = 4};
    bool sign_detected = false, factor_detected = false;
    for (int iter = 0; iter < 20; ++iter) {
        PolySymbol H = random_poly(rng, opt);
        if (!dequantise(H, {.berezin_sign = -1}).exact_equal) sign_detected = true;
        if (!dequantise(H, {.drop_half = true}).exact_equal) factor_detected = true;
    }
    c.expect(sign_detected, "flipped Berezin sign goes undetected (dequantisation suite)");
    c.expect(factor_detected, "dropped 1/2 factor goes undetected (dequantisation suite)");
}

}  // namespace selftest_detail

// Reduced-size invariant sweep over every subsystem plus the convention
// mutation checks. `filter` restricts to suites whose name contains it.
inline std::vector<SuiteResult> run_selftest(const std::string& filter = "", unsigned seed = 12345) {
    using namespace selftest_detail;
    std::vector<std::pair<std::string, std::function<void(Checker&, std::mt19937_64&)>>> suites{
        {"symbolic", suite_symbolic}, {"grassmann", suite_grassmann}, {"moyal", suite_moyal},
        {"dequant", suite_dequant},   {"weyl", suite_weyl},           {"mutation", suite_mutation},
    };
    std::vector<SuiteResult> results;
    for (auto& [name, fn] : suites) {
        if (!filter.empty() && name.find(filter) == std::string::npos) continue;
        Checker c;
        std::mt19937_64 rng(seed);
        auto t0 = std::chrono::steady_clock::now();
        fn(c, rng);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back({name, c.ok, secs, c.detail});
    }
    return results;
}

}  // namespace moyal
