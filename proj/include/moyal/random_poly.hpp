#pragma once

#include "moyal/poly.hpp"

#include <random>

namespace moyal {

struct RandomPolyOptions {
    int N = 1;
    int max_degree = 4;
    int max_terms = 6;
    bool allow_lambda = false;
    bool allow_hbar = false;
    bool complex_coeffs = false;
    int coeff_range = 6;  // numerators drawn from [-range, range] \ {0}
    int den_range = 4;    // denominators drawn from [1, range]
};

// Seeded random sparse polynomial, used by property tests and by the
// verify-dequant --random run.
inline PolySymbol random_poly(std::mt19937_64& rng, const RandomPolyOptions& opt) {
    std::uniform_int_distribution<int> nterms(1, opt.max_terms);
    std::uniform_int_distribution<int> num(-opt.coeff_range, opt.coeff_range);
    std::uniform_int_distribution<int> den(1, opt.den_range);
    std::uniform_int_distribution<int> deg(0, opt.max_degree);

    auto coeff = [&]() {
        int n = 0;
        while (n == 0) n = num(rng);
        return Rational(n, den(rng));
    };

    PolySymbol out = PolySymbol::zero(opt.N);
    const int T = nterms(rng);
    for (int t = 0; t < T; ++t) {
        int budget = deg(rng);
        PolySymbol mono =
            PolySymbol::constant(opt.N, opt.complex_coeffs ? ComplexRational(coeff(), coeff())
                                                           : ComplexRational(coeff()));
        std::uniform_int_distribution<int> slot(0, 2 * opt.N * (opt.allow_lambda ? 2 : 1) +
                                                       (opt.allow_hbar ? 1 : 0) - 1);
        for (int d = 0; d < budget; ++d) {
            int s = slot(rng);
            VariableId v = VariableId::hbar();
            if (s < 2 * opt.N)
                v = VariableId::phase(s);
            else if (opt.allow_lambda && s < 4 * opt.N)
                v = VariableId::lambda(s - 2 * opt.N);
            mono = mono * PolySymbol::variable(opt.N, v);
        }
        out += mono;
    }
    return out;
}

}  // namespace moyal
