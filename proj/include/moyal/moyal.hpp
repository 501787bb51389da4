#pragma once

#include "moyal/grassmann.hpp"
#include "moyal/poly.hpp"
#include "moyal/symplectic.hpp"

#include <stdexcept>
#include <vector>

namespace moyal {

namespace detail {

inline BigInt factorial(unsigned k) {
    BigInt f = 1;
    for (unsigned j = 2; j <= k; ++j) f *= j;
    return f;
}

inline Rational binomial(unsigned n, unsigned k) {
    BigInt num = 1, den = 1;
    for (unsigned j = 0; j < k; ++j) {
        num *= (n - j);
        den *= (j + 1);
    }
    return Rational(num, den);
}

// Distributes k derivative pairs over the nonzero entries of omega^{ab},
// accumulating multinomial(k; m_0..m_{2N-1}) * prod sign^{m_i}
//            * (d^{m}A along the a-indices) * (d^{m}B along the b-indices).
inline void bidiff_recurse(const std::vector<SymplecticForm::Entry>& entries, std::size_t idx,
                           unsigned remaining, const Rational& coeff, const PolySymbol& dA,
                           const PolySymbol& dB, PolySymbol& acc) {
    if (dA.is_zero() || dB.is_zero()) return;
    if (idx == entries.size()) {
        if (remaining == 0) acc += (dA * dB).scaled(ComplexRational(coeff));
        return;
    }
    const auto& e = entries[idx];
    PolySymbol a = dA, b = dB;
    for (unsigned m = 0; m <= remaining; ++m) {
        Rational c = coeff * binomial(remaining, m);
        if (e.sign < 0 && m % 2 == 1) c = -c;
        bidiff_recurse(entries, idx + 1, remaining - m, c, a, b, acc);
        if (m == remaining) break;
        a = a.derivative(VariableId::phase(e.a));
        b = b.derivative(VariableId::phase(e.b));
        if (a.is_zero() || b.is_zero()) break;
    }
}

}  // namespace detail

// (A <-d_a omega^{ab} d_b-> )^k B: the k-th bidifferential kernel of the
// star product, computed exactly.
inline PolySymbol bidifferential_power(const PolySymbol& A, const PolySymbol& B, unsigned k) {
    if (A.dim() != B.dim()) throw std::invalid_argument("bidifferential_power: dimension mismatch");
    SymplecticForm omega(A.dim());
    PolySymbol acc = PolySymbol::zero(A.dim());
    detail::bidiff_recurse(omega.nonzero_upper(), 0, k, Rational(1), A, B, acc);
    return acc;
}

// A * B = sum_k (1/k!) (i hbar / 2)^k bidifferential_power(A, B, k).
// The series terminates at k = min(deg A, deg B); hbar enters as the formal
// ring variable.
inline PolySymbol star_product(const PolySymbol& A, const PolySymbol& B) {
    if (A.dim() != B.dim()) throw std::invalid_argument("star_product: dimension mismatch");
    const int kmax = std::min(A.total_phase_degree(), B.total_phase_degree());
    PolySymbol acc = PolySymbol::zero(A.dim());
    for (int k = 0; k <= kmax; ++k) {
        PolySymbol kernel = bidifferential_power(A, B, static_cast<unsigned>(k));
        if (kernel.is_zero()) continue;
        BigInt two_k = 1;
        for (int j = 0; j < k; ++j) two_k *= 2;
        ComplexRational c = i_power(static_cast<unsigned>(k)) *
                            ComplexRational(Rational(1, two_k * detail::factorial(k)));
        acc += kernel.scaled(c).times_hbar(static_cast<unsigned>(k));
    }
    return acc;
}

// {A,B}_mb = (A*B - B*A)/(i hbar), via the terminating odd series
//   sum_n (-1)^n/(2n+1)! (hbar/2)^{2n} bidifferential_power(A, B, 2n+1).
// The formal division by i*hbar is exact: every commutator term carries at
// least one power of hbar.
inline PolySymbol moyal_bracket(const PolySymbol& A, const PolySymbol& B) {
    if (A.dim() != B.dim()) throw std::invalid_argument("moyal_bracket: dimension mismatch");
    const int kmax = std::min(A.total_phase_degree(), B.total_phase_degree());
    PolySymbol acc = PolySymbol::zero(A.dim());
    for (int n = 0; 2 * n + 1 <= kmax; ++n) {
        PolySymbol kernel = bidifferential_power(A, B, static_cast<unsigned>(2 * n + 1));
        if (kernel.is_zero()) continue;
        BigInt four_n = 1;
        for (int j = 0; j < 2 * n; ++j) four_n *= 2;
        Rational c = Rational(1, four_n * detail::factorial(2 * n + 1));
        if (n % 2 == 1) c = -c;
        acc += kernel.scaled(ComplexRational(c)).times_hbar(static_cast<unsigned>(2 * n));
    }
    return acc;
}

// {A,B}_pb = dA/dphi^a omega^{ab} dB/dphi^b, the n=0 term of the Moyal series.
inline PolySymbol poisson_bracket(const PolySymbol& A, const PolySymbol& B) {
    return bidifferential_power(A, B, 1);
}

inline void require_plain_hamiltonian(const PolySymbol& H, const char* who) {
    if (!H.is_phase_only())
        throw std::domain_error(std::string(who) + ": H must be free of lambda and hbar");
}

// d rho/dt = {H, rho}_pb.
inline PolySymbol liouville_rhs(const PolySymbol& H, const PolySymbol& rho) {
    require_plain_hamiltonian(H, "liouville_rhs");
    return poisson_bracket(H, rho);
}

// d rho/dt = {H, rho}_mb; coincides with liouville_rhs for deg(H) <= 2 and
// differs from it only at order hbar^2 and above.
inline PolySymbol quantum_liouville_rhs(const PolySymbol& H, const PolySymbol& rho) {
    require_plain_hamiltonian(H, "quantum_liouville_rhs");
    return moyal_bracket(H, rho);
}

inline PolySymbol hbar2_correction(const PolySymbol& H, const PolySymbol& rho) {
    return quantum_liouville_rhs(H, rho) - liouville_rhs(H, rho);
}

struct ExtendedHamiltonian {
    enum class Kind { classical, marinov };
    PolySymbol body;
    Kind kind;
};

// xi^a = omega^{ab} lambda_b, the shift direction of the Marinov construction.
inline std::vector<PolySymbol> symplectic_lambda_shift(int N) {
    SymplecticForm omega(N);
    std::vector<PolySymbol> xi(2 * N, PolySymbol::zero(N));
    for (const auto& e : omega.nonzero_upper()) {
        PolySymbol l = PolySymbol::variable(N, VariableId::lambda(e.b));
        xi[e.a] += (e.sign > 0) ? l : -l;
    }
    return xi;
}

// H_B = lambda_a omega^{ab} dH/dphi^b, the classical extended-phase-space
// generator.
inline ExtendedHamiltonian classical_extended_hamiltonian(const PolySymbol& H) {
    require_plain_hamiltonian(H, "classical_extended_hamiltonian");
    const int N = H.dim();
    SymplecticForm omega(N);
    PolySymbol body = PolySymbol::zero(N);
    for (const auto& e : omega.nonzero_upper()) {
        PolySymbol t =
            PolySymbol::variable(N, VariableId::lambda(e.a)) * H.derivative(VariableId::phase(e.b));
        body += (e.sign > 0) ? t : -t;
    }
    return {std::move(body), ExtendedHamiltonian::Kind::classical};
}

// H_B^hbar = (1/2hbar)[H(phi - hbar omega lambda) - H(phi + hbar omega lambda)].
// The difference is odd in hbar*lambda, so the formal division is exact.
inline ExtendedHamiltonian marinov_hamiltonian(const PolySymbol& H) {
    require_plain_hamiltonian(H, "marinov_hamiltonian");
    const int N = H.dim();
    std::vector<PolySymbol> xi = symplectic_lambda_shift(N);
    std::vector<PolySymbol> minus(2 * N, PolySymbol::zero(N)), plus(2 * N, PolySymbol::zero(N));
    for (int a = 0; a < 2 * N; ++a) {
        PolySymbol h_xi = xi[a].times_hbar();
        minus[a] = -h_xi;
        plus[a] = h_xi;
    }
    PolySymbol diff = H.shift_substitute(minus) - H.shift_substitute(plus);
    PolySymbol body = diff.divided_by_hbar(1).scaled(ComplexRational(Rational(1, 2)));
    return {std::move(body), ExtendedHamiltonian::Kind::marinov};
}

// Full record of one run of the two-rule Grassmann-averaging pipeline.
struct DequantReport {
    PolySymbol input;                 // H(phi)
    ExtendedHamiltonian marinov;      // H_B^hbar(phi, hbar omega lambda)
    GrassmannElement shifted;         // H_B^hbar(phi, hbar theta thetabar omega lambda)
    PolySymbol berezin;               // integral over dthetabar dtheta
    PolySymbol classical;             // H_B = lambda_a omega^{ab} d_b H
    PolySymbol difference;            // berezin - classical
    bool exact_equal;
    bool shifted_hbar_free;           // the theta-thetabar component carries no hbar
};

// Convention knobs exercised by the falsifiability checks in the selftest
// suite; defaults are the conventions the pipeline is built on.
struct DequantOptions {
    int berezin_sign = +1;   // sign of integral(theta thetabar dthetabar dtheta)
    bool drop_half = false;  // use 1/hbar instead of 1/(2 hbar) in the Marinov form
};

// Rule 1: replace omega^{ab} by theta*thetabar*omega^{ab} inside both shifted
// arguments of the Marinov Hamiltonian. Rule 2: Berezin-integrate. The result
// must equal the classical extended Hamiltonian exactly, with no hbar limit.
inline DequantReport dequantise(const PolySymbol& H, const DequantOptions& opt = {}) {
    require_plain_hamiltonian(H, "dequantise");
    const int N = H.dim();
    std::vector<PolySymbol> xi = symplectic_lambda_shift(N);
    std::vector<PolySymbol> minus(2 * N, PolySymbol::zero(N)), plus(2 * N, PolySymbol::zero(N));
    for (int a = 0; a < 2 * N; ++a) {
        PolySymbol h_xi = xi[a].times_hbar();
        minus[a] = -h_xi;
        plus[a] = h_xi;
    }
    GrassmannElement g_minus = grassmann_shift_eval(H, minus);
    GrassmannElement g_plus = grassmann_shift_eval(H, plus);
    GrassmannElement diff = g_minus - g_plus;
    if (!diff.F.is_zero() || !diff.G.is_zero() || !diff.L.is_zero())
        throw std::logic_error("dequantise: shifted difference has unexpected components");

    const Rational denom = opt.drop_half ? Rational(1) : Rational(1, 2);
    GrassmannElement shifted =
        GrassmannElement::theta_theta_bar(diff.M.divided_by_hbar(1).scaled(ComplexRational(denom)));

    PolySymbol berezin = berezin_integrate(shifted);
    if (opt.berezin_sign < 0) berezin = -berezin;

    PolySymbol classical = classical_extended_hamiltonian(H).body;
    PolySymbol difference = berezin - classical;

    return {H,
            marinov_hamiltonian(H),
            shifted,
            std::move(berezin),
            std::move(classical),
            difference,
            difference.is_zero(),
            shifted.M.is_hbar_free()};
}

// Realizes lambda_a -> -i * s * d/dphi^a with all derivatives ordered to the
// right of the phi-dependent coefficients, and applies the operator to f.
// s = 1 is the classical realization; s = 1/2 is the Bopp-shift one that
// connects the Marinov Hamiltonian to the Moyal bracket.
inline PolySymbol lambda_to_operator(const ExtendedHamiltonian& X, const Rational& scale,
                                     const PolySymbol& f) {
    const int N = X.body.dim();
    if (f.dim() != N) throw std::invalid_argument("lambda_to_operator: dimension mismatch");
    PolySymbol out = PolySymbol::zero(N);
    for (const auto& [e, c] : X.body.terms()) {
        unsigned lambda_total = 0;
        for (int a = 0; a < 2 * N; ++a) lambda_total += e[2 * N + a];
        PolySymbol g = f;
        for (int a = 0; a < 2 * N && !g.is_zero(); ++a)
            for (std::uint32_t k = 0; k < e[2 * N + a] && !g.is_zero(); ++k)
                g = g.derivative(VariableId::phase(a));
        if (g.is_zero()) continue;

        ComplexRational coeff = c * i_power(3 * lambda_total % 4) *
                                ComplexRational(rational_pow(scale, lambda_total));
        PolySymbol mono = PolySymbol::constant(N, coeff);
        for (int a = 0; a < 2 * N; ++a)
            if (e[a] > 0) mono = mono * PolySymbol::variable(N, VariableId::phase(a)).pow(e[a]);
        out += mono.times_hbar(e[4 * N]) * g;
    }
    return out;
}

}  // namespace moyal
