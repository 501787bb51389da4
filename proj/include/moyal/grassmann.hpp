#pragma once

#include "moyal/poly.hpp"

#include <stdexcept>
#include <vector>

namespace moyal {

// Element F + G*theta + L*thetabar + M*theta*thetabar of the two-generator
// exterior algebra over PolySymbol coefficients. The basis ordering
// theta*thetabar (theta first) is fixed globally; coefficients commute with
// the generators.
class GrassmannElement {
public:
    PolySymbol F, G, L, M;

    explicit GrassmannElement(int N)
        : F(PolySymbol::zero(N)), G(PolySymbol::zero(N)), L(PolySymbol::zero(N)), M(PolySymbol::zero(N)) {}

    GrassmannElement(PolySymbol f, PolySymbol g, PolySymbol l, PolySymbol m)
        : F(std::move(f)), G(std::move(g)), L(std::move(l)), M(std::move(m)) {
        if (F.dim() != G.dim() || F.dim() != L.dim() || F.dim() != M.dim())
            throw std::invalid_argument("GrassmannElement: dimension mismatch");
    }

    int dim() const { return F.dim(); }

    static GrassmannElement scalar(PolySymbol f) {
        int N = f.dim();
        return {std::move(f), PolySymbol::zero(N), PolySymbol::zero(N), PolySymbol::zero(N)};
    }
    static GrassmannElement theta(int N) {
        return {PolySymbol::zero(N), PolySymbol::one(N), PolySymbol::zero(N), PolySymbol::zero(N)};
    }
    static GrassmannElement theta_bar(int N) {
        return {PolySymbol::zero(N), PolySymbol::zero(N), PolySymbol::one(N), PolySymbol::zero(N)};
    }
    static GrassmannElement theta_theta_bar(PolySymbol m) {
        int N = m.dim();
        return {PolySymbol::zero(N), PolySymbol::zero(N), PolySymbol::zero(N), std::move(m)};
    }

    GrassmannElement& operator+=(const GrassmannElement& o) {
        F += o.F;
        G += o.G;
        L += o.L;
        M += o.M;
        return *this;
    }
    GrassmannElement& operator-=(const GrassmannElement& o) {
        F -= o.F;
        G -= o.G;
        L -= o.L;
        M -= o.M;
        return *this;
    }
    friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
    friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }

    GrassmannElement scaled(const ComplexRational& c) const {
        return {F.scaled(c), G.scaled(c), L.scaled(c), M.scaled(c)};
    }
    GrassmannElement scaled(const PolySymbol& s) const { return {F * s, G * s, L * s, M * s}; }

    friend bool operator==(const GrassmannElement& a, const GrassmannElement& b) {
        return a.F == b.F && a.G == b.G && a.L == b.L && a.M == b.M;
    }
    friend bool operator!=(const GrassmannElement& a, const GrassmannElement& b) { return !(a == b); }

    std::string render() const {
        std::string out;
        auto piece = [&](const PolySymbol& p, const char* suffix) {
            if (p.is_zero()) return;
            if (!out.empty()) out += " + ";
            if (suffix[0] == '\0') {
                out += p.render();
            } else {
                out += "(" + p.render() + ")" + suffix;
            }
        };
        piece(F, "");
        piece(G, "\xce\xb8");          // theta
        piece(L, "\xce\xb8\xcc\x84");  // theta bar
        piece(M, "\xce\xb8\xce\xb8\xcc\x84");
        return out.empty() ? "0" : out;
    }
};

// Product in the fixed basis, using theta^2 = thetabar^2 = 0 and
// theta*thetabar = -thetabar*theta.
inline GrassmannElement g_mul(const GrassmannElement& x, const GrassmannElement& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("g_mul: dimension mismatch");
    return {x.F * y.F,
            x.F * y.G + x.G * y.F,
            x.F * y.L + x.L * y.F,
            x.F * y.M + x.M * y.F + x.G * y.L - x.L * y.G};
}

// P(phi^a + theta*thetabar*Delta^a). Nilpotency of theta*thetabar truncates
// the Taylor expansion at first order, so the result is
//   P(phi) + theta*thetabar * Delta^a dP/dphi^a
// with vanishing theta and thetabar components.
inline GrassmannElement grassmann_shift_eval(const PolySymbol& P,
                                             const std::vector<PolySymbol>& shifts) {
    const int N = P.dim();
    if (static_cast<int>(shifts.size()) != 2 * N)
        throw std::invalid_argument("grassmann_shift_eval: expected 2N shift polynomials");
    PolySymbol m = PolySymbol::zero(N);
    for (int a = 0; a < 2 * N; ++a) {
        if (shifts[a].dim() != N)
            throw std::invalid_argument("grassmann_shift_eval: dimension mismatch");
        if (shifts[a].is_zero()) continue;
        m += shifts[a] * P.derivative(VariableId::phase(a));
    }
    return {P, PolySymbol::zero(N), PolySymbol::zero(N), std::move(m)};
}

// Berezin integral over dthetabar dtheta with the convention
// integral(theta*thetabar dthetabar dtheta) = +1, i.e. projection onto M.
// The single-generator rules int theta dtheta = 1, int dtheta = 0 hold
// componentwise; this sign is the unique choice under which the Grassmann
// average of the Marinov Hamiltonian reproduces the classical one.
inline PolySymbol berezin_integrate(const GrassmannElement& x) { return x.M; }

}  // namespace moyal
