#pragma once

#include "moyal/poly.hpp"

#include <stdexcept>
#include <vector>

namespace moyal {

// The symplectic matrix omega^{ab} in the block form [[0, I_N], [-I_N, 0]],
// with phase ordering (q^1..q^N, p^1..p^N). Every sign convention downstream
// (brackets, Marinov shifts, flow equations) is derived from this object.
class SymplecticForm {
public:
    explicit SymplecticForm(int N) : n_(N) {
        if (N < 1) throw std::invalid_argument("SymplecticForm: N must be positive");
    }

    int dim() const { return 2 * n_; }
    int pairs() const { return n_; }

    // omega^{ab}
    int upper(int a, int b) const {
        check(a);
        check(b);
        if (b == a + n_) return 1;
        if (a == b + n_) return -1;
        return 0;
    }

    // omega_ab, the inverse: sum_c omega^{ac} omega_{cb} = delta^a_b.
    int lower(int a, int b) const { return -upper(a, b); }

    struct Entry {
        int a, b, sign;
    };

    // The 2N nonzero entries of omega^{ab}.
    std::vector<Entry> nonzero_upper() const {
        std::vector<Entry> out;
        out.reserve(2 * n_);
        for (int i = 0; i < n_; ++i) {
            out.push_back({i, i + n_, 1});
            out.push_back({i + n_, i, -1});
        }
        return out;
    }

private:
    int n_;
    void check(int a) const {
        if (a < 0 || a >= 2 * n_) throw std::out_of_range("SymplecticForm: index out of range");
    }
};

// Hamilton equations: component a of the flow is omega^{ab} dH/dphi^b.
inline std::vector<PolySymbol> hamiltonian_flow_rhs(const PolySymbol& H) {
    if (!H.is_phase_only())
        throw std::domain_error("hamiltonian_flow_rhs: H must depend on phase variables only");
    const int N = H.dim();
    SymplecticForm omega(N);
    std::vector<PolySymbol> out(2 * N, PolySymbol::zero(N));
    for (const auto& e : omega.nonzero_upper()) {
        PolySymbol d = H.derivative(VariableId::phase(e.b));
        out[e.a] += (e.sign > 0) ? d : -d;
    }
    return out;
}

}  // namespace moyal
