#pragma once

#include "moyal/rational.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace moyal {

enum class VarKind { phase, lambda, hbar };

// A variable of the extended phase-space ring. Phase index a in [0, 2N)
// encodes phi^a with the ordering (q^1..q^N, p^1..p^N); lambda index a
// encodes lambda_a with the same ordering; hbar has no index.
struct VariableId {
    VarKind kind{VarKind::hbar};
    int index{0};

    static VariableId q(int i = 0) { return {VarKind::phase, i}; }          // i in [0, N)
    static VariableId p_of(int i, int N) { return {VarKind::phase, N + i}; }
    static VariableId phase(int a) { return {VarKind::phase, a}; }          // a in [0, 2N)
    static VariableId lambda(int a) { return {VarKind::lambda, a}; }
    static VariableId hbar() { return {VarKind::hbar, 0}; }

    friend bool operator==(const VariableId& a, const VariableId& b) {
        return a.kind == b.kind && (a.kind == VarKind::hbar || a.index == b.index);
    }
};

// Sparse multivariate polynomial over ComplexRational in the phase
// variables phi^a, the auxiliary lambda_a and a formal hbar. Canonical
// form: no stored coefficient is zero, so equality is map equality.
class PolySymbol {
public:
    // Exponent layout: [phase 0..2N) [lambda 2N..4N) [hbar at 4N].
    using Exponents = std::vector<std::uint32_t>;
    using TermMap = std::map<Exponents, ComplexRational>;

    explicit PolySymbol(int N) : n_(check_dim(N)) {}

    static PolySymbol zero(int N) { return PolySymbol(N); }

    static PolySymbol constant(int N, ComplexRational c) {
        PolySymbol out(N);
        if (!c.is_zero()) out.terms_[Exponents(4 * N + 1, 0)] = std::move(c);
        return out;
    }

    static PolySymbol one(int N) { return constant(N, ComplexRational(Rational(1))); }

    static PolySymbol variable(int N, VariableId v) {
        PolySymbol out(N);
        Exponents e(4 * N + 1, 0);
        e[out.slot(v)] = 1;
        out.terms_[std::move(e)] = ComplexRational(Rational(1));
        return out;
    }

    int dim() const { return n_; }
    int num_slots() const { return 4 * n_ + 1; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    int slot(VariableId v) const {
        switch (v.kind) {
            case VarKind::phase:
                require_phase_index(v.index);
                return v.index;
            case VarKind::lambda:
                require_phase_index(v.index);
                return 2 * n_ + v.index;
            default:
                return 4 * n_;
        }
    }

    ComplexRational coefficient(const Exponents& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? ComplexRational() : it->second;
    }

    PolySymbol& operator+=(const PolySymbol& o) {
        require_same_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    PolySymbol& operator-=(const PolySymbol& o) {
        require_same_dim(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    PolySymbol& operator*=(const PolySymbol& o) { return *this = *this * o; }

    friend PolySymbol operator+(PolySymbol a, const PolySymbol& b) { return a += b; }
    friend PolySymbol operator-(PolySymbol a, const PolySymbol& b) { return a -= b; }
    friend PolySymbol operator-(const PolySymbol& a) {
        PolySymbol out(a.n_);
        for (const auto& [e, c] : a.terms_) out.terms_[e] = -c;
        return out;
    }

    friend PolySymbol operator*(const PolySymbol& a, const PolySymbol& b) {
        a.require_same_dim(b);
        PolySymbol out(a.n_);
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea.size());
                for (std::size_t s = 0; s < e.size(); ++s) e[s] = ea[s] + eb[s];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }

    PolySymbol scaled(const ComplexRational& c) const {
        PolySymbol out(n_);
        if (c.is_zero()) return out;
        for (const auto& [e, coeff] : terms_) out.terms_[e] = coeff * c;
        return out;
    }

    PolySymbol pow(unsigned k) const {
        PolySymbol out = one(n_);
        for (unsigned j = 0; j < k; ++j) out = out * *this;
        return out;
    }

    friend bool operator==(const PolySymbol& a, const PolySymbol& b) {
        return a.n_ == b.n_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const PolySymbol& a, const PolySymbol& b) { return !(a == b); }

    PolySymbol derivative(VariableId v) const {
        PolySymbol out(n_);
        const int s = slot(v);
        for (const auto& [e, c] : terms_) {
            if (e[s] == 0) continue;
            Exponents d = e;
            d[s] -= 1;
            out.add_term(d, c * ComplexRational(Rational(e[s])));
        }
        return out;
    }

    // P(phi^a + Delta^a), expanded exactly. `shifts` has one entry per phase
    // variable (2N entries); zero polynomials mean "leave that variable alone".
    PolySymbol shift_substitute(const std::vector<PolySymbol>& shifts) const {
        if (static_cast<int>(shifts.size()) != 2 * n_)
            throw std::invalid_argument("shift_substitute: expected 2N shift polynomials");
        for (const auto& s : shifts) require_same_dim(s);

        // (phi_a + Delta_a)^e cache, keyed by (a, e).
        std::map<std::pair<int, std::uint32_t>, PolySymbol> powers;
        auto shifted_power = [&](int a, std::uint32_t e) -> const PolySymbol& {
            auto key = std::make_pair(a, e);
            auto it = powers.find(key);
            if (it != powers.end()) return it->second;
            PolySymbol base = variable(n_, VariableId::phase(a)) + shifts[a];
            return powers.emplace(key, base.pow(e)).first->second;
        };

        PolySymbol out(n_);
        for (const auto& [e, c] : terms_) {
            Exponents rest = e;
            PolySymbol term(n_);
            bool trivial = true;
            for (int a = 0; a < 2 * n_; ++a) {
                if (e[a] != 0 && !shifts[a].is_zero()) {
                    trivial = false;
                    break;
                }
            }
            if (trivial) {
                out.add_term(e, c);
                continue;
            }
            for (int a = 0; a < 2 * n_; ++a) rest[a] = 0;
            term.terms_[rest] = c;
            for (int a = 0; a < 2 * n_; ++a) {
                if (e[a] == 0) continue;
                if (shifts[a].is_zero()) {
                    term = term * variable(n_, VariableId::phase(a)).pow(e[a]);
                } else {
                    term = term * shifted_power(a, e[a]);
                }
            }
            out += term;
        }
        return out;
    }

    int min_hbar_degree() const {
        int m = std::numeric_limits<int>::max();
        for (const auto& [e, c] : terms_) m = std::min(m, static_cast<int>(e[4 * n_]));
        return m;  // max() for the zero polynomial
    }

    bool is_hbar_free() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [&](const auto& t) { return t.first[4 * n_] == 0; });
    }

    bool is_lambda_free() const {
        return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) {
            for (int a = 0; a < 2 * n_; ++a)
                if (t.first[2 * n_ + a] != 0) return false;
            return true;
        });
    }

    bool is_phase_only() const { return is_hbar_free() && is_lambda_free(); }

    // Exact division by hbar^k: every term must carry at least k powers.
    PolySymbol divided_by_hbar(unsigned k = 1) const {
        PolySymbol out(n_);
        for (const auto& [e, c] : terms_) {
            if (e[4 * n_] < k)
                throw std::logic_error("divided_by_hbar: term with hbar degree below divisor");
            Exponents d = e;
            d[4 * n_] -= k;
            out.terms_[std::move(d)] = c;
        }
        return out;
    }

    PolySymbol times_hbar(unsigned k = 1) const {
        PolySymbol out(n_);
        for (const auto& [e, c] : terms_) {
            Exponents d = e;
            d[4 * n_] += k;
            out.terms_[std::move(d)] = c;
        }
        return out;
    }

    PolySymbol with_hbar_zero() const {
        PolySymbol out(n_);
        for (const auto& [e, c] : terms_)
            if (e[4 * n_] == 0) out.terms_[e] = c;
        return out;
    }

    // lambda -> -lambda; flips the sign of terms odd in lambda.
    PolySymbol with_lambda_negated() const {
        PolySymbol out(n_);
        for (const auto& [e, c] : terms_) {
            std::uint64_t deg = 0;
            for (int a = 0; a < 2 * n_; ++a) deg += e[2 * n_ + a];
            out.terms_[e] = (deg % 2 == 0) ? c : -c;
        }
        return out;
    }

    int total_phase_degree() const {
        int deg = 0;
        for (const auto& [e, c] : terms_) {
            int d = 0;
            for (int a = 0; a < 2 * n_; ++a) d += static_cast<int>(e[a]);
            deg = std::max(deg, d);
        }
        return deg;
    }

    int degree_in(VariableId v) const {
        const int s = slot(v);
        int deg = 0;
        for (const auto& [e, c] : terms_) deg = std::max(deg, static_cast<int>(e[s]));
        return deg;
    }

    // Numerical evaluation for grid sampling; requires a lambda-free polynomial.
    std::complex<double> eval(const std::vector<double>& phase_values, double hbar_value) const {
        if (static_cast<int>(phase_values.size()) != 2 * n_)
            throw std::invalid_argument("eval: expected 2N phase values");
        if (!is_lambda_free())
            throw std::domain_error("eval: polynomial depends on lambda variables");
        std::complex<double> acc{0.0, 0.0};
        for (const auto& [e, c] : terms_) {
            double mono = 1.0;
            for (int a = 0; a < 2 * n_; ++a)
                for (std::uint32_t k = 0; k < e[a]; ++k) mono *= phase_values[a];
            for (std::uint32_t k = 0; k < e[4 * n_]; ++k) mono *= hbar_value;
            acc += std::complex<double>(static_cast<double>(c.re), static_cast<double>(c.im)) * mono;
        }
        return acc;
    }

    std::string render() const;

private:
    int n_;
    TermMap terms_;

    static int check_dim(int N) {
        if (N < 1) throw std::invalid_argument("PolySymbol: dimension N must be positive");
        return N;
    }
    void require_phase_index(int a) const {
        if (a < 0 || a >= 2 * n_) throw std::out_of_range("variable index out of range for N");
    }
    void require_same_dim(const PolySymbol& o) const {
        if (n_ != o.n_) throw std::invalid_argument("PolySymbol: dimension mismatch");
    }
    void add_term(const Exponents& e, const ComplexRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
};

namespace detail {

inline std::string var_name(int N, int slot) {
    // slot < 2N: phase; slot < 4N: lambda; else hbar.
    const bool is_lambda = slot >= 2 * N;
    int a = is_lambda ? slot - 2 * N : slot;
    std::string base = (a < N) ? "q" : "p";
    if (a >= N) a -= N;
    std::string name = (is_lambda ? "l" : "") + base;
    if (N > 1) name += std::to_string(a + 1);
    return name;
}

inline void append_monomial(std::string& out, int N, const PolySymbol::Exponents& e) {
    // Render order: lambda factors, then phase factors, then hbar.
    auto emit = [&](int slot, const std::string& name) {
        if (e[slot] == 0) return;
        if (!out.empty()) out += "*";
        out += name;
        if (e[slot] > 1) out += "^" + std::to_string(e[slot]);
    };
    for (int a = 0; a < 2 * N; ++a) emit(2 * N + a, var_name(N, 2 * N + a));
    for (int a = 0; a < 2 * N; ++a) emit(a, var_name(N, a));
    if (e[4 * N] > 0) {
        if (!out.empty()) out += "*";
        out += "h";
        if (e[4 * N] > 1) out += "^" + std::to_string(e[4 * N]);
    }
}

}  // namespace detail

inline std::string PolySymbol::render() const {
    if (terms_.empty()) return "0";

    struct Piece {
        Rational magnitude;
        bool negative;
        bool imaginary;
        std::string mono;
        int degree;
        Exponents exps;
    };
    std::vector<Piece> pieces;
    for (const auto& [e, c] : terms_) {
        int deg = 0;
        for (int s = 0; s < 4 * n_; ++s) deg += static_cast<int>(e[s]);
        std::string mono;
        detail::append_monomial(mono, n_, e);
        if (c.re != 0) pieces.push_back({abs(c.re), c.re < 0, false, mono, deg, e});
        if (c.im != 0) pieces.push_back({abs(c.im), c.im < 0, true, mono, deg, e});
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
        if (a.degree != b.degree) return a.degree > b.degree;
        return a.exps < b.exps;
    });

    std::string out;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const Piece& p = pieces[k];
        if (k == 0) {
            if (p.negative) out += "-";
        } else {
            out += p.negative ? " - " : " + ";
        }
        std::string factors;
        if (p.magnitude != 1 || (!p.imaginary && p.mono.empty()))
            factors = rational_to_string(p.magnitude);
        if (p.imaginary) {
            if (!factors.empty()) factors += "*";
            factors += "i";
        }
        if (!p.mono.empty()) {
            if (!factors.empty()) factors += "*";
            factors += p.mono;
        }
        out += factors;
    }
    return out;
}

}  // namespace moyal
