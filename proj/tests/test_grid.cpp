#include <catch2/catch_amalgamated.hpp>

#include "moyal/grid.hpp"
#include "moyal/parse.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace moyal;

namespace {

OperatorMatrix random_operator(const SpatialGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    OperatorMatrix O(g);
    for (auto& e : O.entries) e = std::complex<double>(u(rng), u(rng));
    return O;
}

GridSymbol random_symbol(const SpatialGrid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    GridSymbol A(g);
    for (auto& v : A.values) v = std::complex<double>(u(rng), u(rng));
    return A;
}

double max_diff(const GridSymbol& a, const GridSymbol& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

}  // namespace

TEST_CASE("grid geometry") {
    SpatialGrid g(65, 16.0, 0.5);
    CHECK(g.dq() == Catch::Approx(16.0 / 65));
    CHECK(g.dq() * g.dp() * g.n_points == Catch::Approx(2.0 * std::numbers::pi * g.hbar));
    CHECK(g.q(g.center()) == 0.0);
    CHECK(g.p(g.center()) == 0.0);
    CHECK(g.q(0) == Catch::Approx(-g.q(g.n_points - 1)));
    CHECK_THROWS_AS(SpatialGrid(2, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(9, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(9, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("Weyl symbol of the identity and of position") {
    SpatialGrid g(33, 10.0, 1.0);
    GridSymbol one = weyl_symbol(OperatorMatrix::identity(g));
    for (const auto& v : one.values) CHECK(std::abs(v - 1.0) < 1e-12);

    GridSymbol pos = weyl_symbol(OperatorMatrix::position(g));
    for (int j = 0; j < g.n_points; ++j)
        for (int k = 0; k < g.n_points; ++k) CHECK(std::abs(pos.at(j, k) - g.q(j)) < 1e-10);
}

TEST_CASE("Weyl transform round trip and even grid rejection") {
    SpatialGrid g(65, 12.0, 0.7);
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 3; ++iter) {
        OperatorMatrix O = random_operator(g, rng);
        OperatorMatrix back = weyl_quantize(weyl_symbol(O));
        double m = 0;
        for (std::size_t i = 0; i < O.entries.size(); ++i)
            m = std::max(m, std::abs(O.entries[i] - back.entries[i]));
        CHECK(m < 1e-12);
    }

    SpatialGrid even(64, 12.0, 0.7);
    CHECK_THROWS_AS(weyl_symbol(OperatorMatrix::identity(even)), std::invalid_argument);
}

TEST_CASE("Hermitian operators have real symbols") {
    SpatialGrid g(33, 10.0, 1.0);
    std::mt19937_64 rng(22);
    OperatorMatrix O = random_operator(g, rng);
    OperatorMatrix H(g);
    for (int j = 0; j < g.n_points; ++j)
        for (int k = 0; k < g.n_points; ++k) H.at(j, k) = O.at(j, k) + std::conj(O.at(k, j));
    GridSymbol s = weyl_symbol(H);
    for (const auto& v : s.values) CHECK(std::abs(v.imag()) < 1e-10);
}

TEST_CASE("trace identity: sum of symbol products equals n Tr(AB)") {
    SpatialGrid g(33, 10.0, 1.0);
    std::mt19937_64 rng(23);
    OperatorMatrix A = random_operator(g, rng), B = random_operator(g, rng);
    std::complex<double> lhs = 0;
    GridSymbol As = weyl_symbol(A), Bs = weyl_symbol(B);
    for (std::size_t i = 0; i < As.values.size(); ++i) lhs += As.values[i] * Bs.values[i];
    std::complex<double> tr = 0;
    OperatorMatrix AB = matmul(A, B);
    for (int j = 0; j < g.n_points; ++j) tr += AB.at(j, j);
    CHECK(std::abs(lhs - static_cast<double>(g.n_points) * tr) < 1e-8 * std::abs(lhs));
}

TEST_CASE("grid star product: unit and associativity") {
    SpatialGrid g(33, 10.0, 1.0);
    std::mt19937_64 rng(24);
    GridSymbol one(g);
    for (auto& v : one.values) v = 1.0;
    GridSymbol B = random_symbol(g, rng);
    CHECK(max_diff(grid_star(one, B), B) < 1e-10);
    CHECK(max_diff(grid_star(B, one), B) < 1e-10);

    GridSymbol A = random_symbol(g, rng), C = random_symbol(g, rng);
    GridSymbol lhs = grid_star(grid_star(A, B), C);
    GridSymbol rhs = grid_star(A, grid_star(B, C));
    CHECK(max_diff(lhs, rhs) < 1e-7 * std::max(1.0, lhs.max_abs()));
}

TEST_CASE("Wigner function of a coherent state matches the analytic Gaussian") {
    SpatialGrid g(65, 16.0, 1.0);
    const double q0 = 1.0, p0 = -0.5, sigma = std::sqrt(g.hbar / 2.0);
    GridSymbol w = wigner_of_state(coherent_state(g, q0, p0));
    GridSymbol ref = gaussian_wigner(g, q0, p0, sigma, sigma);
    CHECK(max_diff(w, ref) < 1e-8);

    Observables obs = observables(w);
    CHECK(obs.norm == Catch::Approx(1.0).margin(1e-9));
    CHECK(obs.mean_q == Catch::Approx(q0).margin(1e-8));
    CHECK(obs.mean_p == Catch::Approx(p0).margin(1e-8));
    CHECK(obs.purity == Catch::Approx(1.0).margin(1e-6));
    CHECK(obs.negativity <= 1e-9);
}

TEST_CASE("Wigner symmetry for a real wavefunction") {
    SpatialGrid g(65, 16.0, 1.0);
    GridSymbol w = wigner_of_state(coherent_state(g, 0.5, 0.0));
    // real psi => W(q, -p) = W(q, p); the lattice p -> -p map is k -> n-1-k
    double m = 0;
    for (int j = 0; j < g.n_points; ++j)
        for (int k = 0; k < g.n_points; ++k)
            m = std::max(m, std::abs(w.at(j, k) - w.at(j, g.n_points - 1 - k)));
    CHECK(m < 1e-10);
}

TEST_CASE("first excited oscillator state has a negative Wigner region") {
    SpatialGrid g(65, 16.0, 1.0);
    std::vector<std::complex<double>> amp(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
        double x = g.q(j);
        amp[j] = x * std::exp(-x * x / (2.0 * g.hbar));
    }
    Observables obs = observables(wigner_of_state(StateVector(g, std::move(amp))));
    CHECK(obs.min_value < -1e-3);
    CHECK(obs.negativity > 1e-3);
    CHECK(obs.norm == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("grid right-hand side vanishes on constants and integrates to zero") {
    SpatialGrid g(65, 16.0, 1.0);
    PolySymbol H = parse_poly("0.5*q^2 + 0.5*p^2 + 0.25*q^4", 1);
    GridSymbol constant(g);
    for (auto& v : constant.values) v = 0.37;
    CHECK(GridRhsPlan(H, g, true).apply(constant).max_abs() < 1e-12);
    CHECK(GridRhsPlan(H, g, false).apply(constant).max_abs() < 1e-12);

    GridSymbol rho = gaussian_wigner(g, 1.0, 0.0, 0.7, 0.7);
    GridSymbol rhs = grid_moyal_rhs(H, rho);
    std::complex<double> total = 0;
    for (const auto& v : rhs.values) total += v;
    CHECK(std::abs(total) * g.dq() * g.dp() < 1e-9);
}

TEST_CASE("quadratic Hamiltonians: quantum and classical grid generators agree") {
    SpatialGrid g(65, 16.0, 1.0);
    PolySymbol H = parse_poly("0.6*q^2 + 0.4*p^2 - 1/2*q + p", 1);
    GridSymbol rho = gaussian_wigner(g, 0.5, -0.3, 0.8, 0.8);
    GridSymbol a = GridRhsPlan(H, g, true).apply(rho);
    GridSymbol b = GridRhsPlan(H, g, false).apply(rho);
    CHECK(max_diff(a, b) < 1e-12);
}

TEST_CASE("harmonic grid generator matches the analytic Poisson bracket") {
    SpatialGrid g(65, 16.0, 1.0);
    PolySymbol H = parse_poly("0.5*q^2 + 0.5*p^2", 1);
    const double q0 = 1.2, p0 = -0.4, sq = 0.8, sp = 0.9;
    GridSymbol rho = gaussian_wigner(g, q0, p0, sq, sp);
    GridSymbol rhs = grid_liouville_rhs(H, rho);
    // {H, rho}_pb = q d_p rho - p d_q rho for the oscillator
    double m = 0;
    for (int j = 0; j < g.n_points; ++j) {
        double q = g.q(j);
        for (int k = 0; k < g.n_points; ++k) {
            double p = g.p(k);
            double r = rho.at(j, k).real();
            double exact = q * (-(p - p0) / (sp * sp)) * r - p * (-(q - q0) / (sq * sq)) * r;
            m = std::max(m, std::abs(rhs.at(j, k) - exact));
        }
    }
    CHECK(m < 1e-7);
}

TEST_CASE("quartic hbar^2 correction matches the analytic third derivative") {
    SpatialGrid g(65, 16.0, 1.0);
    PolySymbol H = parse_poly("0.25*q^4", 1);
    const double q0 = 0.8, p0 = 0.3, sq = 0.7, sp = 0.9;
    GridSymbol rho = gaussian_wigner(g, q0, p0, sq, sp);
    GridSymbol diff = GridRhsPlan(H, g, true).apply(rho);
    GridSymbol cls = GridRhsPlan(H, g, false).apply(rho);
    // moyal - liouville = -(hbar^2/4) q d_p^3 rho for H = q^4/4
    double m = 0;
    for (int j = 0; j < g.n_points; ++j) {
        double q = g.q(j);
        for (int k = 0; k < g.n_points; ++k) {
            double dpp = g.p(k) - p0;
            double r = rho.at(j, k).real();
            double d3 = (-std::pow(dpp, 3) / std::pow(sp, 6) + 3.0 * dpp / std::pow(sp, 4)) * r;
            double exact = -(g.hbar * g.hbar / 4.0) * q * d3;
            m = std::max(m, std::abs((diff.at(j, k) - cls.at(j, k)) - exact));
        }
    }
    CHECK(m < 1e-7);
}

TEST_CASE("generator rejections and boundary mass guard") {
    SpatialGrid g(65, 16.0, 1.0);
    CHECK_THROWS_AS(GridRhsPlan(parse_poly("h*q", 1), g, true), std::domain_error);
    CHECK_THROWS_AS(GridRhsPlan(parse_poly("lq*p", 1), g, true), std::domain_error);
    CHECK_THROWS_AS(GridRhsPlan(parse_poly("q1*p2", 2), g, true), std::invalid_argument);

    GridSymbol edge = gaussian_wigner(g, 7.5, 0.0, 0.5, 0.5);  // parked on the box edge
    CHECK(boundary_mass_fraction(edge) > 1e-3);
    CHECK_THROWS_AS(grid_moyal_rhs(parse_poly("0.5*p^2", 1), edge), BoundaryMassError);

    GridSymbol good = gaussian_wigner(g, 0.0, 0.0, 0.7, 0.7);
    CHECK(boundary_mass_fraction(good) < 1e-12);
    CHECK_NOTHROW(grid_moyal_rhs(parse_poly("0.5*p^2", 1), good));
}
