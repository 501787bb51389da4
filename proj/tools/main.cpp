// Command-line front end: symbolic star/bracket calculus, dequantisation
// verification, phase-space evolution, Wigner snapshots, oracle comparison,
// and the invariant selftest.
//
// Exit codes: 0 success, 1 scientific failure (an identity or tolerance was
// violated, or a run went unstable), 2 usage or input error.

#include <CLI11.hpp>
#include <json.hpp>

#include "moyal/dynamics.hpp"
#include "moyal/io.hpp"
#include "moyal/moyal.hpp"
#include "moyal/parse.hpp"
#include "moyal/random_poly.hpp"
#include "moyal/schrodinger.hpp"
#include "moyal/selftest.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace moyal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScience = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScienceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string default_output_dir() {
    const char* env = std::getenv("MOYAL_OUTPUT_DIR");
    return (env && *env) ? env : ".";
}

PolySymbol parse_or_usage(const std::string& text, int N) {
    try {
        return parse_poly(text, N);
    } catch (const PolyParseError& e) {
        throw UsageError("cannot parse \"" + text + "\": " + e.what());
    }
}

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw UsageError("bad JSON in " + path + ": " + e.what());
    }
    return j;
}

// Shared evolution setup read from a JSON config, overridable by flags.
struct RunSetup {
    std::string hamiltonian;
    int n_points = 65;
    double box_length = 16.0;
    double hbar = 1.0;
    double dt = 0.0;  // 0 = pick by stability probe
    double t_final = 1.0;
    int snapshot_stride = 100;
    double q0 = 0.0, p0 = 0.0;
    double sigma_q = 0.0, sigma_p = 0.0;  // 0 = coherent width sqrt(hbar/2)
    std::string output_dir;
    bool keep_snapshots = false;
    double tolerance = 1e-3;

    void absorb(const json& j) {
        if (j.contains("hamiltonian")) hamiltonian = j.at("hamiltonian").get<std::string>();
        if (j.contains("n_points")) n_points = j.at("n_points").get<int>();
        if (j.contains("box_length")) box_length = j.at("box_length").get<double>();
        if (j.contains("hbar")) hbar = j.at("hbar").get<double>();
        if (j.contains("dt")) dt = j.at("dt").get<double>();
        if (j.contains("t_final")) t_final = j.at("t_final").get<double>();
        if (j.contains("snapshot_stride")) snapshot_stride = j.at("snapshot_stride").get<int>();
        if (j.contains("q0")) q0 = j.at("q0").get<double>();
        if (j.contains("p0")) p0 = j.at("p0").get<double>();
        if (j.contains("sigma_q")) sigma_q = j.at("sigma_q").get<double>();
        if (j.contains("sigma_p")) sigma_p = j.at("sigma_p").get<double>();
        if (j.contains("output_dir")) output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("keep_snapshots")) keep_snapshots = j.at("keep_snapshots").get<bool>();
        if (j.contains("tolerance")) tolerance = j.at("tolerance").get<double>();
    }

    json effective(const std::string& engine) const {
        return json{{"engine", engine},
                    {"hamiltonian", hamiltonian},
                    {"n_points", n_points},
                    {"box_length", box_length},
                    {"hbar", hbar},
                    {"dt", dt},
                    {"t_final", t_final},
                    {"snapshot_stride", snapshot_stride},
                    {"q0", q0},
                    {"p0", p0},
                    {"sigma_q", sigma_q},
                    {"sigma_p", sigma_p},
                    {"output_dir", output_dir},
                    {"keep_snapshots", keep_snapshots},
                    {"tolerance", tolerance}};
    }
};

void echo_config(const json& cfg, const fs::path& dir) {
    fs::create_directories(dir);
    std::ofstream out(dir / "config.json");
    if (!out) throw std::runtime_error("cannot write " + (dir / "config.json").string());
    out << cfg.dump(2) << "\n";
}

double sup_diff(const GridSymbol& a, const GridSymbol& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

// ---- subcommand bodies -------------------------------------------------------

int run_verify_dequant(const std::string& hamiltonian, int random_count, int max_degree, int dim,
                       unsigned long seed, bool quiet) {
    bool all_exact = true;
    auto report_one = [&](const PolySymbol& H) {
        DequantReport r = dequantise(H);
        all_exact = all_exact && r.exact_equal;
        if (!quiet || !r.exact_equal) std::cout << dequant_report_json(r).dump(2) << "\n";
    };
    if (!hamiltonian.empty()) {
        report_one(parse_or_usage(hamiltonian, dim));
    } else {
        std::mt19937_64 rng(seed);
        RandomPolyOptions opt{.N = dim, .max_degree = max_degree, .max_terms = 6};
        for (int i = 0; i < random_count; ++i) report_one(random_poly(rng, opt));
        std::cout << "checked " << random_count << " random Hamiltonians (dim " << dim
                  << ", max degree " << max_degree << ", seed " << seed << "): "
                  << (all_exact ? "all exact-equal" : "MISMATCH FOUND") << "\n";
    }
    if (!all_exact) throw ScienceError("dequantisation identity violated");
    return kExitOk;
}

int run_star_or_bracket(const std::string& a, const std::string& b, const std::string& kind,
                        int dim) {
    PolySymbol A = parse_or_usage(a, dim), B = parse_or_usage(b, dim);
    PolySymbol out = PolySymbol::zero(dim);
    if (kind == "star")
        out = star_product(A, B);
    else if (kind == "moyal")
        out = moyal_bracket(A, B);
    else if (kind == "poisson")
        out = poisson_bracket(A, B);
    else
        throw UsageError("unknown bracket kind \"" + kind + "\"");
    std::cout << out.render() << "\n";
    return kExitOk;
}

int run_marinov(const std::string& hamiltonian, int dim, bool classical) {
    PolySymbol H = parse_or_usage(hamiltonian, dim);
    try {
        ExtendedHamiltonian ext =
            classical ? classical_extended_hamiltonian(H) : marinov_hamiltonian(H);
        std::cout << ext.body.render() << "\n";
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
    return kExitOk;
}

GridSymbol initial_wigner(const RunSetup& s, const SpatialGrid& g) {
    if (s.sigma_q > 0 || s.sigma_p > 0) {
        double sq = s.sigma_q > 0 ? s.sigma_q : std::sqrt(g.hbar / 2.0);
        double sp = s.sigma_p > 0 ? s.sigma_p : std::sqrt(g.hbar / 2.0);
        return gaussian_wigner(g, s.q0, s.p0, sq, sp);
    }
    return wigner_of_state(coherent_state(g, s.q0, s.p0));
}

int run_evolve(RunSetup s, const std::string& engine_text) {
    if (s.hamiltonian.empty()) throw UsageError("evolve: no Hamiltonian given");
    Engine engine;
    if (engine_text == "moyal")
        engine = Engine::moyal;
    else if (engine_text == "liouville")
        engine = Engine::liouville;
    else
        throw UsageError("unknown engine \"" + engine_text + "\" (use moyal or liouville)");

    PolySymbol H = parse_or_usage(s.hamiltonian, 1);
    SpatialGrid grid(s.n_points, s.box_length, s.hbar);
    if (s.dt <= 0) s.dt = suggest_dt(H, grid, engine);
    if (s.output_dir.empty()) s.output_dir = default_output_dir();

    fs::path dir(s.output_dir);
    json cfg = s.effective(engine_text);
    echo_config(cfg, dir);
    std::cout << "effective config:\n" << cfg.dump(2) << "\n";

    EvolutionConfig ecfg{engine, H,    s.dt, s.t_final, s.snapshot_stride,
                         grid,   s.keep_snapshots};
    Trajectory traj = propagate(ecfg, initial_wigner(s, grid));

    std::string csv = (dir / (std::string("trajectory_") + engine_text + ".csv")).string();
    write_trajectory_csv(traj, csv);
    if (s.keep_snapshots) {
        for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%s_%04zu.f64", engine_text.c_str(), i);
            save_grid_symbol(traj.snapshots[i], (dir / name).string(), "wigner", traj.times[i]);
        }
    }

    const Observables& first = traj.observables.front();
    const Observables& last = traj.observables.back();
    std::cout << "wrote " << csv << " (" << traj.times.size() << " records)\n"
              << "norm drift " << format_double(last.norm - first.norm) << ", final negativity "
              << format_double(last.negativity) << ", final min " << format_double(last.min_value)
              << "\n";
    return kExitOk;
}

int run_wigner(const RunSetup& s, const std::string& state_path, const std::string& output) {
    GridSymbol w = [&] {
        if (!state_path.empty()) return wigner_of_state(load_state(state_path));
        SpatialGrid g(s.n_points, s.box_length, s.hbar);
        return initial_wigner(s, g);
    }();
    Observables o = observables(w);
    std::cout << json{{"norm", o.norm},
                      {"mean_q", o.mean_q},
                      {"mean_p", o.mean_p},
                      {"purity", o.purity},
                      {"negativity", o.negativity},
                      {"min_value", o.min_value}}
                     .dump(2)
              << "\n";
    if (!output.empty()) {
        save_grid_symbol(w, output, "wigner", 0.0);
        std::cout << "wrote " << output << "\n";
    }
    return kExitOk;
}

int run_oracle_compare(RunSetup s) {
    if (s.hamiltonian.empty()) throw UsageError("oracle-compare: no Hamiltonian given");
    PolySymbol H = parse_or_usage(s.hamiltonian, 1);
    auto split = try_split(H);
    if (!split)
        throw UsageError("oracle-compare needs H = c*p^2 + V(q) with c > 0; \"" + s.hamiltonian +
                         "\" does not split");

    SpatialGrid grid(s.n_points, s.box_length, s.hbar);
    if (s.dt <= 0) s.dt = suggest_dt(H, grid, Engine::moyal);

    StateVector psi0 = coherent_state(grid, s.q0, s.p0);
    EvolutionConfig ecfg{Engine::moyal, H, s.dt, s.t_final, s.snapshot_stride, grid, true};
    Trajectory moyal_traj = propagate(ecfg, wigner_of_state(psi0));
    Trajectory oracle_traj = oracle_wigner_trajectory(psi0, *split, s.dt, s.t_final,
                                                      s.snapshot_stride, true);

    if (moyal_traj.times.size() != oracle_traj.times.size())
        throw std::runtime_error("oracle-compare: schedules diverged");

    double sup_w = 0, sup_q = 0, sup_p = 0;
    for (std::size_t i = 0; i < moyal_traj.times.size(); ++i) {
        sup_w = std::max(sup_w, sup_diff(moyal_traj.snapshots[i], oracle_traj.snapshots[i]));
        sup_q = std::max(sup_q, std::abs(moyal_traj.observables[i].mean_q -
                                         oracle_traj.observables[i].mean_q));
        sup_p = std::max(sup_p, std::abs(moyal_traj.observables[i].mean_p -
                                         oracle_traj.observables[i].mean_p));
    }
    std::cout << "compared " << moyal_traj.times.size() << " snapshots up to t="
              << format_double(s.t_final) << " (dt=" << format_double(s.dt) << ")\n"
              << "sup |W_moyal - W_oracle| = " << format_double(sup_w) << "\n"
              << "sup |mean_q difference|  = " << format_double(sup_q) << "\n"
              << "sup |mean_p difference|  = " << format_double(sup_p) << "\n"
              << "tolerance = " << format_double(s.tolerance) << "\n";
    if (sup_w > s.tolerance)
        throw ScienceError("moyal engine disagrees with the Schrodinger oracle: sup diff " +
                           format_double(sup_w) + " > " + format_double(s.tolerance));
    std::cout << "within tolerance\n";
    return kExitOk;
}

int run_selftest_cmd(const std::string& filter) {
    auto results = run_selftest(filter);
    if (results.empty()) throw UsageError("selftest: no suite matches filter \"" + filter + "\"");
    bool all = true;
    for (const auto& r : results) {
        std::printf("%-12s %s  %7.3f s%s%s\n", r.name.c_str(), r.passed ? "pass" : "FAIL",
                    r.seconds, r.detail.empty() ? "" : "  -- ", r.detail.c_str());
        all = all && r.passed;
    }
    if (!all) throw ScienceError("selftest failed");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space calculus: Moyal star products, Marinov dequantisation, and "
                 "Wigner-function dynamics"};
    app.require_subcommand(1);

    // verify-dequant
    std::string vd_hamiltonian;
    int vd_random = 0, vd_max_degree = 6, vd_dim = 1;
    unsigned long vd_seed = 1;
    bool vd_quiet = false;
    auto* vd = app.add_subcommand("verify-dequant",
                                  "check that Grassmann averaging of the Marinov Hamiltonian "
                                  "reproduces the classical one exactly");
    auto* vd_h = vd->add_option("--hamiltonian", vd_hamiltonian, "Hamiltonian polynomial in q,p");
    vd->add_option("--random", vd_random, "number of random Hamiltonians to test")
        ->excludes(vd_h);
    vd->add_option("--max-degree", vd_max_degree, "max degree of random Hamiltonians");
    vd->add_option("--dim", vd_dim, "number of degrees of freedom N");
    vd->add_option("--seed", vd_seed, "random seed");
    vd->add_flag("--quiet", vd_quiet, "print reports only for mismatches");

    // star / bracket
    std::string st_a, st_b, br_kind = "moyal";
    int st_dim = 1;
    auto* st = app.add_subcommand("star", "Moyal star product of two polynomials");
    st->add_option("a", st_a, "left factor")->required();
    st->add_option("b", st_b, "right factor")->required();
    st->add_option("--dim", st_dim, "number of degrees of freedom N");

    std::string br_a, br_b;
    int br_dim = 1;
    auto* br = app.add_subcommand("bracket", "Moyal or Poisson bracket of two polynomials");
    br->add_option("a", br_a, "left argument")->required();
    br->add_option("b", br_b, "right argument")->required();
    br->add_option("--kind", br_kind, "moyal|poisson")->check(CLI::IsMember({"moyal", "poisson"}));
    br->add_option("--dim", br_dim, "number of degrees of freedom N");

    // marinov
    std::string mv_hamiltonian;
    int mv_dim = 1;
    bool mv_classical = false;
    auto* mv = app.add_subcommand("marinov",
                                  "extended (lambda-dependent) Hamiltonian of a plain one");
    mv->add_option("--hamiltonian", mv_hamiltonian, "Hamiltonian polynomial in q,p")->required();
    mv->add_option("--dim", mv_dim, "number of degrees of freedom N");
    mv->add_flag("--classical", mv_classical, "emit the classical form instead of the quantum one");

    // evolve
    std::string ev_config, ev_engine = "moyal";
    RunSetup ev;
    auto* evc = app.add_subcommand("evolve", "integrate the Wigner/Liouville equation on a grid");
    evc->add_option("--config", ev_config, "JSON run configuration");
    evc->add_option("--engine", ev_engine, "moyal|liouville");
    auto* ev_h = evc->add_option("--hamiltonian", ev.hamiltonian, "override: Hamiltonian");
    auto* ev_n = evc->add_option("--n-points", ev.n_points, "override: grid points (odd)");
    auto* ev_l = evc->add_option("--box-length", ev.box_length, "override: box length");
    auto* ev_hb = evc->add_option("--hbar", ev.hbar, "override: hbar");
    auto* ev_dt = evc->add_option("--dt", ev.dt, "override: time step (0 = auto)");
    auto* ev_tf = evc->add_option("--t-final", ev.t_final, "override: final time");
    auto* ev_ss = evc->add_option("--stride", ev.snapshot_stride, "override: record stride");
    auto* ev_q0 = evc->add_option("--q0", ev.q0, "override: initial centre q");
    auto* ev_p0 = evc->add_option("--p0", ev.p0, "override: initial centre p");
    auto* ev_out = evc->add_option("--output-dir", ev.output_dir, "override: output directory");
    auto* ev_ks = evc->add_flag("--snapshots", ev.keep_snapshots, "write Wigner snapshots");

    // wigner
    RunSetup wg;
    std::string wg_state, wg_output;
    auto* wgc = app.add_subcommand("wigner", "Wigner function of a state, with observables");
    wgc->add_option("--state", wg_state, "state file to transform");
    wgc->add_option("--n-points", wg.n_points, "grid points (odd)");
    wgc->add_option("--box-length", wg.box_length, "box length");
    wgc->add_option("--hbar", wg.hbar, "hbar");
    wgc->add_option("--q0", wg.q0, "coherent-state centre q");
    wgc->add_option("--p0", wg.p0, "coherent-state centre p");
    wgc->add_option("--output", wg_output, "write the grid to this file");

    // oracle-compare
    std::string oc_config;
    RunSetup oc;
    auto* occ = app.add_subcommand(
        "oracle-compare", "compare the moyal engine against a split-operator Schrodinger run");
    occ->add_option("--config", oc_config, "JSON run configuration");
    auto* oc_h = occ->add_option("--hamiltonian", oc.hamiltonian, "override: Hamiltonian");
    auto* oc_n = occ->add_option("--n-points", oc.n_points, "override: grid points (odd)");
    auto* oc_l = occ->add_option("--box-length", oc.box_length, "override: box length");
    auto* oc_hb = occ->add_option("--hbar", oc.hbar, "override: hbar");
    auto* oc_dt = occ->add_option("--dt", oc.dt, "override: time step (0 = auto)");
    auto* oc_tf = occ->add_option("--t-final", oc.t_final, "override: final time");
    auto* oc_ss = occ->add_option("--stride", oc.snapshot_stride, "override: compare stride");
    auto* oc_q0 = occ->add_option("--q0", oc.q0, "override: initial centre q");
    auto* oc_p0 = occ->add_option("--p0", oc.p0, "override: initial centre p");
    auto* oc_tol = occ->add_option("--tolerance", oc.tolerance, "override: sup-diff tolerance");

    // selftest
    std::string stf_filter;
    auto* stc = app.add_subcommand("selftest", "run the invariant suite at reduced sizes");
    stc->add_option("--filter", stf_filter, "run only suites whose name contains this text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*vd) {
            if (vd_hamiltonian.empty() && vd_random <= 0)
                throw UsageError("verify-dequant: give --hamiltonian or --random COUNT");
            return run_verify_dequant(vd_hamiltonian, vd_random, vd_max_degree, vd_dim, vd_seed,
                                      vd_quiet);
        }
        if (*st) return run_star_or_bracket(st_a, st_b, "star", st_dim);
        if (*br) return run_star_or_bracket(br_a, br_b, br_kind, br_dim);
        if (*mv) return run_marinov(mv_hamiltonian, mv_dim, mv_classical);
        if (*evc) {
            RunSetup s;
            if (!ev_config.empty()) s.absorb(load_config(ev_config));
            if (*ev_h) s.hamiltonian = ev.hamiltonian;
            if (*ev_n) s.n_points = ev.n_points;
            if (*ev_l) s.box_length = ev.box_length;
            if (*ev_hb) s.hbar = ev.hbar;
            if (*ev_dt) s.dt = ev.dt;
            if (*ev_tf) s.t_final = ev.t_final;
            if (*ev_ss) s.snapshot_stride = ev.snapshot_stride;
            if (*ev_q0) s.q0 = ev.q0;
            if (*ev_p0) s.p0 = ev.p0;
            if (*ev_out) s.output_dir = ev.output_dir;
            if (*ev_ks) s.keep_snapshots = true;
            return run_evolve(s, ev_engine);
        }
        if (*wgc) return run_wigner(wg, wg_state, wg_output);
        if (*occ) {
            RunSetup s;
            s.tolerance = 1e-3;
            if (!oc_config.empty()) s.absorb(load_config(oc_config));
            if (*oc_h) s.hamiltonian = oc.hamiltonian;
            if (*oc_n) s.n_points = oc.n_points;
            if (*oc_l) s.box_length = oc.box_length;
            if (*oc_hb) s.hbar = oc.hbar;
            if (*oc_dt) s.dt = oc.dt;
            if (*oc_tf) s.t_final = oc.t_final;
            if (*oc_ss) s.snapshot_stride = oc.snapshot_stride;
            if (*oc_q0) s.q0 = oc.q0;
            if (*oc_p0) s.p0 = oc.p0;
            if (*oc_tol) s.tolerance = oc.tolerance;
            return run_oracle_compare(s);
        }
        if (*stc) return run_selftest_cmd(stf_filter);
        throw UsageError("no subcommand given");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PolyParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ScienceError& e) {
        std::cerr << "FAILED: " << e.what() << "\n";
        return kExitScience;
    } catch (const InstabilityError& e) {
        std::cerr << "FAILED: " << e.what() << "\n";
        return kExitScience;
    } catch (const BoundaryMassError& e) {
        std::cerr << "FAILED: " << e.what() << "\n";
        return kExitScience;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
