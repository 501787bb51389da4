#pragma once

#include "moyal/dynamics.hpp"
#include "moyal/grid.hpp"
#include "moyal/moyal.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace moyal {

// GridSymbol snapshots hold the real part as raw little-endian 64-bit floats,
// row-major and q-major, next to a JSON sidecar "<path>.json" with
// {n_points, box_length, hbar, kind, time}. StateVector files interleave
// (re, im) pairs in the same raw format.

inline void write_sidecar(const std::string& path, const SpatialGrid& g, const std::string& kind,
                          double time) {
    nlohmann::json j{{"n_points", g.n_points},
                     {"box_length", g.length},
                     {"hbar", g.hbar},
                     {"kind", kind},
                     {"time", time}};
    std::ofstream out(path + ".json");
    if (!out) throw std::runtime_error("cannot write " + path + ".json");
    out << j.dump(2) << "\n";
}

inline void save_grid_symbol(const GridSymbol& s, const std::string& path, const std::string& kind,
                             double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& v : s.values) {
        double re = v.real();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
    }
    write_sidecar(path, s.grid, kind, time);
}

inline GridSymbol load_grid_symbol(const std::string& path) {
    std::ifstream meta(path + ".json");
    if (!meta) throw std::runtime_error("cannot read " + path + ".json");
    nlohmann::json j;
    meta >> j;
    SpatialGrid g(j.at("n_points").get<int>(), j.at("box_length").get<double>(),
                  j.at("hbar").get<double>());
    GridSymbol s(g);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    for (auto& v : s.values) {
        double re = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        v = re;
    }
    if (!in) throw std::runtime_error("truncated grid file " + path);
    return s;
}

inline void save_state(const StateVector& psi, const std::string& path, double time) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    for (const auto& a : psi.amplitudes) {
        double re = a.real(), im = a.imag();
        out.write(reinterpret_cast<const char*>(&re), sizeof(double));
        out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
    write_sidecar(path, psi.grid, "state", time);
}

inline StateVector load_state(const std::string& path) {
    std::ifstream meta(path + ".json");
    if (!meta) throw std::runtime_error("cannot read " + path + ".json");
    nlohmann::json j;
    meta >> j;
    SpatialGrid g(j.at("n_points").get<int>(), j.at("box_length").get<double>(),
                  j.at("hbar").get<double>());
    std::vector<std::complex<double>> amp(g.n_points);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    for (auto& a : amp) {
        double re = 0, im = 0;
        in.read(reinterpret_cast<char*>(&re), sizeof(double));
        in.read(reinterpret_cast<char*>(&im), sizeof(double));
        a = {re, im};
    }
    if (!in) throw std::runtime_error("truncated state file " + path);
    return StateVector(g, std::move(amp));
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "t,norm,mean_q,mean_p,purity,negativity,min_value\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const auto& o = traj.observables[i];
        out << format_double(traj.times[i]) << ',' << format_double(o.norm) << ','
            << format_double(o.mean_q) << ',' << format_double(o.mean_p) << ','
            << format_double(o.purity) << ',' << format_double(o.negativity) << ','
            << format_double(o.min_value) << '\n';
    }
}

inline Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t,norm,mean_q,mean_p,purity,negativity,min_value")
        throw std::runtime_error("unexpected CSV header in " + path);
    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string field;
        double vals[7];
        for (int i = 0; i < 7; ++i) {
            if (!std::getline(ss, field, ',')) throw std::runtime_error("short CSV row in " + path);
            vals[i] = std::stod(field);
        }
        traj.times.push_back(vals[0]);
        traj.observables.push_back({vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]});
    }
    return traj;
}

inline nlohmann::json dequant_report_json(const DequantReport& r) {
    return nlohmann::json{
        {"input", r.input.render()},
        {"marinov", r.marinov.body.render()},
        {"shifted_theta_thetabar", r.shifted.M.render()},
        {"shifted_hbar_free", r.shifted_hbar_free},
        {"berezin", r.berezin.render()},
        {"classical", r.classical.render()},
        {"difference", r.difference.render()},
        {"verdict", r.exact_equal ? "exact-equal" : "mismatch"},
    };
}

}  // namespace moyal
