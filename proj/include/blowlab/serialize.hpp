#pragma once

// Output formats: JSON Lines for trajectories, single JSON documents for run
// records and spectral/validation reports, CSV for plot export, and a flat
// little-endian binary layout for state snapshots
// (header: u64 node count, f64 p, f64 tau; then 4n f64 fields).

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blowlab/assumption.hpp"
#include "blowlab/error.hpp"
#include "blowlab/evolve.hpp"
#include "blowlab/modulation.hpp"
#include "blowlab/spectrum.hpp"
#include "blowlab/state.hpp"

namespace blowlab::cli {

using nlohmann::json;

inline json sample_to_json(const evolve::Sample& s) {
    json j;
    j["tau"] = s.tau;
    j["sup_dev"] = s.sup_dev;
    j["theta"] = s.theta;
    j["theta_valid"] = s.theta_valid;
    j["coeff_r"] = s.coeff_r;
    j["coeff_g"] = s.coeff_g;
    j["remainder_norm"] = s.remainder_norm;
    j["w_norm"] = s.w_norm;
    j["n2"] = s.n2;
    j["n1"] = s.n1;
    j["n0"] = s.n0;
    return j;
}

inline void write_trajectory_jsonl(const std::string& path, const evolve::Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write trajectory file '" + path + "'");
    for (const auto& s : traj.samples) out << sample_to_json(s).dump() << "\n";
}

inline std::vector<evolve::Sample> read_trajectory_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("trajectory", "cannot open '" + path + "'");
    std::vector<evolve::Sample> samples;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        evolve::Sample s;
        s.tau = j.value("tau", 0.0);
        s.sup_dev = j.value("sup_dev", 0.0);
        s.theta = j.value("theta", 0.0);
        s.theta_valid = j.value("theta_valid", false);
        s.coeff_r = j.value("coeff_r", 0.0);
        s.coeff_g = j.value("coeff_g", 0.0);
        s.remainder_norm = j.value("remainder_norm", 0.0);
        s.w_norm = j.value("w_norm", 0.0);
        s.n2 = j.value("n2", 0.0);
        s.n1 = j.value("n1", 0.0);
        s.n0 = j.value("n0", 0.0);
        samples.push_back(s);
    }
    return samples;
}

inline json fit_to_json(const modulation::DecayFit& f) {
    json j;
    j["omega"] = f.omega;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["window"] = {f.window_lo, f.window_hi};
    j["points"] = f.points;
    return j;
}

inline json shoot_to_json(const modulation::ShootResult& r) {
    json j;
    j["T_star"] = r.T_star;
    j["theta_inf"] = r.theta_inf;
    j["iterations"] = r.iterations;
    j["bracket"] = {r.bracket_lo, r.bracket_hi};
    j["converged"] = r.converged;
    j["final_coeff_g"] = r.final_coeff_g;
    json its = json::array();
    for (auto [T, cg] : r.iterates) its.push_back({T, cg});
    j["iterates"] = its;
    return j;
}

inline json spectral_to_json(const specfun::SpectralResult& r) {
    json j;
    j["p"] = r.p;
    j["mu"] = r.mu;
    j["region"] = {{"re_lo", r.region.re_lo},
                   {"re_hi", r.region.re_hi},
                   {"im_lo", r.region.im_lo},
                   {"im_hi", r.region.im_hi}};
    j["grid_step"] = r.grid_step;
    json evs = json::array();
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        json e;
        e["re"] = r.eigenvalues[i].real();
        e["im"] = r.eigenvalues[i].imag();
        e["abs_c1"] = r.records[i].abs_c1;
        e["ode_residual"] = r.records[i].ode_residual;
        evs.push_back(e);
    }
    j["eigenvalues"] = evs;
    return j;
}

inline json report_to_json(const assumption::AssumptionReport& r) {
    json j;
    j["M"] = r.M;
    j["q"] = r.q;
    j["p"] = r.p;
    j["seed"] = r.seed;
    j["samples_checked"] = r.samples_checked;
    j["passed"] = r.passed();
    j["strict_derF_exceedances"] = r.strict_derF_exceedances;
    j["max_ratio"] = {{"estBC", r.max_ratio_estBC},
                      {"estimateV1", r.max_ratio_estimateV1},
                      {"estderF", r.max_ratio_estderF},
                      {"estLipF", r.max_ratio_estLipF}};
    json viol = json::array();
    for (const auto& v : r.violations) {
        json e;
        e["inequality"] = v.inequality;
        e["detail"] = v.detail;
        e["lhs"] = v.lhs;
        e["rhs"] = v.rhs;
        e["point"] = {{"t", v.point.t},     {"r", v.point.r},
                      {"u_re", v.point.u.real()}, {"u_im", v.point.u.imag()},
                      {"v_re", v.point.v.real()}, {"v_im", v.point.v.imag()},
                      {"w_re", v.point.w.real()}, {"w_im", v.point.w.imag()}};
        if (v.pair)
            e["point2"] = {{"u_re", v.point2.u.real()}, {"u_im", v.point2.u.imag()},
                           {"v_re", v.point2.v.real()}, {"v_im", v.point2.v.imag()},
                           {"w_re", v.point2.w.real()}, {"w_im", v.point2.w.imag()}};
        viol.push_back(e);
    }
    j["violations"] = viol;
    return j;
}

// ---------------------------------------------------------------------------
// Binary state snapshots
// ---------------------------------------------------------------------------

inline void write_snapshot(const std::string& path, const FieldState& st, double p) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write snapshot '" + path + "'");
    std::uint64_t n = static_cast<std::uint64_t>(st.size());
    double tau = st.tau;
    out.write(reinterpret_cast<const char*>(&n), 8);
    out.write(reinterpret_cast<const char*>(&p), 8);
    out.write(reinterpret_cast<const char*>(&tau), 8);
    for (int c = 0; c < 4; ++c)
        out.write(reinterpret_cast<const char*>(st.comp[c].data()),
                  static_cast<std::streamsize>(8 * st.comp[c].size()));
}

struct Snapshot {
    FieldState state;
    double p = 0;
};

inline Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("snapshot", "cannot open '" + path + "'");
    std::uint64_t n = 0;
    double p = 0, tau = 0;
    in.read(reinterpret_cast<char*>(&n), 8);
    in.read(reinterpret_cast<char*>(&p), 8);
    in.read(reinterpret_cast<char*>(&tau), 8);
    if (!in || n == 0 || n > (1ull << 24)) throw ValidationError("snapshot", "corrupt header");
    Snapshot snap;
    snap.p = p;
    snap.state.tau = tau;
    for (int c = 0; c < 4; ++c) {
        snap.state.comp[c].resize(n);
        in.read(reinterpret_cast<char*>(snap.state.comp[c].data()),
                static_cast<std::streamsize>(8 * n));
    }
    if (!in) throw ValidationError("snapshot", "truncated snapshot");
    return snap;
}

}  // namespace blowlab::cli
