#pragma once

// Command implementations behind the CLI: configuration resolution, the
// simulate/shoot pipelines with their observers, sweeps over a parameter
// axis, spectral scans, assumption validation, and CSV plot export.
//
// Exit-code contract (mapped in the CLI main):
//   0 success, 1 validation error, 2 scientific failure (no sign change,
//   instability, blowup before the requested time), 3 internal error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "blowlab/config.hpp"
#include "blowlab/error.hpp"
#include "blowlab/evolve.hpp"
#include "blowlab/modulation.hpp"
#include "blowlab/physical.hpp"
#include "blowlab/serialize.hpp"
#include "blowlab/similarity.hpp"

namespace blowlab::cli {

inline const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Config resolution
// ---------------------------------------------------------------------------

inline std::optional<expr::PerturbationExpr> resolve_perturbation(const RunConfig& cfg) {
    if (cfg.perturbation == "none" || cfg.perturbation.empty()) return std::nullopt;
    if (cfg.perturbation.rfind("expr:", 0) == 0)
        return expr::PerturbationExpr::parse(cfg.perturbation.substr(5));
    if (expr::is_preset_name(cfg.perturbation)) return expr::preset(cfg.perturbation);
    throw ValidationError("perturbation",
                          "unknown preset '" + cfg.perturbation + "' (use expr:<text> for raw expressions)");
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Natural cubic spline through (x_i, y_i); x strictly increasing.
struct CubicSpline {
    std::vector<double> x, y, m;  // m: second derivatives

    static CubicSpline fit(std::vector<double> xs, std::vector<double> ys) {
        std::size_t n = xs.size();
        if (n < 3) throw ValidationError("data", "need at least 3 samples for spline data");
        for (std::size_t i = 1; i < n; ++i)
            if (!(xs[i] > xs[i - 1]))
                throw ValidationError("data", "radii must be strictly increasing");
        std::vector<double> a(n, 0), b(n, 1), c(n, 0), d(n, 0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            double h0 = xs[i] - xs[i - 1], h1 = xs[i + 1] - xs[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0;
        }
        // Thomas solve with natural ends m_0 = m_{n-1} = 0
        for (std::size_t i = 2; i + 1 < n; ++i) {
            double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        std::vector<double> m(n, 0.0);
        for (std::size_t i = n - 2; i >= 1; --i) {
            m[i] = (d[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
            if (i == 1) break;
        }
        CubicSpline s;
        s.x = std::move(xs);
        s.y = std::move(ys);
        s.m = std::move(m);
        return s;
    }

    double eval(double t) const {
        std::size_t n = x.size();
        if (t <= x.front()) t = x.front();
        if (t >= x.back()) t = x.back();
        std::size_t i = 1;
        while (i + 1 < n && x[i] < t) ++i;
        double h = x[i] - x[i - 1];
        double A = (x[i] - t) / h, B = (t - x[i - 1]) / h;
        return A * y[i - 1] + B * y[i] +
               ((A * A * A - A) * m[i - 1] + (B * B * B - B) * m[i]) * h * h / 6.0;
    }
};

inline profile::DataPair load_file_data(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("initial_data", "cannot open data file '" + path + "'");
    std::vector<double> r, fre, fim, gre, gim;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto parts = split(line, ',');
        if (parts.size() != 5)
            throw ValidationError("initial_data", "expected lines r,f_re,f_im,g_re,g_im");
        r.push_back(std::stod(parts[0]));
        fre.push_back(std::stod(parts[1]));
        fim.push_back(std::stod(parts[2]));
        gre.push_back(std::stod(parts[3]));
        gim.push_back(std::stod(parts[4]));
    }
    auto sre = std::make_shared<CubicSpline>(CubicSpline::fit(r, fre));
    auto sim = std::make_shared<CubicSpline>(CubicSpline::fit(r, fim));
    auto tre = std::make_shared<CubicSpline>(CubicSpline::fit(r, gre));
    auto tim = std::make_shared<CubicSpline>(CubicSpline::fit(r, gim));
    double radius = r.back();
    profile::DataPair data;
    data.f = profile::RadialFn{[sre, sim](double rr) { return cplx(sre->eval(rr), sim->eval(rr)); },
                               radius};
    data.g = profile::RadialFn{[tre, tim](double rr) { return cplx(tre->eval(rr), tim->eval(rr)); },
                               radius};
    return data;
}

}  // namespace detail

inline profile::DataPair resolve_initial_data(const RunConfig& cfg) {
    const std::string& spec = cfg.initial_data;
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (kind == "exact_profile") {
        double T_data = 1.0, theta = 0.0;
        if (!args.empty()) {
            auto parts = detail::split(args, ',');
            T_data = std::stod(parts[0]);
            if (parts.size() > 1) theta = std::stod(parts[1]);
            if (parts.size() > 2) throw ValidationError("initial_data", "too many arguments");
        }
        return profile::profile_initial_data(cfg.p, T_data, theta, cfg.T0);
    }
    if (kind == "profile_plus_bump") {
        auto parts = detail::split(args, ',');
        if (parts.size() < 2)
            throw ValidationError("initial_data", "profile_plus_bump:amplitude,width[,phase[,T]]");
        double amp = std::stod(parts[0]);
        double width = std::stod(parts[1]);
        double phase = 0.0;
        if (parts.size() > 2) {
            if (parts[2] == "seeded") {
                Rng rng(cfg.seed);
                phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
            } else {
                phase = std::stod(parts[2]);
            }
        }
        double T_data = parts.size() > 3 ? std::stod(parts[3]) : 1.0;
        auto base = profile::profile_initial_data(cfg.p, T_data, 0.0, cfg.T0);
        return profile::add_bump(base, profile::gaussian_bump(amp, width, phase));
    }
    if (kind == "file") {
        if (args.empty()) throw ValidationError("initial_data", "file:<path>");
        return detail::load_file_data(args);
    }
    if (kind == "snapshot") {
        if (args.empty()) throw ValidationError("initial_data", "snapshot:<path>");
        auto snap = read_snapshot(args);
        auto g = std::make_shared<grid::RadialGrid>(grid::RadialGrid::make(snap.state.size()));
        auto st = std::make_shared<FieldState>(snap.state);
        // snapshot stores the similarity state; expose it as lightcone data
        profile::SimilarityFrame frame(0.5 * (cfg.T_lo + cfg.T_hi), cfg.T0);
        auto sec = similarity::from_similarity(frame, *st, *g, cfg.p);
        double radius = sec.radius;
        auto usec = std::make_shared<std::vector<cplx>>(sec.u);
        auto utsec = std::make_shared<std::vector<cplx>>(sec.ut);
        profile::DataPair data;
        data.f = profile::RadialFn{
            [g, usec, radius](double rr) { return g->interpolate(*usec, rr / radius); }, radius};
        data.g = profile::RadialFn{
            [g, utsec, radius](double rr) { return g->interpolate(*utsec, rr / radius); }, radius};
        return data;
    }
    throw ValidationError("initial_data", "unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Observers shared by the simulate and shoot pipelines
// ---------------------------------------------------------------------------

namespace detail {

struct ObserverContext {
    const evolve::EquationSpec* spec = nullptr;
    const grid::RadialGrid* grid = nullptr;
    FieldState reference;
    bool with_norms = true;
};

inline std::function<evolve::Sample(const FieldState&)> make_observer(
    std::shared_ptr<ObserverContext> ctx) {
    auto last_theta = std::make_shared<double>(0.0);
    return [ctx, last_theta](const FieldState& st) {
        evolve::Sample s;
        s.tau = st.tau;
        s.sup_dev = st.sup_distance(ctx->reference);
        try {
            s.theta = modulation::extract_theta(st, *ctx->grid);
            s.theta_valid = true;
            *last_theta = s.theta;
        } catch (const ScientificError&) {
            s.theta = *last_theta;
            s.theta_valid = false;
        }
        auto proj = modulation::project_modes(st, *ctx->grid, ctx->spec->p, s.theta);
        s.coeff_r = proj.coeff_r;
        s.coeff_g = proj.coeff_g;
        s.remainder_norm = proj.remainder_norm;
        if (ctx->spec->perturbation)
            s.w_norm = evolve::w_term_norm(st, *ctx->spec, *ctx->grid);
        if (ctx->with_norms) {
            auto sec = similarity::from_similarity(ctx->spec->frame, st, *ctx->grid, ctx->spec->p);
            profile::BlowupProfile prof{ctx->spec->frame.T, s.theta, ctx->spec->p};
            auto n = modulation::lightcone_norms(sec, prof, sec.t);
            s.n2 = n.n2;
            s.n1 = n.n1;
            s.n0 = n.n0;
        }
        return s;
    };
}

inline std::optional<modulation::DecayFit> try_fit(
    const std::vector<std::pair<double, double>>& series, double lo, double hi) {
    try {
        return modulation::fit_decay(series, lo, hi);
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

inline json fits_json(const evolve::Trajectory& traj, double lo, double hi) {
    auto series_of = [&](auto getter) {
        std::vector<std::pair<double, double>> s;
        for (const auto& smp : traj.samples) s.push_back({smp.tau, getter(smp)});
        return s;
    };
    json fits;
    auto put = [&](const char* name, auto getter) {
        auto fit = try_fit(series_of(getter), lo, hi);
        fits[name] = fit ? fit_to_json(*fit) : json(nullptr);
    };
    put("n2", [](const evolve::Sample& s) { return s.n2; });
    put("n1", [](const evolve::Sample& s) { return s.n1; });
    put("n0", [](const evolve::Sample& s) { return s.n0; });
    put("remainder", [](const evolve::Sample& s) { return s.remainder_norm; });
    put("w_norm", [](const evolve::Sample& s) { return s.w_norm; });
    return fits;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

inline json base_record(const RunConfig& cfg, const char* command) {
    json rec;
    rec["artifact_version"] = kVersion;
    rec["command"] = command;
    json cj;
    for (const auto& [k, v] : cfg.as_map()) cj[k] = v;
    rec["config"] = cj;
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    rec["config_hash"] = hex;
    return rec;
}

inline void write_record(const RunConfig& cfg, const json& rec) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.resolved_output_dir());
    std::string path = cfg.resolved_output_dir() + "/" + cfg.label + ".record.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write record '" + path + "'");
    out << rec.dump(2) << "\n";
}

inline json trajectory_summary(const evolve::Trajectory& traj, const std::string& path) {
    double max_dev = 0, final_theta = 0;
    for (const auto& s : traj.samples) max_dev = std::max(max_dev, s.sup_dev);
    if (!traj.samples.empty()) final_theta = traj.samples.back().theta;
    json t;
    t["path"] = path;
    t["samples"] = traj.samples.size();
    t["tau_final"] = traj.tau_final;
    t["completed"] = traj.completed;
    t["stop_reason"] = traj.stop_reason;
    t["max_sup_deviation"] = max_dev;
    t["final_theta"] = final_theta;
    return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

// Fixed-T evolution (midpoint of the bracket) with observers and decay fits.
inline json cmd_simulate(const RunConfig& cfg) {
    cfg.validate();
    detail::Timer timer;
    double T = 0.5 * (cfg.T_lo + cfg.T_hi);
    evolve::EquationSpec spec{cfg.p, resolve_perturbation(cfg),
                              profile::SimilarityFrame(T, cfg.T0)};
    spec.validate();
    auto g = grid::RadialGrid::make(cfg.grid_n);
    auto data = resolve_initial_data(cfg);
    FieldState init = similarity::to_similarity(spec.frame, data, g, cfg.p);

    auto ctx = std::make_shared<detail::ObserverContext>();
    ctx->spec = &spec;
    ctx->grid = &g;
    ctx->reference = init;

    evolve::EvolveOptions opts;
    opts.tau_max = cfg.tau_max;
    opts.dtau = cfg.dtau;
    opts.sample_dtau = cfg.sample_dtau;
    opts.observe = detail::make_observer(ctx);
    auto traj = evolve::evolve(init, spec, g, opts);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.resolved_output_dir());
    std::string tpath = cfg.resolved_output_dir() + "/" + cfg.label + ".trajectory.jsonl";
    write_trajectory_jsonl(tpath, traj);

    // final state snapshot (documented binary layout)
    write_snapshot(cfg.resolved_output_dir() + "/" + cfg.label + ".state.bin", traj.final_state,
                   cfg.p);

    json rec = detail::base_record(cfg, "simulate");
    rec["T"] = T;
    rec["shoot"] = nullptr;
    rec["fits"] = detail::fits_json(traj, cfg.fit_window_lo,
                                    std::min(cfg.fit_window_hi, traj.tau_final));
    rec["trajectory"] = detail::trajectory_summary(traj, cfg.label + ".trajectory.jsonl");
    rec["wall_time_s"] = timer.seconds();
    detail::write_record(cfg, rec);
    if (!traj.completed)
        throw ScientificError("simulate: " + traj.stop_reason + " (record written)");
    return rec;
}

// Full shooting pipeline: bisect on the unstable-mode coefficient, then
// re-run the shot trajectory with observers and fit the decay series.
inline json cmd_shoot(const RunConfig& cfg) {
    cfg.validate();
    detail::Timer timer;
    evolve::EquationSpec spec_template{cfg.p, resolve_perturbation(cfg),
                                       profile::SimilarityFrame(0.5 * (cfg.T_lo + cfg.T_hi),
                                                                cfg.T0)};
    spec_template.validate();
    auto g = grid::RadialGrid::make(cfg.grid_n);
    auto data = resolve_initial_data(cfg);

    modulation::ShootOptions sopts;
    sopts.tau_horizon = cfg.tau_horizon;
    sopts.tol = cfg.shoot_tol;
    sopts.dtau = cfg.dtau;
    sopts.sample_dtau = cfg.sample_dtau;

    json rec = detail::base_record(cfg, "shoot");
    modulation::ShootResult shot;
    try {
        shot = modulation::shoot_T(data, spec_template, g, cfg.T_lo, cfg.T_hi, sopts);
    } catch (const ScientificError& e) {
        rec["shoot"] = {{"converged", false}, {"error", e.what()}};
        rec["fits"] = nullptr;
        rec["trajectory"] = nullptr;
        rec["wall_time_s"] = timer.seconds();
        detail::write_record(cfg, rec);
        throw;
    }

    // rerun the shot trajectory with full observers
    evolve::EquationSpec spec = spec_template;
    spec.frame = profile::SimilarityFrame(shot.T_star, cfg.T0);
    FieldState init = similarity::to_similarity(spec.frame, data, g, cfg.p);
    auto ctx = std::make_shared<detail::ObserverContext>();
    ctx->spec = &spec;
    ctx->grid = &g;
    ctx->reference = init;
    evolve::EvolveOptions opts;
    opts.tau_max = cfg.tau_horizon;
    opts.dtau = cfg.dtau;
    opts.sample_dtau = cfg.sample_dtau;
    opts.observe = detail::make_observer(ctx);
    auto traj = evolve::evolve(init, spec, g, opts);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.resolved_output_dir());
    std::string tpath = cfg.resolved_output_dir() + "/" + cfg.label + ".trajectory.jsonl";
    write_trajectory_jsonl(tpath, traj);

    rec["shoot"] = shoot_to_json(shot);
    rec["fits"] = detail::fits_json(traj, cfg.fit_window_lo,
                                    std::min(cfg.fit_window_hi, traj.tau_final));
    rec["trajectory"] = detail::trajectory_summary(traj, cfg.label + ".trajectory.jsonl");
    rec["wall_time_s"] = timer.seconds();
    detail::write_record(cfg, rec);
    return rec;
}

inline json cmd_spectrum(double p, const std::string& mu_spec, const specfun::Region& region,
                         double grid_step) {
    double mu;
    if (mu_spec == "nu")
        mu = specfun::mu_nu(p);
    else if (mu_spec == "phi")
        mu = specfun::mu_phi(p);
    else {
        try {
            mu = std::stod(mu_spec);
        } catch (...) {
            throw ValidationError("mu", "expected 'nu', 'phi', or a number");
        }
    }
    return spectral_to_json(specfun::eigenvalue_scan(p, mu, region, grid_step));
}

inline json cmd_validate(const std::string& expression, double p, double q, double M,
                         const assumption::SampleBox& box, int samples, std::uint64_t seed) {
    expr::PerturbationExpr f = expr::is_preset_name(expression)
                                   ? expr::preset(expression)
                                   : expr::PerturbationExpr::parse(expression);
    auto report = assumption::validate_assumption(f, p, q, M, box, samples, seed);
    json j = report_to_json(report);
    auto abc = expr::decompose_abc(f);
    j["decomposition"] = {{"A", abc.A.print()}, {"B", abc.B.print()}, {"C", abc.C.print()}};
    return j;
}

// Independent shoot runs along one config axis; per-run seed = seed + index,
// results merged in axis order regardless of scheduling.
inline json cmd_sweep(const RunConfig& base, const std::string& axis,
                      const std::vector<std::string>& values, int max_workers = 2) {
    if (values.empty()) throw ValidationError("sweep", "empty value list");
    base.validate();

    auto config_for = [&](std::size_t i) {
        RunConfig cfg = base;
        if (axis == "bump_amplitude") {
            auto parts = detail::split(cfg.initial_data, ':');
            if (parts[0] != "profile_plus_bump")
                throw ValidationError("sweep",
                                      "bump_amplitude axis needs profile_plus_bump initial data");
            auto args = detail::split(parts[1], ',');
            args[0] = values[i];
            std::string joined = args[0];
            for (std::size_t k = 1; k < args.size(); ++k) joined += "," + args[k];
            cfg.initial_data = parts[0] + ":" + joined;
        } else {
            cfg.set(axis, values[i]);
        }
        cfg.seed = base.seed + i;
        cfg.label = base.label + "_" + std::to_string(i);
        cfg.validate();
        return cfg;
    };

    std::vector<json> records(values.size());
    std::vector<std::string> errors(values.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&]() {
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (next >= values.size()) return;
                i = next++;
            }
            try {
                records[i] = cmd_shoot(config_for(i));
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    int workers = std::min<int>(max_workers, static_cast<int>(values.size()));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json out;
    out["axis"] = axis;
    out["values"] = values;
    json recs = json::array();
    bool any_failed = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!errors[i].empty()) {
            any_failed = true;
            recs.push_back({{"index", i}, {"error", errors[i]}});
        } else {
            recs.push_back(records[i]);
        }
    }
    out["records"] = recs;
    if (any_failed) {
        std::string msg = "sweep: one or more runs failed";
        out["error"] = msg;
    }
    return out;
}

// CSV export of a stored series; "name" or "name_fit" for a fitted overlay.
inline void cmd_plotdata(const std::string& record_path, const std::string& series,
                         std::ostream& out) {
    std::ifstream in(record_path);
    if (!in) throw ValidationError("record", "cannot open '" + record_path + "'");
    json rec = json::parse(in);
    if (!rec.contains("trajectory") || rec["trajectory"].is_null())
        throw ValidationError("record", "record has no trajectory");
    namespace fs = std::filesystem;
    fs::path tpath = rec["trajectory"]["path"].get<std::string>();
    if (tpath.is_relative()) tpath = fs::path(record_path).parent_path() / tpath;
    auto samples = read_trajectory_jsonl(tpath.string());

    static const std::vector<std::string> names = {"sup_dev", "theta",          "coeff_r",
                                                   "coeff_g", "remainder_norm", "w_norm",
                                                   "n2",      "n1",             "n0"};
    std::string base = series;
    bool overlay = false;
    if (base.size() > 4 && base.substr(base.size() - 4) == "_fit") {
        base = base.substr(0, base.size() - 4);
        overlay = true;
    }
    auto known = std::find(names.begin(), names.end(), base);
    if (known == names.end()) {
        std::string list;
        for (const auto& n : names) list += (list.empty() ? "" : ", ") + n + ", " + n + "_fit";
        throw ValidationError("series", "unknown series '" + series + "'; available: " + list);
    }
    auto get = [&](const evolve::Sample& s) -> double {
        if (base == "sup_dev") return s.sup_dev;
        if (base == "theta") return s.theta;
        if (base == "coeff_r") return s.coeff_r;
        if (base == "coeff_g") return s.coeff_g;
        if (base == "remainder_norm") return s.remainder_norm;
        if (base == "w_norm") return s.w_norm;
        if (base == "n2") return s.n2;
        if (base == "n1") return s.n1;
        return s.n0;
    };

    double omega = 0, intercept = 0;
    if (overlay) {
        std::string fitkey = base == "remainder_norm" ? "remainder" : base;
        if (!rec.contains("fits") || rec["fits"].is_null() || !rec["fits"].contains(fitkey) ||
            rec["fits"][fitkey].is_null())
            throw ValidationError("series", "record has no stored fit for '" + base + "'");
        omega = rec["fits"][fitkey]["omega"].get<double>();
        intercept = rec["fits"][fitkey]["intercept"].get<double>();
    }

    out << (overlay ? "tau,value,fitted\n" : "tau,value\n");
    for (const auto& s : samples) {
        out << format_double(s.tau) << "," << format_double(get(s));
        if (overlay) out << "," << format_double(std::exp(intercept - omega * s.tau));
        out << "\n";
    }
}

}  // namespace blowlab::cli
