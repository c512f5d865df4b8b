#pragma once

// Run configuration: a flat key = value text file (optional [section]
// headers are accepted and ignored), overridable from the command line.
// Canonical serialization keeps the config hash stable under reordering.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "blowlab/error.hpp"
#include "blowlab/format.hpp"

namespace blowlab::cli {

struct RunConfig {
    double p = 3.0;
    std::string perturbation = "none";  // none | preset name | expr:<text>
    double T0 = 0.5;
    double T_lo = 0.9;
    double T_hi = 1.1;
    int grid_n = 64;
    double dtau = 0.0;  // 0: 2.5 / grid_n^2
    double tau_max = 10.0;
    double tau_horizon = 6.0;
    double sample_dtau = 0.05;
    double shoot_tol = 1e-6;
    double fit_window_lo = 2.0;
    double fit_window_hi = 6.0;
    std::uint64_t seed = 1;
    std::string output_dir;  // empty: $BLOWLAB_OUT_DIR or "out"
    std::string initial_data = "exact_profile";
    std::string label = "run";

    void validate() const {
        auto fail = [](const std::string& field, const std::string& msg) {
            throw ValidationError(field, msg);
        };
        if (!(p >= 3.0)) fail("p", "must be >= 3 (and > 3 with a perturbation)");
        if (perturbation != "none" && !(p > 3.0)) fail("p", "must be > 3 with a perturbation");
        if (!(T_lo < T_hi)) fail("T_bracket", "requires T_lo < T_hi");
        if (!(T0 < T_lo)) fail("T0", "must be below the bracket");
        if (grid_n < 16) fail("grid_n", "must be >= 16");
        if (dtau < 0.0 || !std::isfinite(dtau)) fail("dtau", "must be finite and >= 0");
        if (!(tau_max > 0.0)) fail("tau_max", "must be positive");
        if (!(tau_horizon > 0.0)) fail("tau_horizon", "must be positive");
        if (!(sample_dtau > 0.0)) fail("sample_dtau", "must be positive");
        if (!(shoot_tol > 0.0)) fail("shoot_tol", "must be positive");
        if (!(fit_window_lo < fit_window_hi)) fail("fit_window", "requires lo < hi");
        for (double v : {p, T0, T_lo, T_hi, tau_max, tau_horizon, sample_dtau})
            if (!std::isfinite(v)) fail("config", "numeric fields must be finite");
        if (label.empty()) fail("label", "must not be empty");
    }

    std::string resolved_output_dir() const {
        if (!output_dir.empty()) return output_dir;
        if (const char* env = std::getenv("BLOWLAB_OUT_DIR")) return env;
        return "out";
    }

    // key -> value in canonical (sorted) order
    std::map<std::string, std::string> as_map() const {
        std::map<std::string, std::string> m;
        m["p"] = format_double(p);
        m["perturbation"] = perturbation;
        m["T0"] = format_double(T0);
        m["T_lo"] = format_double(T_lo);
        m["T_hi"] = format_double(T_hi);
        m["grid_n"] = std::to_string(grid_n);
        m["dtau"] = format_double(dtau);
        m["tau_max"] = format_double(tau_max);
        m["tau_horizon"] = format_double(tau_horizon);
        m["sample_dtau"] = format_double(sample_dtau);
        m["shoot_tol"] = format_double(shoot_tol);
        m["fit_window_lo"] = format_double(fit_window_lo);
        m["fit_window_hi"] = format_double(fit_window_hi);
        m["seed"] = std::to_string(seed);
        m["initial_data"] = initial_data;
        m["label"] = label;
        return m;
    }

    void set(const std::string& key, const std::string& value) {
        auto num = [&](const char* field) {
            try {
                return std::stod(value);
            } catch (...) {
                throw ValidationError(field, "malformed number '" + value + "'");
            }
        };
        if (key == "p") p = num("p");
        else if (key == "perturbation") perturbation = value;
        else if (key == "T0") T0 = num("T0");
        else if (key == "T_lo") T_lo = num("T_lo");
        else if (key == "T_hi") T_hi = num("T_hi");
        else if (key == "grid_n") grid_n = static_cast<int>(num("grid_n"));
        else if (key == "dtau") dtau = num("dtau");
        else if (key == "tau_max") tau_max = num("tau_max");
        else if (key == "tau_horizon") tau_horizon = num("tau_horizon");
        else if (key == "sample_dtau") sample_dtau = num("sample_dtau");
        else if (key == "shoot_tol") shoot_tol = num("shoot_tol");
        else if (key == "fit_window_lo") fit_window_lo = num("fit_window_lo");
        else if (key == "fit_window_hi") fit_window_hi = num("fit_window_hi");
        else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "output_dir") output_dir = value;
        else if (key == "initial_data") initial_data = value;
        else if (key == "label") label = value;
        else if (key == "bump_amplitude" || key == "bump_width") {
            // sweep axes resolved against a profile_plus_bump initial_data
            throw ValidationError(key, "set via initial_data = profile_plus_bump:amp,width");
        } else {
            throw ValidationError("config", "unknown key '" + key + "'");
        }
    }
};

inline RunConfig load_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        std::string body = line.substr(first, last - first + 1);
        if (body.front() == '[' && body.back() == ']') continue;  // section header
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config",
                                  "line " + std::to_string(lineno) + ": expected key = value");
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str());
}

// FNV-1a over the canonical "key=value\n" lines.
inline std::uint64_t config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    auto feed = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : cfg.as_map()) {
        feed(k);
        feed("=");
        feed(v);
        feed("\n");
    }
    return h;
}

}  // namespace blowlab::cli
