// blowlab: a numerical laboratory for stable ODE-type blowup in perturbed
// radial semilinear wave equations. Subcommands: simulate, shoot, spectrum,
// validate, sweep, plot-data.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "blowlab/runner.hpp"

using namespace blowlab;
using nlohmann::json;

namespace {

void emit_error(const std::string& kind, const std::string& message) {
    json err;
    err["error"] = kind;
    err["message"] = message;
    std::cerr << err.dump() << "\n";
}

cli::RunConfig load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
    cli::RunConfig cfg;
    if (!config_path.empty()) cfg = cli::load_config_file(config_path);
    for (const std::string& kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ValidationError("set", "expected key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"blowlab: ODE-blowup laboratory for perturbed radial wave equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto add_config_options = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (flat key = value lines)");
        cmd->add_option("--set", overrides, "override a config key, e.g. --set p=7")
            ->take_all();
    };

    auto* simulate = app.add_subcommand("simulate", "evolve a fixed-T run with observers");
    add_config_options(simulate);

    auto* shoot = app.add_subcommand("shoot", "bisect the blowup time on the unstable mode");
    add_config_options(shoot);

    auto* spectrum = app.add_subcommand("spectrum", "scan the linearized point spectrum");
    double sp_p = 3.0, sp_step = 0.07;
    std::string sp_mu = "nu";
    double sp_re_lo = 0.0, sp_re_hi = 3.0, sp_im_lo = -2.0, sp_im_hi = 2.0;
    bool sp_default_re = true;
    spectrum->add_option("--p", sp_p, "nonlinearity exponent")->required();
    spectrum->add_option("--mu", sp_mu, "potential: nu (c_p), phi (p c_p), or a number");
    spectrum->add_option("--grid-step", sp_step, "cell size of the phase-winding scan");
    spectrum->add_option("--re-lo", sp_re_lo, "region: Re lower bound")
        ->each([&](const std::string&) { sp_default_re = false; });
    spectrum->add_option("--re-hi", sp_re_hi, "region: Re upper bound");
    spectrum->add_option("--im-lo", sp_im_lo, "region: Im lower bound");
    spectrum->add_option("--im-hi", sp_im_hi, "region: Im upper bound");

    auto* validate = app.add_subcommand("validate", "sample the structural assumption bounds");
    std::string va_expr;
    double va_p = 7.0, va_q = 1.0, va_M = 2.0;
    int va_samples = 200;
    std::uint64_t va_seed = 1;
    double va_t0 = 0.05, va_r0 = 0.3, va_u = 5.0, va_vw = 3.0;
    bool va_real_u = false;
    validate->add_option("expression", va_expr, "preset name or expression text")->required();
    validate->add_option("--p", va_p, "nonlinearity exponent")->required();
    validate->add_option("--q", va_q, "growth exponent, 1 <= q < p")->required();
    validate->add_option("--M", va_M, "bound constant");
    validate->add_option("--samples", va_samples, "sample count");
    validate->add_option("--seed", va_seed, "sampling seed");
    validate->add_option("--t0", va_t0, "box half-width in t around 1");
    validate->add_option("--r0", va_r0, "box radius in r");
    validate->add_option("--u-max", va_u, "box half-width for u");
    validate->add_option("--vw-max", va_vw, "box half-width for v and w");
    validate->add_flag("--real-u", va_real_u, "sample u on the real axis only");

    auto* sweep = app.add_subcommand("sweep", "independent shoot runs along one config axis");
    std::string sw_axis;
    std::vector<std::string> sw_values;
    sweep->add_option("--axis", sw_axis, "config key to vary (or bump_amplitude)")->required();
    sweep->add_option("--values", sw_values, "axis values")->required()->take_all();
    add_config_options(sweep);

    auto* plot = app.add_subcommand("plot-data", "emit a stored series as CSV");
    std::string pd_record, pd_series;
    plot->add_option("record", pd_record, "path to a run record JSON")->required();
    plot->add_option("series", pd_series, "series name (try an unknown name for the list)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("validation", e.what());
        return 1;
    }

    try {
        if (simulate->parsed()) {
            json rec = cli::cmd_simulate(load_config(config_path, overrides));
            std::cout << rec.dump(2) << "\n";
        } else if (shoot->parsed()) {
            json rec = cli::cmd_shoot(load_config(config_path, overrides));
            std::cout << rec.dump(2) << "\n";
        } else if (spectrum->parsed()) {
            if (sp_default_re) sp_re_lo = -2.0 / (sp_p - 1.0) + 0.05;
            specfun::Region region{sp_re_lo, sp_re_hi, sp_im_lo, sp_im_hi};
            json out = cli::cmd_spectrum(sp_p, sp_mu, region, sp_step);
            std::cout << out.dump(2) << "\n";
        } else if (validate->parsed()) {
            assumption::SampleBox box;
            box.t_lo = 1.0 - va_t0;
            box.t_hi = 1.0 + va_t0;
            box.r_lo = 0.0;
            box.r_hi = va_r0;
            box.u = {-va_u, va_u, va_real_u ? 0.0 : -va_u, va_real_u ? 0.0 : va_u};
            box.v = {-va_vw, va_vw, -va_vw, va_vw};
            box.w = {-va_vw, va_vw, -va_vw, va_vw};
            json out = cli::cmd_validate(va_expr, va_p, va_q, va_M, box, va_samples, va_seed);
            std::cout << out.dump(2) << "\n";
        } else if (sweep->parsed()) {
            json out = cli::cmd_sweep(load_config(config_path, overrides), sw_axis, sw_values);
            std::cout << out.dump(2) << "\n";
            if (out.contains("error")) {
                emit_error("scientific", out["error"].get<std::string>());
                return 2;
            }
        } else if (plot->parsed()) {
            cli::cmd_plotdata(pd_record, pd_series, std::cout);
        }
    } catch (const ValidationError& e) {
        emit_error("validation", e.what());
        return 1;
    } catch (const ScientificError& e) {
        emit_error("scientific", e.what());
        return 2;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 3;
    }
    return 0;
}
