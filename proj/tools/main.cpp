// Command-line front end: build -> simulate -> analyze -> report, driven by
// presets and INI-style config files. See README.md for usage.

#include "nldecay/decay.hpp"
#include "nldecay/nonlinearity.hpp"
#include "nldecay/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

namespace {

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    bool svg = false;
    long long seed = -1;  // -1: take run.seed from config (default 1)
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file (INI-style key = value)");
    cmd->add_option("--preset", opts.preset, "named preset (see list-presets)");
    cmd->add_option("--set", opts.overrides, "override, KEY=VALUE (section.key)")
        ->take_all();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_flag("--svg", opts.svg, "emit SVG plots alongside the CSV data");
    cmd->add_option("--seed", opts.seed, "seed for reproducible initial data");
}

nldecay::Config resolve_config(const CommonOpts& opts) {
    nldecay::Config cfg;
    if (!opts.preset.empty()) cfg = nldecay::preset_config(opts.preset);
    if (!opts.config_path.empty()) {
        const nldecay::Config file_cfg = nldecay::Config::load(opts.config_path);
        for (const auto& [k, v] : file_cfg.entries()) cfg.set(k, v);
    }
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects KEY=VALUE, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

unsigned long long resolve_seed(const CommonOpts& opts, const nldecay::Config& cfg) {
    if (opts.seed >= 0) return static_cast<unsigned long long>(opts.seed);
    return static_cast<unsigned long long>(cfg.get_int("run.seed", 1));
}

int run_with(const CommonOpts& opts, const char* forced_analyses) {
    nldecay::Config cfg = resolve_config(opts);
    if (forced_analyses) cfg.set("analysis.set", forced_analyses);
    const auto result =
        nldecay::run_scenario(cfg, opts.out_dir, resolve_seed(opts, cfg), opts.svg);
    for (const auto& f : result.failures) std::cerr << "FAIL: " << f << '\n';
    for (const auto& e : result.manifest)
        std::cout << e.file << "  " << e.sha256 << '\n';
    return result.exit_code;
}

nldecay::Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory file '" + path + "'");
    nldecay::Trajectory traj;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty trajectory file '" + path + "'");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
        if (cells.size() < 2)
            throw std::runtime_error("malformed trajectory row '" + line + "'");
        traj.times.push_back(cells[0]);
        traj.norms.push_back(cells[1]);
    }
    return traj;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for non-linearly damped contraction semigroups"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* simulate = app.add_subcommand(
        "simulate", "run the configured scenario end to end (decay by default)");
    add_common(simulate, opts);

    auto* resolvent = app.add_subcommand(
        "resolvent", "resolvent-norm sweep and envelope-growth fit");
    add_common(resolvent, opts);

    auto* observability = app.add_subcommand(
        "observability", "observability constant from the weighted Gramian pencil");
    add_common(observability, opts);

    auto* verify_phi = app.add_subcommand(
        "verify-phi", "check sector, monotonicity and linearization of a damping map");
    add_common(verify_phi, opts);
    std::string phi_name = "tanh";
    double phi_delta = 1.0, phi_rmax = 10.0, phi_eps = 0.3;
    int phi_dim = 1;
    verify_phi->add_option("--phi", phi_name, "nonlinearity name, e.g. tanh, power:3");
    verify_phi->add_option("--delta", phi_delta, "sector split radius");
    verify_phi->add_option("--rmax", phi_rmax, "outer radius for the sector scan");
    verify_phi->add_option("--epsilon", phi_eps, "linearization fit radius");
    verify_phi->add_option("--dim", phi_dim, "input dimension (1 or 2)");

    auto* fit_decay = app.add_subcommand(
        "fit-decay", "fit a decay exponent from an existing trajectory.csv");
    add_common(fit_decay, opts);
    std::string traj_path;
    double window_lo = 0.0, window_hi = 0.0, predicted = 0.0;
    fit_decay->add_option("--input", traj_path, "trajectory.csv to fit")->required();
    fit_decay->add_option("--window-lo", window_lo, "fit window start");
    fit_decay->add_option("--window-hi", window_hi, "fit window end");
    fit_decay->add_option("--predicted", predicted, "predicted exponent for sharpness");

    auto* sweep = app.add_subcommand(
        "sweep", "run several presets concurrently, one output directory each");
    add_common(sweep, opts);
    std::vector<std::string> sweep_presets;
    sweep->add_option("presets", sweep_presets, "preset names (default: all)");

    auto* list_cmd = app.add_subcommand("list-presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& p : nldecay::list_presets())
                std::printf("%-28s %s\n", p.name.c_str(), p.description.c_str());
            return 0;
        }
        if (simulate->parsed()) return run_with(opts, nullptr);
        if (resolvent->parsed()) return run_with(opts, "resolvent");
        if (observability->parsed()) return run_with(opts, "observability");

        if (verify_phi->parsed()) {
            const auto phi = nldecay::Nonlinearity::from_name(phi_name);
            const auto sector =
                nldecay::verify_sector(phi, phi_dim, phi_delta, phi_rmax, 2000);
            const auto mono = nldecay::verify_monotone(phi, phi_dim, 20000);
            const auto fit = nldecay::fit_linearization(phi, phi_eps);
            std::printf("phi: %s\n", phi.label.c_str());
            std::printf("sector: c_small=%.6g c_large=%.6g L_delta=%.6g pass=%d\n",
                        sector.c_small, sector.c_large, sector.lipschitz_delta,
                        sector.pass ? 1 : 0);
            std::printf("monotone (sampled): min pairing=%.6g%s\n", mono.min_pairing,
                        mono.min_pairing < 0 ? "  [non-monotone]"
                                             : "  [evidence only, not a proof]");
            std::printf("linearization: kappa=%.9g gamma=%.6g C=%.6g residual=%.3g%s\n",
                        fit.kappa, fit.gamma, fit.C, fit.residual,
                        fit.clean ? "" : "  [no clean power-law remainder]");
            const bool pass = sector.pass && mono.min_pairing >= 0;
            return pass ? 0 : 2;
        }

        if (fit_decay->parsed()) {
            const auto traj = read_trajectory_csv(traj_path);
            auto report = nldecay::fit_decay_exponent(traj, window_lo, window_hi);
            if (predicted > 0) {
                report.predicted = predicted;
                const auto [sup_scaled, tail_scaled] =
                    nldecay::sharpness_check(traj, predicted, window_lo, window_hi);
                report.sup_scaled = sup_scaled;
                report.tail_scaled = tail_scaled;
            }
            std::ostringstream out;
            nldecay::write_decay_csv(report, out);
            std::cout << out.str();
            return 0;
        }

        if (sweep->parsed()) {
            if (sweep_presets.empty())
                for (const auto& p : nldecay::list_presets()) sweep_presets.push_back(p.name);
            std::vector<std::pair<std::string, std::future<nldecay::ScenarioResult>>> jobs;
            for (const auto& name : sweep_presets) {
                nldecay::Config cfg = nldecay::preset_config(name);
                for (const auto& kv : opts.overrides) {
                    const auto eq = kv.find('=');
                    if (eq == std::string::npos)
                        throw std::runtime_error("--set expects KEY=VALUE");
                    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
                }
                const unsigned long long seed = resolve_seed(opts, cfg);
                const std::string dir = opts.out_dir + "/" + name;
                jobs.emplace_back(name, std::async(std::launch::async, [cfg, dir, seed,
                                                                        svg = opts.svg] {
                                      return nldecay::run_scenario(cfg, dir, seed, svg);
                                  }));
            }
            int exit_code = 0;
            for (auto& [name, fut] : jobs) {
                const auto result = fut.get();
                std::printf("%-28s %s\n", name.c_str(),
                            result.exit_code == 0 ? "pass" : "FAIL");
                for (const auto& f : result.failures)
                    std::printf("    %s\n", f.c_str());
                exit_code = std::max(exit_code, result.exit_code);
            }
            return exit_code;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
    return 0;
}
