// Command-line front end: risk curves, figure reproduction, dominance
// reports, density tabulation, and the verification suite.
//
// Exit codes: 0 ok, 1 validation error, 2 verification failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addinfo/addinfo.hpp"

namespace {

using namespace addinfo;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value pairs
};

// Every command accepts --config plus repeatable --set key=value overrides
// and a handful of dedicated flags; flags override file values.
void attach_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "configuration file (key = value lines)");
    cmd->add_option("--set", flags.overrides,
                    "override a config key, e.g. --set spec.sigma2_sq=2 (repeatable)");
}

Config load_config(const CommonFlags& flags) {
    Config cfg = flags.config_path.empty() ? Config() : Config::from_file(flags.config_path);
    for (const std::string& kv : flags.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

int cmd_risk_curve(const CommonFlags& flags) {
    ExperimentConfig cfg = parse_experiment(load_config(flags));
    std::vector<CurveRow> rows = run_risk_curve(cfg);
    std::ostringstream ss;
    write_curve_csv(ss, rows);
    write_file(cfg.output, ss.str());
    std::cout << "wrote " << rows.size() << " rows to " << cfg.output << "\n";
    return 0;
}

int cmd_figure(int id, const CommonFlags& flags, const std::string& plot_path) {
    Config cfg = load_config(flags);
    auto presets = figure_preset(id);
    // apply method/sample/seed/output overrides to every sub-config
    std::vector<CurveRow> rows;
    std::string output = cfg.get_string("output", "figure" + std::to_string(id) + ".csv");
    for (auto& [label, pre] : presets) {
        std::string method = cfg.get_string("method", "");
        if (method == "mc") pre.method = RiskCurveMethod::MonteCarlo;
        else if (method == "quadrature") pre.method = RiskCurveMethod::Quadrature;
        else if (!method.empty()) throw ConfigError("method: expected 'quadrature' or 'mc'");
        pre.mc_samples = static_cast<int>(cfg.get_long("mc_samples", pre.mc_samples));
        pre.seed = static_cast<std::uint64_t>(cfg.get_long("seed", static_cast<long>(pre.seed)));
        pre.threads = static_cast<int>(cfg.get_long("threads", 0));
        std::vector<CurveRow> block = run_risk_curve(pre);
        for (CurveRow& r : block) {
            if (!label.empty()) r.estimator += "(" + label + ")";
            rows.push_back(std::move(r));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.estimator < b.estimator;
    });
    std::ostringstream ss;
    write_curve_csv(ss, rows);
    write_file(output, ss.str());
    if (!plot_path.empty()) {
        std::ostringstream ps;
        write_plot_data(ps, rows);
        write_file(plot_path, ps.str());
    }
    std::cout << "wrote " << rows.size() << " rows to " << output << "\n";
    return 0;
}

int cmd_dominance(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    ExperimentConfig ec = parse_experiment(cfg);
    std::vector<double> alphas = cfg.get_double_list("dominance.alphas", {0.0});
    std::vector<double> cs = cfg.get_double_list("dominance.cs", {1.0, 2.0});
    std::vector<MisspecScheme> schemes;
    for (const std::string& item : cfg.get_list("persistence.schemes", {})) {
        MisspecScheme a;
        if (std::sscanf(item.c_str(), "%lf:%lf:%lf", &a.a1_sq, &a.a2_sq, &a.aY_sq) != 3)
            throw ConfigError("persistence.schemes: expected a1_sq:a2_sq:aY_sq, got '" + item + "'");
        schemes.push_back(a);
    }
    std::ostringstream ss;
    write_dominance_report(ss, ec.spec, alphas, cs, schemes);
    std::string output = cfg.get_string("output", "dominance.txt");
    write_file(output, ss.str());
    std::cout << ss.str();
    return 0;
}

int cmd_density_eval(const CommonFlags& flags) {
    Config cfg = load_config(flags);
    ExperimentConfig ec = parse_experiment(cfg);
    EstimatorChoice choice = parse_estimator(cfg.get_string("estimator", "bayes-uniform"));
    Vec x1 = cfg.get_double_list("x1", {0.0});
    Vec x2 = cfg.get_double_list("x2", {0.0});
    if (static_cast<int>(x1.size()) != ec.spec.p || static_cast<int>(x2.size()) != ec.spec.p)
        throw ConfigError("x1/x2: need exactly spec.p values");
    double y_min = cfg.get_double("y.min", -5.0);
    double y_max = cfg.get_double("y.max", 5.0);
    int steps = static_cast<int>(cfg.get_long("y.steps", 201));
    std::ostringstream ss;
    write_density_eval(ss, ec, choice, x1, x2, y_min, y_max, steps);
    std::string output = cfg.get_string("output", "density.csv");
    write_file(output, ss.str());
    std::cout << "wrote " << steps << " rows to " << output << "\n";
    return 0;
}

int cmd_verify(const std::string& level, std::uint64_t seed, int reruns) {
    if (level != "fast" && level != "full") throw ConfigError("--level: expected fast or full");
    bool ok = true;
    for (int run = 0; run < reruns; ++run) {
        std::uint64_t s = seed + run;
        auto results = run_verify(level == "full", s);
        if (reruns > 1) std::printf("--- rerun %d (seed %llu)\n", run, (unsigned long long)s);
        for (const auto& r : results)
            std::printf("[%s] %-36s (%.2fs)%s%s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                        r.seconds, r.detail.empty() ? "" : " ", r.detail.c_str());
        ok = ok && all_passed(results);
    }
    std::printf("verify %s: %s\n", level.c_str(), ok ? "all checks passed" : "FAILURES");
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"predictive density estimation for two Gaussian populations "
                 "with a known mean-difference constraint"};
    app.require_subcommand(1);

    CommonFlags curve_flags, fig_flags, dom_flags, dens_flags;
    int figure_id = 1;
    std::string plot_path;
    std::string verify_level = "fast";
    std::uint64_t verify_seed = 20240801;
    int verify_reruns = 1;

    CLI::App* curve = app.add_subcommand("risk-curve", "risk-ratio curves over a delta grid (CSV)");
    attach_common(curve, curve_flags);

    CLI::App* fig = app.add_subcommand("figure", "reproduce a preset risk-ratio figure (CSV)");
    fig->add_option("--id", figure_id, "figure id (1-4)")->required();
    fig->add_option("--plot-data", plot_path, "also write a wide ratio table for plotting");
    attach_common(fig, fig_flags);

    CLI::App* dom = app.add_subcommand("dominance", "expansion intervals, dual maps, persistence");
    attach_common(dom, dom_flags);

    CLI::App* dens = app.add_subcommand("density-eval", "tabulate an estimator's density on a y grid");
    attach_common(dens, dens_flags);

    CLI::App* ver = app.add_subcommand("verify", "run the invariant suite");
    ver->add_option("--level", verify_level, "fast (quadrature only) or full (adds Monte Carlo)");
    ver->add_option("--seed", verify_seed, "base seed for the stochastic checks");
    ver->add_option("--reruns", verify_reruns, "repeat with perturbed seeds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (curve->parsed()) return cmd_risk_curve(curve_flags);
        if (fig->parsed()) return cmd_figure(figure_id, fig_flags, plot_path);
        if (dom->parsed()) return cmd_dominance(dom_flags);
        if (dens->parsed()) return cmd_density_eval(dens_flags);
        if (ver->parsed()) return cmd_verify(verify_level, verify_seed, verify_reruns);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
