#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "config.hpp"
#include "dominance.hpp"
#include "estimators.hpp"
#include "risk.hpp"

namespace addinfo {

enum class RiskCurveMethod { Quadrature, MonteCarlo };

struct EstimatorChoice {
    std::string name;  // as printed in the CSV
    enum class Kind { Mre, Mle, Plugin, BayesUniform, BayesRkl, TwoStep } kind;
    double c = 1.0;  // expansion factor for mle:c / plugin:c
};

// Estimator selector grammar: mre | mle | mle:c | plugin:c | bayes-uniform |
// bayes-rkl | two-step.
inline EstimatorChoice parse_estimator(const std::string& name) {
    EstimatorChoice e;
    e.name = name;
    auto colon = name.find(':');
    std::string head = colon == std::string::npos ? name : name.substr(0, colon);
    if (colon != std::string::npos) {
        try {
            e.c = std::stod(name.substr(colon + 1));
        } catch (...) {
            throw ConfigError("estimators: bad expansion factor in '" + name + "'");
        }
        if (!(e.c > 0)) throw ConfigError("estimators: expansion factor must be > 0 in '" + name + "'");
    }
    if (head == "mre") e.kind = EstimatorChoice::Kind::Mre;
    else if (head == "mle") e.kind = EstimatorChoice::Kind::Mle;
    else if (head == "plugin") e.kind = EstimatorChoice::Kind::Plugin;
    else if (head == "bayes-uniform") e.kind = EstimatorChoice::Kind::BayesUniform;
    else if (head == "bayes-rkl") e.kind = EstimatorChoice::Kind::BayesRkl;
    else if (head == "two-step") e.kind = EstimatorChoice::Kind::TwoStep;
    else
        throw ConfigError("estimators: unknown estimator '" + name +
                          "' (expected mre, mle[:c], plugin:c, bayes-uniform, bayes-rkl, two-step)");
    if (colon != std::string::npos && e.kind != EstimatorChoice::Kind::Mle &&
        e.kind != EstimatorChoice::Kind::Plugin)
        throw ConfigError("estimators: '" + head + "' takes no expansion factor");
    return e;
}

// The complete description of a risk-curve run.
struct ExperimentConfig {
    ProblemSpec spec;
    LossSpec loss = LossSpec::kl();
    std::vector<EstimatorChoice> estimators;
    double delta_min = 0.0;
    double delta_max = 5.0;
    int delta_steps = 31;
    RiskCurveMethod method = RiskCurveMethod::Quadrature;
    int mc_samples = 100000;
    std::uint64_t seed = 20240801;
    std::optional<double> two_step_r_lower;
    std::string output = "risk_curve.csv";
    int threads = 0;  // 0 = hardware concurrency

    void validate() const {
        spec.validate();
        if (delta_steps < 2) throw ConfigError("delta.steps: must be >= 2");
        if (!(delta_max >= delta_min)) throw ConfigError("delta.max: must be >= delta.min");
        if (method == RiskCurveMethod::MonteCarlo && mc_samples < 1000)
            throw ConfigError("mc_samples: must be >= 1000 when method = mc");
        if (estimators.empty()) throw ConfigError("estimators: at least one estimator required");
    }
};

inline ConstraintSet parse_constraint(const Config& cfg, int p) {
    std::string kind = cfg.get_string("spec.constraint", "half-line");
    if (kind == "none") return ConstraintSet::all_reals(p);
    if (kind == "half-line")
        return ConstraintSet::half_line(p, cfg.get_double("spec.constraint.bound", 0.0));
    if (kind == "interval") return ConstraintSet::interval(cfg.get_double("spec.constraint.m", 1.0));
    if (kind == "ball") return ConstraintSet::ball(p, cfg.get_double("spec.constraint.m", 1.0));
    if (kind == "rectangle") {
        std::vector<double> hw = cfg.get_double_list("spec.constraint.halfwidths", {});
        if (static_cast<int>(hw.size()) != p)
            throw ConfigError("spec.constraint.halfwidths: need exactly p values");
        return ConstraintSet::rectangle(hw);
    }
    throw ConfigError("spec.constraint: unknown kind '" + kind +
                      "' (expected none, half-line, interval, rectangle, ball)");
}

inline ExperimentConfig parse_experiment(const Config& cfg) {
    ExperimentConfig ec;
    ec.spec.p = static_cast<int>(cfg.get_long("spec.p", 1));
    ec.spec.sigma1_sq = cfg.get_double("spec.sigma1_sq", 1.0);
    ec.spec.sigma2_sq = cfg.get_double("spec.sigma2_sq", 1.0);
    ec.spec.sigmaY_sq = cfg.get_double("spec.sigmaY_sq", 1.0);
    ec.spec.constraint = parse_constraint(cfg, ec.spec.p);
    if (cfg.has("misspec.a1_sq") || cfg.has("misspec.a2_sq") || cfg.has("misspec.aY_sq")) {
        MisspecScheme a;
        a.a1_sq = cfg.get_double("misspec.a1_sq", 1.0);
        a.a2_sq = cfg.get_double("misspec.a2_sq", 1.0);
        a.aY_sq = cfg.get_double("misspec.aY_sq", 1.0);
        ec.spec.misspec = a;
    }
    ec.loss = LossSpec(cfg.get_double("loss.alpha", -1.0));
    for (const std::string& name : cfg.get_list("estimators", {"mre", "mle", "mle:2", "bayes-uniform"}))
        ec.estimators.push_back(parse_estimator(name));
    ec.delta_min = cfg.get_double("delta.min", 0.0);
    ec.delta_max = cfg.get_double("delta.max", 5.0);
    ec.delta_steps = static_cast<int>(cfg.get_long("delta.steps", 31));
    std::string method = cfg.get_string("method", "quadrature");
    if (method == "quadrature") ec.method = RiskCurveMethod::Quadrature;
    else if (method == "mc") ec.method = RiskCurveMethod::MonteCarlo;
    else throw ConfigError("method: expected 'quadrature' or 'mc', got '" + method + "'");
    ec.mc_samples = static_cast<int>(cfg.get_long("mc_samples", 100000));
    ec.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 20240801));
    if (cfg.has("two_step.r_lower")) ec.two_step_r_lower = cfg.get_double("two_step.r_lower", 0.0);
    ec.output = cfg.get_string("output", ec.output);
    ec.threads = static_cast<int>(cfg.get_long("threads", 0));
    ec.validate();
    return ec;
}

// Estimator constructor bound to a spec and loss.
inline std::function<PredictiveDensity(const XPair&)> make_estimator(const EstimatorChoice& e,
                                                                     const ProblemSpec& spec,
                                                                     const LossSpec& loss,
                                                                     std::optional<double> two_step_hint) {
    switch (e.kind) {
        case EstimatorChoice::Kind::Mre:
            return [spec, loss](const XPair& x) { return mre(x.x1, spec, loss); };
        case EstimatorChoice::Kind::Mle:
            return [spec, c = e.c](const XPair& x) { return mle(x, spec, c); };
        case EstimatorChoice::Kind::Plugin:
            return [spec, c = e.c](const XPair& x) { return plugin(x.x1, c, spec); };
        case EstimatorChoice::Kind::BayesUniform:
            if (loss.alpha == 1.0)
                return [spec](const XPair& x) { return bayes_rkl(x, spec); };
            return [spec, loss](const XPair& x) { return bayes_uniform(x, spec, loss); };
        case EstimatorChoice::Kind::BayesRkl:
            return [spec](const XPair& x) { return bayes_rkl(x, spec); };
        case EstimatorChoice::Kind::TwoStep: {
            const double var_w1 = spec.sigma1_sq / (1.0 + spec.r());
            auto psi = [spec, var_w1](const Vec& w1) {
                return psi_uniform(w1, var_w1, spec.constraint, 1.0 + spec.r());
            };
            return [spec, psi, two_step_hint](const XPair& x) {
                return two_step_improve(x, spec, psi, two_step_hint);
            };
        }
    }
    throw std::logic_error("make_estimator: unreachable");
}

namespace detail {

// Scalar rotated-frame transfer functions for the quadrature risk path.
inline std::function<double(double)> classC_psi(const EstimatorChoice& e, const ProblemSpec& spec) {
    const double scale = 1.0 + spec.r();
    const double var_w1 = spec.sigma1_sq / scale;
    switch (e.kind) {
        case EstimatorChoice::Kind::Mre:
        case EstimatorChoice::Kind::Plugin:
            return [](double w) { return w; };
        case EstimatorChoice::Kind::Mle:
            return [spec](double w) { return restricted_mle_mu1({w}, spec)[0]; };
        case EstimatorChoice::Kind::BayesRkl:
        case EstimatorChoice::Kind::TwoStep:
            return [spec, var_w1, scale](double w) {
                return psi_uniform({w}, var_w1, spec.constraint, scale)[0];
            };
        default:
            throw std::invalid_argument("no rotated-frame form for estimator " + e.name);
    }
}

inline double classC_c(const EstimatorChoice& e, const ProblemSpec& spec, const LossSpec& loss,
                       std::optional<double> two_step_hint) {
    switch (e.kind) {
        case EstimatorChoice::Kind::Mre:
            return mre_scale_c(spec, loss);
        case EstimatorChoice::Kind::Mle:
        case EstimatorChoice::Kind::Plugin:
            return e.c;
        case EstimatorChoice::Kind::BayesRkl:
            return 1.0;
        case EstimatorChoice::Kind::TwoStep: {
            const double floor = spec.sigma1_sq * spec.sigma2_sq /
                                 ((spec.sigma1_sq + spec.sigma2_sq) * spec.sigmaY_sq);
            const double rl = two_step_hint.value_or(floor);
            return 0.5 * ((1.0 + rl) + c0(1.0 + rl));
        }
        default:
            throw std::invalid_argument("no expansion factor for estimator " + e.name);
    }
}

} // namespace detail

// Benchmark risk used as the ratio denominator.  Exact in every configuration
// the curve runner accepts (closed form, with the misspecified-KL variant when
// a scheme is present).
inline double benchmark_mre_risk(const LossSpec& loss, const ProblemSpec& spec) {
    if (spec.misspec && !spec.misspec->identity()) {
        if (loss.alpha != -1.0)
            throw ConfigError("misspec: benchmark risk under misspecification implemented for KL only");
        const MisspecScheme& a = *spec.misspec;
        const double c = mre_scale_c(spec, loss);
        const double vh = c * spec.sigmaY_sq, vq = a.aY_sq * spec.sigmaY_sq;
        return 0.5 * spec.p * (vq / vh - 1.0 - std::log(vq / vh)) +
               spec.p * a.a1_sq * spec.sigma1_sq / (2.0 * vh);
    }
    return risk_mre_closed(loss, spec).value;
}

// One evaluated grid point.
struct CurveRow {
    double delta = 0.0;
    std::string estimator;
    double risk = 0.0;
    double std_error = 0.0;
    double ratio_vs_mre = 0.0;
};

inline RiskEstimate risk_at(const EstimatorChoice& e, double delta, const ExperimentConfig& cfg,
                            std::uint64_t point_seed) {
    const ProblemSpec& spec = cfg.spec;
    Vec theta1(spec.p, 0.0), theta2(spec.p, 0.0);
    theta1[0] = delta;
    ThetaPoint theta = theta_point(spec, theta1, theta2);

    if (cfg.method == RiskCurveMethod::MonteCarlo) {
        auto make = make_estimator(e, spec, cfg.loss, cfg.two_step_r_lower);
        return risk_mc(make, theta, cfg.loss, spec, cfg.mc_samples, point_seed);
    }

    // Quadrature path (p = 1).
    if (spec.p != 1) throw ConfigError("method: quadrature risk curve requires p = 1; use method = mc");
    const bool misspecified = spec.misspec && !spec.misspec->identity();
    if (e.kind == EstimatorChoice::Kind::BayesUniform) {
        if (cfg.loss.alpha == -1.0) return kl_risk_bayes_uniform_quadrature(theta, spec);
        if (cfg.loss.alpha == 1.0) {
            EstimatorChoice rkl = e;
            rkl.kind = EstimatorChoice::Kind::BayesRkl;
            return risk_classC_quadrature(detail::classC_psi(rkl, spec), 1.0, cfg.loss, theta, spec);
        }
        throw ConfigError("bayes-uniform: no quadrature risk representation for |alpha| < 1; use method = mc");
    }
    if (e.kind == EstimatorChoice::Kind::Mre) {
        if (misspecified) {
            RiskEstimate est;
            est.method = RiskMethod::ClosedForm;
            est.value = benchmark_mre_risk(cfg.loss, spec);
            return est;
        }
        return risk_mre_closed(cfg.loss, spec);
    }
    if (misspecified)
        throw ConfigError("misspec: quadrature risk under misspecification is available for "
                          "bayes-uniform/mre under KL only; use method = mc");
    return risk_classC_quadrature(detail::classC_psi(e, spec),
                                  detail::classC_c(e, spec, cfg.loss, cfg.two_step_r_lower), cfg.loss,
                                  theta, spec);
}

// Evaluate the full grid.  Grid points run concurrently with sub-seeds
// seed + index; rows are sorted before returning so the output is
// independent of scheduling.
inline std::vector<CurveRow> run_risk_curve(const ExperimentConfig& cfg) {
    cfg.validate();
    const int steps = cfg.delta_steps;
    std::vector<double> deltas(steps);
    for (int i = 0; i < steps; ++i)
        deltas[i] = cfg.delta_min + (cfg.delta_max - cfg.delta_min) * i / (steps - 1.0);

    ProblemSpec mre_spec = cfg.spec;
    const double base = benchmark_mre_risk(cfg.loss, mre_spec);

    std::vector<std::vector<CurveRow>> per_point(steps);
    std::exception_ptr first_error;
    std::mutex err_mtx;

    auto work = [&](int i) {
        try {
            std::vector<CurveRow> rows;
            for (const EstimatorChoice& e : cfg.estimators) {
                RiskEstimate est = risk_at(e, deltas[i], cfg, cfg.seed + static_cast<std::uint64_t>(i));
                CurveRow row;
                row.delta = deltas[i];
                row.estimator = e.name;
                row.risk = est.value;
                row.std_error = est.std_error;
                row.ratio_vs_mre = est.value / base;
                rows.push_back(row);
            }
            per_point[i] = std::move(rows);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mtx);
            if (!first_error) first_error = std::current_exception();
        }
    };

    unsigned n_threads = cfg.threads > 0 ? cfg.threads : std::thread::hardware_concurrency();
    if (n_threads <= 1 || steps == 1) {
        for (int i = 0; i < steps; ++i) work(i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < std::min<unsigned>(n_threads, steps); ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < steps; i = next.fetch_add(1)) work(i);
            });
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<CurveRow> rows;
    for (auto& block : per_point)
        for (auto& r : block) rows.push_back(std::move(r));
    std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.estimator < b.estimator;
    });
    return rows;
}

inline std::string format_g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline void write_curve_csv(std::ostream& out, const std::vector<CurveRow>& rows) {
    out << "delta,estimator,risk,std_error,ratio_vs_mre\n";
    for (const CurveRow& r : rows)
        out << format_g10(r.delta) << ',' << r.estimator << ',' << format_g10(r.risk) << ','
            << format_g10(r.std_error) << ',' << format_g10(r.ratio_vs_mre) << '\n';
}

// Wide companion table for plotting: delta then one ratio column per estimator.
inline void write_plot_data(std::ostream& out, const std::vector<CurveRow>& rows) {
    std::vector<std::string> names;
    for (const CurveRow& r : rows)
        if (std::find(names.begin(), names.end(), r.estimator) == names.end())
            names.push_back(r.estimator);
    std::sort(names.begin(), names.end());
    out << "delta";
    for (const auto& n : names) out << '\t' << n;
    out << '\n';
    double cur = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> vals;
    auto flush = [&]() {
        if (vals.empty()) return;
        out << format_g10(cur);
        for (double v : vals) out << '\t' << format_g10(v);
        out << '\n';
    };
    for (const CurveRow& r : rows) {
        if (r.delta != cur) {
            flush();
            cur = r.delta;
            vals.assign(names.size(), 0.0);
        }
        auto idx = std::find(names.begin(), names.end(), r.estimator) - names.begin();
        vals[idx] = r.ratio_vs_mre;
    }
    flush();
}

// Presets reproducing the four reference plots: risk ratios against the
// benchmark as functions of delta = theta1 - theta2, unit variances (the
// second preset sweeps sigma2^2 over {1, 2, 4}).
inline std::vector<std::pair<std::string, ExperimentConfig>> figure_preset(int id) {
    if (id < 1 || id > 4) throw ConfigError("figure: unknown id (expected 1..4)");
    ExperimentConfig base;
    base.spec.p = 1;
    base.loss = LossSpec::kl();
    base.estimators = {parse_estimator("mre"), parse_estimator("mle"), parse_estimator("mle:2"),
                       parse_estimator("bayes-uniform")};
    base.method = RiskCurveMethod::Quadrature;
    base.mc_samples = 100000;
    base.output = "figure" + std::to_string(id) + ".csv";

    std::vector<std::pair<std::string, ExperimentConfig>> out;
    switch (id) {
        case 1: {
            base.spec.constraint = ConstraintSet::half_line(1);
            base.delta_min = 0.0;
            base.delta_max = 5.0;
            base.delta_steps = 31;
            out.emplace_back("", base);
            break;
        }
        case 2: {
            base.spec.constraint = ConstraintSet::half_line(1);
            base.delta_min = 0.0;
            base.delta_max = 5.0;
            base.delta_steps = 31;
            base.estimators = {parse_estimator("mre"), parse_estimator("bayes-uniform")};
            for (double s2 : {1.0, 2.0, 4.0}) {
                ExperimentConfig c = base;
                c.spec.sigma2_sq = s2;
                out.emplace_back("s2sq=" + format_g10(s2), c);
            }
            break;
        }
        case 3:
        case 4: {
            const double m = id == 3 ? 1.0 : 2.0;
            base.spec.constraint = ConstraintSet::interval(m);
            base.delta_min = -(m + 1.0);
            base.delta_max = m + 1.0;
            base.delta_steps = 41;
            out.emplace_back("", base);
            break;
        }
    }
    return out;
}

inline std::vector<CurveRow> run_figure(int id) {
    std::vector<CurveRow> rows;
    for (auto& [label, cfg] : figure_preset(id)) {
        std::vector<CurveRow> block = run_risk_curve(cfg);
        for (CurveRow& r : block) {
            if (!label.empty()) r.estimator += "(" + label + ")";
            rows.push_back(std::move(r));
        }
    }
    std::sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
        if (a.delta != b.delta) return a.delta < b.delta;
        return a.estimator < b.estimator;
    });
    return rows;
}

} // namespace addinfo
