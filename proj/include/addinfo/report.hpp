#pragma once

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace addinfo {

inline std::string format_interval(double lo, double hi, char lo_br, char hi_br) {
    std::string s;
    s += lo_br;
    s += format_g10(lo);
    s += ", ";
    s += format_g10(hi);
    s += hi_br;
    return s;
}

// Key-value dominance report: expansion intervals with the proven bound check,
// the dual-loss parameter maps for requested (alpha, c) pairs, and persistence
// verdicts for the supplied misspecification schemes.
inline void write_dominance_report(std::ostream& out, const ProblemSpec& spec,
                                   const std::vector<double>& alphas, const std::vector<double>& cs,
                                   const std::vector<MisspecScheme>& schemes) {
    spec.validate();

    std::pair<double, double> bounds;
    std::string method;
    if (spec.p == 1 && spec.constraint.kind == ConstraintKind::HalfLineProduct &&
        !spec.constraint.unconstrained()) {
        bounds = r_bounds_order(spec);
        method = "closed-form";
    } else if (spec.constraint.unconstrained()) {
        bounds = r_bounds_identity(spec);
        method = "closed-form";
    } else {
        const double scale = 1.0 + spec.r();
        auto psi = [&spec](const Vec& w) { return restricted_mle_mu1(w, spec); };
        std::vector<Vec> grid;
        const double sd = std::sqrt(spec.sigma1_sq / scale);
        const double reach = spec.constraint.kind == ConstraintKind::Ball ||
                                     spec.constraint.kind == ConstraintKind::Interval
                                 ? spec.constraint.m / scale
                                 : 5.0 * sd;
        for (int i = 0; i <= 8; ++i) {
            Vec mu(spec.p, 0.0);
            mu[0] = reach * i / 8.0;
            grid.push_back(mu);
        }
        bounds = r_bounds_numeric(spec, psi, grid);
        method = "monte-carlo";
    }
    ExpansionReport rep = expansion_report(bounds.first, bounds.second);

    out << "expansion.estimator = mle\n";
    out << "expansion.bounds_method = " << method << "\n";
    out << "expansion.r_lower = " << format_g10(rep.r_lower) << "\n";
    out << "expansion.r_upper = " << format_g10(rep.r_upper) << "\n";
    out << "expansion.c0 = " << format_g10(rep.c0_value) << "\n";
    out << "expansion.dominance_interval = "
        << format_interval(rep.dominance_interval.first, rep.dominance_interval.second, '(', ')')
        << "\n";
    out << "expansion.complete_subclass = "
        << format_interval(rep.complete_subclass.first, rep.complete_subclass.second, '[', ')')
        << "\n";
    out << "expansion.minimal_complete = "
        << format_interval(rep.minimal_complete.first, rep.minimal_complete.second, '[', ']')
        << "\n";
    const double s = 1.0 + rep.r_lower;
    out << "expansion.bound_check.s_squared = " << format_g10(s * s) << "\n";
    out << "expansion.bound_check.exp_s = " << format_g10(std::exp(s)) << "\n";
    out << "expansion.bound_check.ok = "
        << ((s * s < rep.c0_value && rep.c0_value < std::exp(s)) ? "true" : "false") << "\n";

    for (double a : alphas) {
        for (double c : cs) {
            std::ostringstream key;
            key << "dual[alpha=" << format_g10(a) << ",c=" << format_g10(c) << "]";
            if (std::abs(a) < 1.0)
                out << key.str() << ".gamma0 = " << format_g10(gamma0(a, c, spec)) << "\n";
            out << key.str() << ".sigma_z1_sq = " << format_g10(sigma_z1(a, c, spec)) << "\n";
        }
    }

    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const MisspecScheme& a = schemes[i];
        std::string key = "persistence[" + std::to_string(i) + "]";
        out << key << ".a1_sq = " << format_g10(a.a1_sq) << "\n";
        out << key << ".a2_sq = " << format_g10(a.a2_sq) << "\n";
        out << key << ".aY_sq = " << format_g10(a.aY_sq) << "\n";
        if (spec.p == 1 && spec.constraint.kind == ConstraintKind::HalfLineProduct &&
            !spec.constraint.unconstrained()) {
            PersistenceVerdict v = persistence_check(spec, a);
            out << key << ".sigmaU_sq = " << format_g10(v.sigmaU_sq) << "\n";
            out << key << ".sigmaV_sq = " << format_g10(v.sigmaV_sq) << "\n";
            out << key << ".holds = " << (v.holds ? "true" : "false") << "\n";
        } else {
            out << key << ".holds = n/a (order constraint with p = 1 required)\n";
        }
    }
}

// Tabulates an estimator's predictive density on a y grid (first coordinate
// when p > 1, offsets applied from x1).
inline void write_density_eval(std::ostream& out, const ExperimentConfig& cfg,
                               const EstimatorChoice& choice, const Vec& x1, const Vec& x2,
                               double y_min, double y_max, int steps) {
    if (steps < 2) throw ConfigError("y.steps: must be >= 2");
    auto make = make_estimator(choice, cfg.spec, cfg.loss, cfg.two_step_r_lower);
    PredictiveDensity q = make(XPair{x1, x2});
    out << "y,estimator,density,log_density\n";
    for (int i = 0; i < steps; ++i) {
        double t = y_min + (y_max - y_min) * i / (steps - 1.0);
        Vec y = x1;
        y[0] = t;
        double ld = q.log_density(y);
        out << format_g10(t) << ',' << choice.name << ',' << format_g10(std::exp(ld)) << ','
            << format_g10(ld) << '\n';
    }
}

} // namespace addinfo
