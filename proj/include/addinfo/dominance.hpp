#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace addinfo {

// Root c in (s, inf) of G_s(c) = (1 - 1/c) s - log c, the variance-expansion
// dominance boundary.  G_s is decreasing in c on (s, inf) and s^2 < c0(s) < e^s,
// so bisection on [s^2, e^s] is guaranteed; fixed iteration count, then checked
// against |G| < 1e-12.
inline double c0(double s) {
    if (!(s > 1.0)) throw std::invalid_argument("c0: requires s > 1");
    auto G = [s](double c) { return (1.0 - 1.0 / c) * s - std::log(c); };
    double lo = s * s, hi = std::exp(s);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (G(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    double root = 0.5 * (lo + hi);
    if (std::abs(G(root)) > 1e-12) throw std::runtime_error("c0: bisection failed to meet tolerance");
    return root;
}

// Variance-expansion calculus summary: with R_lower <= MSE/(p sigmaY^2) <=
// R_upper over the restricted parameter space, expanding a plug-in's variance
// by c dominates c = 1 for c in (1, c0(1+R_lower)); [1+R_lower, c0(1+R_lower))
// is a complete subclass and [1+R_lower, 1+R_upper] the minimal complete one.
struct ExpansionReport {
    double r_lower = 0.0;
    double r_upper = 0.0;
    double c0_value = 0.0;
    std::pair<double, double> dominance_interval;    // open
    std::pair<double, double> complete_subclass;     // [lo, hi)
    std::pair<double, double> minimal_complete;      // closed
};

inline ExpansionReport expansion_report(double r_lower, double r_upper) {
    if (!(r_lower > 0.0)) throw std::invalid_argument("expansion_report: requires r_lower > 0");
    if (r_upper < r_lower) throw std::invalid_argument("expansion_report: requires r_upper >= r_lower");
    ExpansionReport rep;
    rep.r_lower = r_lower;
    rep.r_upper = r_upper;
    rep.c0_value = c0(1.0 + r_lower);
    rep.dominance_interval = {1.0, rep.c0_value};
    rep.complete_subclass = {1.0 + r_lower, rep.c0_value};
    rep.minimal_complete = {1.0 + r_lower, 1.0 + r_upper};
    return rep;
}

// Closed-form normalized MSE bounds for the order-constrained univariate MLE
// plug-in: R_lower = sigma1^2 (sigma2^2 + sigma1^2/2) / (sigmaY^2 (sigma1^2 +
// sigma2^2)), R_upper = sigma1^2/sigmaY^2.
inline std::pair<double, double> r_bounds_order(const ProblemSpec& spec) {
    if (spec.p != 1 || spec.constraint.kind != ConstraintKind::HalfLineProduct ||
        spec.constraint.unconstrained())
        throw std::invalid_argument("r_bounds_order: closed form needs p = 1 with an order constraint; "
                                    "use r_bounds_numeric otherwise");
    double lower = spec.sigma1_sq * (spec.sigma2_sq + 0.5 * spec.sigma1_sq) /
                   (spec.sigmaY_sq * (spec.sigma1_sq + spec.sigma2_sq));
    double upper = spec.sigma1_sq / spec.sigmaY_sq;
    return {lower, upper};
}

// psi = identity has constant normalized MSE sigma1^2/sigmaY^2.
inline std::pair<double, double> r_bounds_identity(const ProblemSpec& spec) {
    double v = spec.sigma1_sq / spec.sigmaY_sq;
    return {v, v};
}

// Monte Carlo bracket of the normalized MSE of a rotated-frame estimator psi
// over a mu1 grid.  The lower end is shifted down by 3 standard errors and
// floored at sigma1^2 sigma2^2 / ((sigma1^2+sigma2^2) sigmaY^2): dominance
// needs a true lower bound, so under-estimating is the safe direction.
inline std::pair<double, double> r_bounds_numeric(const ProblemSpec& spec,
                                                  const std::function<Vec(const Vec&)>& psi,
                                                  const std::vector<Vec>& grid,
                                                  int n_draws = 20000, std::uint64_t seed = 1234) {
    if (grid.empty()) throw std::invalid_argument("r_bounds_numeric: empty grid");
    const double var_w1 = spec.sigma1_sq / (1.0 + spec.r());
    const double sd = std::sqrt(var_w1);
    const double base = spec.sigma2_sq / (1.0 + spec.r());  // = s1^2 s2^2/(s1^2+s2^2)
    double lo = 1e308, hi = -1e308;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const Vec& mu1 = grid[g];
        Rng rng(seed + g);
        double sum = 0.0, sumsq = 0.0;
        Vec w(spec.p);
        for (int i = 0; i < n_draws; ++i) {
            for (int k = 0; k < spec.p; ++k) w[k] = mu1[k] + sd * rng.normal();
            Vec est = psi(w);
            double se = 0.0;
            for (int k = 0; k < spec.p; ++k) {
                double d = est[k] - mu1[k];
                se += d * d;
            }
            sum += se;
            sumsq += se * se;
        }
        double mse = sum / n_draws;
        double sehat = std::sqrt(std::max(0.0, sumsq / n_draws - mse * mse) / n_draws);
        lo = std::min(lo, mse - 3.0 * sehat);
        hi = std::max(hi, mse + 3.0 * sehat);
    }
    double r_lower = (base + std::max(0.0, lo) / spec.p) / spec.sigmaY_sq;
    double r_upper = (base + std::max(0.0, hi) / spec.p) / spec.sigmaY_sq;
    double floor = base / spec.sigmaY_sq;
    return {std::max(r_lower, floor), std::max(r_upper, floor)};
}

// Reflected-normal scale dual to alpha-divergence for an expansion factor c:
// gamma0 = (c/(1+alpha) + 1/(1-alpha)) sigmaY^2.
inline double gamma0(double alpha, double c, const ProblemSpec& spec) {
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("gamma0: requires |alpha| < 1");
    if (!(c > 0.0)) throw std::invalid_argument("gamma0: requires c > 0");
    return (c / (1.0 + alpha) + 1.0 / (1.0 - alpha)) * spec.sigmaY_sq;
}

// Shrunken first-coordinate variance of the concave-loss comparison model:
//   sigma_{Z1}^2 = {(1+a) + c(1-a)} s1^2 / ({(1+a) + c(1-a)} + (1-a^2) s1^2/sY^2),
// continued by its squared-error limit sigma1^2 at |alpha| = 1.
inline double sigma_z1(double alpha, double c, const ProblemSpec& spec) {
    if (!(std::abs(alpha) <= 1.0)) throw std::invalid_argument("sigma_z1: requires |alpha| <= 1");
    if (!(c > 0.0)) throw std::invalid_argument("sigma_z1: requires c > 0");
    if (std::abs(alpha) == 1.0) return spec.sigma1_sq;
    double k = (1.0 + alpha) + c * (1.0 - alpha);
    return k * spec.sigma1_sq / (k + (1.0 - alpha * alpha) * spec.sigma1_sq / spec.sigmaY_sq);
}

// True variances of the two comparison statistics of the order-case dominance
// proof when the model variances are misspecified by (a1^2, a2^2, aY^2):
//   sigmaU^2 = (a2^2 s2^2 + (1-b)^2 a1^2 s1^2 + b^2 aY^2 sY^2)/(s2^2 + b sY^2),
//   sigmaV^2 = (a1^2 s1^2 + a2^2 s2^2)/(s1^2 + s2^2),  b = s1^2/(s1^2 + sY^2).
inline std::pair<double, double> misspec_sigmas(const ProblemSpec& spec, const MisspecScheme& a) {
    if (spec.p != 1) throw std::invalid_argument("misspec_sigmas: requires p = 1");
    if (!(a.a1_sq > 0) || !(a.a2_sq > 0) || !(a.aY_sq > 0))
        throw std::invalid_argument("misspec_sigmas: multipliers must be > 0");
    const double b = spec.sigma1_sq / (spec.sigma1_sq + spec.sigmaY_sq);
    const double sU2 = (a.a2_sq * spec.sigma2_sq + (1.0 - b) * (1.0 - b) * a.a1_sq * spec.sigma1_sq +
                        b * b * a.aY_sq * spec.sigmaY_sq) /
                       (spec.sigma2_sq + b * spec.sigmaY_sq);
    const double sV2 = (a.a1_sq * spec.sigma1_sq + a.a2_sq * spec.sigma2_sq) /
                       (spec.sigma1_sq + spec.sigma2_sq);
    return {sU2, sV2};
}

struct PersistenceVerdict {
    bool holds = false;
    double sigmaU_sq = 0.0;
    double sigmaV_sq = 0.0;
};

// Dominance of the uniform-prior Bayes density over the equivariant benchmark
// under misspecified variances persists iff sigmaU^2 <= sigmaV^2.  Ties within
// rounding count as holding (the identity scheme is an exact tie).
inline PersistenceVerdict persistence_check(const ProblemSpec& spec, const MisspecScheme& a) {
    if (spec.constraint.kind != ConstraintKind::HalfLineProduct)
        throw std::invalid_argument("persistence_check: order constraint required");
    auto [sU2, sV2] = misspec_sigmas(spec, a);
    PersistenceVerdict v;
    v.sigmaU_sq = sU2;
    v.sigmaV_sq = sV2;
    v.holds = sU2 <= sV2 * (1.0 + 1e-12);
    return v;
}

} // namespace addinfo
