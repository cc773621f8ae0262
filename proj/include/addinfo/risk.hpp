#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "model.hpp"
#include "predictive_density.hpp"
#include "quadrature.hpp"

namespace addinfo {

enum class RiskMethod { ClosedForm, Quadrature, MonteCarlo };

inline const char* to_string(RiskMethod m) {
    switch (m) {
        case RiskMethod::ClosedForm: return "closed-form";
        case RiskMethod::Quadrature: return "quadrature";
        case RiskMethod::MonteCarlo: return "monte-carlo";
    }
    return "?";
}

struct RiskEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 unless monte-carlo
    RiskMethod method = RiskMethod::ClosedForm;
    long sample_count = 0;
};

// A parameter point; membership in the constraint set is recorded, not
// enforced (misspecification studies evaluate outside A).
struct ThetaPoint {
    Vec theta1, theta2;
    bool in_constraint = true;
};

inline ThetaPoint theta_point(const ProblemSpec& spec, Vec theta1, Vec theta2) {
    if (static_cast<int>(theta1.size()) != spec.p || static_cast<int>(theta2.size()) != spec.p)
        throw std::invalid_argument("theta_point: dimension mismatch");
    ThetaPoint t;
    Vec d(spec.p);
    for (int i = 0; i < spec.p; ++i) d[i] = theta1[i] - theta2[i];
    t.in_constraint = spec.constraint.contains(d);
    t.theta1 = std::move(theta1);
    t.theta2 = std::move(theta2);
    return t;
}

namespace detail {

// h_alpha-divergence between two isotropic Gaussians: qhat = N(m1, v1 I)
// against the truth q = N(m2, v2 I).
inline double gaussian_alpha_loss(double alpha, const Vec& m1, double v1, const Vec& m2, double v2) {
    const int p = static_cast<int>(m1.size());
    double dd = 0.0;
    for (int i = 0; i < p; ++i) {
        double d = m1[i] - m2[i];
        dd += d * d;
    }
    if (alpha == -1.0)  // KL(q || qhat)
        return 0.5 * (p * (v2 / v1 - 1.0 - std::log(v2 / v1)) + dd / v1);
    if (alpha == 1.0)  // KL(qhat || q)
        return 0.5 * (p * (v1 / v2 - 1.0 - std::log(v1 / v2)) + dd / v2);
    const double a = 0.5 * (1.0 + alpha), b = 0.5 * (1.0 - alpha);
    const double mix = a * v2 + b * v1;
    const double log_aff = p * (0.5 * b * std::log(v1) + 0.5 * a * std::log(v2) - 0.5 * std::log(mix)) -
                           a * b * dd / (2.0 * mix);
    return 4.0 / (1.0 - alpha * alpha) * (1.0 - std::exp(log_aff));
}

} // namespace detail

// L_alpha(theta, qhat) = Integral h_alpha(qhat/q) q dy against the true
// density q = N_p(theta1, y_var I); y_var defaults to sigmaY^2 and is
// overridden under misspecification.  Gaussian qhat: closed form.  Otherwise
// Gauss-Hermite over Y for p = 1, Monte Carlo over Y for p > 1.
inline double alpha_loss(const PredictiveDensity& qhat, const Vec& theta1, const LossSpec& loss,
                         const ProblemSpec& spec, std::optional<double> y_var = std::nullopt,
                         int mc_y_samples = 8192, std::uint64_t mc_y_seed = 97531) {
    const double vq = y_var.value_or(spec.sigmaY_sq);
    if (static_cast<int>(theta1.size()) != qhat.p)
        throw std::invalid_argument("alpha_loss: dimension mismatch");

    if (qhat.gaussian())
        return detail::gaussian_alpha_loss(loss.alpha, *qhat.center, *qhat.scale_c * qhat.sigmaY_sq,
                                           theta1, vq);

    const double sd = std::sqrt(vq);
    const int p = qhat.p;
    auto log_q = [&](const Vec& y) {
        double ss = 0.0;
        for (int i = 0; i < p; ++i) {
            double d = y[i] - theta1[i];
            ss += d * d;
        }
        return -0.5 * ss / vq - p * (log_sqrt_2pi + 0.5 * std::log(vq));
    };
    auto h_of_logr = [&](double lr) {
        if (loss.alpha == -1.0) return -lr;
        if (loss.alpha == 1.0) return std::exp(lr) * lr;
        double a = 0.5 * (1.0 + loss.alpha);
        return 4.0 / (1.0 - loss.alpha * loss.alpha) * (1.0 - std::exp(a * lr));
    };

    if (p == 1) {
        Vec y(1);
        return gauss_hermite_expect(
            [&](double z) {
                y[0] = theta1[0] + sd * z;
                return h_of_logr(qhat.log_density(y) - log_q(y));
            },
            1e-11);
    }
    Rng rng(mc_y_seed);
    Vec y(p);
    double acc = 0.0;
    for (int i = 0; i < mc_y_samples; ++i) {
        for (int k = 0; k < p; ++k) y[k] = theta1[k] + sd * rng.normal();
        acc += h_of_logr(qhat.log_density(y) - log_q(y));
    }
    return acc / mc_y_samples;
}

// Frequentist risk by Monte Carlo: draw X | theta (with misspecification
// multipliers when the spec carries them), build qhat(.; X), average the
// loss.  Deterministic given seed; construction failures are rethrown with
// the offending draw index.
inline RiskEstimate risk_mc(const std::function<PredictiveDensity(const XPair&)>& make_qhat,
                            const ThetaPoint& theta, const LossSpec& loss, const ProblemSpec& spec,
                            int n, std::uint64_t seed) {
    if (n < 100) throw std::invalid_argument("risk_mc: n must be >= 100");
    const MisspecScheme a = spec.misspec.value_or(MisspecScheme{});
    const double sd1 = std::sqrt(a.a1_sq * spec.sigma1_sq);
    const double sd2 = std::sqrt(a.a2_sq * spec.sigma2_sq);
    const double y_var = a.aY_sq * spec.sigmaY_sq;

    Rng rng(seed);
    XPair x;
    x.x1.resize(spec.p);
    x.x2.resize(spec.p);
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < spec.p; ++k) {
            x.x1[k] = theta.theta1[k] + sd1 * rng.normal();
            x.x2[k] = theta.theta2[k] + sd2 * rng.normal();
        }
        double l;
        try {
            PredictiveDensity q = make_qhat(x);
            l = alpha_loss(q, theta.theta1, loss, spec, y_var, 8192, seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error("risk_mc: estimator failed at draw " + std::to_string(i) + ": " +
                                     e.what());
        }
        sum += l;
        sumsq += l * l;
    }
    RiskEstimate est;
    est.value = sum / n;
    est.std_error = std::sqrt(std::max(0.0, sumsq / n - est.value * est.value) / n);
    est.method = RiskMethod::MonteCarlo;
    est.sample_count = n;
    return est;
}

// Kullback-Leibler risk of a plug-in with expansion c and mean squared error
// MSE(theta):  p/2 (ln c + 1/c - 1) + MSE/(2 c sigmaY^2).  The duality bridge
// from point estimation to KL risk.
inline RiskEstimate kl_risk_plugin_closed(double mse, double c, const ProblemSpec& spec) {
    if (!(c > 0)) throw std::invalid_argument("kl_risk_plugin_closed: c must be > 0");
    RiskEstimate est;
    est.value = 0.5 * spec.p * (std::log(c) + 1.0 / c - 1.0) + mse / (2.0 * c * spec.sigmaY_sq);
    est.method = RiskMethod::ClosedForm;
    return est;
}

// MSE of the nonnegative-mean MLE max(0, W1), W1 ~ N(mu1, var):
//   var { 1/2 + rho^2 Phi(-rho) + Integral_0^rho t^2 phi(t) dt },
// rho = mu1/sqrt(var); the integral in closed form -rho phi(rho) + Phi(rho) - 1/2.
// Increases from var/2 at mu1 = 0 to var as mu1 -> inf.
inline double mse_mle_order(double mu1, double var_w1) {
    if (!(mu1 >= 0)) throw std::invalid_argument("mse_mle_order: mu1 must be >= 0");
    if (!(var_w1 > 0)) throw std::invalid_argument("mse_mle_order: var_w1 must be > 0");
    const double rho = mu1 / std::sqrt(var_w1);
    const double tail_int = -rho * std_normal_pdf(rho) + std_normal_cdf(rho) - 0.5;
    return var_w1 * (0.5 + rho * rho * std_normal_cdf(-rho) + tail_int);
}

// Squared-error risk of a rotated-frame estimator W2 + psi(W1):
// psi's one-population MSE plus the constant p sigma2^2/(1+r).
inline double mse_decomposed(double psi_mse, const ProblemSpec& spec) {
    return psi_mse + spec.p * spec.sigma2_sq / (1.0 + spec.r());
}

// MSE of a scalar psi(W1) at mu1, W1 ~ N(mu1, var_w1).  Adaptive panel
// quadrature: clamp-type psi have kinks, which panel bisection absorbs while
// spectral rules would stall.
inline double mse_psi_quadrature(const std::function<double(double)>& psi, double mu1,
                                 double var_w1) {
    const double sd = std::sqrt(var_w1);
    return integrate_adaptive(
        [&](double w) {
            double d = psi(w) - mu1;
            return d * d * std_normal_pdf((w - mu1) / sd) / sd;
        },
        mu1 - 14.0 * sd, mu1 + 14.0 * sd, 1e-13);
}

inline double reflected_normal_loss(const Vec& est, const Vec& theta1, double gamma0) {
    if (!(gamma0 > 0)) throw std::invalid_argument("reflected_normal_loss: gamma0 must be > 0");
    if (est.size() != theta1.size()) throw std::invalid_argument("reflected_normal_loss: dimensions");
    double dd = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        double d = est[i] - theta1[i];
        dd += d * d;
    }
    return 1.0 - std::exp(-dd / (2.0 * gamma0));
}

// KL risk advantage of the uniform Bayes density over the equivariant
// benchmark for the order constraint (p = 1):
//   Delta(theta) = E[ log Phi(U) - log Phi(V) ],
// U ~ N(d/sigmaT, sigmaU^2), V ~ N(d/sqrt(s1^2+s2^2), sigmaV^2), d = theta1 -
// theta2 - bound.  Without misspecification sigmaU = sigmaV = 1; otherwise the
// variances follow misspec_sigmas.  Positive means the Bayes density wins.
inline double risk_diff_order(const ThetaPoint& theta, const ProblemSpec& spec,
                              std::optional<MisspecScheme> misspec = std::nullopt) {
    if (spec.p != 1 || spec.constraint.kind != ConstraintKind::HalfLineProduct ||
        spec.constraint.unconstrained())
        throw std::invalid_argument("risk_diff_order: needs p = 1 with an order constraint");
    const double bound = spec.constraint.lower[0];
    const double d = theta.theta1[0] - theta.theta2[0] - bound;
    const double beta = spec.sigma1_sq / (spec.sigma1_sq + spec.sigmaY_sq);
    const double sigmaT = std::sqrt(spec.sigma2_sq + beta * spec.sigmaY_sq);
    const double s12 = std::sqrt(spec.sigma1_sq + spec.sigma2_sq);
    double sU = 1.0, sV = 1.0;
    if (misspec && !misspec->identity()) {
        auto [u2, v2] = misspec_sigmas(spec, *misspec);
        sU = std::sqrt(u2);
        sV = std::sqrt(v2);
    }
    const double muU = d / sigmaT, muV = d / s12;
    return gauss_hermite_expect(
        [&](double z) {
            return log_std_normal_cdf(muU + sU * z) - log_std_normal_cdf(muV + sV * z);
        },
        1e-11);
}

// Interval analogue (p = 1, |theta1 - theta2| <= m):
//   Delta = E[ log(Phi(Z+d0) - Phi(Z+d2)) - log(Phi(Z+d0') - Phi(Z+d2')) ],
// with the four shifts (m +/- d)/sigmaT and (m +/- d)/sqrt(s1^2+s2^2).
inline double risk_diff_interval(const ThetaPoint& theta, const ProblemSpec& spec) {
    if (spec.p != 1 || spec.constraint.kind != ConstraintKind::Interval)
        throw std::invalid_argument("risk_diff_interval: needs p = 1 with an interval constraint");
    const double m = spec.constraint.m;
    const double d = theta.theta1[0] - theta.theta2[0];
    const double beta = spec.sigma1_sq / (spec.sigma1_sq + spec.sigmaY_sq);
    const double sigmaT = std::sqrt(spec.sigma2_sq + beta * spec.sigmaY_sq);
    const double s12 = std::sqrt(spec.sigma1_sq + spec.sigma2_sq);
    const double d0 = (m + d) / sigmaT, d2 = (-m + d) / sigmaT;
    const double d0p = (m + d) / s12, d2p = (-m + d) / s12;
    return gauss_hermite_expect(
        [&](double z) {
            return log_std_normal_cdf_diff(z + d0, z + d2) -
                   log_std_normal_cdf_diff(z + d0p, z + d2p);
        },
        1e-11);
}

// Quadrature witness for the monotone-expectation comparison: with muU >= muV and
// sdU <= sdV, E log Phi(U) >= E log Phi(V).
struct MonotoneExpectationWitness {
    double e_log_phi_u = 0.0;
    double e_log_phi_v = 0.0;
    bool ordered() const { return e_log_phi_u >= e_log_phi_v; }
};

inline MonotoneExpectationWitness monotone_expectation_check(double muU, double sdU, double muV,
                                                             double sdV) {
    if (!(muU >= muV) || !(sdU <= sdV))
        throw std::invalid_argument("monotone_expectation_check: requires muU >= muV and sdU <= sdV");
    MonotoneExpectationWitness w;
    w.e_log_phi_u =
        gauss_hermite_expect([&](double z) { return log_std_normal_cdf(muU + sdU * z); }, 1e-12);
    w.e_log_phi_v =
        gauss_hermite_expect([&](double z) { return log_std_normal_cdf(muV + sdV * z); }, 1e-12);
    return w;
}

// ---- quadrature risk for the Gaussian families (p = 1, no misspecification)

// Closed-form alpha risk of the equivariant benchmark (constant in theta).
inline RiskEstimate risk_mre_closed(const LossSpec& loss, const ProblemSpec& spec) {
    const double c = mre_scale_c(spec, loss);
    RiskEstimate est;
    est.method = RiskMethod::ClosedForm;
    if (loss.alpha == -1.0) {
        est.value = 0.5 * spec.p * (std::log(c) + 1.0 / c - 1.0) +
                    spec.p * spec.sigma1_sq / (2.0 * c * spec.sigmaY_sq);
        return est;
    }
    if (loss.alpha == 1.0) {
        est.value = spec.p * spec.sigma1_sq / (2.0 * spec.sigmaY_sq);
        return est;
    }
    // E over X1 of the Gaussian affinity: E exp(-t ||X1-theta1||^2) with
    // X1 - theta1 ~ N(0, sigma1^2 I) gives (1+2 t sigma1^2)^(-p/2).
    const double a = 0.5 * (1.0 + loss.alpha), b = 0.5 * (1.0 - loss.alpha);
    const double v1 = c * spec.sigmaY_sq, v2 = spec.sigmaY_sq;
    const double mix = a * v2 + b * v1;
    const double log_aff0 =
        spec.p * (0.5 * b * std::log(v1) + 0.5 * a * std::log(v2) - 0.5 * std::log(mix));
    const double t = a * b / (2.0 * mix);
    const double e_center = std::pow(1.0 + 2.0 * t * spec.sigma1_sq, -0.5 * spec.p);
    est.value = 4.0 / (1.0 - loss.alpha * loss.alpha) * (1.0 - std::exp(log_aff0) * e_center);
    return est;
}

// Exact (quadrature) alpha risk of a rotated-frame plug-in q = N(W2 + psi(W1),
// c sigmaY^2 I) at theta, p = 1.  KL and RKL reduce through the MSE; for
// |alpha| < 1 the W2 coordinate integrates in closed form and W1 by
// Gauss-Hermite.
inline RiskEstimate risk_classC_quadrature(const std::function<double(double)>& psi, double c,
                                           const LossSpec& loss, const ThetaPoint& theta,
                                           const ProblemSpec& spec) {
    if (spec.p != 1) throw std::invalid_argument("risk_classC_quadrature: p = 1 only");
    if (spec.misspec && !spec.misspec->identity())
        throw std::invalid_argument("risk_classC_quadrature: use risk_mc under misspecification");
    const double r = spec.r();
    const double mu1 = (theta.theta1[0] - theta.theta2[0]) / (1.0 + r);
    const double var_w1 = spec.sigma1_sq / (1.0 + r);
    const double var_w2 = spec.sigma2_sq / (1.0 + r);

    RiskEstimate est;
    est.method = RiskMethod::Quadrature;
    if (std::abs(loss.alpha) == 1.0) {
        const double mse = mse_psi_quadrature(psi, mu1, var_w1) + var_w2;
        if (loss.alpha == -1.0)
            est.value = 0.5 * (std::log(c) + 1.0 / c - 1.0) + mse / (2.0 * c * spec.sigmaY_sq);
        else
            est.value = 0.5 * (c - 1.0 - std::log(c)) + mse / (2.0 * spec.sigmaY_sq);
        return est;
    }
    const double a = 0.5 * (1.0 + loss.alpha), b = 0.5 * (1.0 - loss.alpha);
    const double v1 = c * spec.sigmaY_sq, v2 = spec.sigmaY_sq;
    const double mix = a * v2 + b * v1;
    const double log_aff0 = 0.5 * b * std::log(v1) + 0.5 * a * std::log(v2) - 0.5 * std::log(mix);
    const double t = a * b / (2.0 * mix);
    const double shrink = 1.0 + 2.0 * t * var_w2;
    const double sd1 = std::sqrt(var_w1);
    const double e_aff = integrate_adaptive(
        [&](double w) {
            double u = psi(w) - mu1;
            return std::exp(-t * u * u / shrink) / std::sqrt(shrink) *
                   std_normal_pdf((w - mu1) / sd1) / sd1;
        },
        mu1 - 14.0 * sd1, mu1 + 14.0 * sd1, 1e-13);
    est.value = 4.0 / (1.0 - loss.alpha * loss.alpha) * (1.0 - std::exp(log_aff0) * e_aff);
    return est;
}

// KL risk of the uniform Bayes density via the benchmark and the quadrature
// risk difference (order and interval constraints, p = 1).
inline RiskEstimate kl_risk_bayes_uniform_quadrature(const ThetaPoint& theta,
                                                     const ProblemSpec& spec) {
    double diff;
    if (spec.constraint.kind == ConstraintKind::Interval)
        diff = risk_diff_interval(theta, spec);
    else
        diff = risk_diff_order(theta, spec, spec.misspec);
    double base;
    if (spec.misspec && !spec.misspec->identity()) {
        // Benchmark KL risk under true variances a^2 sigma^2.
        const MisspecScheme& a = *spec.misspec;
        const double c = mre_scale_c(spec, LossSpec::kl());
        const double vh = c * spec.sigmaY_sq, vq = a.aY_sq * spec.sigmaY_sq;
        base = 0.5 * (vq / vh - 1.0 - std::log(vq / vh)) + a.a1_sq * spec.sigma1_sq / (2.0 * vh);
    } else {
        base = risk_mre_closed(LossSpec::kl(), spec).value;
    }
    RiskEstimate est;
    est.method = RiskMethod::Quadrature;
    est.value = base - diff;
    return est;
}

} // namespace addinfo
