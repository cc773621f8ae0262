#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "dominance.hpp"
#include "model.hpp"
#include "predictive_density.hpp"
#include "skew_normal.hpp"
#include "special.hpp"

namespace addinfo {

struct XPair {
    Vec x1, x2;
};

namespace detail {

inline void check_x(const XPair& x, const ProblemSpec& spec) {
    if (static_cast<int>(x.x1.size()) != spec.p || static_cast<int>(x.x2.size()) != spec.p)
        throw std::invalid_argument("estimator: data dimension != spec.p");
}

} // namespace detail

// Mean of N_p(mu, var I) truncated to A.
inline Vec truncated_normal_mean(const ConstraintSet& A, const Vec& mu, double var) {
    if (!(var > 0)) throw std::invalid_argument("truncated_normal_mean: var must be > 0");
    if (static_cast<int>(mu.size()) != A.p)
        throw std::invalid_argument("truncated_normal_mean: dimension mismatch");
    if (A.unconstrained()) return mu;
    const double sd = std::sqrt(var);
    Vec out = mu;
    switch (A.kind) {
        case ConstraintKind::HalfLineProduct:
            for (int i = 0; i < A.p; ++i) {
                if (A.lower[i] == -std::numeric_limits<double>::infinity()) continue;
                out[i] = mu[i] + sd * inverse_mills((mu[i] - A.lower[i]) / sd);
            }
            return out;
        case ConstraintKind::Interval:
        case ConstraintKind::Rectangle:
            for (int i = 0; i < A.p; ++i) {
                double m = A.kind == ConstraintKind::Interval ? A.m : A.halfwidth[i];
                double a = (-m - mu[i]) / sd;
                double b = (m - mu[i]) / sd;
                out[i] = mu[i] + sd * (std_normal_pdf(a) - std_normal_pdf(b)) / std_normal_cdf_diff(b, a);
            }
            return out;
        case ConstraintKind::Ball: {
            double lambda = norm2(mu) / var;
            double q = A.m * A.m / var;
            double scale = noncentral_chi2_cdf(A.p + 2, lambda, q) / noncentral_chi2_cdf(A.p, lambda, q);
            for (double& v : out) v *= scale;
            return out;
        }
    }
    return out;
}

inline double mre_scale_c(const ProblemSpec& spec, const LossSpec& loss) {
    return 1.0 + (1.0 - loss.alpha) * spec.sigma1_sq / (2.0 * spec.sigmaY_sq);
}

// Minimum risk equivariant predictive density: N_p(x1, (sigma1^2 (1-alpha)/2
// + sigmaY^2) I).  For alpha = 1 the Bayes solution is a plug-in; use
// bayes_rkl with the unconstrained spec instead.
inline PredictiveDensity mre(const Vec& x1, const ProblemSpec& spec, const LossSpec& loss) {
    if (loss.alpha >= 1.0)
        throw std::invalid_argument("mre: alpha = 1 has no expansion form; use bayes_rkl with A = R^p");
    if (static_cast<int>(x1.size()) != spec.p) throw std::invalid_argument("mre: dimension mismatch");
    return gaussian_density(DensityKind::Mre, x1, mre_scale_c(spec, loss), spec.sigmaY_sq);
}

// N_p(center, c sigmaY^2 I).
inline PredictiveDensity plugin(const Vec& center, double c, const ProblemSpec& spec) {
    if (!(c > 0)) throw std::invalid_argument("plugin: c must be > 0");
    if (static_cast<int>(center.size()) != spec.p)
        throw std::invalid_argument("plugin: dimension mismatch");
    return gaussian_density(DensityKind::GaussianPlugin, center, c, spec.sigmaY_sq);
}

// Restricted MLE of mu1 from W1 ~ N_p(mu1, var I) with (1+r) mu1 in A: the
// Gaussian likelihood makes the constrained maximizer the Euclidean
// projection onto A/(1+r).
inline Vec restricted_mle_mu1(const Vec& w1, const ProblemSpec& spec) {
    return project_onto(spec.constraint.scaled(1.0 + spec.r()), w1);
}

// Maximum likelihood plug-in N_p(theta1_hat, c sigmaY^2 I) with
// theta1_hat = W2 + restricted_mle_mu1(W1); c = 1 is the plain plug-in,
// c > 1 its variance expansion.
inline PredictiveDensity mle(const XPair& x, const ProblemSpec& spec, double c = 1.0) {
    detail::check_x(x, spec);
    RotatedFrame f = rotate(x.x1, x.x2, spec);
    Vec mu1 = restricted_mle_mu1(f.w1, spec);
    Vec center(spec.p);
    for (int i = 0; i < spec.p; ++i) center[i] = f.w2[i] + mu1[i];
    return plugin(center, c, spec);
}

namespace detail {

struct BayesCoordNormal {};  // unconstrained coordinate: plain N(xi, tau^2)

using BayesCoord = std::variant<BayesCoordNormal, SkewNormalGB, SkewNormalInterval>;

} // namespace detail

// Bayes predictive density under the uniform prior truncated to A, for
// alpha-divergence loss with n = 2/(1-alpha) a positive integer:
//   q(y) = mre(y) {P(T in A)}^n / P(all of Z_1..Z_n in A),
// T ~ N_p(beta (y - x1) + (x1 - x2), sigmaT^2 I), sigmaT^2 = sigma2^2 +
// n sigmaY^2 beta, beta = sigma1^2/(sigma1^2 + n sigmaY^2).  Product
// constraints factor into univariate skew-normal coordinates; the ball uses
// the noncentral chi-square weight, with a fixed-seed Monte Carlo denominator
// when n >= 2 (no closed form exists there).
inline PredictiveDensity bayes_uniform(const XPair& x, const ProblemSpec& spec, const LossSpec& loss) {
    detail::check_x(x, spec);
    if (!loss.has_integer_n())
        throw std::invalid_argument(
            "bayes_uniform: 2/(1-alpha) must be a positive integer (Bayes form unavailable); "
            "use plug-in/expanded families for such alpha");
    if (spec.constraint.unconstrained()) return mre(x.x1, spec, loss);

    const int n = loss.n_int();
    const int p = spec.p;
    const double beta = spec.sigma1_sq / (spec.sigma1_sq + n * spec.sigmaY_sq);
    const double sigmaT = std::sqrt(spec.sigma2_sq + n * spec.sigmaY_sq * beta);
    const double tau = std::sqrt(spec.sigma1_sq / n + spec.sigmaY_sq);
    const double alpha1 = beta * tau / sigmaT;

    PredictiveDensity q;
    q.kind = DensityKind::BayesUniform;
    q.p = p;
    q.sigmaY_sq = spec.sigmaY_sq;

    switch (spec.constraint.kind) {
        case ConstraintKind::HalfLineProduct:
        case ConstraintKind::Interval:
        case ConstraintKind::Rectangle: {
            auto coords = std::make_shared<std::vector<detail::BayesCoord>>();
            coords->reserve(p);
            for (int i = 0; i < p; ++i) {
                const double dx = x.x1[i] - x.x2[i];
                if (spec.constraint.kind == ConstraintKind::HalfLineProduct) {
                    const double b = spec.constraint.lower[i];
                    if (b == -std::numeric_limits<double>::infinity())
                        coords->emplace_back(detail::BayesCoordNormal{});
                    else
                        coords->emplace_back(SkewNormalGB(n, (dx - b) / sigmaT, alpha1, x.x1[i], tau));
                } else {
                    const double m = spec.constraint.kind == ConstraintKind::Interval
                                         ? spec.constraint.m
                                         : spec.constraint.halfwidth[i];
                    coords->emplace_back(SkewNormalInterval(n, (dx + m) / sigmaT, alpha1,
                                                            (dx - m) / sigmaT, x.x1[i], tau));
                }
            }
            const double xi_tau = tau;
            q.log_density = [coords, p, xi_tau, x1 = x.x1](const Vec& y) {
                if (static_cast<int>(y.size()) != p)
                    throw std::invalid_argument("log_density: dimension mismatch");
                double acc = 0.0;
                for (int i = 0; i < p; ++i) {
                    const auto& c = (*coords)[i];
                    if (std::holds_alternative<detail::BayesCoordNormal>(c)) {
                        double z = (y[i] - x1[i]) / xi_tau;
                        acc += -0.5 * z * z - log_sqrt_2pi - std::log(xi_tau);
                    } else if (auto* sn = std::get_if<SkewNormalGB>(&c)) {
                        acc += sn->log_pdf(y[i]);
                    } else {
                        acc += std::get<SkewNormalInterval>(c).log_pdf(y[i]);
                    }
                }
                return acc;
            };
            q.draw = [coords, p, xi_tau, x1 = x.x1](Rng& rng, Vec& y) {
                y.resize(p);
                for (int i = 0; i < p; ++i) {
                    const auto& c = (*coords)[i];
                    if (std::holds_alternative<detail::BayesCoordNormal>(c))
                        y[i] = x1[i] + xi_tau * rng.normal();
                    else if (auto* sn = std::get_if<SkewNormalGB>(&c))
                        y[i] = sn->draw_one(rng);
                    else
                        y[i] = std::get<SkewNormalInterval>(c).draw_one(rng);
                }
            };
            return q;
        }
        case ConstraintKind::Ball: {
            const double m = spec.constraint.m;
            const double qthr = m * m / (sigmaT * sigmaT);
            Vec dx(p);
            for (int i = 0; i < p; ++i) dx[i] = x.x1[i] - x.x2[i];

            double log_norm;
            if (n == 1) {
                double lambda2 = norm2(dx) / (spec.sigma1_sq + spec.sigma2_sq);
                log_norm = log_noncentral_chi2_cdf(
                    p, lambda2, m * m / (spec.sigma1_sq + spec.sigma2_sq));
            } else {
                // P(all Z_i in A) by Monte Carlo on the representation
                // Z_i = (x1 - x2) + beta tau U_0 + sigmaT U_i, shared U_0.
                const int draws = 1000000;
                Rng rng(0x5eed0bau);
                long hits = 0;
                Vec u0(p), z(p);
                for (int d = 0; d < draws; ++d) {
                    rng.normal_vec(u0);
                    bool all_in = true;
                    for (int i = 0; i < n && all_in; ++i) {
                        double ss = 0.0;
                        for (int k = 0; k < p; ++k) {
                            z[k] = dx[k] + beta * tau * u0[k] + sigmaT * rng.normal();
                            ss += z[k] * z[k];
                        }
                        all_in = ss <= m * m;
                    }
                    if (all_in) ++hits;
                }
                double phat = std::max(1.0 / draws, static_cast<double>(hits) / draws);
                log_norm = std::log(phat);
                q.normalizer_value = phat;
                q.normalizer_std_error = std::sqrt(phat * (1.0 - phat) / draws);
            }

            const double bt = beta, t = tau;
            q.log_density = [dx, bt, t, sigmaT, qthr, log_norm, p, n, x1 = x.x1](const Vec& y) {
                if (static_cast<int>(y.size()) != p)
                    throw std::invalid_argument("log_density: dimension mismatch");
                double ss = 0.0, lam = 0.0;
                for (int i = 0; i < p; ++i) {
                    double zi = (y[i] - x1[i]) / t;
                    ss += zi * zi;
                    double mt = bt * (y[i] - x1[i]) + dx[i];
                    lam += mt * mt;
                }
                lam /= sigmaT * sigmaT;
                return -0.5 * ss - p * (log_sqrt_2pi + std::log(t)) +
                       n * log_noncentral_chi2_cdf(p, lam, qthr) - log_norm;
            };
            q.draw = [dx, bt, t, sigmaT, qthr, p, n, x1 = x.x1](Rng& rng, Vec& y) {
                y.resize(p);
                for (;;) {
                    double lam = 0.0;
                    for (int i = 0; i < p; ++i) {
                        y[i] = x1[i] + t * rng.normal();
                        double mt = bt * (y[i] - x1[i]) + dx[i];
                        lam += mt * mt;
                    }
                    lam /= sigmaT * sigmaT;
                    double acc = std::exp(n * log_noncentral_chi2_cdf(p, lam, qthr));
                    if (rng.uniform() < acc) return;
                }
            };
            return q;
        }
    }
    throw std::logic_error("bayes_uniform: unreachable");
}

// E(theta1 | x) under the truncated uniform prior:
//   (E(omega1|x) + r x1 + x2)/(1+r),  omega1 ~ N_p(x1 - x2, (s1^2+s2^2) I)
// truncated to A.
inline Vec posterior_mean_theta1(const XPair& x, const ProblemSpec& spec) {
    detail::check_x(x, spec);
    const double r = spec.r();
    Vec dx(spec.p);
    for (int i = 0; i < spec.p; ++i) dx[i] = x.x1[i] - x.x2[i];
    Vec ew = truncated_normal_mean(spec.constraint, dx, spec.sigma1_sq + spec.sigma2_sq);
    Vec out(spec.p);
    for (int i = 0; i < spec.p; ++i) out[i] = (ew[i] + r * x.x1[i] + x.x2[i]) / (1.0 + r);
    return out;
}

// Bayes predictive density under reverse Kullback-Leibler loss: the plug-in
// at the posterior mean, N_p(E(theta1|x), sigmaY^2 I).
inline PredictiveDensity bayes_rkl(const XPair& x, const ProblemSpec& spec) {
    return plugin(posterior_mean_theta1(x, spec), 1.0, spec);
}

// Bayes estimator of mu1 under the uniform prior on {scale * mu1 in A} for
// W1 ~ N_p(mu1, var I): the posterior is N(w1, var) truncated to A/scale.
inline Vec psi_uniform(const Vec& w1, double var, const ConstraintSet& A, double scale) {
    if (!(scale > 0)) throw std::invalid_argument("psi_uniform: scale must be > 0");
    return truncated_normal_mean(A.scaled(scale), w1, var);
}

// Adaptive two-step improvement: recenter at W2 + psi*(W1), then expand the
// variance to the midpoint of [1 + R_lower, c0(1 + R_lower)].  Without a hint
// R_lower falls back to the universal floor sigma1^2 sigma2^2 /
// ((sigma1^2+sigma2^2) sigmaY^2) (zero mean-squared-error infimum term).
inline PredictiveDensity two_step_improve(const XPair& x, const ProblemSpec& spec,
                                          const std::function<Vec(const Vec&)>& psi_star,
                                          std::optional<double> r_lower_hint = std::nullopt) {
    detail::check_x(x, spec);
    RotatedFrame f = rotate(x.x1, x.x2, spec);
    Vec ps = psi_star(f.w1);
    Vec center(spec.p);
    for (int i = 0; i < spec.p; ++i) center[i] = f.w2[i] + ps[i];
    const double floor = spec.sigma1_sq * spec.sigma2_sq /
                         ((spec.sigma1_sq + spec.sigma2_sq) * spec.sigmaY_sq);
    const double rl = r_lower_hint.value_or(floor);
    const double c = 0.5 * ((1.0 + rl) + c0(1.0 + rl));
    return plugin(center, c, spec);
}

} // namespace addinfo
