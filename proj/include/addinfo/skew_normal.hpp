#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "normal.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace addinfo {

// SN(n, alpha0, alpha1, xi, tau): density
//   (1/K_n) (1/tau) phi((t-xi)/tau) Phi^n(alpha0 + alpha1 (t-xi)/tau),
// with K_n the Phi-power normalization constant from special.hpp.  This is
// the exact shape of the univariate order-constrained Bayes predictive
// densities.
struct SkewNormalGB {
    int n;
    double alpha0;
    double alpha1;
    double xi;
    double tau;

    SkewNormalGB(int n_, double a0, double a1, double xi_, double tau_)
        : n(n_), alpha0(a0), alpha1(a1), xi(xi_), tau(tau_) {
        if (n < 1) throw std::invalid_argument("SkewNormalGB: n must be >= 1");
        if (!(tau > 0)) throw std::invalid_argument("SkewNormalGB: tau must be > 0");
        log_kn_ = std::log(k_n(n, alpha0, alpha1));
    }

    double normalizer() const { return std::exp(log_kn_); }

    double log_pdf(double t) const {
        detail::require_finite(t, "SkewNormalGB::log_pdf");
        const double z = (t - xi) / tau;
        return -0.5 * z * z - log_sqrt_2pi - std::log(tau) +
               n * log_std_normal_cdf(alpha0 + alpha1 * z) - log_kn_;
    }

    double pdf(double t) const { return std::exp(log_pdf(t)); }

    // E(T) = xi + tau E(W) with E(W) from Stein's identity:
    //   E(W) = n a1/s phi(a0/s) K_{n-1}(a0/s^2, a1/s) / K_n(a0, a1),
    // s = sqrt(1+a1^2), K_0 = 1.  For n = 1 this is the inverse Mills form
    // xi + tau a1/s R(a0/s).
    double mean() const {
        const double s2 = 1.0 + alpha1 * alpha1;
        const double s = std::sqrt(s2);
        if (n == 1) return xi + tau * (alpha1 / s) * inverse_mills(alpha0 / s);
        const double km1 = k_n(n - 1, alpha0 / s2, alpha1 / s);
        const double ew = n * (alpha1 / s) * std_normal_pdf(alpha0 / s) * km1 / std::exp(log_kn_);
        return xi + tau * ew;
    }

    // Rejection sampler: propose xi + tau Z, accept with probability
    // Phi^n(alpha0 + alpha1 Z).  Expected acceptance rate is K_n.
    double draw_one(Rng& rng) const {
        for (;;) {
            double z = rng.normal();
            double p = std_normal_cdf(alpha0 + alpha1 * z);
            double acc = n == 1 ? p : std::pow(p, n);
            if (rng.uniform() < acc) return xi + tau * z;
        }
    }

    std::vector<double> sample(int count, std::uint64_t seed) const {
        if (count < 1) throw std::invalid_argument("SkewNormalGB::sample: count must be >= 1");
        std::vector<double> out;
        out.reserve(count);
        Rng rng(seed);
        while (static_cast<int>(out.size()) < count) out.push_back(draw_one(rng));
        return out;
    }

private:
    double log_kn_;
};

// Five-parameter interval variant: the Phi factor becomes a Phi difference
// {Phi(alpha0 + a1 z) - Phi(alpha2 + a1 z)}^n, normalized by J_n.
struct SkewNormalInterval {
    int n;
    double alpha0;
    double alpha1;
    double alpha2;
    double xi;
    double tau;

    SkewNormalInterval(int n_, double a0, double a1, double a2, double xi_, double tau_)
        : n(n_), alpha0(a0), alpha1(a1), alpha2(a2), xi(xi_), tau(tau_) {
        if (n < 1) throw std::invalid_argument("SkewNormalInterval: n must be >= 1");
        if (!(tau > 0)) throw std::invalid_argument("SkewNormalInterval: tau must be > 0");
        if (!(alpha0 > alpha2)) throw std::invalid_argument("SkewNormalInterval: requires alpha0 > alpha2");
        log_jn_ = std::log(j_n(n, alpha0, alpha1, alpha2));
    }

    double normalizer() const { return std::exp(log_jn_); }

    double log_pdf(double t) const {
        detail::require_finite(t, "SkewNormalInterval::log_pdf");
        const double z = (t - xi) / tau;
        return -0.5 * z * z - log_sqrt_2pi - std::log(tau) +
               n * log_std_normal_cdf_diff(alpha0 + alpha1 * z, alpha2 + alpha1 * z) - log_jn_;
    }

    double pdf(double t) const { return std::exp(log_pdf(t)); }

    // Closed-form mean is available for n = 1 only.
    double mean() const {
        if (n != 1)
            throw std::invalid_argument("SkewNormalInterval::mean: no closed form for n >= 2");
        const double s = std::sqrt(1.0 + alpha1 * alpha1);
        const double num = std_normal_pdf(alpha0 / s) - std_normal_pdf(alpha2 / s);
        const double den = std_normal_cdf_diff(alpha0 / s, alpha2 / s);
        return xi + tau * (alpha1 / s) * num / den;
    }

    double draw_one(Rng& rng) const {
        for (;;) {
            double z = rng.normal();
            double d = std_normal_cdf_diff(alpha0 + alpha1 * z, alpha2 + alpha1 * z);
            double acc = n == 1 ? d : std::pow(d, n);
            if (rng.uniform() < acc) return xi + tau * z;
        }
    }

    std::vector<double> sample(int count, std::uint64_t seed) const {
        if (count < 1) throw std::invalid_argument("SkewNormalInterval::sample: count must be >= 1");
        std::vector<double> out;
        out.reserve(count);
        Rng rng(seed);
        while (static_cast<int>(out.size()) < count) out.push_back(draw_one(rng));
        return out;
    }

private:
    double log_jn_;
};

} // namespace addinfo
