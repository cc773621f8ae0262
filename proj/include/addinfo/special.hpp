#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "normal.hpp"
#include "quadrature.hpp"

namespace addinfo {

// K_n(a0, a1) = Integral phi(z) Phi^n(a0 + a1 z) dz, the normalization
// constant of the Phi-power skewed-normal family.  Equals the equicorrelated
// orthant probability Phi_n(a0/sqrt(1+a1^2), ..., rho = a1^2/(1+a1^2)).
// Gauss-Hermite with order escalation 64 -> 128 -> 256.
inline double k_n(int n, double a0, double a1) {
    if (n < 1) throw std::invalid_argument("k_n: n must be >= 1 (n = 0 is the empty product, use 1)");
    detail::require_finite(a0, "k_n");
    detail::require_finite(a1, "k_n");
    return gauss_hermite_expect([&](double z) {
        double p = std_normal_cdf(a0 + a1 * z);
        return n == 1 ? p : std::pow(p, n);
    });
}

// J_n(a0, a1, a2) = Integral phi(z) {Phi(a0 + a1 z) - Phi(a2 + a1 z)}^n dz,
// the interval-variant normalization constant; requires a0 > a2.
inline double j_n(int n, double a0, double a1, double a2) {
    if (n < 1) throw std::invalid_argument("j_n: n must be >= 1");
    if (!(a0 > a2)) throw std::invalid_argument("j_n: requires a0 > a2");
    return gauss_hermite_expect([&](double z) {
        double d = std_normal_cdf_diff(a0 + a1 * z, a2 + a1 * z);
        return n == 1 ? d : std::pow(d, n);
    });
}

// Phi_2(h, k; rho): bivariate standard normal CDF by one-dimensional
// quadrature of the conditional CDF,
//   Phi_2 = Integral_{-inf}^{h} phi(z) Phi((k - rho z)/sqrt(1-rho^2)) dz.
// Absolute error well below 1e-12 for |rho| < 1.
inline double bivariate_normal_cdf(double h, double k, double rho) {
    if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("bivariate_normal_cdf: requires |rho| < 1");
    detail::require_finite(h, "bivariate_normal_cdf");
    detail::require_finite(k, "bivariate_normal_cdf");
    if (rho == 0.0) return std_normal_cdf(h) * std_normal_cdf(k);
    const double hi = std::min(h, 38.0);
    if (hi <= -38.0) return 0.0;
    const double s = std::sqrt(1.0 - rho * rho);
    double v = integrate_adaptive(
        [&](double z) { return std_normal_pdf(z) * std_normal_cdf((k - rho * z) / s); },
        -38.0, hi, 1e-14);
    return std::min(1.0, std::max(0.0, v));
}

namespace detail {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
// Lentz continued fraction for the complement otherwise.
inline double gammp(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - gln);
        }
        throw std::runtime_error("gammp: series did not converge");
    }
    double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// log P(a, x), finite deep into the left tail where gammp underflows.
// Series branch: log P = a log x - x - lgamma(a+1) + log(1 + sum_k prod x/(a+j)).
inline double log_gammp(double a, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    if (x >= a + 1.0) return std::log(gammp(a, x));
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 1000; ++k) {
        term *= x / (a + k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return a * std::log(x) - x - std::lgamma(a + 1.0) + std::log(sum);
}

} // namespace detail

// Central chi-square CDF with k degrees of freedom.
inline double chi2_cdf(double k, double x) {
    if (x <= 0.0) return 0.0;
    return detail::gammp(0.5 * k, 0.5 * x);
}

inline double log_chi2_cdf(double k, double x) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return detail::log_gammp(0.5 * k, 0.5 * x);
}

// Noncentral chi-square CDF F_{p,lambda}(x): Poisson mixture of central
// chi-square CDFs.  The Poisson weights are walked outward from the modal
// index (avoids underflow for large lambda) and the series stops once the
// unaccounted Poisson mass falls below 1e-14.
inline double noncentral_chi2_cdf(int p, double lambda, double x) {
    if (p < 1) throw std::invalid_argument("noncentral_chi2_cdf: p must be >= 1");
    if (lambda < 0.0 || x < 0.0) throw std::invalid_argument("noncentral_chi2_cdf: lambda, x must be >= 0");
    if (x == 0.0) return 0.0;
    if (lambda == 0.0) return chi2_cdf(p, x);

    const double half = 0.5 * lambda;
    const long center = static_cast<long>(half);
    auto log_pois = [&](long j) { return -half + j * std::log(half) - std::lgamma(j + 1.0); };

    double total = 0.0, mass = 0.0;
    double wc = std::exp(log_pois(center));
    total += wc * chi2_cdf(p + 2.0 * center, x);
    mass += wc;

    double wu = wc, wd = wc;
    long ju = center, jd = center;
    for (int step = 0; step < 100000 && mass < 1.0 - 1e-14; ++step) {
        bool moved = false;
        if (wu > 0.0) {
            ++ju;
            wu *= half / ju;
            if (wu > 0.0) {
                total += wu * chi2_cdf(p + 2.0 * ju, x);
                mass += wu;
                moved = true;
            }
        }
        if (jd > 0 && wd > 0.0) {
            wd *= jd / half;
            --jd;
            if (wd > 0.0) {
                total += wd * chi2_cdf(p + 2.0 * jd, x);
                mass += wd;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return std::min(1.0, total);
}

// log F_{p,lambda}(x), finite even when the mixture underflows (large lambda
// with small x).  Log-sum-exp over the Poisson-weighted central terms, walking
// outward from the modal index until terms fall 60 nats below the running max.
inline double log_noncentral_chi2_cdf(int p, double lambda, double x) {
    if (p < 1) throw std::invalid_argument("log_noncentral_chi2_cdf: p must be >= 1");
    if (lambda < 0.0 || x < 0.0)
        throw std::invalid_argument("log_noncentral_chi2_cdf: lambda, x must be >= 0");
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (lambda == 0.0) return log_chi2_cdf(p, x);

    const double half = 0.5 * lambda;
    auto log_term = [&](long j) {
        return -half + j * std::log(half) - std::lgamma(j + 1.0) + log_chi2_cdf(p + 2.0 * j, x);
    };

    // The summand is unimodal in j, but its peak sits near sqrt(lambda x)/2 in
    // the deep left tail rather than at the Poisson mode; probe a geometric
    // ladder of candidates for the anchor, then walk outward.
    long anchor = 0;
    double max_lt = log_term(0);
    const long ceiling = static_cast<long>(half) + 8;
    for (long j = 1; j <= ceiling; j = 2 * j + 1) {
        double lt = log_term(j);
        if (lt > max_lt) {
            max_lt = lt;
            anchor = j;
        }
    }
    double acc = 1.0;  // anchor term relative to itself
    for (int dir : {+1, -1}) {
        long j = anchor;
        for (;;) {
            j += dir;
            if (j < 0) break;
            double lt = log_term(j);
            if (lt > max_lt) {
                acc = acc * std::exp(max_lt - lt) + 1.0;
                max_lt = lt;
            } else {
                double rel = lt - max_lt;
                if (rel < -60.0) break;
                acc += std::exp(rel);
            }
        }
    }
    return std::min(0.0, max_lt + std::log(acc));
}

} // namespace addinfo
