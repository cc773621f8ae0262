#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace addinfo {

// alpha-divergence loss selector: alpha = -1 is Kullback-Leibler, +1 reverse
// Kullback-Leibler, 0 the Hellinger-type h_0.  For alpha < 1 the Bayes
// machinery uses n = 2/(1-alpha); the uniform-prior construction requires n
// to be a positive integer.
struct LossSpec {
    double alpha;

    explicit LossSpec(double a) : alpha(a) {
        if (!(alpha >= -1.0 && alpha <= 1.0))
            throw std::invalid_argument("LossSpec: alpha must lie in [-1, 1]");
    }

    static LossSpec kl() { return LossSpec(-1.0); }
    static LossSpec rkl() { return LossSpec(1.0); }
    static LossSpec hellinger() { return LossSpec(0.0); }

    double n_real() const {
        if (alpha >= 1.0) throw std::invalid_argument("LossSpec::n_real: undefined at alpha = 1");
        return 2.0 / (1.0 - alpha);
    }

    bool has_integer_n() const {
        if (alpha >= 1.0) return false;
        double n = n_real();
        return std::abs(n - std::round(n)) < 1e-9 && std::round(n) >= 1.0;
    }

    int n_int() const {
        if (!has_integer_n())
            throw std::invalid_argument("LossSpec::n_int: 2/(1-alpha) is not a positive integer");
        return static_cast<int>(std::round(n_real()));
    }
};

enum class DensityKind { GaussianPlugin, BayesUniform, Mre };

// Evaluable/sampleable predictive density returned by every estimator
// constructor.  log_density is the primitive; pdf values are derived from it.
// Gaussian kinds carry (center, scale_c) with variance scale_c * sigmaY_sq I.
struct PredictiveDensity {
    DensityKind kind = DensityKind::GaussianPlugin;
    int p = 1;
    std::function<double(const Vec&)> log_density;
    std::function<void(Rng&, Vec&)> draw;

    std::optional<Vec> center;
    std::optional<double> scale_c;
    double sigmaY_sq = 1.0;
    // Monte Carlo ball denominator (n >= 2): estimate and its standard error
    double normalizer_value = 1.0;
    double normalizer_std_error = 0.0;

    bool gaussian() const { return kind != DensityKind::BayesUniform; }

    double density(const Vec& y) const { return std::exp(log_density(y)); }

    std::vector<Vec> sample(int count, std::uint64_t seed) const {
        if (count < 1) throw std::invalid_argument("PredictiveDensity::sample: count must be >= 1");
        Rng rng(seed);
        std::vector<Vec> out(count, Vec(p));
        for (auto& y : out) draw(rng, y);
        return out;
    }
};

// N_p(center, c sigmaY^2 I) as a PredictiveDensity.
inline PredictiveDensity gaussian_density(DensityKind kind, Vec center, double c, double sigmaY_sq) {
    if (!(c > 0)) throw std::invalid_argument("gaussian_density: c must be > 0");
    PredictiveDensity q;
    q.kind = kind;
    q.p = static_cast<int>(center.size());
    q.center = center;
    q.scale_c = c;
    q.sigmaY_sq = sigmaY_sq;
    const double var = c * sigmaY_sq;
    const double sd = std::sqrt(var);
    const int p = q.p;
    q.log_density = [center, var, p](const Vec& y) {
        if (static_cast<int>(y.size()) != p)
            throw std::invalid_argument("log_density: dimension mismatch");
        double ss = 0.0;
        for (int i = 0; i < p; ++i) {
            double d = y[i] - center[i];
            ss += d * d;
        }
        return -0.5 * ss / var - p * (log_sqrt_2pi + 0.5 * std::log(var));
    };
    q.draw = [center, sd, p](Rng& rng, Vec& y) {
        y.resize(p);
        for (int i = 0; i < p; ++i) y[i] = center[i] + sd * rng.normal();
    };
    return q;
}

} // namespace addinfo
