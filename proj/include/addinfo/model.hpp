#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "normal.hpp"
#include "special.hpp"

namespace addinfo {

using Vec = std::vector<double>;

inline double norm2(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

enum class ConstraintKind { HalfLineProduct, Interval, Rectangle, Ball };

// The additional-information set A for the mean difference theta1 - theta2.
//   HalfLineProduct: { t : t_i >= lower_i }, lower bounds default 0; all
//                    bounds -inf encodes the unconstrained sentinel A = R^p.
//   Interval:        p = 1, |t| <= m.
//   Rectangle:       |t_i| <= halfwidth_i.
//   Ball:            ||t|| <= m.
struct ConstraintSet {
    ConstraintKind kind = ConstraintKind::HalfLineProduct;
    int p = 1;
    std::vector<double> lower;      // HalfLineProduct
    std::vector<double> halfwidth;  // Rectangle
    double m = 0.0;                 // Interval / Ball

    static ConstraintSet half_line(int p, double bound = 0.0) {
        ConstraintSet a;
        a.kind = ConstraintKind::HalfLineProduct;
        a.p = p;
        a.lower.assign(p, bound);
        return a;
    }
    static ConstraintSet half_line(std::vector<double> bounds) {
        ConstraintSet a;
        a.kind = ConstraintKind::HalfLineProduct;
        a.p = static_cast<int>(bounds.size());
        a.lower = std::move(bounds);
        return a;
    }
    static ConstraintSet all_reals(int p) {
        return half_line(p, -std::numeric_limits<double>::infinity());
    }
    static ConstraintSet interval(double m) {
        if (!(m > 0)) throw std::invalid_argument("ConstraintSet::interval: m must be > 0");
        ConstraintSet a;
        a.kind = ConstraintKind::Interval;
        a.p = 1;
        a.m = m;
        return a;
    }
    static ConstraintSet rectangle(std::vector<double> halfwidths) {
        for (double m : halfwidths)
            if (!(m > 0)) throw std::invalid_argument("ConstraintSet::rectangle: m_i must be > 0");
        ConstraintSet a;
        a.kind = ConstraintKind::Rectangle;
        a.p = static_cast<int>(halfwidths.size());
        a.halfwidth = std::move(halfwidths);
        return a;
    }
    static ConstraintSet ball(int p, double m) {
        if (!(m > 0)) throw std::invalid_argument("ConstraintSet::ball: m must be > 0");
        ConstraintSet a;
        a.kind = ConstraintKind::Ball;
        a.p = p;
        a.m = m;
        return a;
    }

    bool unconstrained() const {
        if (kind != ConstraintKind::HalfLineProduct) return false;
        for (double b : lower)
            if (b != -std::numeric_limits<double>::infinity()) return false;
        return true;
    }

    bool contains(const Vec& t) const {
        switch (kind) {
            case ConstraintKind::HalfLineProduct:
                for (int i = 0; i < p; ++i)
                    if (t[i] < lower[i]) return false;
                return true;
            case ConstraintKind::Interval:
                return std::abs(t[0]) <= m;
            case ConstraintKind::Rectangle:
                for (int i = 0; i < p; ++i)
                    if (std::abs(t[i]) > halfwidth[i]) return false;
                return true;
            case ConstraintKind::Ball:
                return norm2(t) <= m * m;
        }
        return false;
    }

    // A scaled copy {t/s : t in A}, used to carry the constraint into the
    // rotated one-population problem where (1+r) mu_1 lies in A.
    ConstraintSet scaled(double s) const {
        ConstraintSet a = *this;
        switch (kind) {
            case ConstraintKind::HalfLineProduct:
                for (double& b : a.lower) b /= s;
                break;
            case ConstraintKind::Interval:
            case ConstraintKind::Ball:
                a.m /= s;
                break;
            case ConstraintKind::Rectangle:
                for (double& m_i : a.halfwidth) m_i /= s;
                break;
        }
        return a;
    }
};

// Misspecification multipliers for the true variances a_i^2 sigma_i^2.
struct MisspecScheme {
    double a1_sq = 1.0;
    double a2_sq = 1.0;
    double aY_sq = 1.0;

    bool identity() const { return a1_sq == 1.0 && a2_sq == 1.0 && aY_sq == 1.0; }
};

// The full experiment context: dimension, the three known variances and the
// constraint set, plus an optional misspecification scheme for robustness runs.
struct ProblemSpec {
    int p = 1;
    double sigma1_sq = 1.0;
    double sigma2_sq = 1.0;
    double sigmaY_sq = 1.0;
    ConstraintSet constraint = ConstraintSet::half_line(1);
    std::optional<MisspecScheme> misspec;

    double r() const { return sigma2_sq / sigma1_sq; }

    void validate() const {
        if (p < 1) throw std::invalid_argument("ProblemSpec: p must be >= 1");
        if (!(sigma1_sq > 0) || !(sigma2_sq > 0) || !(sigmaY_sq > 0))
            throw std::invalid_argument("ProblemSpec: variances must be > 0");
        if (constraint.p != p) throw std::invalid_argument("ProblemSpec: constraint dimension != p");
        if (constraint.kind == ConstraintKind::Interval && p != 1)
            throw std::invalid_argument("ProblemSpec: interval constraint requires p = 1");
        if (misspec && (!(misspec->a1_sq > 0) || !(misspec->a2_sq > 0) || !(misspec->aY_sq > 0)))
            throw std::invalid_argument("ProblemSpec: misspecification multipliers must be > 0");
    }
};

// Rotated coordinates W1 = (X1-X2)/(1+r), W2 = (rX1+X2)/(1+r) with
// r = sigma2^2/sigma1^2; W1 and W2 are independent with variances
// sigma1^2/(1+r) and sigma2^2/(1+r).  mu1, mu2 are filled when a theta is
// supplied.
struct RotatedFrame {
    double r = 1.0;
    Vec w1, w2;
    std::optional<Vec> mu1, mu2;
    double var_w1 = 0.0;
    double var_w2 = 0.0;
};

inline RotatedFrame rotate(const Vec& x1, const Vec& x2, const ProblemSpec& spec,
                           const Vec* theta1 = nullptr, const Vec* theta2 = nullptr) {
    if (x1.size() != x2.size() || static_cast<int>(x1.size()) != spec.p)
        throw std::invalid_argument("rotate: dimension mismatch");
    RotatedFrame f;
    f.r = spec.r();
    const double inv = 1.0 / (1.0 + f.r);
    f.w1.resize(spec.p);
    f.w2.resize(spec.p);
    for (int i = 0; i < spec.p; ++i) {
        f.w1[i] = (x1[i] - x2[i]) * inv;
        f.w2[i] = x1[i] - f.w1[i];  // equals (r x1 + x2)/(1+r); keeps w1 + w2 = x1 exact
    }
    f.var_w1 = spec.sigma1_sq * inv;
    f.var_w2 = spec.sigma2_sq * inv;
    if (theta1 && theta2) {
        Vec m1(spec.p), m2(spec.p);
        for (int i = 0; i < spec.p; ++i) {
            m1[i] = ((*theta1)[i] - (*theta2)[i]) * inv;
            m2[i] = (*theta1)[i] - m1[i];
        }
        f.mu1 = std::move(m1);
        f.mu2 = std::move(m2);
    }
    return f;
}

inline std::pair<Vec, Vec> reconstruct(const RotatedFrame& f) {
    Vec x1(f.w1.size()), x2(f.w1.size());
    for (std::size_t i = 0; i < f.w1.size(); ++i) {
        x1[i] = f.w1[i] + f.w2[i];
        x2[i] = f.w2[i] * (1.0 + f.r) - f.r * x1[i];
    }
    return {x1, x2};
}

// The linear reduction X1' = c1 X1, X2' = c2 X2 - d, Y1' = c1 Y1: variances
// scale by c1^2, c2^2, c1^2 and the constraint now binds theta1' - theta2'.
struct LinearReduction {
    ProblemSpec spec;
    std::function<void(Vec&, Vec&, Vec&)> transform;  // (x1, x2, y1) in place
};

inline LinearReduction reduce_linear(double c1, double c2, const Vec& d, const ProblemSpec& spec) {
    if (c1 == 0.0 || c2 == 0.0) throw std::invalid_argument("reduce_linear: c1, c2 must be nonzero");
    if (static_cast<int>(d.size()) != spec.p) throw std::invalid_argument("reduce_linear: shift dimension");
    LinearReduction out;
    out.spec = spec;
    out.spec.sigma1_sq = c1 * c1 * spec.sigma1_sq;
    out.spec.sigma2_sq = c2 * c2 * spec.sigma2_sq;
    out.spec.sigmaY_sq = c1 * c1 * spec.sigmaY_sq;
    out.transform = [c1, c2, d](Vec& x1, Vec& x2, Vec& y1) {
        for (std::size_t i = 0; i < x1.size(); ++i) {
            x1[i] *= c1;
            x2[i] = c2 * x2[i] - d[i];
            y1[i] *= c1;
        }
    };
    return out;
}

// Decorrelation of a bivariate (p = 1) model with correlation rho in (0,1):
// returns the independent-coordinate spec together with the induced linear
// constraint constants (c1, c2, d) for composition with reduce_linear.
struct BivariateReduction {
    ProblemSpec spec;
    double c1, c2, d;
};

inline BivariateReduction reduce_bivariate_correlated(double rho, const ProblemSpec& spec) {
    if (spec.p != 1) throw std::invalid_argument("reduce_bivariate_correlated: requires p = 1");
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("reduce_bivariate_correlated: rho must lie in (0,1)");
    BivariateReduction out;
    out.spec = spec;
    out.c1 = 1.0 + rho * std::sqrt(spec.sigma2_sq / spec.sigma1_sq);
    out.c2 = std::sqrt(1.0 + rho * rho);
    out.d = 0.0;
    return out;
}

// P(T in A) for T ~ N_p(mu, var I).
inline double constraint_probability(const ConstraintSet& A, const Vec& mu, double var) {
    if (!(var > 0)) throw std::invalid_argument("constraint_probability: var must be > 0");
    if (static_cast<int>(mu.size()) != A.p)
        throw std::invalid_argument("constraint_probability: dimension mismatch");
    if (A.unconstrained()) return 1.0;
    const double sd = std::sqrt(var);
    switch (A.kind) {
        case ConstraintKind::HalfLineProduct: {
            double prob = 1.0;
            for (int i = 0; i < A.p; ++i) {
                if (A.lower[i] == -std::numeric_limits<double>::infinity()) continue;
                prob *= std_normal_cdf((mu[i] - A.lower[i]) / sd);
            }
            return prob;
        }
        case ConstraintKind::Interval:
            return std_normal_cdf_diff((A.m - mu[0]) / sd, (-A.m - mu[0]) / sd);
        case ConstraintKind::Rectangle: {
            double prob = 1.0;
            for (int i = 0; i < A.p; ++i)
                prob *= std_normal_cdf_diff((A.halfwidth[i] - mu[i]) / sd,
                                            (-A.halfwidth[i] - mu[i]) / sd);
            return prob;
        }
        case ConstraintKind::Ball:
            return noncentral_chi2_cdf(A.p, norm2(mu) / var, A.m * A.m / var);
    }
    return 0.0;
}

// Euclidean projection onto the closed convex set A.
inline Vec project_onto(const ConstraintSet& A, const Vec& v) {
    if (static_cast<int>(v.size()) != A.p) throw std::invalid_argument("project_onto: dimension mismatch");
    Vec out = v;
    switch (A.kind) {
        case ConstraintKind::HalfLineProduct:
            for (int i = 0; i < A.p; ++i) out[i] = std::max(out[i], A.lower[i]);
            break;
        case ConstraintKind::Interval:
            out[0] = std::min(std::max(out[0], -A.m), A.m);
            break;
        case ConstraintKind::Rectangle:
            for (int i = 0; i < A.p; ++i)
                out[i] = std::min(std::max(out[i], -A.halfwidth[i]), A.halfwidth[i]);
            break;
        case ConstraintKind::Ball: {
            double n = std::sqrt(norm2(v));
            if (n > A.m && n > 0.0) {
                double s = A.m / n;
                for (double& x : out) x *= s;
            }
            break;
        }
    }
    return out;
}

} // namespace addinfo
