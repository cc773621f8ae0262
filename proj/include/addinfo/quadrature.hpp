#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace addinfo {

enum class QuadratureKind { GaussHermiteProbabilist, GaussLegendre };

// Nodes are strictly increasing.  For the probabilist Hermite rule the
// weights sum to 1 (the rule integrates against the standard normal
// measure); for Legendre they sum to the interval length.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    QuadratureKind kind;

    std::size_t size() const { return nodes.size(); }

    double integrate(const std::function<double(double)>& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

namespace detail {

// Eigenvalues and first eigenvector components of a symmetric tridiagonal
// matrix by the implicit QL method (EISPACK imtql2, first-row variant).
// diag/off are overwritten; first[i] holds the first component of the
// i-th eigenvector on return.
inline void tridiag_eigen_first_row(std::vector<double>& diag, std::vector<double>& off,
                                    std::vector<double>& first) {
    const std::size_t n = diag.size();
    first.assign(n, 0.0);
    if (n == 0) return;
    first[0] = 1.0;
    if (n == 1) return;
    off.push_back(0.0);

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
                if (std::abs(off[m]) <= 1e-300 + 2.3e-16 * dd) break;
            }
            if (m == l) break;
            if (++iter > 50) throw std::runtime_error("tridiagonal eigensolver failed to converge");
            double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            double r = std::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + (g >= 0 ? std::abs(r) : -std::abs(r)));
            double s = 1.0, c = 1.0, p = 0.0;
            for (std::size_t i = m; i-- > l;) {
                double f = s * off[i];
                double b = c * off[i];
                r = std::hypot(f, g);
                off[i + 1] = r;
                if (r == 0.0) {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                f = first[i + 1];
                first[i + 1] = s * first[i] + c * f;
                first[i] = c * first[i] - s * f;
            }
            if (r == 0.0 && m > l + 1) continue;
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

} // namespace detail

// Probabilist Gauss-Hermite rule: integrates f against the N(0,1) density,
// i.e. sum w_i f(x_i) ~ E f(Z).  Built by Golub-Welsch on the Jacobi matrix
// of the (monic) Hermite polynomials He_n: zero diagonal, off-diagonal sqrt(k).
inline QuadratureRule gauss_hermite_probabilist(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_hermite_probabilist: order must be >= 1");
    std::vector<double> diag(order, 0.0), off(order > 1 ? order - 1 : 0), first;
    for (std::size_t k = 1; k < order; ++k) off[k - 1] = std::sqrt(static_cast<double>(k));
    detail::tridiag_eigen_first_row(diag, off, first);

    std::vector<std::size_t> idx(order);
    for (std::size_t i = 0; i < order; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return diag[a] < diag[b]; });

    QuadratureRule rule;
    rule.kind = QuadratureKind::GaussHermiteProbabilist;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (std::size_t i = 0; i < order; ++i) {
        rule.nodes[i] = diag[idx[i]];
        rule.weights[i] = first[idx[i]] * first[idx[i]];  // mu_0 = 1 for the normal measure
    }
    // Symmetrize: He_n roots come in +/- pairs, rounding noise does not.
    for (std::size_t i = 0, j = order - 1; i < j; ++i, --j) {
        double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        rule.nodes[i] = -x;
        rule.nodes[j] = x;
        double w = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.weights[i] = rule.weights[j] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

// Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(std::size_t order, double a, double b) {
    if (order == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    QuadratureRule rule;
    rule.kind = QuadratureKind::GaussLegendre;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    const std::size_t m = (order + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(3.141592653589793 * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        rule.nodes[i] = xm - xl * z;
        rule.nodes[order - 1 - i] = xm + xl * z;
        double w = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

// Shared cache for the Hermite orders used throughout (64 -> 128 -> 256
// escalation plus ad-hoc orders for oracles).  Rules are immutable; the
// common orders sit behind lock-free magic statics since risk Monte Carlo
// hits them once per draw.
inline const QuadratureRule& hermite_rule(std::size_t order) {
    switch (order) {
        case 64: {
            static const QuadratureRule r = gauss_hermite_probabilist(64);
            return r;
        }
        case 128: {
            static const QuadratureRule r = gauss_hermite_probabilist(128);
            return r;
        }
        case 256: {
            static const QuadratureRule r = gauss_hermite_probabilist(256);
            return r;
        }
        default: {
            static std::map<std::size_t, QuadratureRule> cache;
            static std::mutex mtx;
            std::lock_guard<std::mutex> lock(mtx);
            auto it = cache.find(order);
            if (it == cache.end()) it = cache.emplace(order, gauss_hermite_probabilist(order)).first;
            return it->second;
        }
    }
}

// E f(Z), Z ~ N(0,1), with order escalation until two successive rules agree
// within tol.  Throws if 256 nodes are not enough.
inline double gauss_hermite_expect(const std::function<double(double)>& f, double tol = 1e-10) {
    double prev = hermite_rule(64).integrate(f);
    for (std::size_t order : {128, 256}) {
        double cur = hermite_rule(order).integrate(f);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("gauss_hermite_expect: no convergence at order 256");
}

namespace detail {

inline double mapped_legendre(const QuadratureRule& base, const std::function<double(double)>& f,
                              double a, double b) {
    const double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i)
        acc += base.weights[i] * f(xm + xl * base.nodes[i]);
    return acc * xl;
}

} // namespace detail

// Adaptive Gauss-Legendre on [a,b]: bisect panels until the 15- and 30-point
// values agree.  Good to ~1e-13 absolute on the smooth integrands used here.
inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double tol = 1e-12, int depth = 0) {
    static const QuadratureRule base15 = gauss_legendre(15, -1.0, 1.0);
    static const QuadratureRule base30 = gauss_legendre(30, -1.0, 1.0);
    double coarse = detail::mapped_legendre(base15, f, a, b);
    double fine = detail::mapped_legendre(base30, f, a, b);
    if (std::abs(fine - coarse) <= tol || depth >= 24) return fine;
    double mid = 0.5 * (a + b);
    return integrate_adaptive(f, a, mid, tol / 2, depth + 1) +
           integrate_adaptive(f, mid, b, tol / 2, depth + 1);
}

} // namespace addinfo
