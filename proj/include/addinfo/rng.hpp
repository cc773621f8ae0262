#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace addinfo {

// Deterministic generator: mt19937_64 plus an explicit bits-to-double map and
// a Marsaglia polar normal, so streams depend only on the seed and not on the
// standard library's distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    void normal_vec(std::vector<double>& out) {
        for (double& x : out) x = normal();
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace addinfo
