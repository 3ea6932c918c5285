#ifndef LFPPL_RNG_HPP
#define LFPPL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace lfppl {

// Deterministic random stream. The draw transformations are implemented
// here rather than with std::*_distribution so that a given seed produces
// the same values on every standard library.
class RandomStream {
public:
    explicit RandomStream(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller.
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Standard Laplace by CDF inversion.
    double laplace() {
        double u = uniform();
        return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
    }

    // Fisher-Yates shuffle of 0..n-1.
    std::vector<size_t> permutation(size_t n) {
        std::vector<size_t> perm(n);
        std::iota(perm.begin(), perm.end(), size_t{0});
        for (size_t i = n; i > 1; --i) {
            size_t j = engine_() % i;
            std::swap(perm[i - 1], perm[j]);
        }
        return perm;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lfppl

#endif
