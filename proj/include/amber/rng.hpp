#ifndef AMBER_RNG_HPP
#define AMBER_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace amber {

// Seedable, splittable stream of random numbers. (seed, stream) pairs give
// statistically independent sequences: the pair is hashed through splitmix64
// into an mt19937_64, whose output is fully specified by the standard, so
// identical inputs reproduce identical draws on every platform. Normal
// variates are produced by an explicit Box-Muller transform rather than
// std::normal_distribution, which is implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
        : eng_(mix(mix(seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0xbf58476d1ce4e5b9ULL))) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform on (0, 1]; never returns 0, so log() is always safe
    double uniform01() {
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // N(0, 1)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // circularly symmetric complex Gaussian CN(0, var): each part N(0, var/2)
    std::complex<double> cgauss(double var) {
        double s = std::sqrt(0.5 * var);
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        return {s * r * std::cos(a), s * r * std::sin(a)};
    }

    bool bernoulli_half() { return (eng_() >> 63) != 0; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace amber

#endif
