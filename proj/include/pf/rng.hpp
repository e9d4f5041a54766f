// rng.hpp — seeded random draws with reproducible streams

#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace pf {

// Wraps mt19937_64 with explicit gaussian generation so that output streams
// are identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // 53-bit mantissa uniform in [0,1)
        return (gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0, u2 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::complex<double> cgaussian() {
        const double re = gaussian();
        const double im = gaussian();
        return {re, im};
    }

    Eigen::VectorXcd cvector(Eigen::Index n, double scale = 1.0) {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * cgaussian();
        return v;
    }

    Eigen::VectorXd rvector(Eigen::Index n, double lo, double hi) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
        return v;
    }

    std::uint64_t raw() { return gen_(); }

    // Independent child stream, for per-trial seeding.
    Rng fork() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ull); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pf
