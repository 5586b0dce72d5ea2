#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "flip/hermitian_core.hpp"

namespace flip {

/// Seeded source of random model inputs. Streams with distinct ids are independent,
/// so parallel sweeps can give every work item its own generator.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed, std::uint64_t stream = 0)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

    double normal() { return normal_(engine_); }

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

    double theta() { return uniform(0.0, 2.0 * kPi); }

    CVector complex_normal(Eigen::Index n)
    {
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = normal();
            const double im = normal();
            v[i] = Complex(re, im);
        }
        return v;
    }

    /// zeta with |log|zeta|| <= max_log and uniform argument.
    Complex zeta(double max_log = 2.0)
    {
        const double mod = std::exp(uniform(-max_log, max_log));
        const double arg = theta();
        return std::polar(mod, arg);
    }

    /// Unit vector (metric norm at theta) with Gaussian direction.
    FiberVector unit_fiber(const ModelConfig& cfg, double theta)
    {
        FiberVector v{theta, complex_normal(cfg.r_prime), complex_normal(cfg.r_second)};
        const double n = std::sqrt(fiber_norm2(cfg, v));
        v.v_prime /= n;
        v.v_second /= n;
        return v;
    }

    /// Uniform sample of the metric ball of the given radius over a random theta.
    FiberVector ball_fiber(const ModelConfig& cfg, double radius)
    {
        FiberVector v = unit_fiber(cfg, theta());
        const double real_dim = 2.0 * (cfg.r_prime + cfg.r_second);
        const double r = radius * std::pow(uniform(0.0, 1.0), 1.0 / real_dim);
        v.v_prime *= r;
        v.v_second *= r;
        return v;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace flip
