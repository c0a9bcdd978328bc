#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <random>
#include <vector>

#include "ndattr/state_space.hpp"

namespace ndattr {

/// Uniform double in [0, 1) from the top 53 bits, independent of the
/// standard library's distribution implementation.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Radical inverse of index in the given prime base.
inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double result = 0.0;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return result;
}

inline std::uint64_t nth_prime(std::size_t n) {
    static constexpr std::uint64_t primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    if (n < std::size(primes)) return primes[n];
    std::uint64_t candidate = primes[std::size(primes) - 1];
    std::size_t found = std::size(primes) - 1;
    while (found < n) {
        candidate += 2;
        bool prime = true;
        for (std::uint64_t d = 3; d * d <= candidate; d += 2) {
            if (candidate % d == 0) {
                prime = false;
                break;
            }
        }
        if (prime) ++found;
    }
    return candidate;
}

/// count low-discrepancy points in the closed X-ball of radius R around the
/// origin. Halton points in [-1,1]^m are pushed onto the ball by the
/// concentric map p -> p * |p|_inf / |p|_2; seed offsets the Halton index.
inline std::vector<StateVector> halton_ball_points(std::size_t modes, std::size_t count, double radius,
                                                   std::uint64_t seed) {
    std::vector<StateVector> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        StateVector p(modes);
        double inf = 0.0;
        double two = 0.0;
        for (std::size_t k = 0; k < modes; ++k) {
            const double v = 2.0 * radical_inverse(seed + n + 1, nth_prime(k)) - 1.0;
            p[k] = v;
            inf = std::max(inf, std::abs(v));
            two += v * v;
        }
        two = std::sqrt(two);
        if (two > 0.0) p *= radius * inf / two;
        out.push_back(std::move(p));
    }
    return out;
}

/// The 2m axis points +-R e_k followed by count Halton points: the standard
/// probe set for balls in the Galerkin space.
inline std::vector<StateVector> ball_probe_points(std::size_t modes, std::size_t count, double radius,
                                                  std::uint64_t seed) {
    std::vector<StateVector> out;
    for (std::size_t k = 1; k <= modes; ++k) {
        out.push_back(radius * StateVector::basis(modes, k));
        out.push_back(-radius * StateVector::basis(modes, k));
    }
    auto inner = halton_ball_points(modes, count, radius, seed);
    out.insert(out.end(), inner.begin(), inner.end());
    return out;
}

}  // namespace ndattr
