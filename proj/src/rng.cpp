// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace swiftchan {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t RandomStream::next_below(std::uint64_t n)
{
    if (n == 0)
        throw std::invalid_argument("next_below: n must be positive");
    // Values below 2^64 mod n are rejected so the result is exactly uniform.
    const std::uint64_t threshold = (0U - n) % n;
    for (;;)
    {
        const std::uint64_t r = engine_();
        if (r >= threshold)
            return r % n;
    }
}

std::complex<double> RandomStream::next_cgauss(double variance)
{
    const double u = next_positive_double();
    const double phi = 2.0 * M_PI * next_double();
    const double mag = std::sqrt(-variance * std::log(u));
    return {mag * std::cos(phi), mag * std::sin(phi)};
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t h = mix64(master + kGolden);
    for (std::uint64_t v : path)
        h = mix64(h ^ (v + kGolden + (h << 6) + (h >> 2)));
    return h;
}

} // namespace swiftchan
