// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_RNG_HPP
#define SWIFTCHAN_RNG_HPP

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace swiftchan {

// Deterministic random substream. Variate generation is hand-rolled on top
// of mt19937_64 because the standard library distributions are
// implementation-defined, which would break byte-stable simulation output
// across toolchains.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53-bit resolution.
    double next_double()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1]; safe as a log() argument.
    double next_positive_double()
    {
        return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
    }

    // Unbiased uniform integer on [0, n); n must be positive.
    std::uint64_t next_below(std::uint64_t n);

    // Circularly-symmetric complex Gaussian CN(0, variance), so the real and
    // imaginary parts each carry variance/2. Consumes exactly two engine
    // draws per call.
    std::complex<double> next_cgauss(double variance);

  private:
    std::mt19937_64 engine_;
};

// Stable seed derivation for named substreams. Hashing the path components
// into the master seed keeps trial/user/substream seeds independent of
// execution order and free of accidental collisions.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

} // namespace swiftchan

#endif
