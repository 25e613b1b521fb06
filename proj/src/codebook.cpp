// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/codebook.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swiftchan {

double Codebook::grid_angle(int n) const {
    const int sz = size();
    if (n < 0 || n >= sz) {
        throw std::invalid_argument("grid_angle: column index out of range");
    }
    return std::acos(-1.0 + 2.0 * static_cast<double>(n) / static_cast<double>(sz));
}

std::vector<std::complex<double>> quantized_phase_set(int n) {
    if (n < 1) {
        throw std::invalid_argument("quantized_phase_set: n must be positive");
    }
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double phase =
            std::numbers::pi * (-1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n));
        out.push_back(std::polar(amp, phase));
    }
    return out;
}

Codebook build_codebook(int n, ArraySide side) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("build_codebook: array size must be even and >= 2");
    }
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    Codebook cb;
    cb.side = side;
    cb.matrix.resize(n, n);
    for (int col = 0; col < n; ++col) {
        // cos(grid angle) = -1 + 2 col / n exactly; element k carries phase
        // pi k cos(angle), which lands on the quantized grid for even n.
        const double c = -1.0 + 2.0 * static_cast<double>(col) / static_cast<double>(n);
        for (int k = 0; k < n; ++k) {
            cb.matrix(k, col) = std::polar(amp, std::numbers::pi * static_cast<double>(k) * c);
        }
    }
    return cb;
}

} // namespace swiftchan
