// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_CODEBOOK_HPP
#define SWIFTCHAN_CODEBOOK_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace swiftchan {

enum class ArraySide { BS, UE };

// Unitary set of quantized-phase candidate beamforming vectors for one
// array. Column n is the ULA steering vector at the nth grid angle, so the
// matrix doubles as the virtual-domain transform. Immutable once built.
struct Codebook {
    Eigen::MatrixXcd matrix; // N x N, columns are candidate beams
    ArraySide side = ArraySide::BS;

    int size() const { return static_cast<int>(matrix.cols()); }

    // Steering angle of column n (0-based), on the arccos branch [0, pi].
    double grid_angle(int n) const;
};

// The N admissible phase-shifter values (1/sqrt(N)) exp(j pi (-1 + 2k/N)),
// k = 0..N-1: N uniformly spaced points on the circle of radius 1/sqrt(N).
std::vector<std::complex<double>> quantized_phase_set(int n);

// Builds the N orthonormal candidate beams. Requires even N >= 2: for odd N
// the steering phases of the grid-angle beams leave the quantized set.
Codebook build_codebook(int n, ArraySide side);

} // namespace swiftchan

#endif
