// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_REFERENCE_HPP
#define SWIFTCHAN_REFERENCE_HPP

#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "swiftchan/gamp.hpp"

namespace swiftchan {

// Gauss-Hermite rule for integrals against exp(-t^2), computed by
// diagonalizing the Jacobi matrix.
struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

GaussHermite gauss_hermite(int n);

// Posterior moments of the spike-and-Gaussian denoiser computed by brute
// tensor quadrature over the complex plane, straight from the density
// definitions. Slow; exists to check denoise_input against an independent
// derivation.
std::pair<std::complex<double>, double> reference_denoise_input(std::complex<double> r_pseudo,
                                                                double tau, const BgPrior& prior,
                                                                int n_nodes = 72);

} // namespace swiftchan

#endif
