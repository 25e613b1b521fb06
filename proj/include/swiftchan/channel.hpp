// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_CHANNEL_HPP
#define SWIFTCHAN_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "swiftchan/codebook.hpp"
#include "swiftchan/rng.hpp"

namespace swiftchan {

// Antenna and RF-chain counts for one BS/UE link.
struct SystemDims {
    int n_bs = 32;
    int n_ue = 16;
    int r_bs = 8;
    int r_ue = 4;

    // Throws std::invalid_argument unless 1 <= r <= n on both sides and the
    // array sizes are even (codebook requirement) and >= 2.
    void validate() const;
};

// One propagation path: complex fading gain plus departure/arrival angles.
struct PathParameters {
    std::complex<double> alpha{0.0, 0.0};
    double aod = 0.0; // radians in [0, 2*pi)
    double aoa = 0.0; // radians in [0, 2*pi)
};

// Narrowband geometric channel between one BS and one UE.
struct ChannelRealization {
    Eigen::MatrixXcd h; // n_ue x n_bs
    std::vector<PathParameters> paths;
    int user_id = 0;
};

struct SteeringVector {
    Eigen::VectorXcd entries;
    double angle = 0.0;
};

// ULA response at angle epsilon for n half-wavelength-spaced elements:
// entry k is (1/sqrt(n)) exp(j pi k cos(epsilon)). Unit norm.
SteeringVector steering_vector(double epsilon, int n_elements);

// Draws n_paths paths: angles uniform on [0, 2*pi), gain circularly
// symmetric complex Gaussian with variance sigma_r. Per path the stream is
// consumed as aod, aoa, alpha.
std::vector<PathParameters> draw_paths(int n_paths, double sigma_r, RandomStream& rng);

// As draw_paths but angles snap to codebook grid angles: each path picks a
// uniform BS column and UE column and uses their steering angles. Distinct
// (bs, ue) bin pairs across paths so the virtual support has n_paths entries.
std::vector<PathParameters> draw_paths_on_grid(int n_paths, double sigma_r, const Codebook& bs_cb,
                                               const Codebook& ue_cb, RandomStream& rng);

// H = sqrt(n_bs*n_ue) * sum_l alpha_l u(aoa_l, n_ue) u(aod_l, n_bs)^H.
ChannelRealization assemble_channel(const std::vector<PathParameters>& paths,
                                    const SystemDims& dims);

// Beam-domain representation W_c^H H F_c (n_ue x n_bs).
Eigen::MatrixXcd virtual_channel(const ChannelRealization& channel, const Codebook& bs_cb,
                                 const Codebook& ue_cb);

// Column-stacking vectorization and its inverse. The whole pipeline fixes
// vec(A B C) = (C^T kron A) vec(B), which requires column stacking.
Eigen::VectorXcd vec(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int rows, int cols);

} // namespace swiftchan

#endif
