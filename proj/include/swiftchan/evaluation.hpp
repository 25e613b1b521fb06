// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_EVALUATION_HPP
#define SWIFTCHAN_EVALUATION_HPP

#include <Eigen/Dense>

#include "swiftchan/channel.hpp"
#include "swiftchan/codebook.hpp"

namespace swiftchan {

// Candidate columns chosen for data transmission, one BS/UE pair per stream.
struct BeamAssignment {
    std::vector<int> bs_indices;
    std::vector<int> ue_indices;

    int streams() const { return static_cast<int>(bs_indices.size()); }
};

struct RateReport {
    double r_opt = 0.0; // bits/s/Hz with the whole block available
    double r_eff = 0.0; // discounted by the training fraction
    int t_e = 0;
    int t_c = 0;
    int feedback_bits = 0;
};

// Greedy dominant-entry selection on |h_v_hat|: repeatedly take the largest
// remaining entry whose row and column are both unused, skip entries below
// gamma * sigma_r, stop at max_streams. Falls back to the single largest
// entry when everything is below the threshold.
BeamAssignment select_comm_beams(const Eigen::MatrixXcd& h_v_hat, int max_streams, double gamma,
                                 double sigma_r);

// log2 det(I + (P / (N0 k)) W_d^H H F_d F_d^H H^H W_d) against the true
// channel, with transmit power split equally over the k selected BS beams.
double achievable_rate(const ChannelRealization& true_channel, const BeamAssignment& assignment,
                       double power, double noise_var, const Codebook& bs_cb,
                       const Codebook& ue_cb);

// r_opt * (1 - t_e/t_c), clamped at zero once training eats the whole block.
double effective_rate(double r_opt, int t_e, int t_c);

// ceil(log2(n_bs)) bits for each fed-back path index.
int feedback_bits(int n_bs, int n_paths);

} // namespace swiftchan

#endif
