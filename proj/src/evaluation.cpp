// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace swiftchan {

BeamAssignment select_comm_beams(const Eigen::MatrixXcd& h_v_hat, int max_streams, double gamma,
                                 double sigma_r) {
    if (max_streams < 1) {
        throw std::invalid_argument("select_comm_beams: max_streams must be positive");
    }
    const long rows = h_v_hat.rows();
    const long cols = h_v_hat.cols();
    if (rows == 0 || cols == 0) {
        throw std::invalid_argument("select_comm_beams: empty matrix");
    }

    // Magnitude-descending order with a fixed index tie-break so selection is
    // deterministic under exact ties.
    std::vector<std::tuple<double, long, long>> entries;
    entries.reserve(static_cast<std::size_t>(rows * cols));
    for (long q = 0; q < rows; ++q) {
        for (long p = 0; p < cols; ++p) {
            entries.emplace_back(std::abs(h_v_hat(q, p)), q, p);
        }
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) {
            return std::get<0>(a) > std::get<0>(b);
        }
        return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });

    const double threshold = gamma * sigma_r;
    BeamAssignment assignment;
    std::vector<bool> row_used(static_cast<std::size_t>(rows), false);
    std::vector<bool> col_used(static_cast<std::size_t>(cols), false);
    for (const auto& [mag, q, p] : entries) {
        if (assignment.streams() >= max_streams) {
            break;
        }
        if (mag < threshold) {
            break; // sorted, so everything after is below threshold too
        }
        if (row_used[static_cast<std::size_t>(q)] || col_used[static_cast<std::size_t>(p)]) {
            continue;
        }
        row_used[static_cast<std::size_t>(q)] = true;
        col_used[static_cast<std::size_t>(p)] = true;
        assignment.ue_indices.push_back(static_cast<int>(q));
        assignment.bs_indices.push_back(static_cast<int>(p));
    }
    if (assignment.streams() == 0) {
        // Deep fade: still point somewhere, use the largest entry.
        assignment.ue_indices.push_back(static_cast<int>(std::get<1>(entries.front())));
        assignment.bs_indices.push_back(static_cast<int>(std::get<2>(entries.front())));
    }
    return assignment;
}

double achievable_rate(const ChannelRealization& true_channel, const BeamAssignment& assignment,
                       double power, double noise_var, const Codebook& bs_cb,
                       const Codebook& ue_cb) {
    const int k = assignment.streams();
    if (k < 1 || static_cast<int>(assignment.ue_indices.size()) != k) {
        throw std::invalid_argument("achievable_rate: assignment must pair BS and UE beams");
    }
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("achievable_rate: noise_var must be positive");
    }

    Eigen::MatrixXcd f_d(bs_cb.matrix.rows(), k);
    Eigen::MatrixXcd w_d(ue_cb.matrix.rows(), k);
    for (int i = 0; i < k; ++i) {
        f_d.col(i) = bs_cb.matrix.col(assignment.bs_indices[static_cast<std::size_t>(i)]);
        w_d.col(i) = ue_cb.matrix.col(assignment.ue_indices[static_cast<std::size_t>(i)]);
    }

    const Eigen::MatrixXcd coupled = w_d.adjoint() * true_channel.h * f_d; // k x k
    const Eigen::MatrixXcd gram =
        (power / (noise_var * static_cast<double>(k))) * coupled * coupled.adjoint();
    const Eigen::MatrixXcd arg = Eigen::MatrixXcd::Identity(k, k) + gram;
    const Eigen::LLT<Eigen::MatrixXcd> llt(arg);
    double log2_det = 0.0;
    for (int i = 0; i < k; ++i) {
        log2_det += 2.0 * std::log2(std::real(llt.matrixL()(i, i)));
    }
    return std::max(log2_det, 0.0);
}

double effective_rate(double r_opt, int t_e, int t_c) {
    if (t_c <= 0) {
        throw std::invalid_argument("effective_rate: t_c must be positive");
    }
    const double fraction = 1.0 - static_cast<double>(t_e) / static_cast<double>(t_c);
    return r_opt * std::max(fraction, 0.0);
}

int feedback_bits(int n_bs, int n_paths) {
    if (n_bs < 2 || n_paths < 0) {
        throw std::invalid_argument("feedback_bits: need n_bs >= 2 and n_paths >= 0");
    }
    int bits = 0;
    while ((1 << bits) < n_bs) {
        ++bits;
    }
    return bits * n_paths;
}

} // namespace swiftchan
