// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_GAMP_HPP
#define SWIFTCHAN_GAMP_HPP

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>

#include "swiftchan/measurement.hpp"

namespace swiftchan {

// Spike-and-Gaussian prior on each virtual-channel entry: zero with
// probability 1-rho, CN(0, sigma_r) with probability rho.
struct BgPrior {
    double rho = 0.1;
    double sigma_r = 1.0;

    void validate() const;
};

struct GampConfig {
    // The cap leaves room for the stall-triggered damping anneal (the step
    // halves every 30 stalled iterations) to squeeze out limit cycles.
    int max_iterations = 300;
    double tolerance = 1e-6;   // relative change of the estimate that stops iteration
    double damping = 0.7;      // initial weight of the fresh update, 1 = undamped
    double variance_floor = 1e-12;

    void validate() const;
};

// Posterior summary of vec(H_v) given a measurement ledger.
struct VirtualChannelEstimate {
    Eigen::VectorXcd v_hat;  // posterior means
    Eigen::VectorXd v_var;   // posterior variances, >= 0
    int iterations_used = 0;
    bool converged = false;
};

// Posterior mean and variance of v from the pseudo-observation
// r = v + CN(0, tau) under the spike-and-Gaussian prior.
std::pair<std::complex<double>, double> denoise_input(std::complex<double> r_pseudo, double tau,
                                                      const BgPrior& prior);

// Sum-product GAMP on y = scale * A * v + CN(0, noise_var I), where A is the
// ledger's implicit sensing matrix. Returns nullopt if the iteration produces
// non-finite values; callers keep their previous estimate in that case.
std::optional<VirtualChannelEstimate> gamp_estimate(const MeasurementLedger& ledger,
                                                    double noise_var, const BgPrior& prior,
                                                    const GampConfig& config);

// Same iteration on an explicit matrix, for problems that are not ledgers
// (cross-checks against exact_mmse_oracle, synthetic ensembles).
std::optional<VirtualChannelEstimate> gamp_estimate_dense(const Eigen::MatrixXcd& a,
                                                          const Eigen::VectorXcd& y, double scale,
                                                          double noise_var, const BgPrior& prior,
                                                          const GampConfig& config);

// Exact posterior mean under the same model by enumerating all 2^n supports.
// Verification-grade; refuses n > 14.
Eigen::VectorXcd exact_mmse_oracle(const Eigen::MatrixXcd& dense_a, const Eigen::VectorXcd& y,
                                   double scale, double noise_var, const BgPrior& prior);

} // namespace swiftchan

#endif
