// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace swiftchan {

GaussHermite gauss_hermite(int n) {
    if (n < 1) {
        throw std::invalid_argument("gauss_hermite: n must be positive");
    }
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(static_cast<double>(k) / 2.0);
        jacobi(k, k - 1) = beta;
        jacobi(k - 1, k) = beta;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
    GaussHermite rule;
    rule.nodes = solver.eigenvalues();
    rule.weights.resize(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int i = 0; i < n; ++i) {
        const double first = solver.eigenvectors()(0, i);
        rule.weights(i) = sqrt_pi * first * first;
    }
    return rule;
}

std::pair<std::complex<double>, double> reference_denoise_input(std::complex<double> r_pseudo,
                                                                double tau, const BgPrior& prior,
                                                                int n_nodes) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("reference_denoise_input: tau must be positive");
    }
    prior.validate();
    const double sr = prior.sigma_r;
    const double pi_const = std::numbers::pi;
    const GaussHermite rule = gauss_hermite(n_nodes);

    // The integrand is the product of two circular Gaussians. Expand around
    // the narrower one so the remaining factor stays smooth at the node
    // spacing: v = center + width*(t_a + i t_b) absorbs exp(-|v-center|^2 /
    // width^2) into the quadrature weights.
    const bool center_on_r = tau <= sr;
    const std::complex<double> center = center_on_r ? r_pseudo : std::complex<double>(0.0, 0.0);
    const double width = std::sqrt(center_on_r ? tau : sr);
    const double other_var = center_on_r ? sr : tau;
    const std::complex<double> other_center =
        center_on_r ? std::complex<double>(0.0, 0.0) : r_pseudo;
    const double norm_const = 1.0 / (pi_const * pi_const * other_var);

    double z_gauss = 0.0;
    std::complex<double> first{0.0, 0.0};
    double second = 0.0;
    for (int a = 0; a < n_nodes; ++a) {
        for (int b = 0; b < n_nodes; ++b) {
            const std::complex<double> v =
                center + width * std::complex<double>(rule.nodes(a), rule.nodes(b));
            const double density = norm_const * rule.weights(a) * rule.weights(b) *
                                   std::exp(-std::norm(v - other_center) / other_var);
            z_gauss += density;
            first += density * v;
            second += density * std::norm(v);
        }
    }

    const double z_spike = (1.0 - prior.rho) * std::exp(-std::norm(r_pseudo) / tau) / (pi_const * tau);
    const double z_total = z_spike + prior.rho * z_gauss;
    const std::complex<double> mean = prior.rho * first / z_total;
    const double variance = prior.rho * second / z_total - std::norm(mean);
    return {mean, std::max(variance, 0.0)};
}

} // namespace swiftchan
