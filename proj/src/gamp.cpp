// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/gamp.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swiftchan {

void BgPrior::validate() const {
    if (!(rho > 0.0) || !(rho <= 1.0)) {
        throw std::invalid_argument("BgPrior: rho must be in (0, 1]");
    }
    if (!(sigma_r > 0.0)) {
        throw std::invalid_argument("BgPrior: sigma_r must be positive");
    }
}

void GampConfig::validate() const {
    if (max_iterations < 1) {
        throw std::invalid_argument("GampConfig: max_iterations must be positive");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("GampConfig: tolerance must be positive");
    }
    if (!(damping > 0.0) || !(damping <= 1.0)) {
        throw std::invalid_argument("GampConfig: damping must be in (0, 1]");
    }
    if (!(variance_floor > 0.0)) {
        throw std::invalid_argument("GampConfig: variance_floor must be positive");
    }
}

std::pair<std::complex<double>, double> denoise_input(std::complex<double> r_pseudo, double tau,
                                                      const BgPrior& prior) {
    if (!(tau > 0.0)) {
        throw std::invalid_argument("denoise_input: tau must be positive");
    }
    const double sr = prior.sigma_r;
    const double shrink = sr / (sr + tau);
    const std::complex<double> g = shrink * r_pseudo;
    const double q = sr * tau / (sr + tau);
    // Activation probability of the Gaussian mixture branch. The exponent is
    // <= 0, so no overflow; underflow to 0 just saturates pi at 1.
    const double e = std::exp(-std::norm(r_pseudo) * sr / (tau * (tau + sr)));
    const double odds = ((1.0 - prior.rho) / prior.rho) * ((tau + sr) / tau) * e;
    const double pi = 1.0 / (1.0 + odds);
    const std::complex<double> mean = pi * g;
    const double variance = pi * q + pi * (1.0 - pi) * std::norm(g);
    return {mean, variance};
}

namespace {

// Rows of the ledger's sensing matrix in compressed form: row `row` holds
// pilot values at columns cols[row_start[row] + k]. Pilot magnitudes are 1
// for QPSK but val_sq keeps the general case honest.
struct SparseRowsOp {
    std::vector<int> row_start;
    std::vector<int> cols;
    std::vector<std::complex<double>> vals;
    std::vector<double> val_sq;
    long n_cols = 0;

    int rows() const { return static_cast<int>(row_start.size()) - 1; }
    long cols_count() const { return n_cols; }

    void forward(const Eigen::VectorXcd& v, const Eigen::VectorXd& var, Eigen::VectorXcd& z,
                 Eigen::VectorXd& tp) const {
        for (int row = 0; row < rows(); ++row) {
            std::complex<double> zz{0.0, 0.0};
            double t = 0.0;
            for (int k = row_start[static_cast<std::size_t>(row)];
                 k < row_start[static_cast<std::size_t>(row) + 1]; ++k) {
                zz += vals[static_cast<std::size_t>(k)] * v(cols[static_cast<std::size_t>(k)]);
                t += val_sq[static_cast<std::size_t>(k)] * var(cols[static_cast<std::size_t>(k)]);
            }
            z(row) = zz;
            tp(row) = t;
        }
    }

    void adjoint(const Eigen::VectorXcd& s, const Eigen::VectorXd& tau_s,
                 Eigen::VectorXcd& col_mean, Eigen::VectorXd& col_weight) const {
        col_mean.setZero();
        col_weight.setZero();
        for (int row = 0; row < rows(); ++row) {
            for (int k = row_start[static_cast<std::size_t>(row)];
                 k < row_start[static_cast<std::size_t>(row) + 1]; ++k) {
                const int col = cols[static_cast<std::size_t>(k)];
                col_weight(col) += val_sq[static_cast<std::size_t>(k)] * tau_s(row);
                col_mean(col) += std::conj(vals[static_cast<std::size_t>(k)]) * s(row);
            }
        }
    }
};

SparseRowsOp flatten(const MeasurementLedger& ledger) {
    SparseRowsOp sp;
    sp.n_cols = static_cast<long>(ledger.dims.n_bs) * ledger.dims.n_ue;
    sp.row_start.reserve(static_cast<std::size_t>(ledger.rows()) + 1);
    sp.row_start.push_back(0);
    for (const auto& rec : ledger.records) {
        const int r_bs = rec.bs_selection.count();
        for (int j = 0; j < rec.ue_selection.count(); ++j) {
            const int ue = rec.ue_selection.indices[static_cast<std::size_t>(j)];
            for (int k = 0; k < r_bs; ++k) {
                const int bs = rec.bs_selection.indices[static_cast<std::size_t>(k)];
                sp.cols.push_back(bs * ledger.dims.n_ue + ue);
                sp.vals.push_back(rec.pilots.symbols(k));
                sp.val_sq.push_back(std::norm(rec.pilots.symbols(k)));
            }
            sp.row_start.push_back(static_cast<int>(sp.cols.size()));
        }
    }
    return sp;
}

struct DenseOp {
    const Eigen::MatrixXcd& a;
    Eigen::MatrixXd a_sq;

    explicit DenseOp(const Eigen::MatrixXcd& matrix) : a(matrix), a_sq(matrix.cwiseAbs2()) {}

    int rows() const { return static_cast<int>(a.rows()); }
    long cols_count() const { return a.cols(); }

    void forward(const Eigen::VectorXcd& v, const Eigen::VectorXd& var, Eigen::VectorXcd& z,
                 Eigen::VectorXd& tp) const {
        z.noalias() = a * v;
        tp.noalias() = a_sq * var;
    }

    void adjoint(const Eigen::VectorXcd& s, const Eigen::VectorXd& tau_s,
                 Eigen::VectorXcd& col_mean, Eigen::VectorXd& col_weight) const {
        col_mean.noalias() = a.adjoint() * s;
        col_weight.noalias() = a_sq.transpose() * tau_s;
    }
};

template <typename Op>
std::optional<VirtualChannelEstimate> gamp_core(const Op& op, const Eigen::VectorXcd& y,
                                                double scale, double noise_var,
                                                const BgPrior& prior, const GampConfig& config) {
    const int m_rows = op.rows();
    const long n = op.cols_count();
    const double c2 = scale * scale;

    // Damping anneal: every 30 iterations without convergence the step size
    // halves (floor 0.12). Small steps turn the period-doubling limit cycles
    // that appear on high-SNR ledgers into contractions toward the same
    // fixed point, and the schedule is a pure function of the iteration
    // index, so results stay bit-reproducible.
    constexpr int kAnnealPeriod = 30;
    constexpr double kBetaFloor = 0.12;
    double beta = config.damping;

    // v_hat/v_var are the raw denoiser outputs; the bar quantities are damped
    // running states that stabilize the loop. The Onsager term pairs the
    // current denoiser output with the damped s state.
    Eigen::VectorXcd v_hat = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXd v_var = Eigen::VectorXd::Constant(n, prior.rho * prior.sigma_r);
    Eigen::VectorXcd v_bar(n), s_hat(m_rows), col_mean(n);
    Eigen::VectorXd tau_p_bar(m_rows), s_var(m_rows), col_weight(n);
    Eigen::VectorXcd z(m_rows), p(m_rows);
    Eigen::VectorXd tp(m_rows), tau_p(m_rows), tau_s_new(m_rows);

    // If the loop still has not met the tolerance at the cap, return the
    // mean of the trailing iterates instead of an arbitrary cycle phase.
    const int avg_start = (3 * config.max_iterations) / 4;
    Eigen::VectorXcd v_acc = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXd var_acc = Eigen::VectorXd::Zero(n);
    int avg_count = 0;

    VirtualChannelEstimate est;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        if (iter > 0 && iter % kAnnealPeriod == 0) {
            beta = std::max(kBetaFloor, 0.5 * beta);
        }
        op.forward(v_hat, v_var, z, tp);
        tau_p = c2 * tp;
        if (iter == 0) {
            tau_p_bar = tau_p;
            v_bar = v_hat;
            s_hat.setZero();
        } else {
            tau_p_bar = beta * tau_p + (1.0 - beta) * tau_p_bar;
            v_bar = beta * v_hat + (1.0 - beta) * v_bar;
        }
        p.array() = scale * z.array() - tau_p_bar.array() * s_hat.array();

        // AWGN output channel, then damp the s state and its precision. The
        // gain uses the same damped variance as the Onsager term above; a raw
        // variance here can collapse orders of magnitude ahead of the damped
        // one on near-noiseless ledgers and the mismatch pumps s_hat up
        // instead of cancelling it.
        tau_s_new = (tau_p_bar.array() + noise_var).inverse();
        if (iter == 0) {
            s_hat.array() = (y - p).array() * tau_s_new.array();
            s_var = tau_s_new;
        } else {
            s_hat.array() =
                beta * (y - p).array() * tau_s_new.array() + (1.0 - beta) * s_hat.array();
            s_var = beta * tau_s_new + (1.0 - beta) * s_var;
        }

        // Input linear step against the damped states.
        op.adjoint(s_hat, s_var, col_mean, col_weight);

        bool finite = true;
        double delta_sq = 0.0;
        double norm_sq = 0.0;
        for (long i = 0; i < n; ++i) {
            std::complex<double> mean;
            double variance;
            if (col_weight(i) > 0.0) {
                const double tau_r = 1.0 / (c2 * col_weight(i));
                const std::complex<double> r = v_bar(i) + tau_r * scale * col_mean(i);
                std::tie(mean, variance) = denoise_input(r, tau_r, prior);
            } else {
                // Column never measured: posterior equals the prior moments.
                mean = {0.0, 0.0};
                variance = prior.rho * prior.sigma_r;
            }
            variance = std::max(variance, config.variance_floor);
            if (!std::isfinite(mean.real()) || !std::isfinite(mean.imag()) ||
                !std::isfinite(variance)) {
                finite = false;
                break;
            }
            delta_sq += std::norm(mean - v_hat(i));
            norm_sq += std::norm(mean);
            v_hat(i) = mean;
            v_var(i) = variance;
        }
        if (!finite) {
            return std::nullopt;
        }
        est.iterations_used = iter + 1;
        if (std::sqrt(delta_sq) <= config.tolerance * std::max(std::sqrt(norm_sq), 1e-30)) {
            est.converged = true;
            break;
        }
        if (iter >= avg_start) {
            v_acc += v_hat;
            var_acc += v_var;
            ++avg_count;
        }
    }

    if (!est.converged && avg_count > 0) {
        est.v_hat = v_acc / avg_count;
        est.v_var = var_acc / avg_count;
    } else {
        est.v_hat = std::move(v_hat);
        est.v_var = std::move(v_var);
    }
    return est;
}

} // namespace

std::optional<VirtualChannelEstimate> gamp_estimate(const MeasurementLedger& ledger,
                                                    double noise_var, const BgPrior& prior,
                                                    const GampConfig& config) {
    prior.validate();
    config.validate();
    if (ledger.records.empty()) {
        throw std::invalid_argument("gamp_estimate: ledger is empty");
    }
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("gamp_estimate: noise_var must be positive");
    }
    const SparseRowsOp op = flatten(ledger);
    return gamp_core(op, ledger.stacked_y, ledger.scale, noise_var, prior, config);
}

std::optional<VirtualChannelEstimate> gamp_estimate_dense(const Eigen::MatrixXcd& a,
                                                          const Eigen::VectorXcd& y, double scale,
                                                          double noise_var, const BgPrior& prior,
                                                          const GampConfig& config) {
    prior.validate();
    config.validate();
    if (a.rows() == 0 || a.cols() == 0) {
        throw std::invalid_argument("gamp_estimate_dense: empty matrix");
    }
    if (y.size() != a.rows()) {
        throw std::invalid_argument("gamp_estimate_dense: y length must match rows");
    }
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("gamp_estimate_dense: noise_var must be positive");
    }
    const DenseOp op(a);
    return gamp_core(op, y, scale, noise_var, prior, config);
}

Eigen::VectorXcd exact_mmse_oracle(const Eigen::MatrixXcd& dense_a, const Eigen::VectorXcd& y,
                                   double scale, double noise_var, const BgPrior& prior) {
    prior.validate();
    const int n = static_cast<int>(dense_a.cols());
    const int m = static_cast<int>(dense_a.rows());
    if (n > 14) {
        throw std::invalid_argument("exact_mmse_oracle: refusing more than 14 columns");
    }
    if (y.size() != m) {
        throw std::invalid_argument("exact_mmse_oracle: y length must match rows");
    }
    if (!(noise_var > 0.0)) {
        throw std::invalid_argument("exact_mmse_oracle: noise_var must be positive");
    }

    const Eigen::MatrixXcd b = scale * dense_a;
    const std::uint32_t n_masks = 1u << n;
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> logw(n_masks, neg_inf);
    std::vector<Eigen::VectorXcd> means(n_masks, Eigen::VectorXcd::Zero(n));

    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        const int k = std::popcount(mask);
        if (prior.rho >= 1.0 && k < n) {
            continue; // inactive entries have zero prior probability
        }
        double lw = k * std::log(prior.rho);
        if (k < n) {
            lw += (n - k) * std::log1p(-prior.rho);
        }

        Eigen::MatrixXcd cov = noise_var * Eigen::MatrixXcd::Identity(m, m);
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                cov.noalias() += prior.sigma_r * b.col(i) * b.col(i).adjoint();
            }
        }
        const Eigen::LLT<Eigen::MatrixXcd> llt(cov);
        const Eigen::VectorXcd alpha = llt.solve(y);
        double logdet = 0.0;
        for (int i = 0; i < m; ++i) {
            logdet += 2.0 * std::log(std::real(llt.matrixL()(i, i)));
        }
        logw[mask] = lw - logdet - std::real(y.dot(alpha));
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                means[mask](i) = prior.sigma_r * b.col(i).dot(alpha);
            }
        }
    }

    double max_log = neg_inf;
    for (const double lw : logw) {
        max_log = std::max(max_log, lw);
    }
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(n);
    double total = 0.0;
    for (std::uint32_t mask = 0; mask < n_masks; ++mask) {
        if (logw[mask] == neg_inf) {
            continue;
        }
        const double w = std::exp(logw[mask] - max_log);
        acc += w * means[mask];
        total += w;
    }
    return acc / total;
}

} // namespace swiftchan
