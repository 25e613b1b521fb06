// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/controller.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace swiftchan {

void StoppingConfig::validate() const {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("StoppingConfig: gamma must be in (0, 1)");
    }
    if (!(sigma_r > 0.0)) {
        throw std::invalid_argument("StoppingConfig: sigma_r must be positive");
    }
    if (t_u < 1) {
        throw std::invalid_argument("StoppingConfig: t_u must be positive");
    }
    if (t_max < t_u) {
        throw std::invalid_argument("StoppingConfig: t_max must be >= t_u");
    }
}

BinarizedSupport binarize(const VirtualChannelEstimate& estimate, double gamma, double sigma_r) {
    BinarizedSupport out;
    out.bits.resize(estimate.v_hat.size());
    const double threshold = gamma * sigma_r;
    for (long i = 0; i < estimate.v_hat.size(); ++i) {
        out.bits(i) = std::abs(estimate.v_hat(i)) < threshold ? 0 : 1;
    }
    return out;
}

bool has_converged(const BinarizedSupport& current, const BinarizedSupport& previous) {
    if (current.bits.size() != previous.bits.size()) {
        throw std::logic_error("has_converged: support length mismatch");
    }
    return (current.bits.array() == previous.bits.array()).all() &&
           (current.bits.array() != 0).any();
}

namespace {

// One random-beam timeslot, identical for the adaptive and fixed schemes so
// their ledgers agree slot for slot under equal seeds.
void random_beam_slot(const SystemModel& model, const ChannelRealization& channel, double power,
                      double noise_var, RandomStream& bs_rng, RandomStream& ue_rng,
                      RandomStream& noise_rng, int timeslot, MeasurementLedger& ledger) {
    const auto bs_sel = select_beams(bs_rng, model.dims.n_bs, model.dims.r_bs, ArraySide::BS);
    const auto pilots = draw_pilots(bs_rng, model.dims.r_bs);
    const auto ue_sel = select_beams(ue_rng, model.dims.n_ue, model.dims.r_ue, ArraySide::UE);
    append(ledger, observe(model, channel, bs_sel, ue_sel, pilots, power, noise_var, noise_rng,
                           timeslot));
}

VirtualChannelEstimate zero_estimate(const SystemDims& dims, const BgPrior& prior) {
    VirtualChannelEstimate est;
    const long n = static_cast<long>(dims.n_bs) * dims.n_ue;
    est.v_hat = Eigen::VectorXcd::Zero(n);
    est.v_var = Eigen::VectorXd::Constant(n, prior.rho * prior.sigma_r);
    return est;
}

} // namespace

EstimationOutcome run_swift(const SystemModel& model, const ChannelRealization& channel,
                            const MeasurementSeeds& seeds, double power, double noise_var,
                            const BgPrior& prior, const StoppingConfig& stopping,
                            const GampConfig& gamp) {
    stopping.validate();
    RandomStream bs_rng(seeds.bs);
    RandomStream ue_rng(seeds.ue);
    RandomStream noise_rng(seeds.noise);
    MeasurementLedger ledger = make_ledger(model.dims, power, model.dims.r_bs);

    EstimationOutcome out;
    out.scheme = Scheme::Swift;
    std::optional<VirtualChannelEstimate> last_good;
    std::optional<BinarizedSupport> previous_support;

    for (int slot = 1; slot <= stopping.t_max; ++slot) {
        random_beam_slot(model, channel, power, noise_var, bs_rng, ue_rng, noise_rng, slot,
                         ledger);
        const bool checkpoint = slot % stopping.t_u == 0 || slot == stopping.t_max;
        if (!checkpoint) {
            continue;
        }
        auto est = gamp_estimate(ledger, noise_var, prior, gamp);
        if (!est) {
            // Numerical failure: drop this checkpoint and keep measuring.
            continue;
        }
        BinarizedSupport support = binarize(*est, stopping.gamma, stopping.sigma_r);
        last_good = std::move(*est);
        if (previous_support && has_converged(support, *previous_support)) {
            out.estimate = std::move(*last_good);
            out.t_e = slot;
            out.stop_reason = StopReason::Converged;
            return out;
        }
        previous_support = std::move(support);
    }

    out.estimate = last_good ? std::move(*last_good) : zero_estimate(model.dims, prior);
    out.t_e = stopping.t_max;
    out.stop_reason = StopReason::MaxMeasurements;
    return out;
}

EstimationOutcome run_fnrb(const SystemModel& model, const ChannelRealization& channel,
                           const MeasurementSeeds& seeds, double power, double noise_var,
                           const BgPrior& prior, int m_fixed, const GampConfig& gamp) {
    if (m_fixed < 1) {
        throw std::invalid_argument("run_fnrb: m_fixed must be positive");
    }
    RandomStream bs_rng(seeds.bs);
    RandomStream ue_rng(seeds.ue);
    RandomStream noise_rng(seeds.noise);
    MeasurementLedger ledger = make_ledger(model.dims, power, model.dims.r_bs);
    for (int slot = 1; slot <= m_fixed; ++slot) {
        random_beam_slot(model, channel, power, noise_var, bs_rng, ue_rng, noise_rng, slot,
                         ledger);
    }

    EstimationOutcome out;
    out.scheme = Scheme::Fnrb;
    out.t_e = m_fixed;
    out.stop_reason = StopReason::MaxMeasurements;
    auto est = gamp_estimate(ledger, noise_var, prior, gamp);
    out.estimate = est ? std::move(*est) : zero_estimate(model.dims, prior);
    return out;
}

EstimationOutcome run_exhaustive(const SystemModel& model, const ChannelRealization& channel,
                                 const MeasurementSeeds& seeds, double power, double noise_var) {
    if (model.dims.n_ue % model.dims.r_ue != 0) {
        throw std::invalid_argument("run_exhaustive: r_ue must divide n_ue");
    }
    RandomStream bs_rng(seeds.bs);
    RandomStream noise_rng(seeds.noise);
    const int groups = model.dims.n_ue / model.dims.r_ue;
    const double root_p = std::sqrt(power);

    EstimationOutcome out;
    out.scheme = Scheme::Exhaustive;
    out.stop_reason = StopReason::MaxMeasurements;
    const long n = static_cast<long>(model.dims.n_bs) * model.dims.n_ue;
    out.estimate.v_hat.resize(n);
    out.estimate.v_var = Eigen::VectorXd::Constant(n, noise_var / power);
    out.estimate.converged = true;

    int slot = 0;
    for (int b = 0; b < model.dims.n_bs; ++b) {
        BeamSelection bs_sel;
        bs_sel.side = ArraySide::BS;
        bs_sel.indices = {b};
        for (int g = 0; g < groups; ++g) {
            BeamSelection ue_sel;
            ue_sel.side = ArraySide::UE;
            for (int j = 0; j < model.dims.r_ue; ++j) {
                ue_sel.indices.push_back(g * model.dims.r_ue + j);
            }
            const auto pilots = draw_pilots(bs_rng, 1);
            const auto rec = observe(model, channel, bs_sel, ue_sel, pilots, power, noise_var,
                                     noise_rng, ++slot);
            // y_j = sqrt(P) * H_v(q_j, b) * s + n_j, so divide out the pilot
            // and the power to read the entry directly.
            const std::complex<double> undo = std::conj(pilots.symbols(0)) / root_p;
            for (int j = 0; j < model.dims.r_ue; ++j) {
                const long q = ue_sel.indices[static_cast<std::size_t>(j)];
                out.estimate.v_hat(static_cast<long>(b) * model.dims.n_ue + q) = undo * rec.y(j);
            }
        }
    }
    out.t_e = slot;
    return out;
}

} // namespace swiftchan
