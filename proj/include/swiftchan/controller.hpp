// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_CONTROLLER_HPP
#define SWIFTCHAN_CONTROLLER_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "swiftchan/gamp.hpp"
#include "swiftchan/measurement.hpp"

namespace swiftchan {

// Convergence-detection knobs of the adaptive protocol.
struct StoppingConfig {
    double gamma = 0.1;   // binarization threshold, as a fraction of sigma_r
    double sigma_r = 1.0; // per-path gain variance that scales the threshold
    int t_u = 4;          // timeslots between estimate checkpoints
    int t_max = 128;      // hard cap on measurement timeslots

    void validate() const;
};

struct BinarizedSupport {
    Eigen::VectorX<std::uint8_t> bits;
};

enum class StopReason { Converged, MaxMeasurements };
enum class Scheme { Swift, Fnrb, Exhaustive };

struct EstimationOutcome {
    VirtualChannelEstimate estimate;
    int t_e = 0; // timeslots consumed
    StopReason stop_reason = StopReason::MaxMeasurements;
    Scheme scheme = Scheme::Swift;
};

// Independent per-trial random substreams. The BS stream drives beam
// selection and pilots and is common to every user in a cell; the UE and
// noise streams are private per user.
struct MeasurementSeeds {
    std::uint64_t bs = 0;
    std::uint64_t ue = 0;
    std::uint64_t noise = 0;
};

// bit_i = 0 iff |v_hat_i| < gamma * sigma_r (values exactly at the threshold
// stay active).
BinarizedSupport binarize(const VirtualChannelEstimate& estimate, double gamma, double sigma_r);

// True iff the supports are identical and non-empty. The non-empty clause
// keeps deep fades (all-zero estimates) measuring instead of stopping.
bool has_converged(const BinarizedSupport& current, const BinarizedSupport& previous);

// Adaptive protocol: measure with random beams, re-estimate every t_u slots,
// stop when two successive binarized supports agree (or at t_max).
EstimationOutcome run_swift(const SystemModel& model, const ChannelRealization& channel,
                            const MeasurementSeeds& seeds, double power, double noise_var,
                            const BgPrior& prior, const StoppingConfig& stopping,
                            const GampConfig& gamp);

// Fixed-budget baseline: exactly m_fixed random-beam timeslots, then one
// estimate. Identical measurement stream consumption to run_swift.
EstimationOutcome run_fnrb(const SystemModel& model, const ChannelRealization& channel,
                           const MeasurementSeeds& seeds, double power, double noise_var,
                           const BgPrior& prior, int m_fixed, const GampConfig& gamp);

// Sweep baseline: each BS beam in turn at full power while the UE cycles
// disjoint groups of r_ue receive beams; every virtual-channel entry is
// measured once and read off directly. Requires n_ue % r_ue == 0.
EstimationOutcome run_exhaustive(const SystemModel& model, const ChannelRealization& channel,
                                 const MeasurementSeeds& seeds, double power, double noise_var);

} // namespace swiftchan

#endif
