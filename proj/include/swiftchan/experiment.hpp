// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_EXPERIMENT_HPP
#define SWIFTCHAN_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "swiftchan/controller.hpp"
#include "swiftchan/evaluation.hpp"

namespace swiftchan {

// One entry of the scheme list: the adaptive protocol, a fixed-budget
// baseline with its measurement count, or the exhaustive sweep.
struct SchemeSpec {
    Scheme kind = Scheme::Swift;
    int budget = 0; // measurement timeslots, Fnrb only

    std::string label() const;
    static SchemeSpec parse(const std::string& text);
    bool operator==(const SchemeSpec&) const = default;
};

struct ExperimentConfig {
    SystemDims dims;
    int n_users = 1;
    int l_paths = 1;
    double sigma_r = 1.0;
    double gamma = 0.1;
    int t_u = 4;
    int t_max = 128;
    std::vector<double> snr_db_list = {-20, -15, -10, -5, 0, 5, 10, 15, 20};
    std::vector<int> t_c_list = {200, 400};
    int n_trials = 1000;
    std::vector<SchemeSpec> schemes;
    std::uint64_t master_seed = 1;
    bool on_grid = false;
    int workers = 1;
    int max_streams = 0; // 0 picks min(r_bs, r_ue)
    GampConfig gamp;

    ExperimentConfig();
    void validate() const;
    int effective_max_streams() const;
};

// Applies one key=value assignment; throws std::invalid_argument for unknown
// keys or unparsable values. Keys mirror the config fields (dims flattened
// to n_bs/n_ue/r_bs/r_ue, GAMP knobs by their field names).
void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Flat key=value text, one assignment per line; '#' starts a comment.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

struct TrialResult {
    SchemeSpec scheme;
    double snr_db = 0.0;
    int t_c = 0;
    int trial_index = 0;
    int user_id = 0;
    int t_e = 0;
    double r_opt = 0.0;
    double r_eff = 0.0;
    StopReason stop_reason = StopReason::MaxMeasurements;
    bool support_correct = false;
};

struct AggregateRow {
    SchemeSpec scheme;
    double snr_db = 0.0;
    int t_c = 0;
    double mean_t_e = 0.0;
    double mean_r_opt = 0.0;
    double mean_r_eff = 0.0;
    double converged_frac = 0.0;
    double support_acc = 0.0;
    long n_trials = 0;
};

// Channel realization plus derived randomness for one (snr, t_c, trial,
// user) cell. The BS seed hashes the trial but not the user or scheme, so
// every user and every scheme sees the same broadcast randomness.
struct TrialSetup {
    ChannelRealization channel;
    MeasurementSeeds seeds;
    double power = 1.0;
    double noise_var = 1.0;
    BgPrior prior;
};

TrialSetup make_trial_setup(const SystemModel& model, const ExperimentConfig& cfg,
                            std::size_t snr_i, std::size_t tc_i, int trial, int user);

TrialResult run_single_trial(const SystemModel& model, const ExperimentConfig& cfg,
                             std::size_t scheme_i, std::size_t snr_i, std::size_t tc_i, int trial,
                             int user);

// Full Monte Carlo sweep. Result order is scheme-major, then SNR, coherence
// time, trial, user, regardless of worker count.
std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg);

// Arithmetic means per (scheme, snr, t_c) group, in first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results);

// Header plus one row per group, numbers at 6 significant digits.
void emit_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
std::string format_csv(const std::vector<AggregateRow>& rows);

} // namespace swiftchan

#endif
