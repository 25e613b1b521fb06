// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "swiftchan/experiment.hpp"
#include "swiftchan/selfcheck.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::optional<int> trials;
    std::optional<std::string> snr;
    std::optional<std::string> tc;
    std::optional<std::string> schemes;
    std::optional<int> workers;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Config file (flat key = value lines)");
    cmd->add_option("--seed", flags.seed, "Master seed override");
    cmd->add_option("--out", flags.out_path, "Output path (default stdout)");
    cmd->add_option("--trials", flags.trials, "Trials per grid point override");
    cmd->add_option("--snr", flags.snr, "Comma list of SNR values in dB");
    cmd->add_option("--tc", flags.tc, "Comma list of coherence times in symbols");
    cmd->add_option("--schemes", flags.schemes,
                    "Comma list of schemes: swift, fnrb(<n>), exhaustive");
    cmd->add_option("--workers", flags.workers, "Worker thread count override");
}

swiftchan::ExperimentConfig build_config(const CommonFlags& flags) {
    swiftchan::ExperimentConfig cfg;
    if (!flags.config_path.empty()) {
        cfg = swiftchan::load_config_file(flags.config_path);
    }
    if (flags.seed) {
        cfg.master_seed = *flags.seed;
    }
    if (flags.trials) {
        cfg.n_trials = *flags.trials;
    }
    if (flags.snr) {
        swiftchan::set_config_key(cfg, "snr_db_list", *flags.snr);
    }
    if (flags.tc) {
        swiftchan::set_config_key(cfg, "t_c_list", *flags.tc);
    }
    if (flags.schemes) {
        swiftchan::set_config_key(cfg, "schemes", *flags.schemes);
    }
    if (flags.workers) {
        cfg.workers = *flags.workers;
    }
    cfg.validate();
    return cfg;
}

int write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return std::cout.good() ? 0 : 1;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open output file: " << out_path << "\n";
        return 1;
    }
    out << text;
    out.flush();
    if (!out.good()) {
        std::cerr << "error: write failed: " << out_path << "\n";
        return 1;
    }
    return 0;
}

int run_sweep_command(const CommonFlags& flags) {
    const auto cfg = build_config(flags);
    const auto results = swiftchan::run_sweep(cfg);
    const auto rows = swiftchan::aggregate(results);
    return write_output(flags.out_path, swiftchan::format_csv(rows));
}

int run_trial_command(const CommonFlags& flags, int trial_index) {
    auto cfg = build_config(flags);
    if (trial_index < 0 || trial_index >= cfg.n_trials) {
        std::cerr << "error: trial index out of range\n";
        return 2;
    }
    const swiftchan::SystemModel model = swiftchan::SystemModel::create(cfg.dims);
    std::ostringstream out;
    for (std::size_t scheme_i = 0; scheme_i < cfg.schemes.size(); ++scheme_i) {
        for (std::size_t snr_i = 0; snr_i < cfg.snr_db_list.size(); ++snr_i) {
            for (std::size_t tc_i = 0; tc_i < cfg.t_c_list.size(); ++tc_i) {
                for (int user = 0; user < cfg.n_users; ++user) {
                    const auto r = swiftchan::run_single_trial(model, cfg, scheme_i, snr_i, tc_i,
                                                               trial_index, user);
                    out << "scheme=" << r.scheme.label() << " snr_db=" << r.snr_db
                        << " t_c=" << r.t_c << " user=" << r.user_id << " t_e=" << r.t_e
                        << " stop="
                        << (r.stop_reason == swiftchan::StopReason::Converged ? "converged"
                                                                              : "max")
                        << " r_opt=" << r.r_opt << " r_eff=" << r.r_eff
                        << " support=" << (r.support_correct ? 1 : 0) << "\n";
                }
            }
        }
    }
    return write_output(flags.out_path, out.str());
}

int run_selftest_command() {
    const auto results = swiftchan::run_selftests();
    bool all_ok = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "[ok]   " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) {
            std::cout << ": " << r.detail;
        }
        std::cout << "\n";
        all_ok = all_ok && r.passed;
    }
    return all_ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive mmWave channel-estimation simulator"};
    app.require_subcommand(1);

    CommonFlags sweep_flags;
    CLI::App* sweep = app.add_subcommand("sweep", "Run the Monte Carlo sweep and emit CSV");
    add_common_flags(sweep, sweep_flags);

    CommonFlags trial_flags;
    int trial_index = 0;
    CLI::App* trial = app.add_subcommand("trial", "Run one seeded trial with a verbose trace");
    add_common_flags(trial, trial_flags);
    trial->add_option("--index", trial_index, "Trial index to run");

    CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in verification suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            return run_sweep_command(sweep_flags);
        }
        if (trial->parsed()) {
            return run_trial_command(trial_flags, trial_index);
        }
        if (selftest->parsed()) {
            return run_selftest_command();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
