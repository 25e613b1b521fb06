// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swiftchan/experiment.hpp"

using namespace swiftchan;

namespace {

// Small geometry so sweep-level tests stay fast.
ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.dims = SystemDims{8, 4, 2, 4};
    cfg.l_paths = 1;
    cfg.t_u = 4;
    cfg.t_max = 8;
    cfg.snr_db_list = {0.0, 10.0};
    cfg.t_c_list = {200};
    cfg.n_trials = 2;
    cfg.n_users = 2;
    cfg.schemes = {SchemeSpec::parse("swift"), SchemeSpec::parse("fnrb(4)"),
                   SchemeSpec::parse("exhaustive")};
    return cfg;
}

bool same_trial(const TrialResult& a, const TrialResult& b) {
    return a.scheme == b.scheme && a.snr_db == b.snr_db && a.t_c == b.t_c &&
           a.trial_index == b.trial_index && a.user_id == b.user_id && a.t_e == b.t_e &&
           a.r_opt == b.r_opt && a.r_eff == b.r_eff && a.stop_reason == b.stop_reason &&
           a.support_correct == b.support_correct;
}

} // namespace

TEST_SUITE("experiment") {

TEST_CASE("scheme descriptors parse and print") {
    CHECK(SchemeSpec::parse("swift").kind == Scheme::Swift);
    CHECK(SchemeSpec::parse("exhaustive").kind == Scheme::Exhaustive);
    const auto f = SchemeSpec::parse(" fnrb(96) ");
    CHECK(f.kind == Scheme::Fnrb);
    CHECK(f.budget == 96);
    CHECK(f.label() == "fnrb(96)");
    CHECK(SchemeSpec::parse("swift").label() == "swift");
    CHECK(SchemeSpec::parse("exhaustive").label() == "exhaustive");
    CHECK_THROWS_AS(SchemeSpec::parse("oracle"), std::invalid_argument);
    CHECK_THROWS_AS(SchemeSpec::parse("fnrb(0)"), std::invalid_argument);
    CHECK_THROWS_AS(SchemeSpec::parse("fnrb(x)"), std::invalid_argument);
}

TEST_CASE("config text applies keys and rejects unknown ones") {
    const std::string text = R"(# comment line
        n_bs = 8
        n_ue = 4   # trailing comment
        r_bs = 2
        r_ue = 2

        snr_db_list = -5, 0, 5
        t_c_list = 100
        schemes = swift, fnrb(16)
        gamma = 0.2
        master_seed = 99
        on_grid = true
        tolerance = 1e-5
    )";
    const ExperimentConfig cfg = parse_config_text(text);
    CHECK(cfg.dims.n_bs == 8);
    CHECK(cfg.dims.n_ue == 4);
    CHECK(cfg.snr_db_list == std::vector<double>{-5.0, 0.0, 5.0});
    CHECK(cfg.t_c_list == std::vector<int>{100});
    REQUIRE(cfg.schemes.size() == 2);
    CHECK(cfg.schemes[1].budget == 16);
    CHECK(cfg.gamma == 0.2);
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.on_grid);
    CHECK(cfg.gamp.tolerance == 1e-5);

    ExperimentConfig fresh;
    CHECK_THROWS_AS(set_config_key(fresh, "bandwidth", "10"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_key(fresh, "n_bs", "eight"), std::invalid_argument);
    CHECK_THROWS_AS(set_config_key(fresh, "on_grid", "maybe"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("n_bs 8"), std::invalid_argument);
}

TEST_CASE("defaults cover the full experiment grid") {
    const ExperimentConfig cfg;
    CHECK(cfg.dims.n_bs == 32);
    CHECK(cfg.dims.n_ue == 16);
    CHECK(cfg.snr_db_list.size() == 9);
    CHECK(cfg.t_c_list == std::vector<int>{200, 400});
    REQUIRE(cfg.schemes.size() == 6);
    CHECK(cfg.schemes.front().label() == "swift");
    CHECK(cfg.schemes.back().label() == "exhaustive");
    CHECK(cfg.effective_max_streams() == 4);
    ExperimentConfig capped;
    capped.max_streams = 2;
    CHECK(capped.effective_max_streams() == 2);
    CHECK_NOTHROW(cfg.validate());
    ExperimentConfig bad;
    bad.n_trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trial setup fixes the noise power and shares broadcast randomness") {
    ExperimentConfig cfg = tiny_config();
    cfg.snr_db_list = {0.0, -20.0};
    const SystemModel model = SystemModel::create(cfg.dims);

    const auto at_zero = make_trial_setup(model, cfg, 0, 0, 3, 0);
    CHECK(at_zero.noise_var == 1.0); // exact at 0 dB
    CHECK(at_zero.power == 1.0);
    CHECK(at_zero.prior.rho == doctest::Approx(1.0 / 32.0).epsilon(1e-15));

    const auto low = make_trial_setup(model, cfg, 1, 0, 3, 0);
    CHECK(low.noise_var == doctest::Approx(100.0).epsilon(1e-12));

    // Same trial, different user: the cell broadcast matches, the private
    // streams and the channel do not.
    const auto peer = make_trial_setup(model, cfg, 0, 0, 3, 1);
    CHECK(peer.seeds.bs == at_zero.seeds.bs);
    CHECK(peer.seeds.ue != at_zero.seeds.ue);
    CHECK(peer.seeds.noise != at_zero.seeds.noise);
    CHECK((peer.channel.h - at_zero.channel.h).cwiseAbs().maxCoeff() > 0.0);

    const auto next_trial = make_trial_setup(model, cfg, 0, 0, 4, 0);
    CHECK(next_trial.seeds.bs != at_zero.seeds.bs);
}

TEST_CASE("sweep is deterministic, ordered, and worker-count independent") {
    const ExperimentConfig cfg = tiny_config();
    const auto first = run_sweep(cfg);
    const auto second = run_sweep(cfg);
    REQUIRE(first.size() == 3 * 2 * 1 * 2 * 2);
    REQUIRE(second.size() == first.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(same_trial(first[i], second[i]));
    }

    // Scheme-major order, then SNR, coherence time, trial, user.
    std::size_t i = 0;
    for (const auto& scheme : cfg.schemes) {
        for (const double snr : cfg.snr_db_list) {
            for (const int tc : cfg.t_c_list) {
                for (int trial = 0; trial < cfg.n_trials; ++trial) {
                    for (int user = 0; user < cfg.n_users; ++user) {
                        CHECK(first[i].scheme == scheme);
                        CHECK(first[i].snr_db == snr);
                        CHECK(first[i].t_c == tc);
                        CHECK(first[i].trial_index == trial);
                        CHECK(first[i].user_id == user);
                        ++i;
                    }
                }
            }
        }
    }

    ExperimentConfig parallel = cfg;
    parallel.workers = 3;
    const auto third = run_sweep(parallel);
    REQUIRE(third.size() == first.size());
    for (std::size_t k = 0; k < first.size(); ++k) {
        CHECK(same_trial(first[k], third[k]));
    }
    CHECK(format_csv(aggregate(first)) == format_csv(aggregate(third)));
}

TEST_CASE("per-trial bookkeeping is consistent") {
    const ExperimentConfig cfg = tiny_config();
    const auto results = run_sweep(cfg);
    for (const auto& r : results) {
        CHECK(r.t_e >= 1);
        CHECK(r.r_opt >= 0.0);
        const double frac = 1.0 - static_cast<double>(r.t_e) / r.t_c;
        CHECK(r.r_eff == doctest::Approx(r.r_opt * std::max(frac, 0.0)).epsilon(1e-12));
        if (r.scheme.kind == Scheme::Fnrb) {
            CHECK(r.t_e == r.scheme.budget);
        }
        if (r.scheme.kind == Scheme::Exhaustive) {
            CHECK(r.t_e == 8); // n_bs * n_ue / r_ue at the tiny dims
        }
        if (r.scheme.kind == Scheme::Swift && r.stop_reason == StopReason::MaxMeasurements) {
            CHECK(r.t_e == cfg.t_max);
        }
    }
}

TEST_CASE("aggregation averages groups in first-appearance order") {
    TrialResult a;
    a.scheme = SchemeSpec::parse("swift");
    a.snr_db = 5.0;
    a.t_c = 200;
    a.t_e = 10;
    a.r_opt = 2.0;
    a.r_eff = 1.9;
    a.stop_reason = StopReason::Converged;
    a.support_correct = true;
    TrialResult b = a;
    b.t_e = 30;
    b.r_opt = 4.0;
    b.r_eff = 3.4;
    b.stop_reason = StopReason::MaxMeasurements;
    b.support_correct = false;
    TrialResult c;
    c.scheme = SchemeSpec::parse("fnrb(32)");
    c.snr_db = 5.0;
    c.t_c = 200;
    c.t_e = 32;
    c.r_opt = 1.0;
    c.r_eff = 0.84;

    const auto rows = aggregate({a, b, c});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].scheme.label() == "swift");
    CHECK(rows[0].mean_t_e == doctest::Approx(20.0));
    CHECK(rows[0].mean_r_opt == doctest::Approx(3.0));
    CHECK(rows[0].mean_r_eff == doctest::Approx(2.65));
    CHECK(rows[0].converged_frac == doctest::Approx(0.5));
    CHECK(rows[0].support_acc == doctest::Approx(0.5));
    CHECK(rows[0].n_trials == 2);
    CHECK(rows[1].scheme.label() == "fnrb(32)");
    CHECK(rows[1].n_trials == 1);
    CHECK(aggregate({}).empty());
}

TEST_CASE("csv output uses the fixed header and six significant digits") {
    AggregateRow row;
    row.scheme = SchemeSpec::parse("swift");
    row.snr_db = -10.0;
    row.t_c = 200;
    row.mean_t_e = 123.456789;
    row.mean_r_opt = 0.00123456789;
    row.mean_r_eff = 3.0;
    row.converged_frac = 2.0 / 3.0;
    row.support_acc = 1.0;
    row.n_trials = 500;

    const std::string csv = format_csv({row});
    std::istringstream lines(csv);
    std::string header, line, tail;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, line));
    CHECK_FALSE(std::getline(lines, tail));
    CHECK(header ==
          "scheme,snr_db,t_c,mean_t_e,mean_r_opt,mean_r_eff,converged_frac,support_acc,"
          "n_trials");
    CHECK(line == "swift,-10,200,123.457,0.00123457,3,0.666667,1,500");

    CHECK(format_csv({}) == header + "\n");
}

} // TEST_SUITE
