// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Each criterion is a self-contained check that prints one
// PASS/FAIL line, including its wall time; a criterion also fails when it
// blows its time budget. Run with no arguments for the full gate or with a
// single criterion number (1..9).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "swiftchan/channel.hpp"
#include "swiftchan/codebook.hpp"
#include "swiftchan/controller.hpp"
#include "swiftchan/evaluation.hpp"
#include "swiftchan/experiment.hpp"
#include "swiftchan/gamp.hpp"
#include "swiftchan/measurement.hpp"
#include "swiftchan/reference.hpp"
#include "swiftchan/rng.hpp"

namespace {

using namespace swiftchan;
using cd = std::complex<double>;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Outcome ok(std::string detail) { return {true, std::move(detail)}; }
Outcome bad(std::string detail) { return {false, std::move(detail)}; }

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

// --- 1. Noiseless observations equal the stacked sensing operator. ---------

Outcome criterion1() {
    double worst = 0.0;
    const SystemDims all_dims[] = {{8, 4, 2, 2}, {32, 16, 8, 4}};
    for (const SystemDims& dims : all_dims) {
        const SystemModel model = SystemModel::create(dims);
        for (int inst = 0; inst < 1000; ++inst) {
            RandomStream chan_rng(derive_seed(901, {static_cast<std::uint64_t>(dims.n_bs),
                                                    static_cast<std::uint64_t>(inst)}));
            RandomStream beam_rng(derive_seed(902, {static_cast<std::uint64_t>(dims.n_bs),
                                                    static_cast<std::uint64_t>(inst)}));
            const auto paths = draw_paths(2, 1.0, chan_rng);
            const ChannelRealization channel = assemble_channel(paths, dims);
            const Eigen::VectorXcd v =
                vec(virtual_channel(channel, model.bs_codebook, model.ue_codebook));

            const double power = 1.7;
            MeasurementLedger ledger = make_ledger(dims, power, dims.r_bs);
            for (int slot = 1; slot <= 3; ++slot) {
                const BeamSelection bs_sel =
                    select_beams(beam_rng, dims.n_bs, dims.r_bs, ArraySide::BS);
                const BeamSelection ue_sel =
                    select_beams(beam_rng, dims.n_ue, dims.r_ue, ArraySide::UE);
                const PilotSymbols pilots = draw_pilots(beam_rng, dims.r_bs);
                append(ledger, observe(model, channel, bs_sel, ue_sel, pilots, power, 0.0,
                                       beam_rng, slot));
            }
            const Eigen::MatrixXcd a = dense_sensing_matrix(ledger);
            const double err = (ledger.stacked_y - ledger.scale * a * v).cwiseAbs().maxCoeff();
            worst = std::max(worst, err);
        }
    }
    if (worst > 1e-10) {
        return bad(fmt("max deviation %.3e exceeds 1e-10", worst));
    }
    return ok(fmt("2000 noiseless instances, max deviation %.3e", worst));
}

// --- 2. Codebook unitarity and quantized-phase membership. ------------------

Outcome criterion2() {
    double worst_gram = 0.0;
    double worst_phase = 0.0;
    const int sizes[] = {32, 16};
    const ArraySide sides[] = {ArraySide::BS, ArraySide::UE};
    for (int i = 0; i < 2; ++i) {
        const Codebook cb = build_codebook(sizes[i], sides[i]);
        const int n = cb.size();
        const Eigen::MatrixXcd gram = cb.matrix.adjoint() * cb.matrix;
        worst_gram = std::max(
            worst_gram, (gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff());
        // Every entry must sit on one of the n admissible phase-shifter
        // values: magnitude 1/sqrt(n), phase on the uniform grid.
        const double mag = 1.0 / std::sqrt(static_cast<double>(n));
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < n; ++r) {
                const cd e = cb.matrix(r, c);
                worst_phase = std::max(worst_phase, std::abs(std::abs(e) - mag));
                const double phase = std::arg(e);
                const double step = 2.0 * std::numbers::pi / n;
                const double k = std::round((phase + std::numbers::pi) / step);
                double delta = std::abs(phase - (-std::numbers::pi + k * step));
                delta = std::min(delta, std::abs(delta - 2.0 * std::numbers::pi));
                worst_phase = std::max(worst_phase, delta);
            }
        }
    }
    if (worst_gram > 1e-12) {
        return bad(fmt("Gram deviation %.3e exceeds 1e-12", worst_gram));
    }
    if (worst_phase > 1e-9) {
        return bad(fmt("phase-grid deviation %.3e exceeds 1e-9", worst_phase));
    }
    return ok(fmt("Gram deviation %.3e, phase deviation %.3e", worst_gram, worst_phase));
}

// --- 3. Closed-form denoiser equals numerical quadrature. -------------------

Outcome criterion3() {
    const double taus[] = {1e-2, 1e-1, 1.0, 10.0};
    const double rhos[] = {0.02, 0.1, 0.5};
    double worst = 0.0;
    int points = 0;
    for (const double tau : taus) {
        for (const double rho : rhos) {
            const BgPrior prior{rho, 1.0};
            const double span = 3.0 * std::sqrt(1.0 + tau);
            for (int a = -3; a <= 3; ++a) {
                for (int b = -3; b <= 3; ++b) {
                    const cd r(span * a / 3.0, span * b / 3.0);
                    const auto [mean, variance] = denoise_input(r, tau, prior);
                    const auto [ref_mean, ref_var] = reference_denoise_input(r, tau, prior);
                    worst = std::max(worst, std::abs(mean - ref_mean));
                    worst = std::max(worst, std::abs(variance - ref_var));
                    ++points;
                }
            }
        }
    }
    if (points < 500) {
        return bad(fmt("only %d grid points", points));
    }
    if (worst > 1e-6) {
        return bad(fmt("max moment deviation %.3e exceeds 1e-6", worst));
    }
    return ok(fmt("%d points, max moment deviation %.3e", points, worst));
}

// --- 4. GAMP tracks the exact posterior mean on small dense instances. ------

Outcome criterion4() {
    const int n = 6;
    const BgPrior prior{1.0 / 3.0, 1.0};
    const GampConfig config;
    int within = 0;
    for (int inst = 0; inst < 100; ++inst) {
        RandomStream rng(derive_seed(904, {static_cast<std::uint64_t>(inst)}));
        Eigen::MatrixXcd a(n, n);
        for (int c = 0; c < n; ++c) {
            for (int r = 0; r < n; ++r) {
                a(r, c) = rng.next_cgauss(1.0 / n);
            }
        }
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (rng.next_double() < prior.rho) {
                x(i) = rng.next_cgauss(prior.sigma_r);
            }
        }
        // Per-row signal power is rho*sigma_r; 20 dB SNR fixes the noise.
        const double noise_var = prior.rho * prior.sigma_r / 100.0;
        Eigen::VectorXcd y = a * x;
        for (int i = 0; i < n; ++i) {
            y(i) += rng.next_cgauss(noise_var);
        }
        const Eigen::VectorXcd oracle = exact_mmse_oracle(a, y, 1.0, noise_var, prior);
        const auto est = gamp_estimate_dense(a, y, 1.0, noise_var, prior, config);
        if (!est.has_value()) {
            continue;
        }
        const double ref_norm = oracle.norm();
        const double err = (est->v_hat - oracle).norm();
        if (ref_norm < 1e-12 ? err < 1e-12 : err <= 0.1 * ref_norm) {
            ++within;
        }
    }
    if (within < 90) {
        return bad(fmt("only %d/100 instances within 10%% of the exact posterior", within));
    }
    return ok(fmt("%d/100 instances within 10%% of the exact posterior", within));
}

// --- 5. Exhaustive sweep reads the virtual channel off exactly. -------------

Outcome criterion5() {
    const SystemModel model = SystemModel::create(SystemDims{});
    double worst = 0.0;
    for (int inst = 0; inst < 25; ++inst) {
        RandomStream rng(derive_seed(905, {static_cast<std::uint64_t>(inst)}));
        const auto paths =
            draw_paths_on_grid(2, 1.0, model.bs_codebook, model.ue_codebook, rng);
        const ChannelRealization channel = assemble_channel(paths, model.dims);
        const Eigen::MatrixXcd v_true =
            virtual_channel(channel, model.bs_codebook, model.ue_codebook);
        const MeasurementSeeds seeds{rng.next_u64(), rng.next_u64(), rng.next_u64()};
        const EstimationOutcome out = run_exhaustive(model, channel, seeds, 1.0, 1e-300);
        if (out.t_e != 128) {
            return bad(fmt("t_e = %d, expected 128", out.t_e));
        }
        const Eigen::MatrixXcd v_hat =
            unvec(out.estimate.v_hat, model.dims.n_ue, model.dims.n_bs);
        worst = std::max(worst, (v_hat - v_true).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-9) {
        return bad(fmt("max recovery error %.3e exceeds 1e-9", worst));
    }
    return ok(fmt("25 on-grid channels, t_e = 128, max recovery error %.3e", worst));
}

// Shared sweep shape for the trend criteria.
std::vector<AggregateRow> default_sweep(std::vector<SchemeSpec> schemes, std::vector<int> t_c_list,
                                        int n_trials) {
    ExperimentConfig cfg;
    cfg.schemes = std::move(schemes);
    cfg.t_c_list = std::move(t_c_list);
    cfg.n_trials = n_trials;
    cfg.validate();
    return aggregate(run_sweep(cfg));
}

const AggregateRow* find_row(const std::vector<AggregateRow>& rows, const std::string& label,
                             double snr_db, int t_c) {
    for (const AggregateRow& row : rows) {
        if (row.scheme.label() == label && row.snr_db == snr_db && row.t_c == t_c) {
            return &row;
        }
    }
    return nullptr;
}

// --- 6. Adaptive measurement count falls with SNR. --------------------------

Outcome criterion6() {
    const auto rows = default_sweep({SchemeSpec::parse("swift")}, {200}, 500);
    const ExperimentConfig defaults;
    std::vector<double> te;
    for (const double snr : defaults.snr_db_list) {
        const AggregateRow* row = find_row(rows, "swift", snr, 200);
        if (row == nullptr) {
            return bad(fmt("missing row at %.0f dB", snr));
        }
        te.push_back(row->mean_t_e);
    }
    std::ostringstream profile;
    for (std::size_t i = 0; i < te.size(); ++i) {
        profile << (i > 0 ? " " : "") << fmt("%.1f", te[i]);
    }
    const double t_max = defaults.t_max;
    if (!(te[1] >= 0.85 * t_max)) {
        return bad(fmt("mean t_e at -15 dB is %.2f < %.2f [%s]", te[1], 0.85 * t_max,
                       profile.str().c_str()));
    }
    if (!(te[7] <= 0.5 * t_max)) {
        return bad(fmt("mean t_e at +15 dB is %.2f > %.2f [%s]", te[7], 0.5 * t_max,
                       profile.str().c_str()));
    }
    int violations = 0;
    double worst_rise = 0.0;
    for (std::size_t i = 0; i + 1 < te.size(); ++i) {
        if (te[i + 1] > te[i]) {
            ++violations;
            worst_rise = std::max(worst_rise, (te[i + 1] - te[i]) / te[i]);
        }
    }
    if (violations > 1 || worst_rise > 0.05) {
        return bad(fmt("%d adjacent increases, worst %.2f%% [%s]", violations, 100.0 * worst_rise,
                       profile.str().c_str()));
    }
    // Fixed budgets spend exactly their budget regardless of channel draw.
    const auto fixed =
        default_sweep({SchemeSpec::parse("fnrb(32)"), SchemeSpec::parse("exhaustive")}, {200}, 10);
    for (const AggregateRow& row : fixed) {
        const double expect = row.scheme.kind == Scheme::Fnrb ? row.scheme.budget : 128;
        if (row.mean_t_e != expect) {
            return bad(fmt("fixed scheme %s mean t_e %.2f != %.0f", row.scheme.label().c_str(),
                           row.mean_t_e, expect));
        }
    }
    return ok(fmt("mean t_e [%s], -15 dB %.1f >= %.1f, +15 dB %.1f <= %.1f, %d rise(s)",
                  profile.str().c_str(), te[1], 0.85 * t_max, te[7], 0.5 * t_max, violations));
}

// --- 7. Effective-rate crossover and adaptive dominance. --------------------

Outcome criterion7() {
    ExperimentConfig defaults;
    const auto rows = default_sweep(defaults.schemes, {200, 400}, 500);
    const std::vector<std::string> baselines = {"fnrb(32)", "fnrb(64)", "fnrb(96)", "fnrb(128)",
                                                "exhaustive"};

    // (a) Budget crossover, training cost pooled over both coherence times:
    // the large budget must win at -10 dB and lose at +15 dB.
    auto pooled = [&](const std::string& label, double snr) {
        double sum = 0.0;
        for (const int t_c : {200, 400}) {
            const AggregateRow* row = find_row(rows, label, snr, t_c);
            sum += row != nullptr ? row->mean_r_eff : 0.0;
        }
        return sum / 2.0;
    };
    const double low_128 = pooled("fnrb(128)", -10.0);
    const double low_32 = pooled("fnrb(32)", -10.0);
    const double high_128 = pooled("fnrb(128)", 15.0);
    const double high_32 = pooled("fnrb(32)", 15.0);
    if (!(low_128 > low_32)) {
        return bad(fmt("no low-SNR crossover: fnrb(128) %.3f <= fnrb(32) %.3f at -10 dB", low_128,
                       low_32));
    }
    if (!(high_32 > high_128)) {
        return bad(fmt("no high-SNR crossover: fnrb(32) %.3f <= fnrb(128) %.3f at +15 dB",
                       high_32, high_128));
    }

    // (b) The adaptive scheme holds 95% of the best baseline everywhere.
    std::ostringstream fails;
    int n_fail = 0;
    double worst_ratio = 2.0;
    for (const int t_c : {200, 400}) {
        for (const double snr : defaults.snr_db_list) {
            const AggregateRow* swift = find_row(rows, "swift", snr, t_c);
            if (swift == nullptr) {
                return bad(fmt("missing swift row at %.0f dB, t_c %d", snr, t_c));
            }
            double best = 0.0;
            for (const std::string& label : baselines) {
                const AggregateRow* row = find_row(rows, label, snr, t_c);
                best = std::max(best, row != nullptr ? row->mean_r_eff : 0.0);
            }
            const double ratio = best > 0.0 ? swift->mean_r_eff / best : 1.0;
            worst_ratio = std::min(worst_ratio, ratio);
            if (swift->mean_r_eff < 0.95 * best) {
                ++n_fail;
                fails << fmt(" (%.0f dB, t_c %d: %.3f vs 0.95*%.3f)", snr, t_c,
                             swift->mean_r_eff, best);
            }
        }
    }
    if (n_fail > 0) {
        return bad(fmt("crossover holds but %d/18 dominance points fail:%s", n_fail,
                       fails.str().c_str()));
    }
    return ok(fmt("crossover at -10/+15 dB holds, dominance holds at all 18 points, worst "
                  "ratio %.3f",
                  worst_ratio));
}

// --- 8. Noiseless on-grid runs stop early and hit the aligned-beam rate. ----

Outcome criterion8() {
    ExperimentConfig cfg;
    cfg.on_grid = true;
    cfg.l_paths = 1;
    cfg.n_trials = 100;
    cfg.snr_db_list = {40.0};
    cfg.t_c_list = {200};
    cfg.schemes = {SchemeSpec::parse("swift")};
    cfg.validate();
    const std::vector<TrialResult> results = run_sweep(cfg);

    const SystemModel model = SystemModel::create(cfg.dims);
    const double noise_var = std::pow(10.0, -cfg.snr_db_list[0] / 10.0);
    const double gain = cfg.dims.n_bs * cfg.dims.n_ue;
    int converged = 0;
    int rate_ok = 0;
    for (const TrialResult& res : results) {
        if (res.stop_reason != StopReason::Converged) {
            continue;
        }
        ++converged;
        const TrialSetup setup = make_trial_setup(model, cfg, 0, 0, res.trial_index, res.user_id);
        const double a2 = std::norm(setup.channel.paths.at(0).alpha);
        const double closed_form = std::log2(1.0 + setup.power / noise_var * gain * a2);
        if (std::abs(res.r_opt - closed_form) <= 1e-6 * closed_form) {
            ++rate_ok;
        }
    }
    if (converged < 95) {
        return bad(fmt("only %d/100 trials converged", converged));
    }
    if (rate_ok < converged) {
        return bad(fmt("%d/%d converged trials match the closed-form rate", rate_ok, converged));
    }
    return ok(fmt("%d/100 converged, all matching the closed-form rate to 1e-6", converged));
}

// --- 9. Sweeps are byte-reproducible. ----------------------------------------

Outcome criterion9() {
    ExperimentConfig cfg;
    cfg.n_trials = 5;
    cfg.snr_db_list = {-10.0, 10.0};
    cfg.t_c_list = {200};
    cfg.validate();
    const std::string first = format_csv(aggregate(run_sweep(cfg)));
    const std::string second = format_csv(aggregate(run_sweep(cfg)));
    if (first != second) {
        return bad("two identical-config sweeps produced different CSV bytes");
    }
    cfg.workers = 3;
    const std::string threaded = format_csv(aggregate(run_sweep(cfg)));
    if (threaded != first) {
        return bad("worker count changed the CSV bytes");
    }
    return ok(fmt("identical CSV across repeat runs and worker counts (%zu bytes)",
                  first.size()));
}

struct Criterion {
    int number;
    const char* title;
    Outcome (*run)();
    double budget_s;
};

const Criterion kCriteria[] = {
    {1, "measurement identity", criterion1, 10.0},
    {2, "codebook unitarity and phase grid", criterion2, 1.0},
    {3, "denoiser quadrature oracle", criterion3, 30.0},
    {4, "exact posterior cross-check", criterion4, 120.0},
    {5, "exhaustive baseline readoff", criterion5, 10.0},
    {6, "adaptive measurement-count trend", criterion6, 1200.0},
    {7, "effective-rate crossover and dominance", criterion7, 2400.0},
    {8, "noiseless on-grid convergence and rate", criterion8, 300.0},
    {9, "byte-identical reproducibility", criterion9, 600.0},
};

} // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 9) {
            std::fprintf(stderr, "usage: %s [criterion 1..9]\n", argv[0]);
            return 2;
        }
    }
    bool all_pass = true;
    for (const Criterion& c : kCriteria) {
        if (only != 0 && c.number != only) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = bad(fmt("exception: %s", e.what()));
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (outcome.pass && elapsed > c.budget_s) {
            outcome = bad(fmt("%s; but %.1f s exceeds the %.0f s budget", outcome.detail.c_str(),
                              elapsed, c.budget_s));
        }
        std::printf("%s criterion %d: %s: %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                    c.number, c.title, outcome.detail.c_str(), elapsed);
        std::fflush(stdout);
        all_pass = all_pass && outcome.pass;
    }
    return all_pass ? 0 : 1;
}
