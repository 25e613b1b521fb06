// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace swiftchan {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::string current;
    std::istringstream in(s);
    while (std::getline(in, current, ',')) {
        const std::string t = trim(current);
        if (!t.empty()) {
            items.push_back(t);
        }
    }
    return items;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad integer '" + value + "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument("trailing characters");
        }
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': bad unsigned '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") {
        return true;
    }
    if (value == "0" || value == "false") {
        return false;
    }
    throw std::invalid_argument("config key '" + key + "': bad boolean '" + value + "'");
}

std::string format_sig6(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Role tags keep the derived substreams of one trial disjoint.
constexpr std::uint64_t kRoleBs = 1;
constexpr std::uint64_t kRoleChannel = 2;
constexpr std::uint64_t kRoleUe = 3;
constexpr std::uint64_t kRoleNoise = 4;

// Nearest codebook bin of a path, measured where the array actually
// resolves angles: in cos space, where the grid is uniform.
int nearest_bin(double angle, int n) {
    const double x = (std::cos(angle) + 1.0) * static_cast<double>(n) / 2.0;
    const long bin = std::lround(x);
    return static_cast<int>(std::clamp(bin, 0L, static_cast<long>(n) - 1L));
}

long vectorized_bin(const PathParameters& p, const SystemDims& dims) {
    return static_cast<long>(nearest_bin(p.aod, dims.n_bs)) * dims.n_ue +
           nearest_bin(p.aoa, dims.n_ue);
}

bool score_support(const ExperimentConfig& cfg, const ChannelRealization& channel,
                   const VirtualChannelEstimate& estimate) {
    // Same aligned-entry amplitude scale as the stopping rule.
    const double v_scale = std::sqrt(cfg.sigma_r * static_cast<double>(cfg.dims.n_bs) *
                                     cfg.dims.n_ue / static_cast<double>(cfg.l_paths));
    const auto bits = binarize(estimate, cfg.gamma, v_scale).bits;
    if (cfg.on_grid) {
        // Exact support match: every path bin active, nothing else.
        Eigen::VectorX<std::uint8_t> truth = Eigen::VectorX<std::uint8_t>::Zero(bits.size());
        for (const auto& p : channel.paths) {
            truth(vectorized_bin(p, cfg.dims)) = 1;
        }
        return (bits.array() == truth.array()).all();
    }
    // Off the grid an exact support is undefined; score whether the largest
    // estimated entry lands in the dominant path's nearest bin.
    const auto dominant = std::max_element(
        channel.paths.begin(), channel.paths.end(),
        [](const auto& a, const auto& b) { return std::abs(a.alpha) < std::abs(b.alpha); });
    long best = 0;
    estimate.v_hat.cwiseAbs().maxCoeff(&best);
    return best == vectorized_bin(*dominant, cfg.dims);
}

} // namespace

std::string SchemeSpec::label() const {
    switch (kind) {
    case Scheme::Swift:
        return "swift";
    case Scheme::Exhaustive:
        return "exhaustive";
    case Scheme::Fnrb:
        return "fnrb(" + std::to_string(budget) + ")";
    }
    return "?";
}

SchemeSpec SchemeSpec::parse(const std::string& text) {
    const std::string t = trim(text);
    if (t == "swift") {
        return {Scheme::Swift, 0};
    }
    if (t == "exhaustive") {
        return {Scheme::Exhaustive, 0};
    }
    if (t.rfind("fnrb(", 0) == 0 && t.back() == ')') {
        const std::string inner = t.substr(5, t.size() - 6);
        const int budget = parse_int("schemes", inner);
        if (budget < 1) {
            throw std::invalid_argument("schemes: fnrb budget must be positive");
        }
        return {Scheme::Fnrb, budget};
    }
    throw std::invalid_argument("schemes: unknown descriptor '" + t +
                                "' (expected swift, fnrb(<n>), or exhaustive)");
}

ExperimentConfig::ExperimentConfig()
    : schemes{{Scheme::Swift, 0},
              {Scheme::Fnrb, 32},
              {Scheme::Fnrb, 64},
              {Scheme::Fnrb, 96},
              {Scheme::Fnrb, 128},
              {Scheme::Exhaustive, 0}} {}

int ExperimentConfig::effective_max_streams() const {
    return max_streams > 0 ? max_streams : std::min(dims.r_bs, dims.r_ue);
}

void ExperimentConfig::validate() const {
    dims.validate();
    gamp.validate();
    const long n = static_cast<long>(dims.n_bs) * dims.n_ue;
    if (n_users < 1) {
        throw std::invalid_argument("config: n_users must be positive");
    }
    if (l_paths < 1 || l_paths > n) {
        throw std::invalid_argument("config: l_paths must be in [1, n_bs*n_ue]");
    }
    if (!(sigma_r > 0.0)) {
        throw std::invalid_argument("config: sigma_r must be positive");
    }
    StoppingConfig{gamma, sigma_r, t_u, t_max}.validate();
    if (snr_db_list.empty()) {
        throw std::invalid_argument("config: snr_db_list must be non-empty");
    }
    if (t_c_list.empty()) {
        throw std::invalid_argument("config: t_c_list must be non-empty");
    }
    for (const int tc : t_c_list) {
        if (tc < 1) {
            throw std::invalid_argument("config: t_c values must be positive");
        }
    }
    if (n_trials < 1) {
        throw std::invalid_argument("config: n_trials must be positive");
    }
    if (schemes.empty()) {
        throw std::invalid_argument("config: schemes must be non-empty");
    }
    for (const auto& s : schemes) {
        if (s.kind == Scheme::Fnrb && s.budget < 1) {
            throw std::invalid_argument("config: fnrb budget must be positive");
        }
        if (s.kind == Scheme::Exhaustive && dims.n_ue % dims.r_ue != 0) {
            throw std::invalid_argument("config: exhaustive scheme needs r_ue dividing n_ue");
        }
    }
    if (workers < 1) {
        throw std::invalid_argument("config: workers must be positive");
    }
    if (max_streams < 0) {
        throw std::invalid_argument("config: max_streams must be nonnegative");
    }
}

void set_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "n_bs") {
        cfg.dims.n_bs = parse_int(key, value);
    } else if (key == "n_ue") {
        cfg.dims.n_ue = parse_int(key, value);
    } else if (key == "r_bs") {
        cfg.dims.r_bs = parse_int(key, value);
    } else if (key == "r_ue") {
        cfg.dims.r_ue = parse_int(key, value);
    } else if (key == "n_users") {
        cfg.n_users = parse_int(key, value);
    } else if (key == "l_paths") {
        cfg.l_paths = parse_int(key, value);
    } else if (key == "sigma_r") {
        cfg.sigma_r = parse_double(key, value);
    } else if (key == "gamma") {
        cfg.gamma = parse_double(key, value);
    } else if (key == "t_u") {
        cfg.t_u = parse_int(key, value);
    } else if (key == "t_max") {
        cfg.t_max = parse_int(key, value);
    } else if (key == "snr_db_list") {
        cfg.snr_db_list.clear();
        for (const auto& item : split_list(value)) {
            cfg.snr_db_list.push_back(parse_double(key, item));
        }
    } else if (key == "t_c_list") {
        cfg.t_c_list.clear();
        for (const auto& item : split_list(value)) {
            cfg.t_c_list.push_back(parse_int(key, item));
        }
    } else if (key == "n_trials") {
        cfg.n_trials = parse_int(key, value);
    } else if (key == "schemes") {
        cfg.schemes.clear();
        for (const auto& item : split_list(value)) {
            cfg.schemes.push_back(SchemeSpec::parse(item));
        }
    } else if (key == "master_seed") {
        cfg.master_seed = parse_u64(key, value);
    } else if (key == "on_grid") {
        cfg.on_grid = parse_bool(key, value);
    } else if (key == "workers") {
        cfg.workers = parse_int(key, value);
    } else if (key == "max_streams") {
        cfg.max_streams = parse_int(key, value);
    } else if (key == "max_iterations") {
        cfg.gamp.max_iterations = parse_int(key, value);
    } else if (key == "tolerance") {
        cfg.gamp.tolerance = parse_double(key, value);
    } else if (key == "damping") {
        cfg.gamp.damping = parse_double(key, value);
    } else if (key == "variance_floor") {
        cfg.gamp.variance_floor = parse_double(key, value);
    } else {
        throw std::invalid_argument("unknown config key: '" + key + "'");
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        set_config_key(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

TrialSetup make_trial_setup(const SystemModel& model, const ExperimentConfig& cfg,
                            std::size_t snr_i, std::size_t tc_i, int trial, int user) {
    const std::uint64_t s = snr_i;
    const std::uint64_t t = tc_i;
    const std::uint64_t tr = static_cast<std::uint64_t>(trial);
    const std::uint64_t us = static_cast<std::uint64_t>(user);

    TrialSetup setup;
    setup.power = 1.0;
    setup.noise_var = std::pow(10.0, -cfg.snr_db_list.at(snr_i) / 10.0);
    setup.prior.rho = static_cast<double>(cfg.l_paths) /
                      (static_cast<double>(cfg.dims.n_bs) * cfg.dims.n_ue);
    setup.prior.sigma_r = cfg.sigma_r;

    // The scheme index is deliberately absent from every path, and the user
    // index from the BS path: schemes are compared on identical channels and
    // broadcast randomness.
    setup.seeds.bs = derive_seed(cfg.master_seed, {kRoleBs, s, t, tr});
    setup.seeds.ue = derive_seed(cfg.master_seed, {kRoleUe, s, t, tr, us});
    setup.seeds.noise = derive_seed(cfg.master_seed, {kRoleNoise, s, t, tr, us});

    RandomStream channel_rng(derive_seed(cfg.master_seed, {kRoleChannel, s, t, tr, us}));
    const auto paths =
        cfg.on_grid
            ? draw_paths_on_grid(cfg.l_paths, cfg.sigma_r, model.bs_codebook, model.ue_codebook,
                                 channel_rng)
            : draw_paths(cfg.l_paths, cfg.sigma_r, channel_rng);
    setup.channel = assemble_channel(paths, cfg.dims);
    setup.channel.user_id = user;
    return setup;
}

TrialResult run_single_trial(const SystemModel& model, const ExperimentConfig& cfg,
                             std::size_t scheme_i, std::size_t snr_i, std::size_t tc_i, int trial,
                             int user) {
    const SchemeSpec& scheme = cfg.schemes.at(scheme_i);
    const TrialSetup setup = make_trial_setup(model, cfg, snr_i, tc_i, trial, user);

    // Gamma scales with the amplitude of an aligned virtual entry, which
    // carries the array gain on top of the per-path fading variance. Using
    // the raw path scale here would place the threshold deep inside the
    // estimator's detection noise and the support would never settle.
    const double v_scale = std::sqrt(cfg.sigma_r * static_cast<double>(cfg.dims.n_bs) *
                                     cfg.dims.n_ue / static_cast<double>(cfg.l_paths));

    EstimationOutcome outcome;
    switch (scheme.kind) {
    case Scheme::Swift:
        outcome = run_swift(model, setup.channel, setup.seeds, setup.power, setup.noise_var,
                            setup.prior, StoppingConfig{cfg.gamma, v_scale, cfg.t_u, cfg.t_max},
                            cfg.gamp);
        break;
    case Scheme::Fnrb:
        outcome = run_fnrb(model, setup.channel, setup.seeds, setup.power, setup.noise_var,
                           setup.prior, scheme.budget, cfg.gamp);
        break;
    case Scheme::Exhaustive:
        outcome = run_exhaustive(model, setup.channel, setup.seeds, setup.power, setup.noise_var);
        break;
    }

    const auto assignment =
        select_comm_beams(unvec(outcome.estimate.v_hat, cfg.dims.n_ue, cfg.dims.n_bs),
                          cfg.effective_max_streams(), cfg.gamma, v_scale);

    TrialResult result;
    result.scheme = scheme;
    result.snr_db = cfg.snr_db_list.at(snr_i);
    result.t_c = cfg.t_c_list.at(tc_i);
    result.trial_index = trial;
    result.user_id = user;
    result.t_e = outcome.t_e;
    result.stop_reason = outcome.stop_reason;
    result.r_opt = achievable_rate(setup.channel, assignment, setup.power, setup.noise_var,
                                   model.bs_codebook, model.ue_codebook);
    result.r_eff = effective_rate(result.r_opt, outcome.t_e, result.t_c);
    result.support_correct = score_support(cfg, setup.channel, outcome.estimate);
    return result;
}

std::vector<TrialResult> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const SystemModel model = SystemModel::create(cfg.dims);

    const std::size_t n_schemes = cfg.schemes.size();
    const std::size_t n_snr = cfg.snr_db_list.size();
    const std::size_t n_tc = cfg.t_c_list.size();
    const std::size_t n_tr = static_cast<std::size_t>(cfg.n_trials);
    const std::size_t n_us = static_cast<std::size_t>(cfg.n_users);
    const std::size_t total = n_schemes * n_snr * n_tc * n_tr * n_us;

    std::vector<TrialResult> results(total);
    std::atomic<std::size_t> cursor{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= total) {
                return;
            }
            try {
                std::size_t rest = i;
                const int user = static_cast<int>(rest % n_us);
                rest /= n_us;
                const int trial = static_cast<int>(rest % n_tr);
                rest /= n_tr;
                const std::size_t tc_i = rest % n_tc;
                rest /= n_tc;
                const std::size_t snr_i = rest % n_snr;
                const std::size_t scheme_i = rest / n_snr;
                results[i] = run_single_trial(model, cfg, scheme_i, snr_i, tc_i, trial, user);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                cursor.store(total);
                return;
            }
        }
    };

    const int n_workers = std::min<int>(cfg.workers, static_cast<int>(total));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
    return results;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results) {
    if (results.empty()) {
        return {};
    }
    std::vector<AggregateRow> rows;
    std::map<std::tuple<std::string, double, int>, std::size_t> index;
    for (const auto& r : results) {
        const auto key = std::make_tuple(r.scheme.label(), r.snr_db, r.t_c);
        auto it = index.find(key);
        if (it == index.end()) {
            AggregateRow row;
            row.scheme = r.scheme;
            row.snr_db = r.snr_db;
            row.t_c = r.t_c;
            it = index.emplace(key, rows.size()).first;
            rows.push_back(row);
        }
        AggregateRow& row = rows[it->second];
        row.mean_t_e += r.t_e;
        row.mean_r_opt += r.r_opt;
        row.mean_r_eff += r.r_eff;
        row.converged_frac += r.stop_reason == StopReason::Converged ? 1.0 : 0.0;
        row.support_acc += r.support_correct ? 1.0 : 0.0;
        row.n_trials += 1;
    }
    for (auto& row : rows) {
        const double n = static_cast<double>(row.n_trials);
        row.mean_t_e /= n;
        row.mean_r_opt /= n;
        row.mean_r_eff /= n;
        row.converged_frac /= n;
        row.support_acc /= n;
    }
    return rows;
}

void emit_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
    out << "scheme,snr_db,t_c,mean_t_e,mean_r_opt,mean_r_eff,converged_frac,support_acc,"
           "n_trials\n";
    for (const auto& row : rows) {
        out << row.scheme.label() << ',' << format_sig6(row.snr_db) << ',' << row.t_c << ','
            << format_sig6(row.mean_t_e) << ',' << format_sig6(row.mean_r_opt) << ','
            << format_sig6(row.mean_r_eff) << ',' << format_sig6(row.converged_frac) << ','
            << format_sig6(row.support_acc) << ',' << row.n_trials << '\n';
    }
}

std::string format_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    emit_csv(rows, out);
    return out.str();
}

} // namespace swiftchan
