// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/selfcheck.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <sstream>

#include "swiftchan/evaluation.hpp"
#include "swiftchan/experiment.hpp"
#include "swiftchan/gamp.hpp"
#include "swiftchan/measurement.hpp"
#include "swiftchan/reference.hpp"

namespace swiftchan {

namespace {

CheckResult run_one(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r;
    r.name = name;
    try {
        r.detail = body();
        r.passed = r.detail.empty();
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

std::string check_codebook_algebra() {
    for (const int n : {16, 32}) {
        const Codebook cb = build_codebook(n, ArraySide::BS);
        const double gram_err =
            (cb.matrix.adjoint() * cb.matrix - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
        if (gram_err > 1e-12) {
            return "gram error " + std::to_string(gram_err) + " at n=" + std::to_string(n);
        }
        const auto phases = quantized_phase_set(n);
        for (int col = 0; col < n; ++col) {
            for (int k = 0; k < n; ++k) {
                double best = 1e9;
                for (const auto& ph : phases) {
                    best = std::min(best, std::abs(cb.matrix(k, col) - ph));
                }
                if (best > 1e-9) {
                    return "entry off the quantized grid at n=" + std::to_string(n);
                }
            }
        }
        for (int col = 0; col < n; ++col) {
            const auto sv = steering_vector(cb.grid_angle(col), n);
            if ((sv.entries - cb.matrix.col(col)).cwiseAbs().maxCoeff() > 1e-12) {
                return "column " + std::to_string(col) + " is not its grid steering vector";
            }
        }
    }
    return "";
}

std::string check_virtual_roundtrip() {
    const SystemDims dims{8, 4, 2, 2};
    const SystemModel model = SystemModel::create(dims);
    RandomStream rng(7);
    const auto channel = assemble_channel(draw_paths(3, 1.0, rng), dims);
    const Eigen::MatrixXcd h_v = virtual_channel(channel, model.bs_codebook, model.ue_codebook);
    const Eigen::MatrixXcd back =
        model.ue_codebook.matrix * h_v * model.bs_codebook.matrix.adjoint();
    const double rel = (back - channel.h).norm() / channel.h.norm();
    return rel <= 1e-12 ? "" : "roundtrip relative error " + std::to_string(rel);
}

std::string check_sensing_identity() {
    const SystemDims dims{8, 4, 2, 2};
    const SystemModel model = SystemModel::create(dims);
    RandomStream rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto channel = assemble_channel(draw_paths(2, 1.0, rng), dims);
        const auto bs_sel = select_beams(rng, dims.n_bs, dims.r_bs, ArraySide::BS);
        const auto ue_sel = select_beams(rng, dims.n_ue, dims.r_ue, ArraySide::UE);
        const auto pilots = draw_pilots(rng, dims.r_bs);
        const auto rec = observe(model, channel, bs_sel, ue_sel, pilots, 1.0, 0.0, rng, 1);
        const Eigen::MatrixXcd block =
            sensing_block(model.bs_codebook, model.ue_codebook, bs_sel, ue_sel, pilots);
        const Eigen::VectorXcd v =
            vec(virtual_channel(channel, model.bs_codebook, model.ue_codebook));
        const double scale = std::sqrt(1.0 / dims.r_bs);
        const double err = (scale * block * v - rec.y).cwiseAbs().maxCoeff();
        if (err > 1e-10) {
            return "instance " + std::to_string(i) + " error " + std::to_string(err);
        }
    }
    return "";
}

std::string check_denoiser_quadrature() {
    for (const double tau : {0.01, 0.1, 1.0, 10.0}) {
        for (const double rho : {0.05, 0.3, 0.9}) {
            const BgPrior prior{rho, 1.0};
            const std::complex<double> r{0.8 * std::sqrt(1.0 + tau), -0.4};
            const auto fast = denoise_input(r, tau, prior);
            const auto slow = reference_denoise_input(r, tau, prior);
            if (std::abs(fast.first - slow.first) > 1e-6 ||
                std::abs(fast.second - slow.second) > 1e-6) {
                std::ostringstream os;
                os << "mismatch at tau=" << tau << " rho=" << rho;
                return os.str();
            }
        }
    }
    return "";
}

std::string check_estimator_on_identity_stack() {
    const SystemDims dims{8, 4, 2, 4};
    const SystemModel model = SystemModel::create(dims);
    RandomStream rng(23);
    // On-grid path: the virtual channel is exactly one nonzero entry, so the
    // sparse prior matches the truth and the estimate isolates the sensing
    // plumbing rather than model mismatch.
    const auto channel = assemble_channel(
        draw_paths_on_grid(1, 1.0, model.bs_codebook, model.ue_codebook, rng), dims);
    const Eigen::VectorXcd truth =
        vec(virtual_channel(channel, model.bs_codebook, model.ue_codebook));

    // One beam at a time with pilot 1 makes the stacked sensing matrix the
    // identity, so the estimator faces a trivially well-posed system.
    MeasurementLedger ledger = make_ledger(dims, 1.0, 1);
    PilotSymbols one;
    one.symbols = Eigen::VectorXcd::Ones(1);
    int slot = 0;
    for (int b = 0; b < dims.n_bs; ++b) {
        BeamSelection bs_sel;
        bs_sel.side = ArraySide::BS;
        bs_sel.indices = {b};
        BeamSelection ue_sel;
        ue_sel.side = ArraySide::UE;
        ue_sel.indices = {0, 1, 2, 3};
        append(ledger, observe(model, channel, bs_sel, ue_sel, one, 1.0, 0.0, rng, ++slot));
    }

    const BgPrior prior{1.0 / (dims.n_bs * dims.n_ue),
                        static_cast<double>(dims.n_bs) * dims.n_ue};
    GampConfig cfg;
    cfg.max_iterations = 400;
    const auto est = gamp_estimate(ledger, 1e-8, prior, cfg);
    if (!est) {
        return "estimator reported failure";
    }
    const double rel = (est->v_hat - truth).norm() / truth.norm();
    return rel <= 1e-3 ? "" : "relative error " + std::to_string(rel);
}

std::string check_exact_mmse_lmmse_limit() {
    RandomStream rng(31);
    const int m = 6;
    const int n = 4;
    Eigen::MatrixXcd a(m, n);
    Eigen::VectorXcd y(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = rng.next_cgauss(1.0);
        }
        y(i) = rng.next_cgauss(1.0);
    }
    const double noise_var = 0.1;
    const BgPrior prior{1.0, 1.0};
    const Eigen::VectorXcd oracle = exact_mmse_oracle(a, y, 1.0, noise_var, prior);
    const Eigen::MatrixXcd cov =
        prior.sigma_r * a * a.adjoint() + noise_var * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::VectorXcd lmmse = prior.sigma_r * a.adjoint() * cov.llt().solve(y);
    const double err = (oracle - lmmse).cwiseAbs().maxCoeff();
    return err <= 1e-10 ? "" : "lmmse deviation " + std::to_string(err);
}

std::string check_aligned_rate_formula() {
    const SystemDims dims{32, 16, 8, 4};
    const SystemModel model = SystemModel::create(dims);
    RandomStream rng(41);
    const auto paths =
        draw_paths_on_grid(1, 1.0, model.bs_codebook, model.ue_codebook, rng);
    const auto channel = assemble_channel(paths, dims);
    const Eigen::MatrixXcd h_v = virtual_channel(channel, model.bs_codebook, model.ue_codebook);
    const auto assignment = select_comm_beams(h_v, 1, 0.1, 1.0);
    const double power = 1.0;
    const double noise_var = 0.5;
    const double rate = achievable_rate(channel, assignment, power, noise_var, model.bs_codebook,
                                        model.ue_codebook);
    const double expect =
        std::log2(1.0 + (power / noise_var) * dims.n_bs * dims.n_ue * std::norm(paths[0].alpha));
    const double rel = std::abs(rate - expect) / expect;
    return rel <= 1e-9 ? "" : "rate off closed form by relative " + std::to_string(rel);
}

} // namespace

std::vector<CheckResult> run_selftests() {
    std::vector<CheckResult> results;
    results.push_back(run_one("codebook_algebra", check_codebook_algebra));
    results.push_back(run_one("virtual_roundtrip", check_virtual_roundtrip));
    results.push_back(run_one("sensing_identity", check_sensing_identity));
    results.push_back(run_one("denoiser_quadrature", check_denoiser_quadrature));
    results.push_back(run_one("estimator_identity_stack", check_estimator_on_identity_stack));
    results.push_back(run_one("exact_mmse_lmmse_limit", check_exact_mmse_lmmse_limit));
    results.push_back(run_one("aligned_rate_formula", check_aligned_rate_formula));
    return results;
}

} // namespace swiftchan
