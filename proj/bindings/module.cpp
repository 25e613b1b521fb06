// SPDX-License-Identifier: Apache-2.0
//
// Python surface of the simulator: codebooks, the sparse estimator, the
// exact-posterior oracle, rate accounting, and the Monte Carlo sweep.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>
#include <string>

#include "swiftchan/channel.hpp"
#include "swiftchan/codebook.hpp"
#include "swiftchan/controller.hpp"
#include "swiftchan/evaluation.hpp"
#include "swiftchan/experiment.hpp"
#include "swiftchan/gamp.hpp"
#include "swiftchan/selfcheck.hpp"

namespace py = pybind11;

namespace {

swiftchan::ArraySide parse_side(const std::string& side) {
    if (side == "bs") {
        return swiftchan::ArraySide::BS;
    }
    if (side == "ue") {
        return swiftchan::ArraySide::UE;
    }
    throw std::invalid_argument("side must be 'bs' or 'ue'");
}

swiftchan::ExperimentConfig config_from_text(const std::string& text) {
    swiftchan::ExperimentConfig cfg = swiftchan::parse_config_text(text);
    cfg.validate();
    return cfg;
}

py::dict estimate_to_dict(const swiftchan::VirtualChannelEstimate& est) {
    py::dict out;
    out["v_hat"] = est.v_hat;
    out["v_var"] = est.v_var;
    out["iterations"] = est.iterations_used;
    out["converged"] = est.converged;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Adaptive mmWave channel-estimation simulator core";

    m.def(
        "build_codebook",
        [](int n, const std::string& side) {
            return swiftchan::build_codebook(n, parse_side(side)).matrix;
        },
        py::arg("n"), py::arg("side") = "bs",
        "Unitary candidate-beam matrix for an n-element array ('bs' or 'ue').");

    m.def(
        "steering_vector",
        [](double angle, int n) { return swiftchan::steering_vector(angle, n).entries; },
        py::arg("angle"), py::arg("n"),
        "Unit-norm array response of n half-wavelength-spaced elements.");

    m.def(
        "denoise_input",
        [](std::complex<double> r, double tau, double rho, double sigma_r) {
            swiftchan::BgPrior prior{rho, sigma_r};
            prior.validate();
            return swiftchan::denoise_input(r, tau, prior);
        },
        py::arg("r"), py::arg("tau"), py::arg("rho"), py::arg("sigma_r") = 1.0,
        "Posterior (mean, variance) of a spike-and-Gaussian scalar seen through "
        "additive complex Gaussian noise of variance tau.");

    m.def(
        "gamp_dense",
        [](const Eigen::MatrixXcd& a, const Eigen::VectorXcd& y, double scale, double noise_var,
           double rho, double sigma_r, int max_iterations, double tolerance, double damping) {
            swiftchan::BgPrior prior{rho, sigma_r};
            swiftchan::GampConfig config;
            config.max_iterations = max_iterations;
            config.tolerance = tolerance;
            config.damping = damping;
            const auto est = swiftchan::gamp_estimate_dense(a, y, scale, noise_var, prior, config);
            if (!est.has_value()) {
                throw std::runtime_error("estimator diverged to non-finite values");
            }
            return estimate_to_dict(*est);
        },
        py::arg("a"), py::arg("y"), py::arg("scale"), py::arg("noise_var"), py::arg("rho"),
        py::arg("sigma_r") = 1.0, py::arg("max_iterations") = 300, py::arg("tolerance") = 1e-6,
        py::arg("damping") = 0.7,
        "Sparse Bayesian estimate of v from y = scale * a * v + noise.");

    m.def(
        "exact_mmse",
        [](const Eigen::MatrixXcd& a, const Eigen::VectorXcd& y, double scale, double noise_var,
           double rho, double sigma_r) {
            swiftchan::BgPrior prior{rho, sigma_r};
            return swiftchan::exact_mmse_oracle(a, y, scale, noise_var, prior);
        },
        py::arg("a"), py::arg("y"), py::arg("scale"), py::arg("noise_var"), py::arg("rho"),
        py::arg("sigma_r") = 1.0,
        "Exact posterior mean by support enumeration (at most 14 columns).");

    m.def("effective_rate", &swiftchan::effective_rate, py::arg("r_opt"), py::arg("t_e"),
          py::arg("t_c"), "Rate discounted by the fraction of the block spent training.");

    m.def("feedback_bits", &swiftchan::feedback_bits, py::arg("n_bs"), py::arg("n_paths"),
          "Uplink bits needed to feed back the selected beam indices.");

    m.def(
        "sweep_csv",
        [](const std::string& config_text) {
            const auto cfg = config_from_text(config_text);
            py::gil_scoped_release release;
            return swiftchan::format_csv(swiftchan::aggregate(swiftchan::run_sweep(cfg)));
        },
        py::arg("config_text"),
        "Run the Monte Carlo sweep described by flat key = value text and "
        "return the aggregated CSV.");

    m.def(
        "trial_rows",
        [](const std::string& config_text, int trial_index) {
            const auto cfg = config_from_text(config_text);
            if (trial_index < 0 || trial_index >= cfg.n_trials) {
                throw std::out_of_range("trial index out of range");
            }
            const swiftchan::SystemModel model = swiftchan::SystemModel::create(cfg.dims);
            py::list rows;
            for (std::size_t scheme_i = 0; scheme_i < cfg.schemes.size(); ++scheme_i) {
                for (std::size_t snr_i = 0; snr_i < cfg.snr_db_list.size(); ++snr_i) {
                    for (std::size_t tc_i = 0; tc_i < cfg.t_c_list.size(); ++tc_i) {
                        for (int user = 0; user < cfg.n_users; ++user) {
                            const auto r = swiftchan::run_single_trial(model, cfg, scheme_i,
                                                                       snr_i, tc_i, trial_index,
                                                                       user);
                            py::dict row;
                            row["scheme"] = r.scheme.label();
                            row["snr_db"] = r.snr_db;
                            row["t_c"] = r.t_c;
                            row["user"] = r.user_id;
                            row["t_e"] = r.t_e;
                            row["converged"] =
                                r.stop_reason == swiftchan::StopReason::Converged;
                            row["r_opt"] = r.r_opt;
                            row["r_eff"] = r.r_eff;
                            row["support_correct"] = r.support_correct;
                            rows.append(row);
                        }
                    }
                }
            }
            return rows;
        },
        py::arg("config_text"), py::arg("trial_index") = 0,
        "Per-(scheme, SNR, coherence time, user) results of one seeded trial.");

    m.def(
        "selftest",
        []() {
            py::list out;
            for (const auto& r : swiftchan::run_selftests()) {
                out.append(py::make_tuple(r.name, r.passed, r.detail));
            }
            return out;
        },
        "Built-in verification suite; returns (name, passed, detail) tuples.");
}
