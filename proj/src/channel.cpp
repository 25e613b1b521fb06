// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/channel.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <utility>

namespace swiftchan {

void SystemDims::validate() const {
    if (n_bs < 2 || n_ue < 2) {
        throw std::invalid_argument("SystemDims: array sizes must be >= 2");
    }
    if (n_bs % 2 != 0 || n_ue % 2 != 0) {
        throw std::invalid_argument("SystemDims: array sizes must be even");
    }
    if (r_bs < 1 || r_bs > n_bs || r_ue < 1 || r_ue > n_ue) {
        throw std::invalid_argument("SystemDims: chain counts must satisfy 1 <= r <= n");
    }
}

SteeringVector steering_vector(double epsilon, int n_elements) {
    if (n_elements < 1) {
        throw std::invalid_argument("steering_vector: n_elements must be positive");
    }
    SteeringVector sv;
    sv.angle = epsilon;
    sv.entries.resize(n_elements);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n_elements));
    const double step = std::numbers::pi * std::cos(epsilon);
    for (int k = 0; k < n_elements; ++k) {
        sv.entries(k) = std::polar(amp, step * static_cast<double>(k));
    }
    return sv;
}

std::vector<PathParameters> draw_paths(int n_paths, double sigma_r, RandomStream& rng) {
    if (n_paths < 1) {
        throw std::invalid_argument("draw_paths: n_paths must be positive");
    }
    if (sigma_r <= 0.0) {
        throw std::invalid_argument("draw_paths: sigma_r must be positive");
    }
    std::vector<PathParameters> paths(static_cast<std::size_t>(n_paths));
    for (auto& p : paths) {
        p.aod = 2.0 * std::numbers::pi * rng.next_double();
        p.aoa = 2.0 * std::numbers::pi * rng.next_double();
        p.alpha = rng.next_cgauss(sigma_r);
    }
    return paths;
}

std::vector<PathParameters> draw_paths_on_grid(int n_paths, double sigma_r, const Codebook& bs_cb,
                                               const Codebook& ue_cb, RandomStream& rng) {
    if (n_paths < 1) {
        throw std::invalid_argument("draw_paths_on_grid: n_paths must be positive");
    }
    if (sigma_r <= 0.0) {
        throw std::invalid_argument("draw_paths_on_grid: sigma_r must be positive");
    }
    const long capacity = static_cast<long>(bs_cb.size()) * static_cast<long>(ue_cb.size());
    if (n_paths > capacity) {
        throw std::invalid_argument("draw_paths_on_grid: more paths than grid bins");
    }
    std::vector<PathParameters> paths;
    paths.reserve(static_cast<std::size_t>(n_paths));
    std::set<std::pair<int, int>> used;
    for (int l = 0; l < n_paths; ++l) {
        int bs_bin = 0;
        int ue_bin = 0;
        do {
            bs_bin = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(bs_cb.size())));
            ue_bin = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ue_cb.size())));
        } while (!used.insert({bs_bin, ue_bin}).second);
        PathParameters p;
        p.aod = bs_cb.grid_angle(bs_bin);
        p.aoa = ue_cb.grid_angle(ue_bin);
        p.alpha = rng.next_cgauss(sigma_r);
        paths.push_back(p);
    }
    return paths;
}

ChannelRealization assemble_channel(const std::vector<PathParameters>& paths,
                                    const SystemDims& dims) {
    if (paths.empty()) {
        throw std::invalid_argument("assemble_channel: path list must be non-empty");
    }
    ChannelRealization out;
    out.paths = paths;
    out.h = Eigen::MatrixXcd::Zero(dims.n_ue, dims.n_bs);
    const double gain = std::sqrt(static_cast<double>(dims.n_bs) * static_cast<double>(dims.n_ue));
    for (const auto& p : paths) {
        const Eigen::VectorXcd rx = steering_vector(p.aoa, dims.n_ue).entries;
        const Eigen::VectorXcd tx = steering_vector(p.aod, dims.n_bs).entries;
        out.h.noalias() += (gain * p.alpha) * rx * tx.adjoint();
    }
    return out;
}

Eigen::MatrixXcd virtual_channel(const ChannelRealization& channel, const Codebook& bs_cb,
                                 const Codebook& ue_cb) {
    if (channel.h.rows() != ue_cb.matrix.rows() || channel.h.cols() != bs_cb.matrix.rows()) {
        throw std::invalid_argument("virtual_channel: codebook dimensions do not match channel");
    }
    return ue_cb.matrix.adjoint() * channel.h * bs_cb.matrix;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, int rows, int cols) {
    if (v.size() != static_cast<long>(rows) * static_cast<long>(cols)) {
        throw std::invalid_argument("unvec: size mismatch");
    }
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), rows, cols);
}

} // namespace swiftchan
