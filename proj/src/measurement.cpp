// SPDX-License-Identifier: Apache-2.0

#include "swiftchan/measurement.hpp"

#include <complex>
#include <numeric>
#include <stdexcept>

namespace swiftchan {

SystemModel SystemModel::create(const SystemDims& dims) {
    dims.validate();
    SystemModel model;
    model.dims = dims;
    model.bs_codebook = build_codebook(dims.n_bs, ArraySide::BS);
    model.ue_codebook = build_codebook(dims.n_ue, ArraySide::UE);
    return model;
}

MeasurementLedger make_ledger(const SystemDims& dims, double power, int active_tx_chains) {
    if (power <= 0.0) {
        throw std::invalid_argument("make_ledger: power must be positive");
    }
    if (active_tx_chains < 1) {
        throw std::invalid_argument("make_ledger: need at least one transmit chain");
    }
    MeasurementLedger ledger;
    ledger.dims = dims;
    ledger.stacked_y.resize(0);
    ledger.scale = std::sqrt(power / static_cast<double>(active_tx_chains));
    return ledger;
}

BeamSelection select_beams(RandomStream& rng, int n, int r, ArraySide side) {
    if (r < 1 || r > n) {
        throw std::invalid_argument("select_beams: need 1 <= r <= n");
    }
    // Partial Fisher-Yates: the first r slots end up a uniform ordered sample
    // without replacement.
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    BeamSelection sel;
    sel.side = side;
    sel.indices.reserve(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        sel.indices.push_back(pool[static_cast<std::size_t>(i)]);
    }
    return sel;
}

PilotSymbols draw_pilots(RandomStream& rng, int r_bs) {
    if (r_bs < 1) {
        throw std::invalid_argument("draw_pilots: r_bs must be positive");
    }
    static const std::complex<double> kQpsk[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    PilotSymbols p;
    p.symbols.resize(r_bs);
    for (int i = 0; i < r_bs; ++i) {
        p.symbols(i) = kQpsk[rng.next_below(4)];
    }
    return p;
}

MeasurementRecord observe(const SystemModel& model, const ChannelRealization& channel,
                          const BeamSelection& bs_sel, const BeamSelection& ue_sel,
                          const PilotSymbols& pilots, double power, double noise_var,
                          RandomStream& rng, int timeslot) {
    if (bs_sel.count() < 1 || ue_sel.count() < 1) {
        throw std::invalid_argument("observe: empty beam selection");
    }
    if (pilots.symbols.size() != bs_sel.count()) {
        throw std::invalid_argument("observe: pilot count must match BS selection");
    }
    if (noise_var < 0.0) {
        throw std::invalid_argument("observe: noise_var must be nonnegative");
    }
    const double scale = std::sqrt(power / static_cast<double>(bs_sel.count()));

    Eigen::VectorXcd tx = Eigen::VectorXcd::Zero(model.dims.n_bs);
    for (int k = 0; k < bs_sel.count(); ++k) {
        tx += pilots.symbols(k) * model.bs_codebook.matrix.col(bs_sel.indices[static_cast<std::size_t>(k)]);
    }
    const Eigen::VectorXcd through = channel.h * tx;

    MeasurementRecord rec;
    rec.timeslot = timeslot;
    rec.bs_selection = bs_sel;
    rec.ue_selection = ue_sel;
    rec.pilots = pilots;
    rec.y.resize(ue_sel.count());
    for (int j = 0; j < ue_sel.count(); ++j) {
        const auto col = ue_sel.indices[static_cast<std::size_t>(j)];
        rec.y(j) = scale * model.ue_codebook.matrix.col(col).dot(through) +
                   rng.next_cgauss(noise_var);
    }
    return rec;
}

Eigen::MatrixXcd sensing_block(const Codebook& bs_cb, const Codebook& ue_cb,
                               const BeamSelection& bs_sel, const BeamSelection& ue_sel,
                               const PilotSymbols& pilots) {
    const int n_bs = bs_cb.size();
    const int n_ue = ue_cb.size();
    const int r_ue = ue_sel.count();
    if (pilots.symbols.size() != bs_sel.count()) {
        throw std::invalid_argument("sensing_block: pilot count must match BS selection");
    }

    // Row factor s^T F_m^T F_c^*: elementwise (F_c^H F_m s)_p, a 1 x n_bs row.
    Eigen::VectorXcd fm_s = Eigen::VectorXcd::Zero(n_bs);
    for (int k = 0; k < bs_sel.count(); ++k) {
        fm_s += pilots.symbols(k) * bs_cb.matrix.col(bs_sel.indices[static_cast<std::size_t>(k)]);
    }
    const Eigen::RowVectorXcd row_factor = (bs_cb.matrix.adjoint() * fm_s).transpose();

    // Column factor W_m^H W_c, r_ue x n_ue.
    Eigen::MatrixXcd wm(n_ue, r_ue);
    for (int j = 0; j < r_ue; ++j) {
        wm.col(j) = ue_cb.matrix.col(ue_sel.indices[static_cast<std::size_t>(j)]);
    }
    const Eigen::MatrixXcd col_factor = wm.adjoint() * ue_cb.matrix;

    Eigen::MatrixXcd block(r_ue, static_cast<long>(n_bs) * n_ue);
    for (int p = 0; p < n_bs; ++p) {
        block.middleCols(static_cast<long>(p) * n_ue, n_ue) = row_factor(p) * col_factor;
    }
    return block;
}

void append(MeasurementLedger& ledger, const MeasurementRecord& record) {
    const int expected = static_cast<int>(ledger.records.size()) + 1;
    if (record.timeslot != expected) {
        throw std::logic_error("append: out-of-order timeslot");
    }
    const auto old_rows = ledger.stacked_y.size();
    ledger.stacked_y.conservativeResize(old_rows + record.y.size());
    ledger.stacked_y.tail(record.y.size()) = record.y;
    ledger.records.push_back(record);
}

Eigen::MatrixXcd dense_sensing_matrix(const MeasurementLedger& ledger) {
    const long n = static_cast<long>(ledger.dims.n_bs) * ledger.dims.n_ue;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(ledger.rows(), n);
    long row = 0;
    for (const auto& rec : ledger.records) {
        for (int j = 0; j < rec.ue_selection.count(); ++j, ++row) {
            const long ue = rec.ue_selection.indices[static_cast<std::size_t>(j)];
            for (int k = 0; k < rec.bs_selection.count(); ++k) {
                const long bs = rec.bs_selection.indices[static_cast<std::size_t>(k)];
                a(row, bs * ledger.dims.n_ue + ue) = rec.pilots.symbols(k);
            }
        }
    }
    return a;
}

} // namespace swiftchan
