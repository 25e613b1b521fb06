// SPDX-License-Identifier: Apache-2.0

#ifndef SWIFTCHAN_MEASUREMENT_HPP
#define SWIFTCHAN_MEASUREMENT_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "swiftchan/channel.hpp"
#include "swiftchan/codebook.hpp"
#include "swiftchan/rng.hpp"

namespace swiftchan {

// Dims plus the two candidate codebooks, built once and shared read-only.
struct SystemModel {
    SystemDims dims;
    Codebook bs_codebook;
    Codebook ue_codebook;

    static SystemModel create(const SystemDims& dims);
};

// Candidate columns active in one timeslot on one side. Indices are 0-based
// and distinct; order matters on the BS side (pairs with pilot positions).
struct BeamSelection {
    std::vector<int> indices;
    ArraySide side = ArraySide::BS;

    int count() const { return static_cast<int>(indices.size()); }
};

// One unit-modulus pilot symbol per active transmit chain.
struct PilotSymbols {
    Eigen::VectorXcd symbols;
};

// Everything one timeslot produced. The selections plus pilots determine the
// slot's sensing rows exactly, so no matrix is stored here.
struct MeasurementRecord {
    int timeslot = 0; // 1-based slot counter
    Eigen::VectorXcd y;
    BeamSelection bs_selection;
    BeamSelection ue_selection;
    PilotSymbols pilots;
};

// Accumulated linear system y = scale * A * vec(H_v) + noise for one user.
// The sensing matrix lives implicitly in the records; dense_sensing_matrix
// materializes it on demand.
struct MeasurementLedger {
    SystemDims dims;
    std::vector<MeasurementRecord> records;
    Eigen::VectorXcd stacked_y;
    double scale = 1.0; // sqrt(power / active transmit chains)

    int rows() const { return static_cast<int>(stacked_y.size()); }
};

MeasurementLedger make_ledger(const SystemDims& dims, double power, int active_tx_chains);

// Uniform sampling of r distinct candidate indices out of n (each index has
// marginal inclusion probability r/n).
BeamSelection select_beams(RandomStream& rng, int n, int r, ArraySide side);

// QPSK pilots, one per transmit chain.
PilotSymbols draw_pilots(RandomStream& rng, int r_bs);

// Simulates one timeslot: y = sqrt(power/|bs_sel|) * W_m^H H F_m s + n with
// n ~ CN(0, noise_var I). Power splits over the active transmit chains.
MeasurementRecord observe(const SystemModel& model, const ChannelRealization& channel,
                          const BeamSelection& bs_sel, const BeamSelection& ue_sel,
                          const PilotSymbols& pilots, double power, double noise_var,
                          RandomStream& rng, int timeslot);

// Unscaled sensing rows of one timeslot: the r_ue x (n_bs*n_ue) matrix
// (s^T F_m^T F_c^*) kron (W_m^H W_c), computed from the codebook products.
Eigen::MatrixXcd sensing_block(const Codebook& bs_cb, const Codebook& ue_cb,
                               const BeamSelection& bs_sel, const BeamSelection& ue_sel,
                               const PilotSymbols& pilots);

// Appends a record; timeslots must arrive in order 1, 2, 3, ...
void append(MeasurementLedger& ledger, const MeasurementRecord& record);

// Stacks the sensing blocks of all records. With orthonormal codebooks row
// (t, j) has exactly |bs_sel| nonzeros: pilot s_k at column
// bs_sel[k]*n_ue + ue_sel[j]. This uses that indicator form directly.
Eigen::MatrixXcd dense_sensing_matrix(const MeasurementLedger& ledger);

} // namespace swiftchan

#endif
