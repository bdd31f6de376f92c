#pragma once

#include "kinchain/chain.hpp"
#include "kinchain/field.hpp"

#include <utility>

namespace kinchain {

// Boltzmann H over an index set: H = <ln|f|>_0, together with the rank-0
// scalar f^0, the quasi-probability f^0_- carried by the negative-sign
// region, and any requested mean dissipation sources <Q^p>_0.
struct HReport {
    KinematicIndexSet set;
    double H = 0.0;
    double f0 = 0.0;
    double f0_minus = 0.0;
    std::vector<std::pair<int, double>> mean_Q; // (source order p, <Q^p>_0)
    double time = 0.0;
};

HReport h_function(const DistributionField& f, std::span<const DissipationField> qs = {});

// Residual of the H-theorem:  d(f^0 H)/dt  vs  -f^0 sum <Q^p>_0, with the
// time derivative centered over the pair and the sources evaluated on the
// pair midpoint.  Sign-indefinite fields are refused unless `wigner_mode`
// is set, in which case the real branch ln|f| is used and the f^0_- drift
// of the pair is reported alongside.
struct HTheoremResidual {
    double dH_term = 0.0;     // d(f^0 H)/dt
    double source_term = 0.0; // -f^0 sum <Q>_0
    double residual = 0.0;
    double f0_minus_drift = 0.0; // plus-minus difference (wigner mode)
};
HTheoremResidual h_theorem_residual(const DistributionField& f_minus,
                                    const DistributionField& f_plus,
                                    std::span<const DissipationField> qs, double dt,
                                    bool wigner_mode = false);

// Sign classification of a field: positive / negative / boundary (the
// discrete zero set) masks partition the grid; negative components are
// counted by face adjacency and each carries its own f^0_- contribution.
struct RegionDecomposition {
    std::vector<std::uint8_t> positive_mask;
    std::vector<std::uint8_t> negative_mask;
    std::vector<std::uint8_t> boundary_mask;
    int negative_component_count = 0;
    std::vector<int> component_of;            // -1 outside negative cells
    std::vector<double> component_f0_minus;   // per component
    std::int64_t interface_face_count = 0;    // faces where the sign flips
};
RegionDecomposition negative_region(const DistributionField& f);

// f^0_- time series of a snapshot sequence with its drift from t = 0.
struct F0MinusTrack {
    std::vector<double> times;
    std::vector<double> values;
    double max_abs_drift = 0.0;
};
F0MinusTrack track_f0_minus(std::span<const DistributionField> series);

} // namespace kinchain
