#pragma once

#include "kinchain/extensive.hpp"
#include "kinchain/field.hpp"

#include <array>

namespace kinchain {

// Central moment tensor P over a base grid.  Second order stores d*d entries
// per cell (alpha outer, beta inner); third order d*d*d.  The conditioning
// mask mirrors the means that enter the integrand.
struct MomentTensorField {
    int order = 2;
    std::array<int, 3> kinematic_orders{}; // deviation factor orders; [2] unused at order 2
    KinematicIndexSet base;
    std::vector<AxisGrid> axes;
    int components = 1;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    double time = 0.0;

    GridLayout layout() const { return GridLayout::of(axes); }
    std::int64_t cells() const { return static_cast<std::int64_t>(valid.size()); }
    int entries_per_cell() const {
        int n = 1;
        for (int i = 0; i < order; ++i) n *= components;
        return n;
    }
    double at2(std::int64_t cell, int a, int b) const {
        return values[static_cast<std::size_t>((cell * components + a) * components + b)];
    }
    double at3(std::int64_t cell, int a, int b, int c) const {
        return values[static_cast<std::size_t>(
            ((cell * components + a) * components + b) * components + c)];
    }
    bool is_valid(std::int64_t cell) const { return valid[static_cast<std::size_t>(cell)] != 0; }
};

// P^{a,b} with deviations in xi^a and xi^b, means conditioned on
// f.set \ drop.  Requires {a,b} within drop; a == b gives the same-order
// tensor, a != b the mixed one.
MomentTensorField central_moment2(const DistributionField& f, int a, int b,
                                  const KinematicIndexSet& drop);

// Mixed second-order tensor where the second deviation factor is a
// kinematical order that is not a grid axis: its conditional mean over the
// full index set (mf_b, base == f.set) stands in for the integral over the
// virtual axis.  Used for the P^{n,n+3}-style tensors of the rank-3 motion
// equations.
MomentTensorField central_moment2_virtual(const DistributionField& f, int a, const MeanField& mf_b,
                                          const KinematicIndexSet& drop);

// Third central moment with deviations in xi^a, xi^b, xi^c.
MomentTensorField central_moment3(const DistributionField& f, int a, int b, int c,
                                  const KinematicIndexSet& drop);

// Plain quadrature of f times a product of coordinate factors over the
// dropped axes; the independent raw-moment path used as an oracle for the
// moment identities.  Factors are (order, component) pairs.
struct RawFactor {
    int order = 0;
    int component = 0;
};
DistributionField raw_moment(const DistributionField& f, std::span<const RawFactor> factors,
                             const KinematicIndexSet& drop);

// Divergence of a second-order moment tensor along base axis `order`,
// contracting the derivative index with the chosen tensor slot:
//   slot 1: (div P)_alpha = d P_{alpha beta} / d xi_beta
//   slot 0: (div P)_alpha = d P_{beta alpha} / d xi_beta
// Central differences, one-sided at the boundary.
std::vector<double> divergence2(const MomentTensorField& P, int order, int contracted_slot);

} // namespace kinchain
