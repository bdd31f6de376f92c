#pragma once

#include "kinchain/conservation.hpp"
#include "kinchain/field.hpp"
#include "kinchain/moments.hpp"
#include "kinchain/params.hpp"

namespace kinchain {

// Laguerre polynomial L_n(z) by the three-term recurrence; n <= 30 keeps the
// recurrence well conditioned for the oscillator states used here.
double laguerre(int n, double z);
inline constexpr int kMaxLaguerre = 30;

// Oscillator quasi-probability eigenstate on a {1,2} grid:
//   f_n(x,v) = (-1)^n (m / pi hbar) exp(-(m/(hbar w))(v^2 + w^2 x^2))
//              L_n( (2m/(hbar w)) (v^2 + w^2 x^2) ).
DistributionField wigner_oscillator(int n, const PhysicalParams& params,
                                    std::vector<AxisGrid> axes);

// Default oscillator box: +-8 sigma per axis.
std::vector<AxisGrid> oscillator_axes(const PhysicalParams& params, int points,
                                      double widths = 8.0);

// A rank-(R+1) state whose top variable is deterministically tied to the
// lower ones: f = base(lower) * delta(xi_top - g(lower)).  The delta factor
// is never sampled onto a grid; every integral against the state substitutes
// the map.
struct DeltaState {
    DistributionField base;         // over the lower axes
    int top_order = 0;
    std::vector<double> top_values; // g at the base nodes, cells x components
    int top_components = 1;

    double map_at(std::int64_t cell, int comp) const {
        return top_values[static_cast<std::size_t>(cell * top_components + comp)];
    }

    // Marginal over the top axis: just the base field.
    const DistributionField& marginal() const { return base; }

    // <xi^top> over the base set: exact, the map itself.
    MeanField top_mean() const;

    // Same-order second central moment of the top variable given a reference
    // mean on the base grid: (g - mean)^2-weighted base.  With the reference
    // equal to the map this is identically zero.
    MomentTensorField top_central_moment2(const MeanField& reference) const;
    MomentTensorField top_central_moment2() const; // reference = top_mean()
};

// The delta-closure oscillator state over {1,2,3}: base equals the n-th
// oscillator state in its sigma parameterization and the map is the linear
// restoring acceleration g(x,v) = -w^2 x.
DeltaState rank3_oscillator_state(int n, const PhysicalParams& params,
                                  std::vector<AxisGrid> axes12);

// One-velocity state over {1,2}: density rho(x) with map v = u(x).
DeltaState cold_state(const DistributionField& rho, const MeanField& u);

// Residual of the quantum-pressure identity on the interior of a rank-1
// positive density (3-node margin):
//   -(1/f1) d P^q / dx  ==  2 alpha^2 d/dx [ (1/sqrt f1) d^2 sqrt f1 / dx^2 ].
ResidualReport quantum_pressure_check(const DistributionField& f1, const MomentTensorField& P_q,
                                      const PhysicalParams& params);

} // namespace kinchain
