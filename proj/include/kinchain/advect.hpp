#pragma once

#include "kinchain/closure.hpp"
#include "kinchain/field.hpp"

namespace kinchain {

// One conservative semi-Lagrangian sweep along a single scalar dim:
// RK2 backward trace, 4-point cubic interpolation (zero outside the box),
// and a midpoint compressibility factor exp(-dt * du/dxi) so the sweep
// solves d f/dt + d(f u)/dxi = 0 rather than the advective form.  Sweeps
// whose velocity does not vary along the swept dim reduce to plain
// interpolation.  Throws NumericalGuardError when any displacement exceeds a
// third of the domain length.
DistributionField sl_sweep(const DistributionField& f, int dim, std::span<const double> velocity,
                           double dt);

// First-rank chain step: d f^n/dt + div(f^n <xi^{n+1}>_n) = 0.
DistributionField step_rank1(const DistributionField& f, const MeanField& mf, double dt);

// Rank-2 first group {n, n+1}: Strang half-sweep along xi^n with the
// coordinate velocity xi^{n+1}, full sweep along xi^{n+1} with the closure
// re-evaluated at the stage midpoint, half-sweep along xi^n again.
DistributionField step_rank2_first_group(const DistributionField& f, const Closure& closure,
                                         double dt);

// Rank-2 second group {n, n+k}, k > 1: both axes advected by supplied mean
// fields (the chain gives them no dynamic law of their own).
DistributionField step_rank2_second_group(const DistributionField& f, const MeanField& mf_low,
                                          const MeanField& mf_high, double dt);

// Rank-3 first group {n, n+1, n+2}: palindromic Strang composition with
// coordinate advection on the two lower axes and the closure on the top one.
DistributionField step_rank3_first_group(const DistributionField& f, const Closure& closure,
                                         double dt);

} // namespace kinchain
