#pragma once

#include "kinchain/field.hpp"

namespace kinchain {

// f^{n\k}: trapezoid quadrature over every axis in `drop`; the box boundary
// is treated as infinity (fields decay fast and vanish outside).  Dropping
// the whole set yields the rank-0 scalar f^0.
DistributionField marginalize(const DistributionField& f, const KinematicIndexSet& drop);

// The rank-0 scalar of a field (number of particles / normalization).
double f0(const DistributionField& f);

// Mean kinematical value of order `ell` with base set f.set \ ({ell} U drop):
// numerator integrates xi^ell * f over the ell axis and the dropped axes,
// denominator is the matching marginal.  Cells whose marginal falls under the
// zero-mask threshold are flagged invalid.
MeanField mean_kinematic(const DistributionField& f, int ell, const KinematicIndexSet& drop);

// Additional averaging of an already-averaged value: integrates mf against
// the density over `drop` and renormalizes by the smaller marginal.  Cells
// masked in `mf` contribute zero measure to both numerator and denominator.
MeanField nested_average(const MeanField& mf, const DistributionField& f_weight,
                         const KinematicIndexSet& drop);

// Samples the coordinate xi^order as a MeanField over a grid that contains
// that axis (the degenerate average of a coordinate over itself).
MeanField coordinate_mean(const DistributionField& f, int order);

} // namespace kinchain
