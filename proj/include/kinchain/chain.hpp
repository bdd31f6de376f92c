#pragma once

#include "kinchain/extensive.hpp"
#include "kinchain/field.hpp"

namespace kinchain {

// S = Ln f carried as the real branch: ln|f| plus a per-cell sign.  The
// imaginary part i*pi on negative cells is represented by sign -1 and never
// stored as a complex number; zero-masked cells get sign 0.
struct EntropyField {
    KinematicIndexSet base;
    std::vector<AxisGrid> axes;
    std::vector<double> log_abs;
    std::vector<std::int8_t> sign_mask;
    double time = 0.0;

    GridLayout layout() const { return GridLayout::of(axes); }
};

EntropyField entropy_field(const DistributionField& f);

// Q^p = div_{xi^p} of a mean kinematical value of order p+1.
struct DissipationField {
    int source_order = 0; // p
    KinematicIndexSet base;
    std::vector<AxisGrid> axes;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    double time = 0.0;

    GridLayout layout() const { return GridLayout::of(axes); }
};

DissipationField dissipation_source(const MeanField& mf, int p);

// One advection entry of a pi operator: the velocity multiplying the
// gradient along `axis_order`.  Coordinate velocities are passed as the
// degenerate coordinate means (see coordinate_mean).
struct PiTerm {
    int axis_order = 0;
    MeanField velocity;
};

// pi phi = (phi_plus - phi_minus)/dt + sum_terms u . grad(phi_mid), with the
// transport gradients taken by central differences of the pair midpoint.
// Returns the per-cell value together with the validity mask accumulated
// from the velocity fields.
struct PiResult {
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
};
PiResult apply_pi(const DistributionField& phi_minus, const DistributionField& phi_plus,
                  double dt, std::span<const PiTerm> terms);

// Component-wise variant for vector fields.
struct PiVectorResult {
    std::vector<double> values; // cells x components
    std::vector<std::uint8_t> valid;
};
PiVectorResult apply_pi(const MeanField& phi_minus, const MeanField& phi_plus, double dt,
                        std::span<const PiTerm> terms);

// Residual of the logarithmic chain form  pi S + sum Q = 0  on unmasked
// cells, with its density-weighted L2 norm.
struct LogChainResidual {
    DistributionField residual; // zero on masked cells
    std::vector<std::uint8_t> valid;
    double norm = 0.0;
    double max_abs = 0.0;
    double mask_fraction = 0.0;
    bool mask_warning = false; // more than half the grid masked
};
LogChainResidual chain_log_residual(const DistributionField& f_minus,
                                    const DistributionField& f_plus,
                                    std::span<const PiTerm> advection,
                                    std::span<const DissipationField> dissipation, double dt);

// Density-weighted L2 norm over unmasked cells:
//   sqrt( sum w |rho| r^2 / sum w |rho| ).
double weighted_l2(std::span<const double> residual, std::span<const double> density,
                   std::span<const std::uint8_t> valid, const GridLayout& layout, int components);

} // namespace kinchain
