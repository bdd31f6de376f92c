#pragma once

#include "kinchain/chain.hpp"
#include "kinchain/moments.hpp"

#include <optional>
#include <string>

namespace kinchain {

enum class EquationId {
    eq3_2,
    eq3_3,
    eq3_8,
    eq3_9,
    eq3_13,
    eq3_14,
    eq3_15,
    eq3_17,
    eq3_18,
    eq3_19,
    eq3_20,
    eq3_22,
    quantum_pressure,
};

std::string to_string(EquationId id);
std::optional<EquationId> equation_from_string(const std::string& name);

struct ResidualReport {
    EquationId id{};
    KinematicIndexSet base;
    std::vector<AxisGrid> axes;
    int components = 1;
    std::vector<double> lhs, rhs;      // transport side / source side, cells x components
    std::vector<double> residual;      // lhs - rhs, zero on masked cells
    std::vector<std::uint8_t> valid;
    double residual_norm = 0.0;        // density-weighted L2 over unmasked cells
    double max_abs = 0.0;
    double mask_fraction = 0.0;
    bool mask_warning = false;         // more than half the grid masked
    double time = 0.0;
};

// Two snapshots bracketing the evaluation instant; time derivatives use the
// centered difference over the pair.
struct FieldPair {
    DistributionField minus;
    DistributionField plus;

    double dt() const { return plus.time - minus.time; }
    double mid_time() const { return 0.5 * (minus.time + plus.time); }
};

// One pressure-divergence term of a motion equation: the tensor, the base
// axis the divergence runs along, and which tensor slot is contracted with
// the derivative index.
struct PTermSpec {
    MomentTensorField P;
    int axis_order = 0;
    int contracted_slot = 0;
};

// Shared evaluation path for every first-order motion equation of the
// chain:  residual = Dt(advected) + sum u.grad(advected) + (1/f) sum div P
// - source.  All named equation evaluators assemble their inputs and call
// this, so formally degenerate pairs evaluate bitwise-identically on shared
// inputs.
ResidualReport motion_residual_core(EquationId id, const FieldPair& density_pair,
                                    const MeanField& advected_minus,
                                    const MeanField& advected_plus,
                                    std::span<const PiTerm> advection,
                                    std::span<const PTermSpec> p_terms, const MeanField& source);

// Momentum law 3.2 of a contiguous pair:
//   pi_n<xi^{n+1}>_n + (1/f^n) div P^{n+1} = <xi^{n+2}>_n,
// assembled from a rank-2 pair f^{n,n+1} and the closure mean <xi^{n+2}>_{n,n+1}
// at the pair midpoint.
ResidualReport momentum_residual_first(const FieldPair& f12, const MeanField& closure_mid);

// Momentum law 3.8 of a gapped pair, k > 1; P^{n+1,n+k}(n) and the advection mean come
// from the rank-3 midpoint field f^{n,n+1,n+k}; `high_rank2` is
// <xi^{n+k+1}>_{n,n+k} at the midpoint.
ResidualReport momentum_residual_second(const FieldPair& f_nk, const DistributionField& f3_mid,
                                        const MeanField& high_rank2);

// Energy law 3.3 on the rank-1 base.
ResidualReport energy_residual_first(const FieldPair& f12, const MeanField& closure_mid);

// Energy law 3.9 with mixed moments from f^{n,n+1,n+k}.
ResidualReport energy_residual_second(const FieldPair& f_nk, const DistributionField& f3_mid,
                                      const MeanField& high_rank2);

// Shared energy evaluation path behind 3.3 and 3.9.
ResidualReport energy_residual_core(EquationId id, const FieldPair& f_nk, const MeanField& adv,
                                    const MomentTensorField& P_mixed,
                                    const MomentTensorField& P3_mixed,
                                    const MeanField& high_rank2);

// Rank-3 equations of motion 3.13-3.19.  The rank-3 midpoint field supplies the
// moment tensors; means of orders that are not axes (m+1, n+2 in the gapped
// case) enter as closure fields on the rank-3 grid.  `top3` is
// <xi^{m+1}>_{n,n+1,m} at both pair instants; `mid3_mid` is
// <xi^{n+2}>_{n,n+1,m} at the midpoint and defaults to the coordinate of
// xi^{n+2} when that order is an axis (the k = 1 degeneration).
struct Rank3Inputs {
    FieldPair f3; // f^{n,n+1,m} pair (m = n+2 first group, m = n+1+k second)
    std::optional<MeanField> top3_minus;
    std::optional<MeanField> top3_plus;
    std::optional<MeanField> mid3_mid;
};
ResidualReport rank3_motion_residual(EquationId id, const Rank3Inputs& in);

// Pressure-divergence identity ladder 3.20, row lambda, on the contiguous
// base {n..n+lambda}.  Row 0 shares the 3.2 path; row 1 the 3.15 path.
ResidualReport divergence_identity_check(int lambda, const Rank3Inputs& in);
ResidualReport divergence_identity_check_lambda0(const FieldPair& f12,
                                                 const MeanField& closure_mid);

// Parity check with the mean-value reconstruction it licenses.
enum class ParityVerdict { even, odd_component_detected };
struct Theorem5Report {
    ParityVerdict verdict{};
    double max_asymmetry_rel = 0.0;
    std::optional<MeanField> reconstruction;    // the licensed quadrature of pi_top
    std::optional<ResidualReport> identity;     // 3.22: reconstruction vs reference
};

// f must live on the contiguous set {n,...,n+1+lambda} with the reflected
// axis grid symmetric about zero.  `pi_top` is pi_{n..n+lambda}
// <xi^{n+1+lambda}>_{n..n+lambda} (the integrand of the reconstruction); `reference`
// is an independently known <xi^{n+2+lambda}>_{n..n+lambda-1} to compare
// against.  Either may be omitted.  The theorem's alternative hypothesis
// P^{n+1+lambda} = const is an assertion the caller supplies: with
// `assume_constant_P` the reconstruction proceeds whatever the parity scan
// says.
Theorem5Report theorem5_check(const DistributionField& f, int lambda,
                              const MeanField* pi_top = nullptr,
                              const MeanField* reference = nullptr,
                              bool assume_constant_P = false);

// Parity tolerance of the evenness verdicts.
inline constexpr double kParityTol = 1e-10;

} // namespace kinchain
