#include "kinchain/analytic.hpp"

#include "kinchain/stencil.hpp"

#include <cmath>

namespace kinchain {

double laguerre(int n, double z) {
    if (n < 0 || n > kMaxLaguerre)
        throw DomainError("laguerre: n must be in [0," + std::to_string(kMaxLaguerre) + "]");
    if (n == 0) return 1.0;
    double lm1 = 1.0;       // L_0
    double l = 1.0 - z;     // L_1
    for (int k = 1; k < n; ++k) {
        double lp1 = ((2.0 * k + 1.0 - z) * l - k * lm1) / (k + 1.0);
        lm1 = l;
        l = lp1;
    }
    return l;
}

std::vector<AxisGrid> oscillator_axes(const PhysicalParams& params, int points, double widths) {
    double lx = widths * params.sigma_x();
    double lv = widths * params.sigma_v();
    AxisSpec specs[2] = {{1, -lx, lx, points, 1}, {2, -lv, lv, points, 1}};
    return make_grid(specs);
}

DistributionField wigner_oscillator(int n, const PhysicalParams& params,
                                    std::vector<AxisGrid> axes) {
    params.validate();
    if (params.hbar <= 0.0) throw ConfigError("wigner_oscillator: hbar must be positive");
    if (axes.size() != 2 || axes[0].order != 1 || axes[1].order != 2)
        throw DomainError("wigner_oscillator: grid must cover axes {1,2}");
    if (axes[0].components() != 1 || axes[1].components() != 1)
        throw DomainError("wigner_oscillator: one component per order");

    const double m = params.mass, hbar = params.hbar, w = params.omega;
    const double pref = ((n % 2 == 0) ? 1.0 : -1.0) * m / (M_PI * hbar);
    const double scale = m / (hbar * w);
    return sample_field(KinematicIndexSet{1, 2}, std::move(axes),
                        [&](std::span<const double> c) {
                            double x = c[0], v = c[1];
                            double q = v * v + w * w * x * x;
                            return pref * std::exp(-scale * q) * laguerre(n, 2.0 * scale * q);
                        });
}

MeanField DeltaState::top_mean() const {
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(base.cells()), 1);
    return make_mean_field(top_order, base.set, base.axes, top_components, top_values, valid,
                           base.time);
}

MomentTensorField DeltaState::top_central_moment2(const MeanField& reference) const {
    if (reference.base != base.set || reference.components != top_components)
        throw DomainError("DeltaState: reference mean on wrong base");
    require_same_grid(reference.axes, base.axes);
    MomentTensorField P;
    P.order = 2;
    P.kinematic_orders = {top_order, top_order, 0};
    P.base = base.set;
    P.axes = base.axes;
    P.components = top_components;
    P.time = base.time;
    std::int64_t cells = base.cells();
    int d = top_components;
    P.values.assign(static_cast<std::size_t>(cells * d * d), 0.0);
    P.valid.assign(static_cast<std::size_t>(cells), 1);
    for (std::int64_t c = 0; c < cells; ++c) {
        if (!reference.is_valid(c)) {
            P.valid[static_cast<std::size_t>(c)] = 0;
            continue;
        }
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                double da = map_at(c, a) - reference.at(c, a);
                double db = map_at(c, b) - reference.at(c, b);
                P.values[static_cast<std::size_t>((c * d + a) * d + b)] =
                    da * db * base.values[static_cast<std::size_t>(c)];
            }
    }
    return P;
}

MomentTensorField DeltaState::top_central_moment2() const {
    return top_central_moment2(top_mean());
}

DeltaState rank3_oscillator_state(int n, const PhysicalParams& params,
                                  std::vector<AxisGrid> axes12) {
    params.validate();
    if (params.hbar <= 0.0) throw ConfigError("rank3_oscillator_state: hbar must be positive");
    if (axes12.size() != 2 || axes12[0].order != 1 || axes12[1].order != 2)
        throw DomainError("rank3_oscillator_state: base grid must cover axes {1,2}");

    const double w = params.omega;
    const double sx = params.sigma_x(), sv = params.sigma_v(), sa = params.sigma_a();
    const double pref = ((n % 2 == 0) ? 1.0 : -1.0) / (2.0 * M_PI * sx * sv);

    DeltaState state;
    state.top_order = 3;
    state.top_components = 1;
    // base(x, v) carries the prefactor with the map a = -w^2 x substituted
    state.base = sample_field(KinematicIndexSet{1, 2}, std::move(axes12),
                              [&](std::span<const double> c) {
                                  double x = c[0], v = c[1];
                                  double a = -w * w * x;
                                  double q = 0.5 * a * a / (sa * sa) + 0.5 * v * v / (sv * sv);
                                  return pref * std::exp(-q) * laguerre(n, 2.0 * q);
                              });
    GridLayout layout = state.base.layout();
    state.top_values.resize(static_cast<std::size_t>(layout.size));
    for (std::int64_t i = 0; i < layout.size; ++i)
        state.top_values[static_cast<std::size_t>(i)] = -w * w * layout.coord_at(0, i);
    return state;
}

DeltaState cold_state(const DistributionField& rho, const MeanField& u) {
    if (rho.set.rank() != 1) throw DomainError("cold_state: density must be rank 1");
    for (double v : rho.values)
        if (v < 0.0) throw DomainError("cold_state: density must be nonnegative");
    if (u.base != rho.set || u.order != rho.set[0] + 1)
        throw DomainError("cold_state: velocity map must supply order n+1 on the density grid");
    require_same_grid(u.axes, rho.axes);

    DeltaState state;
    state.base = rho;
    state.top_order = u.order;
    state.top_components = u.components;
    state.top_values = u.values;
    return state;
}

ResidualReport quantum_pressure_check(const DistributionField& f1, const MomentTensorField& P_q,
                                      const PhysicalParams& params) {
    if (f1.set.rank() != 1) throw DomainError("quantum_pressure_check: rank-1 density required");
    if (f1.components() != 1)
        throw DomainError("quantum_pressure_check: one component per order");
    if (P_q.base != f1.set) throw DomainError("quantum_pressure_check: tensor on wrong base");
    require_same_grid(P_q.axes, f1.axes);

    GridLayout layout = f1.layout();
    std::int64_t n = layout.size;
    const std::int64_t margin = 3;
    if (layout.dims[0].n <= 2 * margin)
        throw DomainError("quantum_pressure_check: grid too small for the interior window");

    for (std::int64_t i = margin; i < n - margin; ++i)
        if (!(f1.values[static_cast<std::size_t>(i)] > 0.0))
            throw DomainError("quantum_pressure_check: non-positive density inside the window");

    std::vector<double> sqrtf(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        sqrtf[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(f1.values[static_cast<std::size_t>(i)], 0.0));

    std::vector<double> d2s(static_cast<std::size_t>(n));
    second_derivative_dim(sqrtf, 1, 0, layout, 0, d2s);
    std::vector<double> bohm(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double s = sqrtf[static_cast<std::size_t>(i)];
        if (s > 0.0) bohm[static_cast<std::size_t>(i)] = d2s[static_cast<std::size_t>(i)] / s;
    }
    std::vector<double> rhs(static_cast<std::size_t>(n));
    differentiate_dim(bohm, 1, 0, layout, 0, rhs);
    double a2 = params.alpha() * params.alpha();
    for (double& v : rhs) v *= 2.0 * a2;

    std::vector<double> divP = divergence2(P_q, f1.set[0], 1);
    ResidualReport rep;
    rep.id = EquationId::quantum_pressure;
    rep.base = f1.set;
    rep.axes = f1.axes;
    rep.components = 1;
    rep.time = f1.time;
    rep.lhs.assign(static_cast<std::size_t>(n), 0.0);
    rep.rhs = rhs;
    rep.residual.assign(static_cast<std::size_t>(n), 0.0);
    rep.valid.assign(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = margin; i < n - margin; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        if (!P_q.is_valid(i)) continue;
        rep.valid[ii] = 1;
        rep.lhs[ii] = -divP[ii] / f1.values[ii];
        rep.residual[ii] = rep.lhs[ii] - rep.rhs[ii];
    }

    std::int64_t masked = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (!rep.valid[static_cast<std::size_t>(i)]) {
            ++masked;
            continue;
        }
        rep.max_abs = std::max(rep.max_abs, std::abs(rep.residual[static_cast<std::size_t>(i)]));
    }
    rep.mask_fraction = static_cast<double>(masked) / static_cast<double>(n);
    rep.residual_norm = weighted_l2(rep.residual, f1.values, rep.valid, layout, 1);
    return rep;
}

} // namespace kinchain
