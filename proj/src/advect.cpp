#include "kinchain/advect.hpp"

#include "kinchain/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace kinchain {

DistributionField sl_sweep(const DistributionField& f, int dim, std::span<const double> velocity,
                           double dt) {
    GridLayout layout = f.layout();
    if (dim < 0 || dim >= layout.ndims()) throw DomainError("sl_sweep: bad dim");
    if (static_cast<std::int64_t>(velocity.size()) != layout.size)
        throw DomainError("sl_sweep: velocity extent mismatch");
    const ScalarDim& sd = layout.dims[static_cast<std::size_t>(dim)];
    const std::int64_t n = sd.n;
    const std::int64_t stride = layout.strides[static_cast<std::size_t>(dim)];
    const double h = sd.h;
    const double domain = h * static_cast<double>(n - 1);

    double vmax = 0.0;
    for (double u : velocity) vmax = std::max(vmax, std::abs(u));
    if (vmax * std::abs(dt) > domain / 3.0)
        throw NumericalGuardError("sl_sweep: displacement " + std::to_string(vmax * dt) +
                                  " exceeds a third of the domain " + std::to_string(domain));

    // du/dxi along the swept dim, for the compressibility factor
    std::vector<double> dudx(static_cast<std::size_t>(layout.size));
    differentiate_dim(velocity, 1, 0, layout, dim, dudx);

    DistributionField out = f;
    const std::int64_t post = stride;
    const std::int64_t pre = layout.size / (n * post);

    std::vector<double> fline(static_cast<std::size_t>(n));
    std::vector<double> uline(static_cast<std::size_t>(n));
    std::vector<double> dline(static_cast<std::size_t>(n));
    auto clampi = [&](double p) { return std::clamp(p, 0.0, static_cast<double>(n - 1)); };

    for (std::int64_t a = 0; a < pre; ++a) {
        for (std::int64_t b = 0; b < post; ++b) {
            const std::int64_t base = a * n * post + b;
            for (std::int64_t i = 0; i < n; ++i) {
                std::size_t src = static_cast<std::size_t>(base + i * stride);
                fline[static_cast<std::size_t>(i)] = f.values[src];
                uline[static_cast<std::size_t>(i)] = velocity[src];
                dline[static_cast<std::size_t>(i)] = dudx[src];
            }
            for (std::int64_t i = 0; i < n; ++i) {
                double ui = uline[static_cast<std::size_t>(i)];
                double p_half = clampi(static_cast<double>(i) - 0.5 * dt * ui / h);
                double u_half = linear_interp_line(uline, 1, n, p_half);
                double p_dep = static_cast<double>(i) - dt * u_half / h;
                double val = cubic_interp_line(fline, 1, n, p_dep);
                double p_mid = clampi(0.5 * (static_cast<double>(i) + p_dep));
                double div_mid = linear_interp_line(dline, 1, n, p_mid);
                if (div_mid != 0.0) val *= std::exp(-dt * div_mid);
                out.values[static_cast<std::size_t>(base + i * stride)] = val;
            }
        }
    }
    return out;
}

namespace {

std::vector<double> velocity_from_mean(const MeanField& mf, int comp) {
    std::int64_t cells = mf.cells();
    std::vector<double> v(static_cast<std::size_t>(cells));
    for (std::int64_t c = 0; c < cells; ++c)
        v[static_cast<std::size_t>(c)] = mf.is_valid(c) ? mf.at(c, comp) : 0.0;
    return v;
}

// Half/full sweeps of every scalar dim of `axis`, advected by the matching
// component of `mf`.
DistributionField sweep_axis_mean(const DistributionField& f, int axis, const MeanField& mf,
                                  double dt) {
    GridLayout layout = f.layout();
    std::vector<int> dims = dims_of_axis(layout, axis);
    if (static_cast<int>(dims.size()) != mf.components)
        throw DomainError("step: mean field components do not match the swept axis");
    DistributionField cur = f;
    for (std::size_t a = 0; a < dims.size(); ++a)
        cur = sl_sweep(cur, dims[a], velocity_from_mean(mf, static_cast<int>(a)), dt);
    return cur;
}

// Sweeps of every scalar dim of `axis`, advected by the matching component
// coordinate of `coord_axis`.
DistributionField sweep_axis_coord(const DistributionField& f, int axis, int coord_axis,
                                   double dt) {
    GridLayout layout = f.layout();
    std::vector<int> dims = dims_of_axis(layout, axis);
    std::vector<int> cdims = dims_of_axis(layout, coord_axis);
    if (dims.size() != cdims.size()) throw DomainError("step: axis component mismatch");
    DistributionField cur = f;
    for (std::size_t a = 0; a < dims.size(); ++a) {
        std::vector<double> vel = coordinate_field(layout, cdims[a]);
        cur = sl_sweep(cur, dims[a], vel, dt);
    }
    return cur;
}

void require_mean_on(const MeanField& mf, const DistributionField& f, int order,
                     const char* what) {
    if (mf.order != order)
        throw DomainError(std::string(what) + ": mean field supplies order " +
                          std::to_string(mf.order) + ", need " + std::to_string(order));
    if (mf.base != f.set)
        throw DomainError(std::string(what) + ": mean field base " + mf.base.to_string() +
                          " does not match " + f.set.to_string());
    require_same_grid(mf.axes, f.axes);
}

} // namespace

DistributionField step_rank1(const DistributionField& f, const MeanField& mf, double dt) {
    if (f.set.rank() != 1) throw DomainError("step_rank1: rank-1 field required");
    require_mean_on(mf, f, f.set[0] + 1, "step_rank1");
    DistributionField out = sweep_axis_mean(f, 0, mf, dt);
    out.time = f.time + dt;
    return out;
}

DistributionField step_rank2_first_group(const DistributionField& f, const Closure& closure,
                                         double dt) {
    if (f.set.rank() != 2 || f.set[1] != f.set[0] + 1)
        throw DomainError("step_rank2_first_group: index set must be {n, n+1}, got " +
                          f.set.to_string());
    if (closure.supplied_order() != f.set[1] + 1)
        throw DomainError("step_rank2_first_group: closure supplies order " +
                          std::to_string(closure.supplied_order()) + ", need " +
                          std::to_string(f.set[1] + 1));

    DistributionField cur = sweep_axis_coord(f, 0, 1, 0.5 * dt);
    MeanField mf = closure.evaluate(cur, f.time + 0.5 * dt);
    require_mean_on(mf, cur, f.set[1] + 1, "step_rank2_first_group");
    cur = sweep_axis_mean(cur, 1, mf, dt);
    cur = sweep_axis_coord(cur, 0, 1, 0.5 * dt);
    cur.time = f.time + dt;
    return cur;
}

DistributionField step_rank2_second_group(const DistributionField& f, const MeanField& mf_low,
                                          const MeanField& mf_high, double dt) {
    if (f.set.rank() != 2 || f.set[1] - f.set[0] < 2)
        throw DomainError("step_rank2_second_group: index set must be {n, n+k} with k > 1, got " +
                          f.set.to_string());
    require_mean_on(mf_low, f, f.set[0] + 1, "step_rank2_second_group");
    require_mean_on(mf_high, f, f.set[1] + 1, "step_rank2_second_group");

    DistributionField cur = sweep_axis_mean(f, 0, mf_low, 0.5 * dt);
    cur = sweep_axis_mean(cur, 1, mf_high, dt);
    cur = sweep_axis_mean(cur, 0, mf_low, 0.5 * dt);
    cur.time = f.time + dt;
    return cur;
}

DistributionField step_rank3_first_group(const DistributionField& f, const Closure& closure,
                                         double dt) {
    if (f.set.rank() != 3 || f.set[1] != f.set[0] + 1 || f.set[2] != f.set[0] + 2)
        throw DomainError("step_rank3_first_group: index set must be {n, n+1, n+2}, got " +
                          f.set.to_string());
    if (closure.supplied_order() != f.set[2] + 1)
        throw DomainError("step_rank3_first_group: closure supplies order " +
                          std::to_string(closure.supplied_order()) + ", need " +
                          std::to_string(f.set[2] + 1));

    DistributionField cur = sweep_axis_coord(f, 0, 1, 0.5 * dt);
    cur = sweep_axis_coord(cur, 1, 2, 0.5 * dt);
    MeanField mf = closure.evaluate(cur, f.time + 0.5 * dt);
    require_mean_on(mf, cur, f.set[2] + 1, "step_rank3_first_group");
    cur = sweep_axis_mean(cur, 2, mf, dt);
    cur = sweep_axis_coord(cur, 1, 2, 0.5 * dt);
    cur = sweep_axis_coord(cur, 0, 1, 0.5 * dt);
    cur.time = f.time + dt;
    return cur;
}

} // namespace kinchain
