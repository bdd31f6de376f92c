#include "kinchain/moments.hpp"

#include "kinchain/stencil.hpp"
#include "reduce.hpp"

#include <cmath>

namespace kinchain {

using detail::for_each_kept;
using detail::kept_axes;
using detail::reduced_dims_for;
using detail::subgrid_table;
using detail::SubgridTable;

namespace {

MomentTensorField make_moment(int order, std::array<int, 3> korders, KinematicIndexSet base,
                              std::vector<AxisGrid> axes, int d, std::vector<double> values,
                              std::vector<std::uint8_t> valid, double time) {
    MomentTensorField P;
    P.order = order;
    P.kinematic_orders = korders;
    P.base = std::move(base);
    P.axes = std::move(axes);
    P.components = d;
    P.values = std::move(values);
    P.valid = std::move(valid);
    P.time = time;
    return P;
}

void require_in_drop(const DistributionField& f, int o, const KinematicIndexSet& drop,
                     const char* what) {
    if (!f.set.contains(o))
        throw DomainError(std::string(what) + ": order " + std::to_string(o) + " not in " +
                          f.set.to_string());
    if (!drop.contains(o))
        throw DomainError(std::string(what) + ": deviation order " + std::to_string(o) +
                          " must be integrated out (missing from drop set)");
}

} // namespace

MomentTensorField central_moment2(const DistributionField& f, int a, int b,
                                  const KinematicIndexSet& drop) {
    require_in_drop(f, a, drop, "central_moment2");
    require_in_drop(f, b, drop, "central_moment2");
    if (!drop.subset_of(f.set)) throw DomainError("central_moment2: drop not a subset");

    KinematicIndexSet base = f.set.minus(drop);
    MeanField ma = mean_kinematic(f, a, drop.minus(KinematicIndexSet{a}));
    MeanField mb = (b == a) ? ma : mean_kinematic(f, b, drop.minus(KinematicIndexSet{b}));

    GridLayout layout = f.layout();
    std::vector<int> a_dims = dims_of_axis(layout, f.set.axis_of(a));
    std::vector<int> b_dims = dims_of_axis(layout, f.set.axis_of(b));
    int d = static_cast<int>(a_dims.size());

    std::vector<int> tracked = a_dims;
    tracked.insert(tracked.end(), b_dims.begin(), b_dims.end());
    std::vector<int> reduced = reduced_dims_for(layout, f.set, drop);
    SubgridTable table = subgrid_table(layout, reduced, tracked);

    std::vector<AxisGrid> out_ax = kept_axes(f.axes, drop);
    GridLayout out_layout = GridLayout::of(out_ax);
    std::int64_t ncells = out_layout.size;

    std::vector<double> vals(static_cast<std::size_t>(ncells * d * d), 0.0);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(ncells));
    std::vector<double> buf(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t cell, std::int64_t base_off) {
        bool ok = ma.is_valid(cell) && mb.is_valid(cell);
        valid[static_cast<std::size_t>(cell)] = ok ? 1 : 0;
        if (!ok) return;
        for (int alpha = 0; alpha < d; ++alpha) {
            double mean_a = ma.at(cell, alpha);
            const auto& ca = table.coords[static_cast<std::size_t>(alpha)];
            for (int beta = 0; beta < d; ++beta) {
                double mean_b = mb.at(cell, beta);
                const auto& cb = table.coords[static_cast<std::size_t>(d + beta)];
                for (std::size_t e = 0; e < table.offsets.size(); ++e)
                    buf[e] = table.weights[e] * (ca[e] - mean_a) * (cb[e] - mean_b) *
                             f.values[static_cast<std::size_t>(base_off + table.offsets[e])];
                vals[static_cast<std::size_t>((cell * d + alpha) * d + beta)] =
                    pairwise_sum(buf);
            }
        }
    });
    return make_moment(2, {a, b, 0}, std::move(base), std::move(out_ax), d, std::move(vals),
                       std::move(valid), f.time);
}

MomentTensorField central_moment2_virtual(const DistributionField& f, int a, const MeanField& mf_b,
                                          const KinematicIndexSet& drop) {
    require_in_drop(f, a, drop, "central_moment2_virtual");
    if (mf_b.base != f.set)
        throw DomainError("central_moment2_virtual: the virtual mean must condition on the full "
                          "index set " +
                          f.set.to_string());
    require_same_grid(mf_b.axes, f.axes);
    if (!drop.subset_of(f.set)) throw DomainError("central_moment2_virtual: drop not a subset");

    KinematicIndexSet base = f.set.minus(drop);
    MeanField ma = mean_kinematic(f, a, drop.minus(KinematicIndexSet{a}));
    MeanField mb = nested_average(mf_b, f, drop);

    GridLayout layout = f.layout();
    std::vector<int> a_dims = dims_of_axis(layout, f.set.axis_of(a));
    int d = static_cast<int>(a_dims.size());

    std::vector<int> reduced = reduced_dims_for(layout, f.set, drop);
    SubgridTable table = subgrid_table(layout, reduced, a_dims);

    std::vector<AxisGrid> out_ax = kept_axes(f.axes, drop);
    GridLayout out_layout = GridLayout::of(out_ax);
    std::int64_t ncells = out_layout.size;

    std::vector<double> vals(static_cast<std::size_t>(ncells * d * d), 0.0);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(ncells));
    std::vector<double> buf(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t cell, std::int64_t base_off) {
        bool ok = ma.is_valid(cell) && mb.is_valid(cell);
        valid[static_cast<std::size_t>(cell)] = ok ? 1 : 0;
        if (!ok) return;
        for (int alpha = 0; alpha < d; ++alpha) {
            double mean_a = ma.at(cell, alpha);
            const auto& ca = table.coords[static_cast<std::size_t>(alpha)];
            for (int beta = 0; beta < d; ++beta) {
                double mean_b = mb.at(cell, beta);
                std::size_t kept_count = 0;
                for (std::size_t e = 0; e < table.offsets.size(); ++e) {
                    std::int64_t src = base_off + table.offsets[e];
                    if (!mf_b.is_valid(src)) continue;
                    buf[kept_count++] = table.weights[e] * (ca[e] - mean_a) *
                                        (mf_b.at(src, beta) - mean_b) *
                                        f.values[static_cast<std::size_t>(src)];
                }
                vals[static_cast<std::size_t>((cell * d + alpha) * d + beta)] =
                    pairwise_sum(std::span<const double>(buf.data(), kept_count));
            }
        }
    });
    return make_moment(2, {a, mf_b.order, 0}, std::move(base), std::move(out_ax), d,
                       std::move(vals), std::move(valid), f.time);
}

MomentTensorField central_moment3(const DistributionField& f, int a, int b, int c,
                                  const KinematicIndexSet& drop) {
    require_in_drop(f, a, drop, "central_moment3");
    require_in_drop(f, b, drop, "central_moment3");
    require_in_drop(f, c, drop, "central_moment3");
    if (!drop.subset_of(f.set)) throw DomainError("central_moment3: drop not a subset");

    KinematicIndexSet base = f.set.minus(drop);
    MeanField ma = mean_kinematic(f, a, drop.minus(KinematicIndexSet{a}));
    MeanField mb = (b == a) ? ma : mean_kinematic(f, b, drop.minus(KinematicIndexSet{b}));
    MeanField mc = (c == a) ? ma
                   : (c == b) ? mb
                              : mean_kinematic(f, c, drop.minus(KinematicIndexSet{c}));

    GridLayout layout = f.layout();
    std::vector<int> a_dims = dims_of_axis(layout, f.set.axis_of(a));
    std::vector<int> b_dims = dims_of_axis(layout, f.set.axis_of(b));
    std::vector<int> c_dims = dims_of_axis(layout, f.set.axis_of(c));
    int d = static_cast<int>(a_dims.size());

    std::vector<int> tracked = a_dims;
    tracked.insert(tracked.end(), b_dims.begin(), b_dims.end());
    tracked.insert(tracked.end(), c_dims.begin(), c_dims.end());
    std::vector<int> reduced = reduced_dims_for(layout, f.set, drop);
    SubgridTable table = subgrid_table(layout, reduced, tracked);

    std::vector<AxisGrid> out_ax = kept_axes(f.axes, drop);
    GridLayout out_layout = GridLayout::of(out_ax);
    std::int64_t ncells = out_layout.size;

    std::vector<double> vals(static_cast<std::size_t>(ncells * d * d * d), 0.0);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(ncells));
    std::vector<double> buf(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t cell, std::int64_t base_off) {
        bool ok = ma.is_valid(cell) && mb.is_valid(cell) && mc.is_valid(cell);
        valid[static_cast<std::size_t>(cell)] = ok ? 1 : 0;
        if (!ok) return;
        for (int alpha = 0; alpha < d; ++alpha) {
            const auto& ca = table.coords[static_cast<std::size_t>(alpha)];
            double mean_a = ma.at(cell, alpha);
            for (int beta = 0; beta < d; ++beta) {
                const auto& cb = table.coords[static_cast<std::size_t>(d + beta)];
                double mean_b = mb.at(cell, beta);
                for (int gamma = 0; gamma < d; ++gamma) {
                    const auto& cc = table.coords[static_cast<std::size_t>(2 * d + gamma)];
                    double mean_c = mc.at(cell, gamma);
                    for (std::size_t e = 0; e < table.offsets.size(); ++e)
                        buf[e] =
                            table.weights[e] * (ca[e] - mean_a) * (cb[e] - mean_b) *
                            (cc[e] - mean_c) *
                            f.values[static_cast<std::size_t>(base_off + table.offsets[e])];
                    vals[static_cast<std::size_t>(((cell * d + alpha) * d + beta) * d + gamma)] =
                        pairwise_sum(buf);
                }
            }
        }
    });
    return make_moment(3, {a, b, c}, std::move(base), std::move(out_ax), d, std::move(vals),
                       std::move(valid), f.time);
}

DistributionField raw_moment(const DistributionField& f, std::span<const RawFactor> factors,
                             const KinematicIndexSet& drop) {
    if (factors.size() > 3) throw DomainError("raw_moment: at most 3 factors");
    GridLayout layout = f.layout();
    std::vector<int> factor_dims;
    for (const RawFactor& fac : factors) {
        int axis = f.set.axis_of(fac.order);
        std::vector<int> dims = dims_of_axis(layout, axis);
        if (fac.component < 0 || fac.component >= static_cast<int>(dims.size()))
            throw DomainError("raw_moment: component out of range");
        factor_dims.push_back(dims[static_cast<std::size_t>(fac.component)]);
    }
    DistributionField weighted = f;
    for (int dim : factor_dims)
        for (std::int64_t flat = 0; flat < layout.size; ++flat)
            weighted.values[static_cast<std::size_t>(flat)] *= layout.coord_at(dim, flat);
    return marginalize(weighted, drop);
}

std::vector<double> divergence2(const MomentTensorField& P, int order, int contracted_slot) {
    GridLayout layout = P.layout();
    int axis = P.base.axis_of(order);
    std::vector<int> dims = dims_of_axis(layout, axis);
    int d = P.components;
    if (static_cast<int>(dims.size()) != d)
        throw DomainError("divergence2: component mismatch along axis");
    if (P.order != 2) throw DomainError("divergence2: second-order tensor required");
    if (contracted_slot != 0 && contracted_slot != 1)
        throw DomainError("divergence2: slot must be 0 or 1");

    std::vector<double> out(static_cast<std::size_t>(layout.size * d), 0.0);
    std::vector<double> deriv(static_cast<std::size_t>(layout.size));
    for (int alpha = 0; alpha < d; ++alpha) {
        for (int beta = 0; beta < d; ++beta) {
            std::int64_t offset = contracted_slot == 1
                                      ? static_cast<std::int64_t>(alpha) * d + beta
                                      : static_cast<std::int64_t>(beta) * d + alpha;
            differentiate_dim(P.values, static_cast<std::int64_t>(d) * d, offset, layout,
                              dims[static_cast<std::size_t>(beta)], deriv);
            for (std::int64_t flat = 0; flat < layout.size; ++flat)
                out[static_cast<std::size_t>(flat * d + alpha)] +=
                    deriv[static_cast<std::size_t>(flat)];
        }
    }
    return out;
}

} // namespace kinchain
